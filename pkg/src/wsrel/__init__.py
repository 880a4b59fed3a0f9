"""Reliability and availability analysis for web-service workflows.

Workflows are finite state machines ending in ``C`` (correct) or ``F``
(fault); availability comes from MTBF/MTTR figures or up/down event logs.
Every analytic path has a Monte Carlo counterpart in :mod:`wsrel.simulator`.
"""
from .absorption import solve_absorption, solve_absorption_iterative
from .availability import (
    ServiceProfile,
    availability_from_downtime,
    availability_from_mtbf_mttr,
    failure_intensity_from_availability,
    intensity_from_reliability,
    reliability_from_intensity,
)
from .composition import CompositionSet, evaluate_composition
from .fsm_model import AbsorptionResult, Edge, ReliabilityFsm, node_fault_factor, validate
from .monitor import OperationalProfile, average_availability, limiting_availability_estimate, monitoring_function

__version__ = "0.1.0"
