"""Availability over a web-service composition set."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .availability import DomainError, ServiceProfile, availability_from_mtbf_mttr
from .monitor import OperationalProfile, downtime_between, uptime_between

SOURCE_MTBF = "mtbf_mttr"
SOURCE_PROFILE = "operational_profile"


class CompositionError(ValueError):
    pass


@dataclass(frozen=True)
class CompositionSet:
    name: str
    services: tuple[ServiceProfile, ...]

    def __init__(self, name: str, services: Sequence[ServiceProfile]):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "services", tuple(services))
        if not self.services:
            raise CompositionError(f"composition set {name!r} has no services")
        names = [s.name for s in self.services]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise CompositionError(f"duplicate service name(s) in {name!r}: {', '.join(dupes)}")


@dataclass(frozen=True)
class CompositionReport:
    name: str
    per_service: dict[str, float]
    sources: dict[str, str]
    paper_sum: float
    mean: float
    series_product: float


def availability_from_uptime_expectations(up_hours: float, down_hours: float) -> float:
    if up_hours < 0 or down_hours < 0:
        raise DomainError("uptime and downtime must be non-negative")
    if up_hours + down_hours <= 0:
        raise DomainError("uptime + downtime must be positive")
    return up_hours / (up_hours + down_hours)


def profile_availability(profile: OperationalProfile) -> float:
    h = profile.horizon
    return availability_from_uptime_expectations(uptime_between(profile, 0.0, h), downtime_between(profile, 0.0, h))


def evaluate_composition(
    comp: CompositionSet,
    operational: Mapping[str, OperationalProfile] | None = None,
) -> CompositionReport:
    """Per-service availability and the three aggregates.

    A service with an entry in ``operational`` is scored from its log's
    up/down totals instead of its MTBF/MTTR.
    """
    if not comp.services:
        raise CompositionError("empty composition set")
    operational = operational or {}
    per: dict[str, float] = {}
    sources: dict[str, str] = {}
    for s in comp.services:
        if s.name in operational:
            per[s.name] = profile_availability(operational[s.name])
            sources[s.name] = SOURCE_PROFILE
        else:
            per[s.name] = availability_from_mtbf_mttr(s)
            sources[s.name] = SOURCE_MTBF
    values = list(per.values())
    total = math.fsum(values)
    return CompositionReport(
        name=comp.name,
        per_service=per,
        sources=sources,
        paper_sum=total,
        mean=total / len(values),
        series_product=math.prod(sorted(values)),  # sorted: order-independent rounding
    )
