"""Closed-form availability and reliability formulas.

All times are hours; failure intensities are per hour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

HOURS_PER_YEAR = 365 * 24


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceProfile:
    name: str
    mtbf_hours: float
    mttr_hours: float

    def __post_init__(self) -> None:
        if not (self.mtbf_hours > 0 and math.isfinite(self.mtbf_hours)):
            raise DomainError(f"{self.name}: MTBF must be positive, got {self.mtbf_hours!r}")
        if not (self.mttr_hours >= 0 and math.isfinite(self.mttr_hours)):
            raise DomainError(f"{self.name}: MTTR must be non-negative, got {self.mttr_hours!r}")


@dataclass(frozen=True)
class FailureIntensity:
    value: float

    def __post_init__(self) -> None:
        if not self.value >= 0:
            raise DomainError(f"failure intensity must be non-negative, got {self.value!r}")


def years_to_hours(years: float) -> float:
    return years * HOURS_PER_YEAR


def availability_from_downtime(tm: float, lambda_f: float) -> float:
    """``1 / (1 + tm * lambda_f)`` with ``tm`` the mean downtime per failure."""
    if not tm > 0:
        raise DomainError(f"tm must be > 0, got {tm!r}")
    if not lambda_f >= 0:
        raise DomainError(f"lambda_f must be >= 0, got {lambda_f!r}")
    return 1.0 / (1.0 + tm * lambda_f)


def failure_intensity_from_availability(tm: float, a: float) -> float:
    if not tm > 0:
        raise DomainError(f"tm must be > 0, got {tm!r}")
    if not 0 < a <= 1:
        raise DomainError(f"availability must be in (0, 1], got {a!r}")
    return (1.0 - a) / (tm * a)


def reliability_from_intensity(lam: float, t: float) -> float:
    """``exp(-lam * t)``."""
    if not lam >= 0:
        raise DomainError(f"lambda must be >= 0, got {lam!r}")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    return math.exp(-lam * t)


def intensity_from_reliability(r: float, t: float) -> float:
    if not 0 < r <= 1:
        raise DomainError(f"reliability must be in (0, 1], got {r!r}")
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    return -math.log(r) / t


def availability_from_mtbf_mttr(profile: ServiceProfile) -> float:
    return profile.mtbf_hours / (profile.mtbf_hours + profile.mttr_hours)


def intensity_from_mtbf(mtbf_hours: float) -> float:
    """Bridge helper (extension): constant-rate failure intensity ``1/MTBF``.

    Lets MTBF-based profiles feed :func:`availability_from_downtime`.
    """
    if not mtbf_hours > 0:
        raise DomainError(f"MTBF must be > 0, got {mtbf_hours!r}")
    return 1.0 / mtbf_hours


def truncate_percent(fraction: float, places: int = 4) -> str:
    """Render ``fraction`` as a percent truncated (not rounded) to ``places``.

    Uses the exact binary value of the float, so 0.99997256 -> ``99.9972``.
    """
    pct = Decimal(fraction) * 100
    return str(pct.quantize(Decimal(1).scaleb(-places), rounding=ROUND_DOWN))
