"""Availability from an up/down event log.

A state change takes effect exactly at its timestamp, so the state is
constant on each half-open interval ``[t_i, t_{i+1})``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable

UP = True
DOWN = False


class ProfileError(ValueError):
    def __init__(self, rule: str, message: str, row: int | None = None):
        self.rule = rule
        self.row = row
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}[{rule}] {message}")


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class OperationalProfile:
    """Up/down trajectory of one service over ``[0, horizon]``.

    ``events`` is a tuple of ``(timestamp_hours, is_up)`` pairs.
    """

    service_name: str
    events: tuple[tuple[float, bool], ...]
    horizon: float

    def __init__(self, service_name: str, events: Iterable[tuple[float, bool]], horizon: float):
        evs = tuple((float(t), bool(s)) for t, s in events)
        object.__setattr__(self, "service_name", service_name)
        object.__setattr__(self, "events", evs)
        object.__setattr__(self, "horizon", float(horizon))
        check_events(evs, self.horizon)

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.events]


def check_events(events: tuple[tuple[float, bool], ...], horizon: float) -> None:
    """Raise :class:`ProfileError` on the first broken profile invariant.

    Row numbers are 1-based positions in ``events``.
    """
    if not events:
        raise ProfileError("initial-state", "profile has no events")
    if events[0][0] != 0.0:
        raise ProfileError("initial-state", "first event must be at timestamp 0", row=1)
    for i in range(1, len(events)):
        (t0, s0), (t1, s1) = events[i - 1], events[i]
        if not t1 > t0:
            raise ProfileError("increasing-timestamps", f"timestamp {t1!r} does not exceed {t0!r}", row=i + 1)
        if s1 == s0:
            raise ProfileError("alternation", f"state {'up' if s1 else 'down'} repeats", row=i + 1)
    if not (math.isfinite(horizon) and horizon > 0):
        raise ProfileError("horizon", f"horizon must be positive and finite, got {horizon!r}")
    if horizon < events[-1][0]:
        raise ProfileError("horizon", f"horizon {horizon!r} precedes last event {events[-1][0]!r}")


def monitoring_function(profile: OperationalProfile, t: float) -> int:
    """1 if the service is up at ``t``, else 0."""
    if not 0 <= t <= profile.horizon:
        raise OutOfRangeError(f"t={t!r} outside [0, {profile.horizon!r}]")
    i = bisect.bisect_right(profile.times, t) - 1
    return 1 if profile.events[i][1] else 0


def uptime_between(profile: OperationalProfile, a: float, b: float) -> float:
    """Exact up time inside ``[a, b]`` for ``0 <= a <= b <= horizon``."""
    evs = profile.events
    total = 0.0
    for i, (t, up) in enumerate(evs):
        end = evs[i + 1][0] if i + 1 < len(evs) else profile.horizon
        if not up:
            continue
        lo, hi = max(t, a), min(end, b)
        if hi > lo:
            total += hi - lo
    return total


def downtime_between(profile: OperationalProfile, a: float, b: float) -> float:
    return (b - a) - uptime_between(profile, a, b)


def average_availability(profile: OperationalProfile, c: float) -> float:
    """Fraction of ``[0, c]`` spent up (exact piecewise-constant integral)."""
    if not 0 < c <= profile.horizon:
        raise OutOfRangeError(f"window c={c!r} outside (0, {profile.horizon!r}]")
    return min(1.0, max(0.0, uptime_between(profile, 0.0, c) / c))


def limiting_availability_estimate(profile: OperationalProfile) -> tuple[float, list[tuple[float, float]]]:
    """Full-horizon average plus averages on windows ``horizon / 2**k``.

    Windows shrink until they drop below the first gap between events (or,
    for a single-event log, stop after the full horizon). The series is
    returned in increasing ``c`` so convergence reads left to right.
    """
    h = profile.horizon
    floor_c = profile.events[1][0] if len(profile.events) > 1 else h
    windows = []
    c = h
    while c >= floor_c and len(windows) < 64:
        windows.append((c, average_availability(profile, c)))
        c /= 2.0
    if not windows:
        windows.append((h, average_availability(profile, h)))
    windows.reverse()
    return windows[-1][1], windows
