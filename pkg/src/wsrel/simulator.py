"""Monte Carlo oracle: random walks on the FSM and alternating renewal logs.

Randomness comes from a stateless counter-based generator. Draw ``s`` of
trial ``k`` is a pure function of ``(seed, stream, k, s)``: trial ``k``
runs the SplitMix64 sequence whose state is keyed on ``(seed, stream, k)``.
Results therefore do not depend on chunking or evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fsm_model import CORRECT, FAULT, ReliabilityFsm, validate
from .monitor import OperationalProfile

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1

STREAM_WALK = 1
STREAM_RENEWAL = 2
STREAM_ENSEMBLE = 3

CHUNK = 1 << 17


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def trial_keys(seed: int, stream: int, trials: np.ndarray) -> np.ndarray:
    """SplitMix64 state for each trial index."""
    with np.errstate(over="ignore"):
        base = _mix(np.array([(seed + stream * 0x632BE59BD9B4E019) & _MASK64], dtype=np.uint64))
        return _mix(base ^ ((trials.astype(np.uint64) + np.uint64(1)) * _GAMMA))


def uniforms(keys: np.ndarray, step: int | np.ndarray) -> np.ndarray:
    """Uniform [0, 1) draw number ``step`` for each trial key."""
    with np.errstate(over="ignore"):
        s = np.asarray(step, dtype=np.uint64)
        z = _mix(keys + (s + np.uint64(1)) * _GAMMA)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def exponentials(keys: np.ndarray, step: int | np.ndarray, mean: float) -> np.ndarray:
    return -mean * np.log1p(-uniforms(keys, step))


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    max_steps: int = 10_000

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class WalkEstimate:
    p_correct_hat: float
    standard_error: float
    censored_walks: int
    trials: int


def standard_error(p_hat: float, trials: int) -> float:
    return math.sqrt(p_hat * (1.0 - p_hat) / trials)


def walk_absorption(model: ReliabilityFsm, cfg: SimConfig) -> WalkEstimate:
    """Estimate P(start ends in C) from ``cfg.trials`` independent walks.

    Walks still transient after ``cfg.max_steps`` are censored and count
    as faults.
    """
    problems = validate(model)
    if problems:
        raise ValueError(f"model failed validation: {problems[0]}")
    order = model.ordered_nodes()
    index = {n: i for i, n in enumerate(order)}
    n = len(order)
    c_col, f_col = n, n + 1
    P = np.zeros((n, n + 2))
    for e in model.edges:
        j = c_col if e.target == CORRECT else f_col if e.target == FAULT else index[e.target]
        P[index[e.source], j] += e.probability
    cum = np.cumsum(P, axis=1)
    last_pos = np.array([int(np.nonzero(row > 0)[0][-1]) for row in P])
    start = index[model.start]

    correct = 0
    censored = 0
    for lo in range(0, cfg.trials, CHUNK):
        ids = np.arange(lo, min(lo + CHUNK, cfg.trials))
        keys = trial_keys(cfg.seed, STREAM_WALK, ids)
        cur = np.full(ids.size, start, dtype=np.int64)
        live = np.arange(ids.size)
        for step in range(cfg.max_steps):
            u = uniforms(keys[live], step)
            rows = cur[live]
            nxt = (cum[rows] <= u[:, None]).sum(axis=1)
            nxt = np.minimum(nxt, last_pos[rows])
            cur[live] = nxt
            live = live[nxt < n]
            if live.size == 0:
                break
        censored += int(live.size)
        correct += int(np.count_nonzero(cur == c_col))
    p = correct / cfg.trials
    return WalkEstimate(p, standard_error(p, cfg.trials), censored, cfg.trials)


def _check_positive(**kw: float) -> None:
    for name, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v!r}")


def simulate_renewal(
    mtbf_hours: float,
    mttr_hours: float,
    horizon_hours: float,
    seed: int,
    service_name: str = "simulated",
) -> OperationalProfile:
    """Alternating exponential up/down log starting up at t=0, cut at the horizon."""
    _check_positive(mtbf_hours=mtbf_hours, mttr_hours=mttr_hours, horizon_hours=horizon_hours)
    key = trial_keys(seed, STREAM_RENEWAL, np.array([0]))
    times = [0.0]
    t = 0.0
    step = 0
    block = max(64, int(2.2 * horizon_hours / (mtbf_hours + mttr_hours)) + 64)
    while True:
        steps = np.arange(step, step + block, dtype=np.uint64)
        u = uniforms(np.repeat(key, block), steps)
        means = np.where(steps % np.uint64(2) == 0, mtbf_hours, mttr_hours)
        durations = -means * np.log1p(-u)
        ends = t + np.cumsum(durations)
        cut = int(np.searchsorted(ends, horizon_hours, side="left"))
        for x in ends[:cut]:
            if x > times[-1]:
                times.append(float(x))
            elif len(times) > 1:
                # zero-length interval from a degenerate draw; merge it away
                times.pop()
        if cut < block:
            break
        t = float(ends[-1])
        step += block
    events = [(x, i % 2 == 0) for i, x in enumerate(times)]
    return OperationalProfile(service_name, events, horizon_hours)


def ensemble_availability(mtbf_hours: float, mttr_hours: float, t: float, trials: int, seed: int) -> float:
    """Fraction of independent renewal trajectories that are up at time ``t``."""
    _check_positive(mtbf_hours=mtbf_hours, mttr_hours=mttr_hours)
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    up_count = 0
    for lo in range(0, trials, CHUNK):
        ids = np.arange(lo, min(lo + CHUNK, trials))
        keys = trial_keys(seed, STREAM_ENSEMBLE, ids)
        clock = np.zeros(ids.size)
        live = np.arange(ids.size)
        step = 0
        # parity of completed transitions for each trajectory
        flips = np.zeros(ids.size, dtype=np.int64)
        while live.size:
            mean = mtbf_hours if step % 2 == 0 else mttr_hours
            nxt = clock[live] + exponentials(keys[live], step, mean)
            moved = nxt <= t
            clock[live[moved]] = nxt[moved]
            flips[live[moved]] += 1
            live = live[moved]
            step += 1
        up_count += int(np.count_nonzero(flips % 2 == 0))
    return up_count / trials
