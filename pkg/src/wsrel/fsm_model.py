"""Reliability FSM: transient nodes, probability-weighted edges, and the two
absorbing exits ``C`` (correct output) and ``F`` (fault).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

CORRECT = "C"
FAULT = "F"
ABSORBING = (CORRECT, FAULT)

ROW_SUM_TOL = 1e-9


class UnknownNodeError(KeyError):
    pass


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    probability: float


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.location}: {self.message}"


@dataclass(frozen=True)
class ReliabilityFsm:
    """Immutable workflow model.

    ``nodes`` holds transient labels only; ``C`` and ``F`` are implicit.
    Construction does not validate; call :func:`validate` for that.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    start: str

    def __init__(self, nodes: Iterable[str], edges: Iterable[Edge], start: str):
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "start", start)

    def outgoing(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.source == node]

    def ordered_nodes(self) -> list[str]:
        """Sorted transient labels; fixes matrix row order everywhere."""
        return sorted(set(self.nodes))


@dataclass(frozen=True)
class AbsorptionResult:
    """Per-node ``(p_correct, p_fault)`` pairs plus the start node's figures."""

    per_node: Mapping[str, tuple[float, float]]
    start: str
    iterations: int | None = field(default=None, compare=False)

    @property
    def reliability(self) -> float:
        return self.per_node[self.start][0]

    @property
    def fault_probability(self) -> float:
        return self.per_node[self.start][1]

    @property
    def is_reliable(self) -> bool:
        """Start node more likely to end in C than in F."""
        return self.reliability > self.fault_probability


def node_fault_factor(model: ReliabilityFsm, node: str) -> float:
    """Probability on the ``node -> F`` edge, i.e. ``1 - R_i`` for that node."""
    if node not in model.nodes:
        raise UnknownNodeError(node)
    for e in model.edges:
        if e.source == node and e.target == FAULT:
            return e.probability
    return 0.0


def validate(model: ReliabilityFsm) -> list[Violation]:
    """Return every invariant breach in ``model``; empty means valid."""
    out: list[Violation] = []
    nodes = list(model.nodes)

    seen: set[str] = set()
    for n in nodes:
        if not isinstance(n, str) or not n:
            out.append(Violation("node-label", repr(n), "node labels must be nonempty text"))
            continue
        if n in ABSORBING:
            out.append(Violation("reserved-label", n, f"'{n}' is reserved for an absorbing state"))
        if n in seen:
            out.append(Violation("duplicate-node", n, "node declared more than once"))
        seen.add(n)
    transient = seen - set(ABSORBING)

    if model.start not in transient:
        out.append(Violation("start-node", str(model.start), "start is not a transient node"))

    pairs: set[tuple[str, str]] = set()
    rows: dict[str, float] = defaultdict(float)
    succ: dict[str, set[str]] = defaultdict(set)
    for e in model.edges:
        loc = f"edge {e.source}->{e.target}"
        p = e.probability
        in_range = isinstance(p, (int, float)) and 0.0 <= p <= 1.0
        if not in_range:
            out.append(Violation("probability-range", loc, f"probability {p!r} outside [0, 1]"))
        if e.source in ABSORBING:
            out.append(Violation("absorbing-source", loc, f"no edges may leave absorbing state {e.source}"))
            continue
        if e.source not in transient:
            out.append(Violation("unknown-node", loc, f"source '{e.source}' is not a declared node"))
            continue
        if e.target not in transient and e.target not in ABSORBING:
            out.append(Violation("unknown-node", loc, f"target '{e.target}' is not a declared node"))
            continue
        if (e.source, e.target) in pairs:
            out.append(Violation("duplicate-edge", loc, "more than one edge for this ordered pair"))
        pairs.add((e.source, e.target))
        if in_range:
            rows[e.source] += p
            if p > 0:
                succ[e.source].add(e.target)

    for n in sorted(transient):
        total = rows.get(n, 0.0)
        if abs(total - 1.0) > ROW_SUM_TOL:
            out.append(Violation("row-sum", n, f"row sum != 1 at {n} (got {total!r})"))

    # reverse reachability from the absorbing states over positive edges
    pred: dict[str, set[str]] = defaultdict(set)
    for s, ts in succ.items():
        for t in ts:
            pred[t].add(s)
    reach: set[str] = set()
    frontier = [CORRECT, FAULT]
    while frontier:
        cur = frontier.pop()
        for p in pred.get(cur, ()):
            if p not in reach:
                reach.add(p)
                frontier.append(p)
    for n in sorted(transient - reach):
        out.append(Violation("absorbing-path", n, f"no absorbing path from {n}"))

    return out
