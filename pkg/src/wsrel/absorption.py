"""Absorption probabilities into C and F for every transient node.

Both solvers work on the system ``x = Q x + b`` where ``Q`` is the
transient-to-transient block and ``b`` the column into the absorbing state.
"""
from __future__ import annotations

import numpy as np

from .fsm_model import CORRECT, FAULT, AbsorptionResult, ReliabilityFsm

DENSE_NODE_CAP = 2000
PIVOT_EPS = 1e-14


class SolverError(RuntimeError):
    pass


class SingularSystemError(SolverError):
    pass


class DimensionError(SolverError):
    pass


class NonConvergenceError(SolverError):
    pass


def transition_blocks(model: ReliabilityFsm) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Return ``(order, Q, B)`` with ``B[:, 0]`` into C and ``B[:, 1]`` into F."""
    order = model.ordered_nodes()
    index = {n: i for i, n in enumerate(order)}
    n = len(order)
    Q = np.zeros((n, n))
    B = np.zeros((n, 2))
    for e in model.edges:
        i = index[e.source]
        if e.target == CORRECT:
            B[i, 0] += e.probability
        elif e.target == FAULT:
            B[i, 1] += e.probability
        else:
            Q[i, index[e.target]] += e.probability
    return order, Q, B


def gauss_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    ``b`` may hold several right-hand sides as columns. Inputs are copied.
    """
    a = np.array(A, dtype=float)
    x = np.array(b, dtype=float)
    n = a.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < PIVOT_EPS:
            raise SingularSystemError(f"zero pivot in column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(factors, a[k, k:])
        x[k + 1:] -= np.outer(factors, x[k]) if x.ndim == 2 else factors * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def _result(order: list[str], X: np.ndarray, start: str, iterations: int | None = None) -> AbsorptionResult:
    X = np.clip(X, 0.0, 1.0)
    per_node = {n: (float(X[i, 0]), float(X[i, 1])) for i, n in enumerate(order)}
    return AbsorptionResult(per_node=per_node, start=start, iterations=iterations)


def solve_absorption(model: ReliabilityFsm, max_nodes: int = DENSE_NODE_CAP) -> AbsorptionResult:
    order, Q, B = transition_blocks(model)
    if len(order) > max_nodes:
        raise DimensionError(
            f"{len(order)} transient nodes exceed the dense-solve cap of {max_nodes}; "
            "use the iterative solver"
        )
    X = gauss_solve(np.eye(len(order)) - Q, B)
    return _result(order, X, model.start)


def solve_absorption_iterative(model: ReliabilityFsm, max_iter: int = 100_000, tol: float = 1e-12) -> AbsorptionResult:
    """Fixed-point iteration from the zero vector.

    Iterate ``k`` is accepted once one more sweep moves it by less than
    ``tol`` in max norm; ``iterations`` on the result is that ``k``.
    Raises :class:`NonConvergenceError` when no iterate up to ``max_iter``
    qualifies.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    order, Q, B = transition_blocks(model)
    X = B.copy()  # iterate 1 from the zero vector
    for k in range(1, max_iter + 1):
        nxt = Q @ X + B
        if np.max(np.abs(nxt - X), initial=0.0) < tol:
            return _result(order, nxt, model.start, iterations=k)
        X = nxt
    raise NonConvergenceError(f"no convergence to tol={tol:g} within {max_iter} iterations")
