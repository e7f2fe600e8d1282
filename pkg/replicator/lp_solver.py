# replicator/lp_solver.py - Dense two-phase simplex for the small LPs of the analysis module
"""
Minimize c^T x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.

Problems here have at most 2n + 2 variables, so a dense tableau with
Bland's rule is plenty. Free variables are split by the callers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

PIVOT_EPS = 1e-12
MAX_PIVOTS = 10_000


@dataclass(frozen=True)
class LPResult:
    status: str              # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray]
    fun: Optional[float]


def _pivot(tableau: np.ndarray, basis: list, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau: np.ndarray, basis: list, n_cols: int) -> str:
    """Iterate on the tableau whose last row holds reduced costs. Columns >= n_cols never enter."""
    for _ in range(MAX_PIVOTS):
        costs = tableau[-1, :n_cols]
        entering = next((j for j in range(n_cols) if costs[j] < -PIVOT_EPS), None)
        if entering is None:
            return "optimal"
        column = tableau[:-1, entering]
        rhs = tableau[:-1, -1]
        candidates = [r for r in range(column.size) if column[r] > PIVOT_EPS]
        if not candidates:
            return "unbounded"
        ratios = [(rhs[r] / column[r], basis[r], r) for r in candidates]
        best = min(ratio for ratio, _, _ in ratios)
        # Bland: among ties pick the smallest basic index
        leaving = min((b, r) for ratio, b, r in ratios if ratio <= best + PIVOT_EPS)[1]
        _pivot(tableau, basis, leaving, entering)
    raise RuntimeError("simplex did not terminate")


def linprog_dense(
    c: np.ndarray,
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
    feas_tol: float = 1e-9,
) -> LPResult:
    c = np.asarray(c, dtype=float)
    n_var = c.size
    A_ub = np.zeros((0, n_var)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n_var)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # Standard form: [A_ub I; A_eq 0] [x; s] = b
    A = np.zeros((m, n_var + m_ub))
    A[:m_ub, :n_var] = A_ub
    A[:m_ub, n_var:] = np.eye(m_ub)
    A[m_ub:, :n_var] = A_eq
    b = np.concatenate([b_ub, b_eq])
    negative = b < 0
    A[negative] *= -1.0
    b[negative] *= -1.0
    n_std = A.shape[1]

    # Phase one: artificial variable per row
    tableau = np.zeros((m + 1, n_std + m + 1))
    tableau[:m, :n_std] = A
    tableau[:m, n_std:n_std + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[-1, n_std:n_std + m] = 1.0
    basis = list(range(n_std, n_std + m))
    for r in range(m):
        tableau[-1] -= tableau[r]
    _run_simplex(tableau, basis, n_std + m)
    if -tableau[-1, -1] > feas_tol * max(1.0, np.abs(b).max(initial=0.0)):
        return LPResult("infeasible", None, None)

    # Drive artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n_std:
            col = next((j for j in range(n_std) if abs(tableau[r, j]) > PIVOT_EPS), None)
            if col is None:
                continue
            _pivot(tableau, basis, r, col)
        keep.append(r)
    tableau = np.vstack([tableau[keep][:, list(range(n_std)) + [-1]], np.zeros((1, n_std + 1))])
    basis = [basis[r] for r in keep]

    # Phase two
    cost = np.concatenate([c, np.zeros(m_ub)])
    tableau[-1, :n_std] = cost
    for r, j in enumerate(basis):
        tableau[-1] -= cost[j] * tableau[r]
    status = _run_simplex(tableau, basis, n_std)
    if status == "unbounded":
        return LPResult("unbounded", None, None)

    x = np.zeros(n_std)
    for r, j in enumerate(basis):
        x[j] = tableau[r, -1]
    x = x[:n_var]
    return LPResult("optimal", x, float(c @ x))
