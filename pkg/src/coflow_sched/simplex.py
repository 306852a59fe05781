"""Dense two-phase simplex with Bland's rule.

Self-contained fallback/cross-check backend for the LP layer.  It
targets small, well-scaled models (hundreds of rows and columns): the
tableau is dense and Bland's entering rule trades speed for guaranteed
termination.  Larger models should go through the sparse HiGHS backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coflow_sched.errors import SolverError


@dataclass
class SimplexResult:
    x: np.ndarray          # primal solution, original columns only
    objective: float
    duals_eq: np.ndarray   # one multiplier per equality row
    duals_ub: np.ndarray   # one multiplier per inequality row
    iterations: int


def solve(
    c: np.ndarray,
    a_eq: np.ndarray | None,
    b_eq: np.ndarray | None,
    a_ub: np.ndarray | None,
    b_ub: np.ndarray | None,
    tol: float = 1e-9,
    max_iter: int = 200_000,
) -> SimplexResult:
    """Minimize ``c @ x`` subject to ``a_eq @ x == b_eq``, ``a_ub @ x <= b_ub``, ``x >= 0``.

    Raises :class:`SolverError` with message "infeasible" or
    "iteration limit".
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    a_eq = np.zeros((0, n)) if a_eq is None else np.asarray(a_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    a_ub = np.zeros((0, n)) if a_ub is None else np.asarray(a_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    n_eq, n_ub = a_eq.shape[0], a_ub.shape[0]
    m = n_eq + n_ub

    # Standard form: append one slack per inequality row, then flip rows
    # with negative rhs so a phase-1 identity basis of artificials works.
    a = np.zeros((m, n + n_ub))
    a[:n_eq, :n] = a_eq
    a[n_eq:, :n] = a_ub
    a[n_eq:, n:] = np.eye(n_ub)
    b = np.concatenate([b_eq, b_ub]).astype(float)
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1

    total = n + n_ub
    tableau = np.zeros((m + 1, total + m + 1))
    tableau[:m, :total] = a
    tableau[:m, total:total + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(total, total + m))

    # Phase-1 objective: minimize the sum of artificials.
    tableau[m, total:total + m] = 1.0
    for r in range(m):
        tableau[m] -= tableau[r]
    iters = _pivot_loop(tableau, basis, tol=tol, max_iter=max_iter)
    if tableau[m, -1] < -tol * max(1.0, np.abs(b).sum()):
        raise SolverError("infeasible")
    _drive_out_artificials(tableau, basis, total, tol)

    # Phase 2: restore the real objective expressed in the current basis.
    tableau[m, :] = 0.0
    tableau[m, :n] = c
    for r, bi in enumerate(basis):
        if tableau[m, bi] != 0.0:
            tableau[m] -= tableau[m, bi] * tableau[r]
    iters += _pivot_loop(tableau, basis, tol=tol,
                         max_iter=max_iter - iters, forbid_from=total)

    x_full = np.zeros(total)
    for r, bi in enumerate(basis):
        if bi < total:
            x_full[bi] = tableau[r, -1]
    objective = float(c @ x_full[:n])
    # Dual multipliers fall out of the objective row over the artificial
    # (initial identity) columns: lambda = c_B B^{-1}.
    duals = -tableau[m, total:total + m].copy()
    duals[neg] *= -1
    return SimplexResult(
        x=x_full[:n],
        objective=objective,
        duals_eq=duals[:n_eq],
        duals_ub=duals[n_eq:],
        iterations=iters,
    )


def _pivot_loop(tableau, basis, tol, max_iter, forbid_from=None):
    """Bland's rule pivoting; returns the number of pivots performed.

    ``forbid_from`` blocks columns at or beyond that index (the
    artificials during phase 2) from entering the basis.
    """
    m = len(basis)
    ncols = tableau.shape[1] - 1
    allowed = ncols if forbid_from is None else forbid_from
    for it in range(max_iter):
        entering = -1
        for j in range(allowed):
            if tableau[m, j] < -tol:
                entering = j
                break
        if entering < 0:
            return it
        ratios = []
        col = tableau[:m, entering]
        rhs = tableau[:m, -1]
        for r in range(m):
            if col[r] > tol:
                ratios.append((rhs[r] / col[r], basis[r], r))
        if not ratios:
            raise SolverError("unbounded")
        # Bland: smallest ratio, ties broken by smallest basis variable.
        _, _, leaving = min(ratios, key=lambda t: (t[0], t[1]))
        _pivot(tableau, leaving, entering)
        basis[leaving] = entering
    raise SolverError("iteration limit")


def _pivot(tableau, row, col):
    tableau[row] /= tableau[row, col]
    factor = tableau[:, col].copy()
    factor[row] = 0.0
    tableau -= np.outer(factor, tableau[row])
    tableau[:, col] = 0.0
    tableau[row, col] = 1.0


def _drive_out_artificials(tableau, basis, total, tol):
    """Pivot basic artificials onto real columns; drop redundant rows in place."""
    m = len(basis)
    for r in range(m):
        if basis[r] >= total and abs(tableau[r, -1]) <= tol:
            pivot_col = -1
            for j in range(total):
                if abs(tableau[r, j]) > tol:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, r, pivot_col)
                basis[r] = pivot_col
            # Otherwise the row is identically zero over real columns
            # (redundant constraint); the artificial stays basic at zero,
            # harmless because phase 2 never pivots artificials back in.
