"""Linear-programming relaxations of the makespan scheduling problem.

Two variants share one model shape.  The *time-indexed* variant has one
variable ``y[f, p, t]`` per flow, core, and unit time step: the amount
of time flow ``f`` is transmitted on core ``p`` within ``(t, t+1]``.
The *interval-indexed* variant replaces unit steps with the geometric
grid of :class:`~coflow_sched.instance.IntervalGrid`, where
``y[f, p, l] * |I_l|`` is the transmission time inside interval ``l``;
the grid keeps the model polynomial in the input size at the cost of an
``eta``-dependent loss.  Constraint families:

a. every flow is fully transmitted,
b. per (input port, core, index): at most one unit of port time,
c. per (output port, core, index): at most one unit of port time,
d. the makespan variable dominates each flow's completion estimate,
e. the makespan variable dominates each flow's total scheduled time.

The completion estimate in (d) charges each fraction of a flow the
start of its index window plus half the window plus half the flow's own
transmission time; in interval mode the window start is the interval's
left boundary, with the convention that interval 0 contributes half a
unit instead of its left endpoint 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from coflow_sched import simplex
from coflow_sched.errors import ModelSizeError, SolverError
from coflow_sched.instance import (
    CoflowInstance,
    FlowId,
    IntervalGrid,
    build_interval_grid,
    time_horizon,
)

#: Default cap on the number of y-columns a builder will create.
DEFAULT_COLUMN_CAP = 2_000_000

RowLabel = tuple


@dataclass
class LpRow:
    cols: np.ndarray
    coefs: np.ndarray
    rhs: float
    label: RowLabel


@dataclass
class LpModel:
    """Sparse LP ``min c_max`` over y >= 0 with rows (a)-(e).

    Columns 0..num_y_cols-1 are the y variables laid out as
    ``flow_index * (m * K) + p * K + index`` with ``K`` the number of
    time points or intervals; the final column is the makespan variable.
    """

    mode: str                      # "time" or "interval"
    instance: CoflowInstance
    flows: tuple[FlowId, ...]
    num_indices: int               # K = T+1 (time) or L+1 (interval)
    grid: IntervalGrid | None
    eq_rows: list[LpRow] = field(default_factory=list)
    ub_rows: list[LpRow] = field(default_factory=list)

    @property
    def num_y_cols(self) -> int:
        return len(self.flows) * self.instance.num_cores * self.num_indices

    @property
    def num_cols(self) -> int:
        return self.num_y_cols + 1

    @property
    def cmax_col(self) -> int:
        return self.num_y_cols

    @property
    def num_rows(self) -> int:
        return len(self.eq_rows) + len(self.ub_rows)

    def column(self, flow_index: int, core: int, index: int) -> int:
        k = self.num_indices
        return flow_index * (self.instance.num_cores * k) + core * k + index

    def index_weight(self, index: int) -> float:
        """Duration carried by one unit of y at this index."""
        return 1.0 if self.mode == "time" else self.grid.lengths[index]

    def completion_offset(self, index: int) -> float:
        """Start-of-window term in the completion estimate."""
        if self.mode == "time":
            return index + 0.5
        # Interval mode: left boundary, except interval 0 counts as 1/2.
        return 0.5 if index == 0 else self.grid.boundaries[index - 1]

    def columns_of(self, flow_index: int) -> Iterator[tuple[int, int, int]]:
        for p in range(self.instance.num_cores):
            for u in range(self.num_indices):
                yield p, u, self.column(flow_index, p, u)

    def to_lp_text(self, max_rows: int = 50) -> str:
        """Human-readable listing of the model, for debugging."""
        lines = [f"min x{self.cmax_col}  # makespan ({self.mode} mode)"]
        for sense, rows in (("=", self.eq_rows), ("<=", self.ub_rows)):
            for row in rows[:max_rows]:
                terms = " + ".join(
                    f"{c:.6g}*x{j}" for j, c in zip(row.cols, row.coefs)
                )
                lines.append(f"{row.label}: {terms} {sense} {row.rhs:.6g}")
            if len(rows) > max_rows:
                lines.append(f"... {len(rows) - max_rows} more {sense} rows")
        return "\n".join(lines)


@dataclass
class LpSolution:
    """Optimal fractional transmission plan; zero entries are omitted."""

    mode: str
    y: dict[tuple[FlowId, int, int], float]
    c_max: float
    grid: IntervalGrid | None = None
    duality_gap: float | None = None

    def flow_entries(self, flow: FlowId) -> list[tuple[int, int, float]]:
        return [(p, u, v) for (f, p, u), v in self.y.items() if f == flow]

    def to_json_dict(self) -> dict:
        out = {
            f"{f.i},{f.j},{f.k},{p},{u}": v for (f, p, u), v in sorted(self.y.items())
        }
        out["c_max"] = self.c_max
        return out


def _build(instance: CoflowInstance, mode: str, grid: IntervalGrid | None,
           num_indices: int, column_cap: int) -> LpModel:
    flows = tuple(instance.flows())
    if not flows:
        raise ValueError("instance has no flows; nothing to schedule")
    model = LpModel(mode=mode, instance=instance, flows=flows,
                    num_indices=num_indices, grid=grid)
    if model.num_y_cols > column_cap:
        raise ModelSizeError(
            f"{model.num_y_cols} y-columns exceed the cap of {column_cap}"
        )
    n = instance.num_ports
    m = instance.num_cores
    speeds = instance.core_speeds
    k_range = range(num_indices)
    weights = np.array([model.index_weight(u) for u in k_range])
    offsets = np.array([model.completion_offset(u) for u in k_range])

    # (a) full transmission per flow.
    for fi, flow in enumerate(flows):
        d = instance.demand(flow)
        cols = np.array([model.column(fi, p, u) for p in range(m) for u in k_range])
        coefs = np.array([speeds[p] * weights[u] / d for p in range(m) for u in k_range])
        model.eq_rows.append(LpRow(cols, coefs, 1.0, ("a", flow)))

    # (b)/(c) port capacity per (port, core, index); rows exist even for
    # idle ports so the model shape matches its declared dimensions.
    by_input: dict[int, list[int]] = {i: [] for i in range(n)}
    by_output: dict[int, list[int]] = {j: [] for j in range(n)}
    for fi, flow in enumerate(flows):
        by_input[flow.i].append(fi)
        by_output[flow.j].append(fi)
    for kind, groups in (("b", by_input), ("c", by_output)):
        for port in range(n):
            members = groups[port]
            for p in range(m):
                for u in k_range:
                    cols = np.array([model.column(fi, p, u) for fi in members], dtype=int)
                    coefs = np.ones(len(members))
                    model.ub_rows.append(LpRow(cols, coefs, 1.0, (kind, port, p, u)))

    # (d) completion estimate and (e) scheduled time, both <= c_max.
    for fi, flow in enumerate(flows):
        d = instance.demand(flow)
        cols = [model.column(fi, p, u) for p in range(m) for u in k_range]
        d_coefs = [
            (speeds[p] / d * offsets[u] + 0.5) * weights[u]
            for p in range(m) for u in k_range
        ]
        e_coefs = [weights[u] for p in range(m) for u in k_range]
        model.ub_rows.append(
            LpRow(np.array(cols + [model.cmax_col]),
                  np.array(d_coefs + [-1.0]), 0.0, ("d", flow))
        )
        model.ub_rows.append(
            LpRow(np.array(cols + [model.cmax_col]),
                  np.array(e_coefs + [-1.0]), 0.0, ("e", flow))
        )
    return model


def build_time_indexed(instance: CoflowInstance,
                       column_cap: int = DEFAULT_COLUMN_CAP) -> LpModel:
    """Time-indexed model over unit steps ``{0, ..., T}``."""
    t = time_horizon(instance)
    return _build(instance, "time", None, t + 1, column_cap)


def build_interval_indexed(instance: CoflowInstance, eta: float,
                           column_cap: int = DEFAULT_COLUMN_CAP) -> LpModel:
    """Interval-indexed model over the geometric grid with parameter ``eta``."""
    grid = build_interval_grid(eta, time_horizon(instance))
    return _build(instance, "interval", grid, grid.num_intervals, column_cap)


def _as_sparse(rows: list[LpRow], num_cols: int) -> tuple[sp.csr_matrix, np.ndarray]:
    data, row_idx, col_idx, rhs = [], [], [], []
    for r, row in enumerate(rows):
        rhs.append(row.rhs)
        row_idx.extend([r] * len(row.cols))
        col_idx.extend(row.cols.tolist())
        data.extend(row.coefs.tolist())
    matrix = sp.csr_matrix(
        (data, (row_idx, col_idx)), shape=(len(rows), num_cols)
    )
    return matrix, np.array(rhs)


def solve_lp(model: LpModel, tol: float = 1e-7, method: str = "highs") -> LpSolution:
    """Solve to optimality and validate the returned plan.

    ``method`` is either ``"highs"`` (sparse, default) or ``"simplex"``
    (the dense in-package backend, for small models and cross-checks).
    Raises :class:`SolverError` on infeasibility or iteration limits --
    with a well-formed model both indicate a builder bug, since these
    relaxations always admit a feasible point.
    """
    a_eq, b_eq = _as_sparse(model.eq_rows, model.num_cols)
    a_ub, b_ub = _as_sparse(model.ub_rows, model.num_cols)
    cost = np.zeros(model.num_cols)
    cost[model.cmax_col] = 1.0

    if method == "highs":
        res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                      bounds=(0, None), method="highs")
        if res.status == 2:
            raise SolverError("infeasible")
        if res.status == 1:
            raise SolverError("iteration limit")
        if res.status != 0:
            raise SolverError(f"solver failed: {res.message}")
        x = res.x
        dual_obj = float(b_eq @ res.eqlin.marginals + b_ub @ res.ineqlin.marginals)
        gap = abs(float(res.fun) - dual_obj)
    elif method == "simplex":
        result = simplex.solve(cost, a_eq.toarray(), b_eq, a_ub.toarray(), b_ub)
        x = result.x
        dual_obj = float(b_eq @ result.duals_eq + b_ub @ result.duals_ub)
        gap = abs(result.objective - dual_obj)
    else:
        raise ValueError(f"unknown LP method {method!r}")

    c_max = float(x[model.cmax_col])
    y: dict[tuple[FlowId, int, int], float] = {}
    for fi, flow in enumerate(model.flows):
        for p, u, col in model.columns_of(fi):
            v = float(x[col])
            if v > 1e-12:
                y[(flow, p, u)] = v
    solution = LpSolution(mode=model.mode, y=y, c_max=c_max, grid=model.grid,
                          duality_gap=gap)
    worst = max_residual(model, solution)
    if worst > max(tol, 1e-7):
        raise SolverError(f"solution residual {worst:.3e} exceeds tolerance")
    return solution


def residuals(model: LpModel, solution: LpSolution) -> dict[RowLabel, float]:
    """Constraint violation per row (positive values only are violations)."""
    x = np.zeros(model.num_cols)
    flow_index = {flow: fi for fi, flow in enumerate(model.flows)}
    for (flow, p, u), v in solution.y.items():
        x[model.column(flow_index[flow], p, u)] = v
    x[model.cmax_col] = solution.c_max
    out: dict[RowLabel, float] = {}
    for row in model.eq_rows:
        out[row.label] = abs(float(x[row.cols] @ row.coefs) - row.rhs)
    for row in model.ub_rows:
        lhs = float(x[row.cols] @ row.coefs) if len(row.cols) else 0.0
        out[row.label] = max(0.0, lhs - row.rhs)
    return out


def max_residual(model: LpModel, solution: LpSolution) -> float:
    res = residuals(model, solution)
    return max(res.values()) if res else 0.0


def check_solution(model: LpModel, solution: LpSolution,
                   tol: float = 1e-6) -> list[tuple[RowLabel, float]]:
    """Rows violated beyond ``tol``, worst first; empty means feasible."""
    bad = [(label, r) for label, r in residuals(model, solution).items() if r > tol]
    bad.sort(key=lambda t: -t[1])
    return bad


def flow_completion_bound(solution: LpSolution, flow: FlowId,
                          instance: CoflowInstance) -> float:
    """Completion-time estimate of one flow under the fractional plan.

    Each piece of transmitted fraction is charged its window start plus
    half the window; half the scheduled duration is added on top.  This
    is the quantity constraint family (d) compares against the makespan
    variable.
    """
    d = instance.demand(flow)
    if d <= 0:
        raise ValueError(f"unknown flow {tuple(flow)}: no positive demand")
    entries = solution.flow_entries(flow)
    if not entries:
        raise ValueError(f"solution carries no mass for flow {tuple(flow)}")
    speeds = instance.core_speeds
    total = 0.0
    for p, u, v in entries:
        if solution.mode == "time":
            total += speeds[p] * v / d * (u + 0.5) + 0.5 * v
        else:
            offset = 0.5 if u == 0 else solution.grid.boundaries[u - 1]
            length = solution.grid.lengths[u]
            total += (speeds[p] / d * offset + 0.5) * v * length
    return total
