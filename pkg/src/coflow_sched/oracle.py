"""Exhaustive oracle: the best makespan over whole-flow core assignments.

Every flow goes to exactly one core (the same solution space the
rounding algorithms search), and a core clears its aggregated matrix in
``peak_load / speed`` time, so the value of an assignment is the worst
core finish time.  The search enumerates all ``m^|F|`` assignments with
branch-and-bound pruning on the partial maximum.
"""

from __future__ import annotations

from coflow_sched.errors import OracleSizeError
from coflow_sched.instance import CoflowInstance

DEFAULT_ENUMERATION_CAP = 10**6


def brute_force_makespan(instance: CoflowInstance,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Minimum achievable makespan over unsplittable flow-to-core assignments.

    Raises :class:`OracleSizeError` when ``m^|F|`` exceeds ``cap``.
    """
    flows = instance.flows()
    m = instance.num_cores
    if not flows:
        raise ValueError("instance has no flows")
    if m ** len(flows) > cap:
        raise OracleSizeError(
            f"instance too large for oracle: {m}^{len(flows)} assignments exceed {cap}"
        )
    speeds = instance.core_speeds
    n = instance.num_ports
    # Row/column loads per core, updated along the search path.
    row = [[0] * n for _ in range(m)]
    col = [[0] * n for _ in range(m)]
    best = float("inf")

    def search(idx: int, current: float) -> None:
        nonlocal best
        if current >= best:
            return
        if idx == len(flows):
            best = current
            return
        flow = flows[idx]
        d = instance.demand(flow)
        for p in range(m):
            row[p][flow.i] += d
            col[p][flow.j] += d
            peak = max(row[p][flow.i], col[p][flow.j])
            search(idx + 1, max(current, peak / speeds[p]))
            row[p][flow.i] -= d
            col[p][flow.j] -= d

    search(0, 0.0)
    return best
