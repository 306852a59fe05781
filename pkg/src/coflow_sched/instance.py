"""Problem instances: demand matrices, loads, bounds, and the interval grid.

An instance consists of ``N`` input ports, ``N`` output ports, ``m``
network cores with per-core link speeds, and ``n`` coflows given as
``N x N`` nonnegative integer demand matrices.  Entry ``(i, j)`` of
coflow ``k`` is the number of data units flow ``(i, j, k)`` must move
from input port ``i`` to output port ``j``.  All indices in this
package are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class FlowId(NamedTuple):
    """Identifies one flow: input port ``i``, output port ``j``, coflow ``k``."""

    i: int
    j: int
    k: int


def tie_break_key(flow: FlowId) -> tuple[int, int, int]:
    """Total order used whenever two flows compete for the same slot.

    Flows compare by coflow index first, then output port, then input
    port, so ``flow_a`` precedes ``flow_b`` iff ``k_a < k_b``, or
    ``j_a < j_b`` at equal ``k``, or ``i_a < i_b`` at equal ``(j, k)``.
    """
    return (flow.k, flow.j, flow.i)


@dataclass
class ValidationReport:
    """Hard errors plus non-fatal advisories for an instance or schedule."""

    errors: list[str] = field(default_factory=list)
    advisories: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True, eq=False)
class CoflowInstance:
    """Immutable problem input.

    ``coflows`` is stored as a single int64 array of shape ``(n, N, N)``
    with the write flag cleared; ``core_speeds`` are positive and
    expressed in data units per unit of time.
    """

    num_ports: int
    core_speeds: tuple[float, ...]
    coflows: np.ndarray

    def __init__(self, num_ports: int, core_speeds: Sequence[float],
                 coflows: Iterable[Sequence[Sequence[int]]]):
        object.__setattr__(self, "num_ports", int(num_ports))
        object.__setattr__(self, "core_speeds", tuple(float(s) for s in core_speeds))
        matrices = [np.asarray(m) for m in coflows]
        for m in matrices:
            if m.ndim != 2 or m.shape != (self.num_ports, self.num_ports):
                raise ValueError(
                    f"demand matrix must be {self.num_ports}x{self.num_ports}, got shape {m.shape}"
                )
        stacked = np.array(matrices, dtype=np.float64).reshape(
            len(matrices), self.num_ports, self.num_ports
        )
        # Demands are integral data units; keep exact int64 storage when
        # possible and leave fractional input for the validator to flag.
        if np.all(stacked == np.floor(stacked)):
            stacked = stacked.astype(np.int64)
        stacked.setflags(write=False)
        object.__setattr__(self, "coflows", stacked)

    @property
    def num_cores(self) -> int:
        return len(self.core_speeds)

    @property
    def num_coflows(self) -> int:
        return int(self.coflows.shape[0])

    @property
    def s_min(self) -> float:
        return min(self.core_speeds)

    @property
    def s_max(self) -> float:
        return max(self.core_speeds)

    def demand(self, flow: FlowId) -> int:
        return int(self.coflows[flow.k, flow.i, flow.j])

    def flows(self) -> list[FlowId]:
        """All flows with positive demand, sorted by :func:`tie_break_key`."""
        ks, is_, js = np.nonzero(self.coflows)
        found = [FlowId(int(i), int(j), int(k)) for k, i, j in zip(ks, is_, js)]
        found.sort(key=tie_break_key)
        return found

    def total_demand_matrix(self) -> np.ndarray:
        return self.coflows.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "num_ports": self.num_ports,
            "core_speeds": list(self.core_speeds),
            "coflows": self.coflows.tolist(),
        }


def validate_instance(instance: CoflowInstance) -> ValidationReport:
    """Check the structural assumptions the algorithms rely on.

    Hard errors: no ports, no cores, no coflows, a nonpositive core
    speed, a negative demand entry, or an instance with no positive
    demand at all.  Advisory only: a positive demand smaller than the
    fastest core speed (``d / s_max < 1``), which the speed
    normalization assumes away but no computation divides by.
    """
    report = ValidationReport()
    if instance.num_ports < 1:
        report.errors.append("instance has no ports (num_ports < 1)")
    if instance.num_cores < 1:
        report.errors.append("instance has no network cores")
    if instance.num_coflows < 1:
        report.errors.append("instance has no coflows")
    for p, s in enumerate(instance.core_speeds):
        if not s > 0:
            report.errors.append(f"nonpositive speed s_{p} = {s}")
    if np.any(instance.coflows < 0):
        report.errors.append("negative demand entry")
    if not np.issubdtype(instance.coflows.dtype, np.integer):
        report.errors.append("non-integer demand entry")
    if instance.num_coflows >= 1 and not np.any(instance.coflows > 0):
        report.errors.append("empty instance: all demands are zero")
    if not report.errors:
        smax = instance.s_max
        for flow in instance.flows():
            d = instance.demand(flow)
            if d / smax < 1:
                report.advisories.append(
                    f"normalization violated for flow {tuple(flow)}: d={d} < s_max={smax}"
                )
    return report


def port_loads(instance: CoflowInstance) -> tuple[np.ndarray, np.ndarray]:
    """Per-coflow data volume through each port.

    Returns ``(input_loads, output_loads)``, both of shape ``(n, N)``:
    ``input_loads[k, i]`` is the row sum of coflow ``k`` at input port
    ``i`` and ``output_loads[k, j]`` the column sum at output port ``j``.
    """
    return instance.coflows.sum(axis=2), instance.coflows.sum(axis=1)


def peak_load(matrix: np.ndarray) -> int:
    """Maximum row or column sum of a nonnegative square matrix.

    This is the minimum number of unit slots a single core needs to
    clear the matrix, since each slot serves each port at most once.
    """
    m = np.asarray(matrix)
    if m.size == 0:
        return 0
    return int(max(m.sum(axis=1).max(), m.sum(axis=0).max()))


def makespan_lower_bound(instance: CoflowInstance) -> float:
    """Closed-form makespan lower bound: peak port load over total speed.

    Every data unit crossing the busiest port must pass through one of
    the ``m`` cores, whose aggregate port bandwidth is ``sum(s_p)``.
    Raises ``ValueError`` when all demands are zero.
    """
    in_loads, out_loads = port_loads(instance)
    peak = max(in_loads.sum(axis=0).max(), out_loads.sum(axis=0).max())
    if peak <= 0:
        raise ValueError("lower bound undefined: all demands are zero")
    return float(peak) / sum(instance.core_speeds)


def time_horizon(instance: CoflowInstance) -> int:
    """Number of unit time steps sufficient for any reasonable schedule.

    Serializing the busiest input port and the busiest output port
    back-to-back on the slowest core takes
    ``(max_i load_i + max_j load_j) / s_min`` time; the horizon is that
    value minus one, rounded up so the index set ``{0, ..., T}`` stays
    integral when speeds are fractional.
    """
    in_loads, out_loads = port_loads(instance)
    total = float(in_loads.sum(axis=0).max() + out_loads.sum(axis=0).max())
    value = total / instance.s_min - 1.0
    # Guard against 6.000000000000001-style float noise before ceiling.
    return max(0, math.ceil(value - 1e-9))


@dataclass(frozen=True)
class IntervalGrid:
    """Geometric partition of ``[0, (1+eta)^L]`` into ``L + 1`` intervals.

    Interval 0 is ``[0, 1]``; interval ``l >= 1`` is
    ``((1+eta)^(l-1), (1+eta)^l]``.  ``count`` is the smallest ``L``
    with ``(1+eta)^L >= horizon + 1``, so the grid covers every unit
    time step while its size grows only logarithmically with the
    horizon.
    """

    eta: float
    horizon: int
    count: int
    boundaries: tuple[float, ...]  # right endpoints (1+eta)^l for l = 0..L
    lengths: tuple[float, ...]     # |I_0| = 1, |I_l| = eta * (1+eta)^(l-1)

    @property
    def num_intervals(self) -> int:
        return self.count + 1

    def left_endpoint(self, index: int) -> float:
        return 0.0 if index == 0 else self.boundaries[index - 1]


#: Relative slack when comparing powers of (1+eta) against the horizon;
#: repeated multiplication is used instead of logarithms, and this keeps
#: boundary cases such as (1+eta)^L == T+1 from flipping on rounding.
_GRID_REL_TOL = 1e-12


def build_interval_grid(eta: float, horizon: int) -> IntervalGrid:
    """Construct the smallest geometric grid covering ``{0, ..., horizon}``."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    target = (horizon + 1) * (1.0 - _GRID_REL_TOL)
    boundaries = [1.0]
    while boundaries[-1] < target:
        boundaries.append(boundaries[-1] * (1.0 + eta))
    count = len(boundaries) - 1
    lengths = [1.0] + [eta * boundaries[l - 1] for l in range(1, count + 1)]
    return IntervalGrid(
        eta=float(eta),
        horizon=int(horizon),
        count=count,
        boundaries=tuple(boundaries),
        lengths=tuple(lengths),
    )


def load_instance(source: str | Path | dict) -> CoflowInstance:
    """Load an instance from a JSON file, JSON string, or parsed dict.

    Schema: ``{"num_ports": int, "core_speeds": [number],
    "coflows": [[[int]]]}`` with row index = input port and column
    index = output port.  Ragged or non-square matrices are rejected.
    """
    if isinstance(source, dict):
        data = source
    else:
        path = Path(source)
        if path.exists():
            data = json.loads(path.read_text())
        else:
            data = json.loads(str(source))
    for key in ("num_ports", "core_speeds", "coflows"):
        if key not in data:
            raise ValueError(f"instance JSON missing key {key!r}")
    n_ports = int(data["num_ports"])
    coflows = []
    for k, rows in enumerate(data["coflows"]):
        if len(rows) != n_ports or any(len(r) != n_ports for r in rows):
            raise ValueError(f"coflow {k} is not a {n_ports}x{n_ports} matrix")
        for r in rows:
            for v in r:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise ValueError(f"coflow {k} has a non-integer demand {v!r}")
    return CoflowInstance(n_ports, data["core_speeds"], data["coflows"])


def dump_instance(instance: CoflowInstance, path: str | Path) -> None:
    """Write an instance as JSON (the same schema ``load_instance`` reads)."""
    Path(path).write_text(json.dumps(instance.to_dict()) + "\n")
