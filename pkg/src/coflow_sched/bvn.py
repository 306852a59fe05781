"""Balance-and-decompose scheduling of one aggregated coflow on one core.

A nonnegative integer demand matrix ``D`` with peak port load
``rho = peak_load(D)`` can always be padded up to a matrix whose row and
column sums all equal ``rho``, and that balanced matrix splits into a
nonnegative integer combination of permutation matchings.  Expanding
each matching into unit time slots yields a conflict-free schedule that
clears ``D`` in exactly ``rho`` slots, which is optimal for one core.

All arithmetic here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from coflow_sched.instance import peak_load

Matching = frozenset[tuple[int, int]]


@dataclass(frozen=True)
class BvnDecomposition:
    """Weighted permutation matchings summing to the balanced matrix.

    ``steps`` is a sequence of ``(q, matching)`` pairs: run ``matching``
    for ``q`` unit slots.  The coefficients sum to ``rho`` and the
    weighted 0/1 matrices of the matchings reconstruct the balanced
    matrix entrywise.
    """

    rho: int
    steps: tuple[tuple[int, Matching], ...]

    @property
    def num_steps(self) -> int:
        return len(self.steps)

    def reconstruct(self, n: int) -> np.ndarray:
        out = np.zeros((n, n), dtype=np.int64)
        for q, matching in self.steps:
            for i, j in matching:
                out[i, j] += q
        return out

    def to_dict(self) -> dict:
        """Debug dump: JSON-friendly listing of the decomposition steps."""
        return {
            "rho": self.rho,
            "steps": [
                {"q": q, "matching": sorted(map(list, matching))}
                for q, matching in self.steps
            ],
        }


def augment(matrix: np.ndarray) -> np.ndarray:
    """Pad a nonnegative integer matrix until all port sums equal its peak load.

    Repeatedly picks the lowest-index row and column with minimum sum
    and adds the smaller of the two deficits at their intersection, so
    no sum ever overshoots the peak.  Raises ``ValueError`` on an
    all-zero matrix, for which no positive target exists.
    """
    d = np.array(matrix, dtype=np.int64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"matrix must be square, got shape {d.shape}")
    if np.any(d < 0):
        raise ValueError("matrix must be nonnegative")
    rho = peak_load(d)
    if rho == 0:
        raise ValueError("cannot augment an all-zero matrix")
    row = d.sum(axis=1)
    col = d.sum(axis=0)
    while min(row.min(), col.min()) < rho:
        i = int(row.argmin())
        j = int(col.argmin())
        fill = int(min(rho - row[i], rho - col[j]))
        d[i, j] += fill
        row[i] += fill
        col[j] += fill
    return d


def _perfect_matching(support: np.ndarray) -> list[int] | None:
    """Row -> column perfect matching on a 0/1 support matrix.

    Classic augmenting-path search, scanning columns in increasing
    order so the result is deterministic.  Returns ``None`` when some
    row cannot be matched.
    """
    n = support.shape[0]
    match_col = [-1] * n  # column -> row

    def try_row(i: int, seen: list[bool]) -> bool:
        # Prefer the lowest free column before displacing earlier rows.
        for j in range(n):
            if support[i, j] and not seen[j] and match_col[j] == -1:
                seen[j] = True
                match_col[j] = i
                return True
        for j in range(n):
            if support[i, j] and not seen[j]:
                seen[j] = True
                if try_row(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not try_row(i, [False] * n):
            return None
    assignment = [-1] * n
    for j, i in enumerate(match_col):
        assignment[i] = j
    return assignment


def decompose(balanced: np.ndarray, priorities: Mapping | None = None) -> BvnDecomposition:
    """Split a balanced matrix into weighted permutation matchings.

    The residual matrix stays balanced after each subtraction, so its
    positive support always admits a perfect matching; failure to find
    one signals corrupted input and raises ``ValueError``.  Each
    coefficient is the minimum residual entry along its matching, which
    zeroes at least one cell per step and bounds the number of steps by
    ``N^2 - 2N + 2``.

    ``priorities`` is accepted for interface compatibility but does not
    steer the matchings; callers control per-flow ordering through the
    cell queues passed to :func:`schedule_aggregated`.
    """
    del priorities
    residual = np.array(balanced, dtype=np.int64)
    n = residual.shape[0]
    sums = residual.sum(axis=1)
    rho = int(sums[0]) if n else 0
    if not (np.all(residual.sum(axis=1) == rho) and np.all(residual.sum(axis=0) == rho)):
        raise ValueError("matrix is not balanced: row/column sums differ")
    if rho <= 0:
        raise ValueError("balanced matrix must have positive load")
    steps: list[tuple[int, Matching]] = []
    max_steps = n * n + 1
    while residual.any():
        if len(steps) > max_steps:
            raise ValueError("decomposition did not terminate; input corrupted")
        assignment = _perfect_matching(residual > 0)
        if assignment is None:
            raise ValueError("no perfect matching on residual support; input corrupted")
        q = int(min(residual[i, assignment[i]] for i in range(n)))
        for i in range(n):
            residual[i, assignment[i]] -= q
        steps.append((q, frozenset((i, assignment[i]) for i in range(n))))
    return BvnDecomposition(rho=rho, steps=tuple(steps))


def schedule_aggregated(
    matrix: np.ndarray,
    cell_queues: Mapping[tuple[int, int], Sequence[tuple[Hashable, int]]],
) -> tuple[list[list[tuple[int, int, Hashable]]], dict[Hashable, int]]:
    """Expand a demand matrix into per-slot unit transmissions.

    ``cell_queues[(i, j)]`` lists ``(flow, units)`` pairs whose units
    sum to ``matrix[i, j]``; within a cell, units are served strictly in
    queue order.  Returns ``(slots, completions)`` where ``slots`` has
    exactly ``peak_load(matrix)`` entries, each a list of
    ``(i, j, flow)`` unit transmissions touching every port at most
    once, and ``completions[flow]`` is the 1-based index of the slot
    carrying the flow's last unit.
    """
    d = np.array(matrix, dtype=np.int64)
    n = d.shape[0]
    remaining = d.copy()
    queues: dict[tuple[int, int], list[list]] = {}
    for (i, j), entries in cell_queues.items():
        total = sum(units for _, units in entries)
        if total != d[i, j]:
            raise ValueError(
                f"cell {(i, j)} queue carries {total} units but demand is {d[i, j]}"
            )
        queues[(i, j)] = [[flow, units] for flow, units in entries if units > 0]
    if any(d[i, j] > 0 and (i, j) not in queues for i in range(n) for j in range(n)):
        raise ValueError("every positive cell needs a queue")

    decomposition = decompose(augment(d))
    slots: list[list[tuple[int, int, Hashable]]] = []
    completions: dict[Hashable, int] = {}
    for q, matching in decomposition.steps:
        cells = sorted(matching)
        for _ in range(q):
            slot = []
            for i, j in cells:
                if remaining[i, j] > 0:
                    queue = queues[(i, j)]
                    head = queue[0]
                    head[1] -= 1
                    if head[1] == 0:
                        completions[head[0]] = len(slots) + 1
                        queue.pop(0)
                    slot.append((i, j, head[0]))
                    remaining[i, j] -= 1
            slots.append(slot)
    return slots, completions
