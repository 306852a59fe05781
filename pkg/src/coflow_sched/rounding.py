"""Committing each flow to one (core, index) pair from an LP solution.

Randomized mode samples each flow's pair independently from the
fractional plan: the probability of ``(p, u)`` is the fraction of the
flow the plan transmits there.  Deterministic mode commits flows one by
one in :func:`~coflow_sched.instance.tie_break_key` order, greedily
choosing the pair that minimizes a surrogate makespan.

The surrogate ``conditional_makespan`` is the maximum, over all flows,
of an expected-completion estimate at the flow's input and output
ports.  Committed flows contribute their full transmission time
(``d/s_p``) on their committed core when scheduled no later than the
flow under consideration; uncommitted flows contribute their fractional
transmission duration before that point.  Equal indices are ordered by
``tie_break_key``, matching how the simulator orders per-cell queues.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from coflow_sched.instance import (
    CoflowInstance,
    FlowId,
    IntervalGrid,
    tie_break_key,
)
from coflow_sched.lp import LpSolution

#: A flow's probability mass may drift from 1 by at most this much
#: before sampling is refused (it is renormalized below the threshold).
MASS_TOLERANCE = 1e-4


@dataclass
class AssignmentMap:
    """One committed (core, index) pair per flow.

    ``priority`` holds the scheduling key ``t_ijk``: the time index
    itself in time mode, the interval's left endpoint in interval mode.
    ``rng_seed`` is None for deterministic assignments.
    ``surrogate_trace`` (deterministic mode only) records the surrogate
    makespan before any commitment and after each one.
    """

    mode: str
    entries: dict[FlowId, tuple[int, int]]
    priority: dict[FlowId, float]
    rng_seed: int | None = None
    surrogate_trace: tuple[float, ...] | None = None

    def core_of(self, flow: FlowId) -> int:
        return self.entries[flow][0]

    def to_json_list(self) -> list[dict]:
        return [
            {
                "i": f.i, "j": f.j, "k": f.k,
                "p": p, "index": u, "t_ijk": self.priority[f],
            }
            for f, (p, u) in sorted(self.entries.items(), key=lambda kv: tie_break_key(kv[0]))
        ]


def _candidate_weights(solution: LpSolution, instance: CoflowInstance,
                       flow: FlowId) -> list[tuple[int, int, float, float]]:
    """Positive-mass candidates ``(p, u, fraction, duration)`` for a flow.

    ``fraction`` is the share of the flow transmitted at ``(p, u)``
    under the plan; ``duration`` is the corresponding transmission time.
    """
    d = instance.demand(flow)
    out = []
    for p, u, v in solution.flow_entries(flow):
        w = v if solution.mode == "time" else v * solution.grid.lengths[u]
        theta = instance.core_speeds[p] * w / d
        if theta > 0:
            out.append((p, u, theta, w))
    out.sort(key=lambda c: (c[0], c[1]))
    return out


def _priority_of(mode: str, grid: IntervalGrid | None, index: int) -> float:
    return float(index) if mode == "time" else grid.left_endpoint(index)


def _sample(solution: LpSolution, instance: CoflowInstance,
            grid: IntervalGrid | None, seed: int) -> AssignmentMap:
    rng = np.random.default_rng(seed)
    entries: dict[FlowId, tuple[int, int]] = {}
    priority: dict[FlowId, float] = {}
    for flow in instance.flows():
        cands = _candidate_weights(solution, instance, flow)
        total = sum(theta for _, _, theta, _ in cands)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(
                f"flow {tuple(flow)} probability mass {total:.6f} deviates from 1"
            )
        probs = np.array([theta for _, _, theta, _ in cands]) / total
        choice = int(rng.choice(len(cands), p=probs / probs.sum()))
        p, u, _, _ = cands[choice]
        entries[flow] = (p, u)
        priority[flow] = _priority_of(solution.mode, grid, u)
    return AssignmentMap(mode=solution.mode, entries=entries, priority=priority,
                         rng_seed=seed)


def sample_time_assignment(solution: LpSolution, instance: CoflowInstance,
                           seed: int) -> AssignmentMap:
    """Independently draw a (core, time) pair per flow; deterministic in ``seed``."""
    if solution.mode != "time":
        raise ValueError(f"expected a time-mode solution, got {solution.mode!r}")
    return _sample(solution, instance, None, seed)


def sample_interval_assignment(solution: LpSolution, instance: CoflowInstance,
                               grid: IntervalGrid, seed: int) -> AssignmentMap:
    """Independently draw a (core, interval) pair per flow; priority is the left endpoint."""
    if solution.mode != "interval":
        raise ValueError(f"expected an interval-mode solution, got {solution.mode!r}")
    if solution.grid is not None and grid.count != solution.grid.count:
        raise ValueError("grid does not match the one the solution was built on")
    return _sample(solution, instance, grid, seed)


class _SurrogateEvaluator:
    """Shared state for evaluating the surrogate makespan efficiently.

    Prefix sums of fractional durations are precomputed per (flow,
    core); the per-commitment work is then linear in the number of
    flows sharing a port with the flow under evaluation.
    """

    def __init__(self, solution: LpSolution, instance: CoflowInstance):
        self.instance = instance
        self.mode = solution.mode
        self.grid = solution.grid
        self.flows: list[FlowId] = instance.flows()
        self.order = {f: idx for idx, f in enumerate(self.flows)}
        self.demand = {f: instance.demand(f) for f in self.flows}
        self.cands = {
            f: _candidate_weights(solution, instance, f) for f in self.flows
        }
        self.w_map: dict[tuple[FlowId, int, int], float] = {}
        per_core: dict[tuple[FlowId, int], list[tuple[int, float]]] = {}
        for f in self.flows:
            for p, u, _, w in self.cands[f]:
                self.w_map[(f, p, u)] = w
                per_core.setdefault((f, p), []).append((u, w))
        self.prefix: dict[tuple[FlowId, int], tuple[list[int], list[float]]] = {}
        for key, pairs in per_core.items():
            pairs.sort()
            us = [u for u, _ in pairs]
            acc, cum = 0.0, []
            for _, w in pairs:
                acc += w
                cum.append(acc)
            self.prefix[key] = (us, cum)
        self.in_mates: dict[int, list[FlowId]] = {}
        self.out_mates: dict[int, list[FlowId]] = {}
        for f in self.flows:
            self.in_mates.setdefault(f.i, []).append(f)
            self.out_mates.setdefault(f.j, []).append(f)

    def _prefix_w(self, flow: FlowId, p: int, u: int) -> float:
        entry = self.prefix.get((flow, p))
        if entry is None:
            return 0.0
        us, cum = entry
        pos = bisect_left(us, u)
        return cum[pos - 1] if pos else 0.0

    def completion_estimate(self, flow: FlowId, mates: list[FlowId], p: int,
                            u: int, committed: Mapping[FlowId, tuple[int, int]]) -> float:
        s_p = self.instance.core_speeds[p]
        load = self.demand[flow] / s_p
        rank = self.order[flow]
        for g in mates:
            if g == flow:
                continue
            pair = committed.get(g)
            if pair is not None:
                gp, gu = pair
                if gp == p and (gu < u or (gu == u and self.order[g] < rank)):
                    load += self.demand[g] / s_p
            else:
                load += self._prefix_w(g, p, u)
                if self.order[g] < rank:
                    load += self.w_map.get((g, p, u), 0.0)
        return load

    def score(self, flow: FlowId,
              committed: Mapping[FlowId, tuple[int, int]]) -> float:
        sides = (self.in_mates[flow.i], self.out_mates[flow.j])
        pair = committed.get(flow)
        if pair is not None:
            p, u = pair
            return max(self.completion_estimate(flow, mates, p, u, committed)
                       for mates in sides)
        best = 0.0
        for mates in sides:
            expected = sum(
                theta * self.completion_estimate(flow, mates, p, u, committed)
                for p, u, theta, _ in self.cands[flow]
            )
            best = max(best, expected)
        return best

    def makespan(self, committed: Mapping[FlowId, tuple[int, int]]) -> float:
        if not self.flows:
            return 0.0
        return max(self.score(f, committed) for f in self.flows)


def conditional_makespan(solution: LpSolution, instance: CoflowInstance,
                         committed: Mapping[FlowId, tuple[int, int]] | AssignmentMap,
                         mode: str | None = None) -> float:
    """Surrogate expected makespan given a partial set of commitments.

    Returns the maximum over flows of the per-flow completion estimate:
    committed flows are evaluated at their committed pair, uncommitted
    flows as the fractional-plan expectation over their candidates.
    Zero when the instance has no flows.
    """
    if mode is not None and mode != solution.mode:
        raise ValueError(f"mode {mode!r} does not match solution mode {solution.mode!r}")
    if isinstance(committed, AssignmentMap):
        committed = committed.entries
    return _SurrogateEvaluator(solution, instance).makespan(committed)


def derandomize(solution: LpSolution, instance: CoflowInstance,
                mode: str | None = None) -> AssignmentMap:
    """Greedy conditional-expectation rounding of an optimal LP solution.

    Flows are committed in tie-break order; each step evaluates the
    surrogate makespan for every positive-mass candidate pair and keeps
    the minimizer, breaking ties toward the smallest core and then the
    smallest index.  The surrogate value after each step is recorded in
    ``surrogate_trace``.
    """
    if mode is not None and mode != solution.mode:
        raise ValueError(f"mode {mode!r} does not match solution mode {solution.mode!r}")
    ev = _SurrogateEvaluator(solution, instance)
    committed: dict[FlowId, tuple[int, int]] = {}
    scores = {f: ev.score(f, committed) for f in ev.flows}
    trace = [max(scores.values()) if scores else 0.0]
    for flow in ev.flows:
        mates = set(ev.in_mates[flow.i]) | set(ev.out_mates[flow.j])
        outside = max(
            (s for f, s in scores.items() if f not in mates), default=0.0
        )
        best_phi = None
        best_pair = None
        best_scores = None
        for p, u, _, _ in ev.cands[flow]:
            committed[flow] = (p, u)
            local = {g: ev.score(g, committed) for g in mates}
            phi = max(outside, max(local.values()))
            del committed[flow]
            if best_phi is None or phi < best_phi - 1e-15:
                best_phi, best_pair, best_scores = phi, (p, u), local
        committed[flow] = best_pair
        scores.update(best_scores)
        trace.append(best_phi)
    priority = {
        f: _priority_of(solution.mode, solution.grid, u)
        for f, (_, u) in committed.items()
    }
    return AssignmentMap(mode=solution.mode, entries=committed, priority=priority,
                         rng_seed=None, surrogate_trace=tuple(trace))
