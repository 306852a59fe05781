"""Turning a committed assignment into a verified per-core schedule.

Each core schedules its assigned flows as one aggregated coflow: the
per-cell demands are summed into a matrix, every cell keeps a queue of
its flows ordered by priority, and the balance-and-decompose routine
packs the matrix into unit slots.  A unit slot on core ``p`` lasts
``1/s_p`` real time, so core ``p`` finishes at ``peak_load(D_p)/s_p``
and cores run independently of one another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coflow_sched.bvn import schedule_aggregated
from coflow_sched.instance import CoflowInstance, FlowId, ValidationReport, peak_load, tie_break_key
from coflow_sched.rounding import AssignmentMap

Slot = list[tuple[int, int, FlowId]]


@dataclass
class Schedule:
    """Slot-level schedule: per core, per slot, the unit transmissions.

    ``flow_completion[f]`` is the real completion time of flow ``f``
    (its last unit's slot index divided by its core's speed);
    ``coflow_completion[k]`` is the maximum over coflow ``k``'s flows,
    and ``makespan`` the maximum over coflows.
    """

    core_slots: dict[int, list[Slot]]
    flow_core: dict[FlowId, int]
    flow_completion: dict[FlowId, float]
    coflow_completion: dict[int, float]
    makespan: float

    def to_json_dict(self) -> dict:
        return {
            "cores": {
                str(p): [
                    [[i, j, [f.i, f.j, f.k]] for i, j, f in slot]
                    for slot in slots
                ]
                for p, slots in self.core_slots.items()
            },
            "flow_completion": {
                f"{f.i},{f.j},{f.k}": t for f, t in sorted(self.flow_completion.items())
            },
            "coflow_completion": {str(k): t for k, t in sorted(self.coflow_completion.items())},
            "makespan": self.makespan,
        }


def aggregate_per_core(
    assignment: AssignmentMap, instance: CoflowInstance
) -> dict[int, tuple[np.ndarray, dict[tuple[int, int], list[tuple[FlowId, int]]]]]:
    """Group assigned flows into one demand matrix plus cell queues per core.

    Queues order each cell's flows by priority key; flows with equal
    keys are ordered by :func:`tie_break_key` for deterministic
    assignments and by a seeded shuffle for randomized ones (the seed is
    derived from the assignment's own ``rng_seed``).
    """
    n = instance.num_ports
    flows = instance.flows()
    if set(assignment.entries) != set(flows):
        raise ValueError("assignment must cover exactly the instance's flows")
    if assignment.rng_seed is not None:
        rng = np.random.default_rng([assignment.rng_seed, 0x7165])
        jitter = {f: rng.random() for f in flows}
        sort_key = lambda f: (assignment.priority[f], jitter[f])
    else:
        sort_key = lambda f: (assignment.priority[f], tie_break_key(f))

    per_core: dict[int, tuple[np.ndarray, dict]] = {}
    for flow in sorted(flows, key=sort_key):
        p = assignment.core_of(flow)
        if p not in per_core:
            per_core[p] = (np.zeros((n, n), dtype=np.int64), {})
        matrix, queues = per_core[p]
        d = instance.demand(flow)
        matrix[flow.i, flow.j] += d
        queues.setdefault((flow.i, flow.j), []).append((flow, d))
    return per_core


def build_schedule(assignment: AssignmentMap, instance: CoflowInstance) -> Schedule:
    """Run the per-core slot packing and collect completion times."""
    per_core = aggregate_per_core(assignment, instance)
    core_slots: dict[int, list[Slot]] = {}
    flow_completion: dict[FlowId, float] = {}
    flow_core: dict[FlowId, int] = {}
    for p in sorted(per_core):
        matrix, queues = per_core[p]
        slots, completions = schedule_aggregated(matrix, queues)
        core_slots[p] = slots
        speed = instance.core_speeds[p]
        for flow, slot_index in completions.items():
            flow_completion[flow] = slot_index / speed
            flow_core[flow] = p
    coflow_completion: dict[int, float] = {}
    for flow, t in flow_completion.items():
        coflow_completion[flow.k] = max(coflow_completion.get(flow.k, 0.0), t)
    makespan = max(coflow_completion.values(), default=0.0)
    return Schedule(
        core_slots=core_slots,
        flow_core=flow_core,
        flow_completion=flow_completion,
        coflow_completion=coflow_completion,
        makespan=makespan,
    )


def verify_schedule(schedule: Schedule, instance: CoflowInstance) -> ValidationReport:
    """Feasibility and bookkeeping audit; violations become report errors.

    Checks per-slot port exclusivity, exact delivery of every flow's
    demand, and consistency of the recorded completion times with the
    slot data.
    """
    report = ValidationReport()
    delivered: dict[FlowId, int] = {}
    last_slot: dict[FlowId, int] = {}
    for p, slots in schedule.core_slots.items():
        for w, slot in enumerate(slots, start=1):
            seen_in: set[int] = set()
            seen_out: set[int] = set()
            for i, j, flow in slot:
                if i in seen_in:
                    report.errors.append(
                        f"input port conflict: core {p} slot {w} uses input {i} twice"
                    )
                if j in seen_out:
                    report.errors.append(
                        f"output port conflict: core {p} slot {w} uses output {j} twice"
                    )
                seen_in.add(i)
                seen_out.add(j)
                if (flow.i, flow.j) != (i, j):
                    report.errors.append(
                        f"flow {tuple(flow)} scheduled on foreign cell ({i}, {j})"
                    )
                delivered[flow] = delivered.get(flow, 0) + 1
                last_slot[flow] = w

    for flow in instance.flows():
        want = instance.demand(flow)
        got = delivered.get(flow, 0)
        if got < want:
            report.errors.append(
                f"under-delivery: flow {tuple(flow)} got {got} of {want} units"
            )
        elif got > want:
            report.errors.append(
                f"over-delivery: flow {tuple(flow)} got {got} of {want} units"
            )
    for flow, w in last_slot.items():
        p = schedule.flow_core.get(flow)
        if p is None:
            report.errors.append(f"flow {tuple(flow)} has units but no recorded core")
            continue
        expect = w / instance.core_speeds[p]
        recorded = schedule.flow_completion.get(flow)
        if recorded is None or abs(recorded - expect) > 1e-9:
            report.errors.append(
                f"completion mismatch for flow {tuple(flow)}: recorded {recorded}, slots say {expect}"
            )
    for k, t in schedule.coflow_completion.items():
        member_max = max(
            (schedule.flow_completion[f] for f in schedule.flow_completion if f.k == k),
            default=0.0,
        )
        if abs(t - member_max) > 1e-9:
            report.errors.append(f"coflow {k} completion {t} != max of members {member_max}")
    if schedule.coflow_completion:
        top = max(schedule.coflow_completion.values())
        if abs(schedule.makespan - top) > 1e-9:
            report.errors.append(
                f"makespan {schedule.makespan} != max coflow completion {top}"
            )
    return report


def evaluate_schedule(schedule: Schedule, instance: CoflowInstance,
                      lp_opt: float, lb: float) -> dict:
    """Metrics record: makespan, per-coflow completions, and quality ratios."""
    if lp_opt <= 0:
        raise ValueError(f"lp_opt must be positive, got {lp_opt}")
    return {
        "makespan": schedule.makespan,
        "coflow_completion": dict(sorted(schedule.coflow_completion.items())),
        "ratio_lp": schedule.makespan / lp_opt,
        "ratio_lb": schedule.makespan / lb,
    }


def realized_core_makespans(assignment: AssignmentMap,
                            instance: CoflowInstance) -> dict[int, float]:
    """Per-core finish time implied by an assignment, without simulating."""
    per_core = aggregate_per_core(assignment, instance)
    return {
        p: peak_load(matrix) / instance.core_speeds[p]
        for p, (matrix, _) in per_core.items()
    }
