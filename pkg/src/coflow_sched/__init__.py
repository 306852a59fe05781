"""Coflow scheduling on heterogeneous parallel network cores.

A coflow is a set of point-to-point flows between the input and output
ports of a switching fabric; its completion time is the completion time
of its slowest flow.  This package schedules a batch of coflows across
``m`` parallel network cores of different speeds so that the overall
makespan is small.  It provides:

* instance representation, validation and closed-form bounds,
* matrix balancing and permutation-matching decomposition that packs an
  aggregated demand matrix into the minimum number of unit time slots,
* two linear-programming relaxations (per-time-unit and per-interval),
* randomized rounding and greedy derandomized rounding of LP solutions,
* a per-core slot-level simulator with feasibility checks,
* a benchmark harness with a brute-force oracle and a CLI.
"""

from coflow_sched.instance import (
    CoflowInstance,
    FlowId,
    IntervalGrid,
    ValidationReport,
    build_interval_grid,
    load_instance,
    makespan_lower_bound,
    peak_load,
    port_loads,
    tie_break_key,
    time_horizon,
    validate_instance,
)
from coflow_sched.bvn import BvnDecomposition, augment, decompose, schedule_aggregated
from coflow_sched.lp import (
    LpModel,
    LpSolution,
    build_interval_indexed,
    build_time_indexed,
    check_solution,
    flow_completion_bound,
    solve_lp,
)
from coflow_sched.rounding import (
    AssignmentMap,
    conditional_makespan,
    derandomize,
    sample_interval_assignment,
    sample_time_assignment,
)
from coflow_sched.scheduling import (
    Schedule,
    aggregate_per_core,
    build_schedule,
    evaluate_schedule,
    verify_schedule,
)
from coflow_sched.generator import GeneratorParams, generate_instance
from coflow_sched.oracle import brute_force_makespan
from coflow_sched.bench import ExperimentConfig, run_experiment

__all__ = [
    "AssignmentMap",
    "BvnDecomposition",
    "CoflowInstance",
    "ExperimentConfig",
    "FlowId",
    "GeneratorParams",
    "IntervalGrid",
    "LpModel",
    "LpSolution",
    "Schedule",
    "ValidationReport",
    "aggregate_per_core",
    "augment",
    "brute_force_makespan",
    "build_interval_grid",
    "build_interval_indexed",
    "build_schedule",
    "build_time_indexed",
    "check_solution",
    "conditional_makespan",
    "decompose",
    "derandomize",
    "evaluate_schedule",
    "flow_completion_bound",
    "generate_instance",
    "load_instance",
    "makespan_lower_bound",
    "peak_load",
    "port_loads",
    "run_experiment",
    "sample_interval_assignment",
    "sample_time_assignment",
    "schedule_aggregated",
    "solve_lp",
    "tie_break_key",
    "time_horizon",
    "validate_instance",
    "verify_schedule",
]

__version__ = "0.1.0"
