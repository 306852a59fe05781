"""Experiment orchestration: pipeline runs, trials, and CSV reporting.

One experiment = one instance, one algorithm, and (for randomized
algorithms) a number of seeded trials.  The pipeline per trial is:
build the LP, solve it, commit an assignment, simulate the per-core
schedules, verify feasibility, and report metrics.  Trial seeds are
``seed + trial_index`` so a whole experiment is reproducible from one
integer.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path

from coflow_sched.errors import OracleSizeError
from coflow_sched.instance import (
    CoflowInstance,
    build_interval_grid,
    makespan_lower_bound,
    time_horizon,
)
from coflow_sched.lp import LpSolution, build_interval_indexed, build_time_indexed, solve_lp
from coflow_sched.oracle import brute_force_makespan
from coflow_sched.rounding import (
    AssignmentMap,
    derandomize,
    sample_interval_assignment,
    sample_time_assignment,
)
from coflow_sched.scheduling import Schedule, build_schedule, evaluate_schedule, verify_schedule

ALGORITHMS = ("rand-time", "det-time", "rand-interval", "det-interval")

CSV_COLUMNS = (
    "instance_id", "algorithm", "eta", "trial", "seed", "lp_opt", "lower_bound",
    "oracle_opt", "makespan", "ratio_lp", "ratio_lb", "wall_ms",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """What to run and how to report it.

    ``eta`` is required exactly for the interval algorithms; ``trials``
    only matters for the randomized ones (deterministic algorithms
    always produce a single row).
    """

    algorithm: str
    instance_id: str
    seed: int
    eta: float | None = None
    trials: int = 1
    output_path: str | Path | None = None
    dump_schedule_path: str | Path | None = None
    with_oracle: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; pick one of {ALGORITHMS}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        interval = self.algorithm.endswith("interval")
        if interval and (self.eta is None or not self.eta > 0):
            raise ValueError(f"algorithm {self.algorithm!r} requires a positive eta")
        if not interval and self.eta is not None:
            raise ValueError(f"algorithm {self.algorithm!r} does not take eta")

    @property
    def is_randomized(self) -> bool:
        return self.algorithm.startswith("rand")

    @property
    def is_interval(self) -> bool:
        return self.algorithm.endswith("interval")


@dataclass
class ExperimentResult:
    rows: list[dict]
    all_verified: bool
    schedules: list[Schedule]
    lp_opt: float
    lower_bound: float
    oracle_opt: float | None


def _solve_for(config: ExperimentConfig, instance: CoflowInstance) -> LpSolution:
    if config.is_interval:
        model = build_interval_indexed(instance, config.eta)
    else:
        model = build_time_indexed(instance)
    return solve_lp(model)


def _assign(config: ExperimentConfig, solution: LpSolution,
            instance: CoflowInstance, trial_seed: int) -> AssignmentMap:
    if not config.is_randomized:
        return derandomize(solution, instance)
    if config.is_interval:
        grid = build_interval_grid(config.eta, time_horizon(instance))
        return sample_interval_assignment(solution, instance, grid, trial_seed)
    return sample_time_assignment(solution, instance, trial_seed)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def run_experiment(config: ExperimentConfig, instance: CoflowInstance) -> ExperimentResult:
    """Execute the pipeline and (optionally) write the result table as CSV.

    Randomized algorithms produce one row per trial plus a final mean
    row; metrics in the mean row are arithmetic means over trials.
    """
    lb = makespan_lower_bound(instance)
    solution = _solve_for(config, instance)
    oracle_opt: float | None = None
    if config.with_oracle:
        try:
            oracle_opt = brute_force_makespan(instance)
        except OracleSizeError:
            oracle_opt = None

    trials = config.trials if config.is_randomized else 1
    rows: list[dict] = []
    schedules: list[Schedule] = []
    all_ok = True
    for trial in range(trials):
        trial_seed = config.seed + trial
        start = time.perf_counter()
        assignment = _assign(config, solution, instance, trial_seed)
        schedule = build_schedule(assignment, instance)
        report = verify_schedule(schedule, instance)
        wall_ms = (time.perf_counter() - start) * 1000.0
        all_ok = all_ok and report.ok
        metrics = evaluate_schedule(schedule, instance, solution.c_max, lb)
        schedules.append(schedule)
        rows.append({
            "instance_id": config.instance_id,
            "algorithm": config.algorithm,
            "eta": config.eta,
            "trial": trial,
            "seed": trial_seed,
            "lp_opt": solution.c_max,
            "lower_bound": lb,
            "oracle_opt": oracle_opt,
            "makespan": metrics["makespan"],
            "ratio_lp": metrics["ratio_lp"],
            "ratio_lb": metrics["ratio_lb"],
            "wall_ms": wall_ms,
        })
    if config.is_randomized and trials >= 1:
        mean = dict(rows[0])
        mean["trial"] = "mean"
        mean["seed"] = config.seed
        for key in ("makespan", "ratio_lp", "ratio_lb", "wall_ms"):
            mean[key] = sum(r[key] for r in rows) / trials
        rows.append(mean)

    if config.output_path is not None:
        write_rows(rows, config.output_path)
    if config.dump_schedule_path is not None and schedules:
        Path(config.dump_schedule_path).write_text(
            json.dumps(schedules[0].to_json_dict(), indent=2) + "\n"
        )
    return ExperimentResult(
        rows=rows,
        all_verified=all_ok,
        schedules=schedules,
        lp_opt=solution.c_max,
        lower_bound=lb,
        oracle_opt=oracle_opt,
    )


def write_rows(rows: list[dict], path: str | Path) -> None:
    """Write result rows in the canonical column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
