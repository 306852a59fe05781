"""Command-line interface: ``coflow-sched gen | run | oracle``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from coflow_sched.bench import ALGORITHMS, ExperimentConfig, run_experiment
from coflow_sched.errors import CoflowError
from coflow_sched.generator import GeneratorParams, generate_instance
from coflow_sched.instance import dump_instance, load_instance, makespan_lower_bound
from coflow_sched.oracle import brute_force_makespan


def _speeds(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad speed list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("speed list is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coflow-sched",
        description="Schedule coflows on heterogeneous parallel network cores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random instance JSON file")
    gen.add_argument("--ports", type=int, required=True, help="number of ports N")
    gen.add_argument("--cores", type=int, required=True, help="number of cores m")
    gen.add_argument("--coflows", type=int, required=True, help="number of coflows n")
    gen.add_argument("--density", type=float, required=True,
                     help="probability that a cell holds a flow, in (0, 1]")
    gen.add_argument("--dmin", type=int, required=True, help="minimum positive demand")
    gen.add_argument("--dmax", type=int, required=True, help="maximum demand")
    gen.add_argument("--speeds", type=_speeds, required=True,
                     help="comma-separated speed set (used verbatim when its "
                          "length equals --cores, sampled from otherwise)")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="output instance path")

    run = sub.add_parser("run", help="run one scheduling experiment")
    run.add_argument("--instance", required=True, help="instance JSON path")
    run.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    run.add_argument("--eta", type=float, default=None,
                     help="interval growth parameter (interval algorithms only)")
    run.add_argument("--trials", type=int, default=1,
                     help="trial count for randomized algorithms")
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--out", required=True, help="results CSV path")
    run.add_argument("--dump-schedule", default=None,
                     help="also write the first trial's schedule as JSON")
    run.add_argument("--with-oracle", action="store_true",
                     help="fill the oracle_opt column (exhaustive; tiny instances only)")

    oracle = sub.add_parser("oracle", help="brute-force optimum of a tiny instance")
    oracle.add_argument("--instance", required=True, help="instance JSON path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            params = GeneratorParams(
                num_ports=args.ports,
                num_cores=args.cores,
                num_coflows=args.coflows,
                density=args.density,
                demand_min=args.dmin,
                demand_max=args.dmax,
                speed_set=args.speeds,
                seed=args.seed,
            )
            instance = generate_instance(params)
            dump_instance(instance, args.out)
            print(f"wrote {args.out}")
            return 0
        if args.command == "run":
            instance = load_instance(args.instance)
            config = ExperimentConfig(
                algorithm=args.algorithm,
                instance_id=Path(args.instance).stem,
                seed=args.seed,
                eta=args.eta,
                trials=args.trials,
                output_path=args.out,
                dump_schedule_path=args.dump_schedule,
                with_oracle=args.with_oracle,
            )
            result = run_experiment(config, instance)
            print(f"wrote {args.out} ({len(result.rows)} rows)")
            if not result.all_verified:
                print("schedule verification FAILED", file=sys.stderr)
                return 1
            return 0
        if args.command == "oracle":
            instance = load_instance(args.instance)
            value = brute_force_makespan(instance)
            print(f"oracle_opt {value:.9g}")
            print(f"lower_bound {makespan_lower_bound(instance):.9g}")
            return 0
    except (CoflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
