"""Command-line front end.

Subcommands: gen-instances, solve, train, benchmark, sweep-cores,
sweep-episodes, plot-data. All outputs are plain CSV/JSONL files so any
plotting tool can consume them.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ScenarioConfig
from .dqn import TrainerConfig
from .experiment import (CSV_HEADER, QosSweep, emit_best_so_far_series,
                         emit_plot_series, generate_feasible_instances,
                         read_metric_rows, run_benchmark, sweep_cores,
                         sweep_episodes, write_metric_rows)
from .parallel import run_parallel
from .radio import load_instance, save_instance
from .solver import solve_pruned
from .tabular import TabularConfig


def _load_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        return ScenarioConfig.from_file(args.config)
    return ScenarioConfig()


def _int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _apply_level(config: ScenarioConfig, level: int) -> ScenarioConfig:
    return config.replace(qos_targets=QosSweep().targets(level, config))


def cmd_gen_instances(args) -> int:
    config = _apply_level(_load_config(args), args.qos_level)
    instances, attempts = generate_feasible_instances(config, args.count, args.seed)
    os.makedirs(args.out, exist_ok=True)
    for i, instance in enumerate(instances):
        save_instance(instance, os.path.join(args.out, f"instance{i:04d}.csv"))
    print(f"wrote {len(instances)} feasible instances to {args.out} "
          f"({attempts} draws, acceptance {len(instances) / attempts:.1%})")
    return 0


def cmd_solve(args) -> int:
    result = solve_pruned(load_instance(args.instance))
    print(result.csv_row())
    return 0


def cmd_train(args) -> int:
    instance = load_instance(args.instance)
    cfg = TrainerConfig(episodes=args.episodes)
    selected, outcomes = run_parallel(instance, cfg, args.cores, args.seed,
                                      n_workers=args.workers, log_dir=args.log_dir)
    for outcome in outcomes:
        found = "feasible" if outcome.found_feasible else "outage"
        print(f"core {outcome.core_id}: {found}, throughput "
              f"{outcome.throughput!r}, {outcome.wall_time:.2f}s")
    if selected is None:
        print("result: outage (no replica found a feasible assignment)")
    else:
        assignment = ";".join(str(int(x)) for x in selected.assignment)
        print(f"result: core {selected.core_id}, throughput "
              f"{selected.throughput!r}, assignment {assignment}")
    return 0


def cmd_benchmark(args) -> int:
    config = _load_config(args)
    trainer = TrainerConfig(episodes=args.episodes)
    rows = run_benchmark(config, _int_list(args.levels), args.count, args.seed,
                         algorithms=tuple(args.algorithms.split(",")),
                         trainer=trainer, tabular=TabularConfig(episodes=args.episodes),
                         cores=args.cores, n_workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "metrics.csv")
    write_metric_rows(rows, path)
    print(CSV_HEADER)
    for row in rows:
        print(row.csv_row())
    print(f"wrote {path}")
    return 0


def cmd_sweep_cores(args) -> int:
    config = _load_config(args)
    trainer = TrainerConfig(episodes=args.episodes)
    rows = sweep_cores(config, args.qos_level, _int_list(args.cores_list),
                       args.count, args.seed, trainer=trainer,
                       n_workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "metrics_cores.csv")
    write_metric_rows(rows, path)
    for row in rows:
        print(row.csv_row())
    print(f"wrote {path}")
    return 0


def cmd_sweep_episodes(args) -> int:
    config = _load_config(args)
    rows = sweep_episodes(config, args.qos_level, _int_list(args.episodes_list),
                          args.count, args.seed, cores=args.cores)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "metrics_episodes.csv")
    write_metric_rows(rows, path)
    for row in rows:
        print(row.csv_row())
    print(f"wrote {path}")
    return 0


def cmd_plot_data(args) -> int:
    written = []
    if args.metrics:
        written.extend(emit_plot_series(read_metric_rows(args.metrics), args.out))
    if args.train_log:
        os.makedirs(args.out, exist_ok=True)
        name = os.path.splitext(os.path.basename(args.train_log))[0]
        written.append(emit_best_so_far_series(
            args.train_log, os.path.join(args.out, f"best_so_far_{name}.csv")))
    if not written:
        print("nothing to do: pass --metrics and/or --train-log", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbsched",
        description="QoS-constrained resource-block assignment toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instances", help="draw certified-feasible instances")
    p.add_argument("--config", help="scenario config file (key = value)")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--qos-level", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_instances)

    p = sub.add_parser("solve", help="solve one instance file exactly")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", help="train the deep scheduler on one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--episodes", type=int, default=3000)
    p.add_argument("--cores", type=int, default=10, help="restart replicas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--log-dir", help="write one JSONL log per core")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("benchmark", help="compare algorithms over a QoS sweep")
    p.add_argument("--config")
    p.add_argument("--levels", default="1,2,3,4,5,6,7,8,9,10,11")
    p.add_argument("--count", type=int, default=1000, help="instances per level")
    p.add_argument("--episodes", type=int, default=3000)
    p.add_argument("--cores", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--algorithms", default="opt,deep,tabular,random")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("sweep-cores", help="deep metrics versus replica count")
    p.add_argument("--config")
    p.add_argument("--cores-list", default="1,2,5,10")
    p.add_argument("--qos-level", type=int, default=11)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--episodes", type=int, default=3000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep_cores)

    p = sub.add_parser("sweep-episodes", help="deep metrics versus episode budget")
    p.add_argument("--config")
    p.add_argument("--episodes-list", default="500,1000,2000,3000")
    p.add_argument("--qos-level", type=int, default=1)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--cores", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep_episodes)

    p = sub.add_parser("plot-data", help="emit x/y series files for plotting")
    p.add_argument("--metrics", help="metrics CSV from benchmark/sweep commands")
    p.add_argument("--train-log", help="JSONL episode log from train")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
