"""Benchmark harness: QoS sweeps, algorithm comparison, outage/throughput
metrics with confidence intervals, and plot-ready series emission.

Every random stream is derived from one master seed with fixed integer
tags, so a rerun reproduces results byte-for-byte regardless of worker
count, and all algorithms see identical channel realizations.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np
from scipy import stats

from .assignment import evaluate
from .config import ScenarioConfig
from .dqn import TrainerConfig, run_training
from .errors import InfeasibleScenarioError
from .parallel import run_parallel, select_best
from .radio import Instance, generate_instance
from .solver import OPTIMAL, solve_pruned
from .tabular import TabularConfig, run_tabular

# stream tags for seed derivation
_DEEP, _TABULAR, _RANDOM, _INSTANCES = 1, 2, 3, 4

DEFAULT_ALGORITHMS = ("opt", "deep", "tabular", "random")

_Z95 = float(stats.norm.ppf(0.975))


@dataclass
class QosSweep:
    """Per-UE throughput targets indexed by level.

    Level k sets the first service's target to base + step*(k-1); each
    subsequent service adds ``service_offset`` on top.
    """

    levels: int = 11
    base: float = 150e3
    step: float = 70e3
    service_offset: float = 150e3

    def targets(self, level: int, config: ScenarioConfig) -> tuple[float, ...]:
        if not 1 <= level <= self.levels:
            raise ValueError(f"level must lie in 1..{self.levels}, got {level}")
        first = self.base + self.step * (level - 1)
        return tuple(first + self.service_offset * svc for svc in config.service_of)


@dataclass
class MetricRow:
    algorithm: str
    qos_level: int
    mean_throughput: float     # bits/s over non-outage instances
    ci95_halfwidth: float
    outage_rate: float
    instances: int

    def csv_row(self) -> str:
        return (f"{self.algorithm},{self.qos_level},{self.mean_throughput!r},"
                f"{self.ci95_halfwidth!r},{self.outage_rate!r},{self.instances}")


CSV_HEADER = "algorithm,qos_level,mean_throughput_bps,ci95_halfwidth_bps,outage_rate,instances"


def derive_seed(*entropy: int) -> int:
    """Stable 64-bit seed from integer tags."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1, np.uint64)[0])


def generate_feasible_instances(config: ScenarioConfig, count: int,
                                master_seed: int,
                                mcs=None) -> tuple[list[Instance], int]:
    """Rejection-sample ``count`` instances certified feasible by the exact
    solver. Channel draws are keyed by attempt index only, so two configs
    differing in QoS targets see the same channel realizations.

    Returns (instances, attempts). Aborts when the rejection rate exceeds
    99% (the QoS level is likely unattainable under this config).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    instances: list[Instance] = []
    attempts = 0
    while len(instances) < count:
        rng = np.random.default_rng(
            np.random.SeedSequence([master_seed, _INSTANCES, attempts]))
        candidate = generate_instance(config, rng, instance_id=attempts, mcs=mcs)
        attempts += 1
        if solve_pruned(candidate).status == OPTIMAL:
            instances.append(candidate)
        if attempts >= 200 and len(instances) < 0.01 * attempts:
            raise InfeasibleScenarioError(
                f"only {len(instances)}/{attempts} draws feasible; "
                f"targets {config.qos_targets} look unattainable under this config")
    return instances, attempts


def _random_assignment_result(instance: Instance, seed: int):
    rng = np.random.default_rng(seed)
    assignment = rng.integers(0, instance.num_ues, size=instance.num_rbs)
    report = evaluate(instance, assignment)
    return (report.system_throughput, assignment) if report.feasible else (None, None)


def run_algorithm(name: str, instance: Instance, level: int, index: int,
                  master_seed: int, trainer: TrainerConfig,
                  tabular: TabularConfig, cores: int,
                  log_dir=None) -> float | None:
    """Throughput achieved by one algorithm on one instance, or None on
    outage (no feasible assignment returned)."""
    if name == "opt":
        result = solve_pruned(instance)
        return result.objective if result.status == OPTIMAL else None
    if name == "deep":
        seed_base = derive_seed(master_seed, _DEEP, level, index)
        selected, _ = run_parallel(instance, trainer, cores, seed_base,
                                   log_dir=log_dir)
        return None if selected is None else selected.throughput
    if name == "tabular":
        seed = derive_seed(master_seed, _TABULAR, level, index)
        result = run_tabular(instance, dataclasses.replace(tabular, seed=seed))
        return None if result.best_assignment is None else result.best_throughput
    if name == "random":
        throughput, _ = _random_assignment_result(
            instance, derive_seed(master_seed, _RANDOM, level, index))
        return throughput
    raise ValueError(f"unknown algorithm {name!r}")


def _benchmark_cell(args):
    instance, level, index, algorithms, master_seed, trainer, tabular, cores = args
    return index, {name: run_algorithm(name, instance, level, index, master_seed,
                                       trainer, tabular, cores)
                   for name in algorithms}


def summarize(algorithm: str, level: int, throughputs: list[float | None]) -> MetricRow:
    """Fold per-instance outcomes into one row. The throughput mean and CI
    cover non-outage instances only; outages enter the outage rate."""
    values = np.array([t for t in throughputs if t is not None], dtype=float)
    outage_rate = 1.0 - values.size / len(throughputs)
    if values.size == 0:
        mean = ci = float("nan")
    elif values.size == 1:
        mean, ci = float(values[0]), float("nan")
    else:
        mean = float(values.mean())
        ci = float(_Z95 * values.std(ddof=1) / np.sqrt(values.size))
    return MetricRow(algorithm=algorithm, qos_level=level, mean_throughput=mean,
                     ci95_halfwidth=ci, outage_rate=outage_rate,
                     instances=len(throughputs))


def run_benchmark(config: ScenarioConfig, levels, count: int, master_seed: int,
                  *, algorithms=DEFAULT_ALGORITHMS, sweep: QosSweep | None = None,
                  trainer: TrainerConfig | None = None,
                  tabular: TabularConfig | None = None,
                  cores: int = 10, n_workers: int = 1) -> list[MetricRow]:
    """Outage and throughput of each algorithm at each QoS level, over
    ``count`` certified-feasible instances per level."""
    sweep = sweep or QosSweep()
    trainer = trainer or TrainerConfig()
    tabular = tabular or TabularConfig()
    rows = []
    for level in levels:
        level_config = config.replace(qos_targets=sweep.targets(level, config))
        instances, _ = generate_feasible_instances(level_config, count, master_seed)
        tasks = [(inst, level, idx, tuple(algorithms), master_seed, trainer,
                  tabular, cores) for idx, inst in enumerate(instances)]
        if n_workers > 1:
            with get_context("spawn").Pool(n_workers) as pool:
                cells = pool.map(_benchmark_cell, tasks)
        else:
            cells = [_benchmark_cell(task) for task in tasks]
        cells.sort(key=lambda c: c[0])
        for name in algorithms:
            rows.append(summarize(name, level, [cell[name] for _, cell in cells]))
    return rows


def sweep_cores(config: ScenarioConfig, level: int, core_counts, count: int,
                master_seed: int, *, sweep: QosSweep | None = None,
                trainer: TrainerConfig | None = None,
                n_workers: int = 1) -> list[MetricRow]:
    """Deep-method metrics versus replica count, with nested seed sets.

    Outcomes are computed once at max(core_counts) replicas per instance
    and reduced over seed prefixes, which is exactly what independent
    runs at each K would produce.
    """
    sweep = sweep or QosSweep()
    trainer = trainer or TrainerConfig()
    core_counts = sorted(set(int(k) for k in core_counts))
    max_cores = core_counts[-1]
    level_config = config.replace(qos_targets=sweep.targets(level, config))
    instances, _ = generate_feasible_instances(level_config, count, master_seed)

    per_instance = []
    for idx, instance in enumerate(instances):
        seed_base = derive_seed(master_seed, _DEEP, level, idx)
        _, outcomes = run_parallel(instance, trainer, max_cores, seed_base,
                                   n_workers=n_workers)
        per_instance.append(outcomes)

    rows = []
    for k in core_counts:
        throughputs = []
        for outcomes in per_instance:
            selected = select_best(outcomes[:k])
            throughputs.append(None if selected is None else selected.throughput)
        row = summarize(f"deep-k{k}", level, throughputs)
        rows.append(row)
    return rows


def sweep_episodes(config: ScenarioConfig, level: int, episode_budgets, count: int,
                   master_seed: int, *, sweep: QosSweep | None = None,
                   trainer: TrainerConfig | None = None,
                   cores: int = 10) -> list[MetricRow]:
    """Deep-method metrics versus episode budget.

    A budget-E run with a given seed reproduces the first E episodes of a
    longer run, so each replica is trained once at the largest budget and
    its best-so-far trace is read at every requested budget.
    """
    sweep = sweep or QosSweep()
    trainer = trainer or TrainerConfig()
    episode_budgets = sorted(set(int(e) for e in episode_budgets))
    level_config = config.replace(qos_targets=sweep.targets(level, config))
    instances, _ = generate_feasible_instances(level_config, count, master_seed)

    traces = []    # per instance: (cores, max_budget) best-so-far matrix
    long_cfg = dataclasses.replace(trainer, episodes=episode_budgets[-1])
    for idx, instance in enumerate(instances):
        seed_base = derive_seed(master_seed, _DEEP, level, idx)
        per_core = [run_training(instance, long_cfg,
                                 rng=np.random.default_rng(seed_base + core)).best_so_far
                    for core in range(1, cores + 1)]
        traces.append(np.vstack(per_core))

    rows = []
    for budget in episode_budgets:
        throughputs = []
        for trace in traces:
            column = trace[:, budget - 1]
            best = np.nanmax(column) if not np.all(np.isnan(column)) else None
            throughputs.append(None if best is None else float(best))
        rows.append(summarize(f"deep-e{budget}", level, throughputs))
    return rows


def write_metric_rows(rows, path):
    """Deterministic CSV, one row per MetricRow."""
    with open(path, "w") as fh:
        fh.write("# mean_throughput_bps averages non-outage instances only; "
                 "ci95 is a normal-approximation half-width\n")
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_row() + "\n")


def read_metric_rows(path) -> list[MetricRow]:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("algorithm,"):
                continue
            alg, level, mean, ci, outage, n = line.split(",")
            rows.append(MetricRow(alg, int(level), float(mean), float(ci),
                                  float(outage), int(n)))
    return rows


def emit_plot_series(rows, out_dir):
    """Per-algorithm x/y series files: throughput and outage versus level."""
    os.makedirs(out_dir, exist_ok=True)
    by_algorithm: dict[str, list[MetricRow]] = {}
    for row in rows:
        by_algorithm.setdefault(row.algorithm, []).append(row)
    written = []
    for algorithm, alg_rows in sorted(by_algorithm.items()):
        alg_rows = sorted(alg_rows, key=lambda r: r.qos_level)
        tp_path = os.path.join(out_dir, f"throughput_vs_level_{algorithm}.csv")
        with open(tp_path, "w") as fh:
            fh.write("qos_level,mean_throughput_bps,ci95_halfwidth_bps\n")
            for row in alg_rows:
                fh.write(f"{row.qos_level},{row.mean_throughput!r},{row.ci95_halfwidth!r}\n")
        out_path = os.path.join(out_dir, f"outage_vs_level_{algorithm}.csv")
        with open(out_path, "w") as fh:
            fh.write("qos_level,outage_rate\n")
            for row in alg_rows:
                fh.write(f"{row.qos_level},{row.outage_rate!r}\n")
        written.extend([tp_path, out_path])
    return written


def emit_best_so_far_series(log_path, out_path):
    """Episode/best-throughput series from a JSON-lines training log."""
    with open(log_path) as fh, open(out_path, "w") as out:
        out.write("episode,best_throughput_bps\n")
        for line in fh:
            record = json.loads(line)
            best = record["best_throughput"]
            out.write(f"{record['episode']},{'' if best is None else repr(best)}\n")
    return out_path
