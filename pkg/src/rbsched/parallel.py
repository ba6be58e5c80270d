"""Best-of-K restarts: independently seeded trainings, best feasible wins.

A "core" is a logical replica with its own weight initialization and
exploration stream. Replicas share nothing, so physical parallelism is
only an execution hint; results are identical whatever the worker count.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from .dqn import TrainerConfig, run_training
from .errors import ConfigurationError
from .radio import Instance


@dataclass
class RunOutcome:
    core_id: int
    assignment: np.ndarray | None
    throughput: float          # nan when no feasible assignment was found
    episodes: int
    wall_time: float

    @property
    def found_feasible(self) -> bool:
        return self.assignment is not None


def _run_one(instance: Instance, cfg: TrainerConfig, core_id: int, seed: int,
             log_dir) -> RunOutcome:
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    log_file = None
    if log_dir is not None:
        os.makedirs(log_dir, exist_ok=True)
        log_file = open(os.path.join(log_dir, f"core{core_id:02d}.jsonl"), "w")
    try:
        result = run_training(instance, cfg, rng=rng, log_file=log_file)
    finally:
        if log_file is not None:
            log_file.close()
    return RunOutcome(core_id=core_id,
                      assignment=result.selected_assignment,
                      throughput=result.best_throughput,
                      episodes=result.episodes,
                      wall_time=time.perf_counter() - started)


def _run_one_star(args):
    return _run_one(*args)


def select_best(outcomes) -> RunOutcome | None:
    """Feasible outcome with maximum throughput; ties to the lowest core id.
    None means outage: no replica produced a feasible assignment."""
    best = None
    for outcome in sorted(outcomes, key=lambda o: o.core_id):
        if not outcome.found_feasible:
            continue
        if best is None or outcome.throughput > best.throughput:
            best = outcome
    return best


def run_parallel(instance: Instance, cfg: TrainerConfig, cores: int,
                 seed_base: int, *, n_workers: int = 1,
                 log_dir=None) -> tuple[RunOutcome | None, list[RunOutcome]]:
    """Train ``cores`` replicas with seeds seed_base+1 .. seed_base+cores.

    Returns (selected outcome or None on outage, all outcomes ordered by
    core id). Deterministic in (instance, cfg, cores, seed_base); seed
    sets for increasing ``cores`` are nested, so the selected throughput
    can only improve with more cores.
    """
    if cores < 1:
        raise ConfigurationError("cores must be >= 1")
    jobs = [(instance, cfg, core, seed_base + core, log_dir)
            for core in range(1, cores + 1)]
    if n_workers > 1 and cores > 1:
        with get_context("spawn").Pool(min(n_workers, cores)) as pool:
            outcomes = pool.map(_run_one_star, jobs)
    else:
        outcomes = [_run_one_star(job) for job in jobs]
    outcomes.sort(key=lambda o: o.core_id)
    return select_best(outcomes), outcomes
