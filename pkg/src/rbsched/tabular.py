"""Single-agent tabular Q-learning baseline.

The agent's state is the current assignment vector and each action
reassigns one RB to one UE (N*J actions), so the table grows with the
number of distinct assignments visited. Kept deliberately simple: it is
the memory-hungry reference point the deep scheduler is measured
against. The action encoding is a reconstruction, so comparisons using
it are labelled "baseline (reconstructed)".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .assignment import evaluate, shaped_reward
from .dqn import EpsilonSchedule, TrainingResult
from .errors import ConfigurationError
from .radio import Instance


class QTable:
    """Map from (state, action) to estimated value; absent entries read 0."""

    def __init__(self, num_actions: int, learning_rate: float = 0.1,
                 discount: float = 0.0):
        if not 0.0 < learning_rate <= 1.0:
            raise ConfigurationError("learning_rate must lie in (0, 1]")
        if not 0.0 <= discount < 1.0:
            raise ConfigurationError("discount must lie in [0, 1)")
        self.num_actions = num_actions
        self.learning_rate = learning_rate
        self.discount = discount
        self._table: dict[tuple, np.ndarray] = {}

    def values(self, state: tuple) -> np.ndarray:
        row = self._table.get(state)
        if row is None:
            row = np.zeros(self.num_actions)
            self._table[state] = row
        return row

    def best_value(self, state: tuple) -> float:
        row = self._table.get(state)
        return 0.0 if row is None else float(row.max())

    def bellman_update(self, state: tuple, action: int, reward: float,
                       next_state: tuple):
        """Blend the old estimate with reward + discount * best next value."""
        row = self.values(state)
        row[action] = (1.0 - self.learning_rate) * row[action] \
            + self.learning_rate * (reward + self.discount * self.best_value(next_state))

    @property
    def size(self) -> int:
        """Stored entry count: distinct visited states times actions."""
        return len(self._table) * self.num_actions


@dataclass
class TabularConfig:
    episodes: int = 3000
    learning_rate: float = 0.1
    discount: float = 0.0
    epsilon_start: float = 0.8
    epsilon_decay: float = 0.001
    epsilon_floor: float = 0.01
    seed: int = 0


def run_tabular(instance: Instance, cfg: TabularConfig, *,
                rng: np.random.Generator | None = None,
                table: QTable | None = None,
                log_file=None) -> TrainingResult:
    """Epsilon-greedy walk over assignments, one (rb, ue) reassignment per
    episode, tracking the best feasible assignment visited. A caller-
    provided ``table`` is trained in place (useful for inspection)."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    num_ues, num_rbs = instance.num_ues, instance.num_rbs
    num_actions = num_rbs * num_ues
    if table is None:
        table = QTable(num_actions, cfg.learning_rate, cfg.discount)
    elif table.num_actions != num_actions:
        raise ConfigurationError("table action count does not fit this instance")
    schedule = EpsilonSchedule(cfg.epsilon_start, cfg.epsilon_decay, cfg.epsilon_floor)

    assignment = rng.integers(0, num_ues, size=num_rbs)
    state = tuple(assignment.tolist())
    best_assignment = None
    best_throughput = math.nan
    rewards = np.empty(cfg.episodes)
    feasible = np.zeros(cfg.episodes, dtype=bool)
    best_trace = np.full(cfg.episodes, math.nan)

    for episode in range(cfg.episodes):
        eps = schedule.value(episode)
        explore = rng.random() < eps
        rand_action = int(rng.integers(num_actions))
        action = rand_action if explore else int(np.argmax(table.values(state)))
        rb, ue = divmod(action, num_ues)
        assignment[rb] = ue
        next_state = tuple(assignment.tolist())
        report = evaluate(instance, assignment)
        phi = shaped_reward(instance, report)
        table.bellman_update(state, action, phi, next_state)
        if report.feasible and (best_assignment is None or phi > best_throughput):
            best_assignment = assignment.copy()
            best_throughput = phi
        rewards[episode] = phi
        feasible[episode] = report.feasible
        best_trace[episode] = best_throughput
        if log_file is not None:
            log_file.write(json.dumps({
                "episode": episode, "epsilon": eps, "reward": phi,
                "feasible": report.feasible,
                "best_throughput": None if best_assignment is None else best_throughput,
            }) + "\n")
        state = next_state

    selected = best_assignment
    return TrainingResult(best_assignment=best_assignment,
                          best_throughput=best_throughput,
                          selected_assignment=selected,
                          final_assignment=assignment.copy(),
                          rewards=rewards, feasible=feasible,
                          best_so_far=best_trace, episodes=cfg.episodes)
