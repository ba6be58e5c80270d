"""Multi-agent deep Q-learning scheduler with shared replay and target net.

One agent per RB; each agent's action picks the UE that RB serves, so
the joint action of all agents is an assignment. Agents act greedily
against a shared target network (updated every few episodes from the
training network) and every agent stores its experience with the common
shaped reward into one bounded FIFO replay memory; a central training
step fits the training network on uniformly sampled batches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .assignment import evaluate, shaped_reward
from .errors import ConfigurationError, InvalidParameterError
from .neural import (AdamState, ValueNetwork, adam_step, copy_parameters,
                     forward, init_network, loss_and_gradient)
from .radio import Instance


@dataclass
class TrainerConfig:
    episodes: int = 3000
    batch_size: int = 256
    memory_capacity: int = 1000
    target_update_period: int = 5
    discount: float = 0.0
    epsilon_start: float = 0.8
    epsilon_decay: float = 0.001
    epsilon_floor: float = 0.01
    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    hidden_sizes: tuple[int, ...] = (64, 64)
    seed: int = 0
    return_last_action: bool = False   # emit the literal final joint action
                                       # instead of the best feasible one visited

    def __post_init__(self):
        if self.batch_size < 1 or self.memory_capacity < 1:
            raise ConfigurationError("batch_size and memory_capacity must be >= 1")
        if self.target_update_period < 1:
            raise ConfigurationError("target_update_period must be >= 1")
        if not 0.0 <= self.discount < 1.0:
            raise ConfigurationError("discount must lie in [0, 1)")
        if self.episodes < 1:
            raise ConfigurationError("episodes must be >= 1")


@dataclass
class EpsilonSchedule:
    """Exploration probability decaying exponentially toward a floor."""

    start: float = 0.8
    decay: float = 0.001
    floor: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.floor <= self.start <= 1.0:
            raise ConfigurationError("need 0 <= floor <= start <= 1")
        if self.decay < 0:
            raise ConfigurationError("decay must be >= 0")

    def value(self, episode: int) -> float:
        return self.floor + (self.start - self.floor) * math.exp(-self.decay * episode)


@dataclass
class ExperienceTuple:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray


class ReplayMemory:
    """Bounded FIFO of experiences backed by preallocated arrays.

    Insertion past capacity overwrites the oldest entries. Sampling is
    uniform without replacement.
    """

    def __init__(self, capacity: int, state_dim: int):
        if capacity < 1:
            raise ConfigurationError("capacity must be >= 1")
        self.capacity = capacity
        self.states = np.empty((capacity, state_dim))
        self.actions = np.empty(capacity, dtype=np.intp)
        self.rewards = np.empty(capacity)
        self.next_states = np.empty((capacity, state_dim))
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, state, action, reward, next_state):
        self.states[self._cursor] = state
        self.actions[self._cursor] = action
        self.rewards[self._cursor] = reward
        self.next_states[self._cursor] = next_state
        self._cursor = (self._cursor + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def push_batch(self, states, actions, rewards, next_states):
        k = len(actions)
        rows = (self._cursor + np.arange(k)) % self.capacity
        self.states[rows] = states
        self.actions[rows] = actions
        self.rewards[rows] = rewards
        self.next_states[rows] = next_states
        self._cursor = (self._cursor + k) % self.capacity
        self._size = min(self._size + k, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        """min(batch_size, len) experiences, uniform without replacement."""
        if self._size == 0:
            raise InvalidParameterError("cannot sample from an empty memory")
        rows = rng.choice(self._size, size=min(batch_size, self._size), replace=False)
        return (self.states[rows], self.actions[rows],
                self.rewards[rows], self.next_states[rows])

    def tuples(self) -> list[ExperienceTuple]:
        """Stored experiences, oldest first."""
        if self._size < self.capacity:
            order = np.arange(self._size)
        else:
            order = (self._cursor + np.arange(self.capacity)) % self.capacity
        return [ExperienceTuple(self.states[i].copy(), int(self.actions[i]),
                                float(self.rewards[i]), self.next_states[i].copy())
                for i in order]


class AgentStateEncoder:
    """Encodes per-agent states for one instance.

    Agent n's state is the shared assignment vector scaled into [0, 1]
    by 1/(J-1), concatenated with agent n's per-UE SNR features. Raw
    linear SNRs span orders of magnitude, so they enter as log10(1+snr)
    standardized to zero mean and unit variance over the whole instance.
    """

    def __init__(self, instance: Instance):
        self.num_rbs = instance.num_rbs
        self.num_ues = instance.num_ues
        self.state_dim = self.num_rbs + self.num_ues
        feats = np.log10(1.0 + instance.snr)
        sd = feats.std()
        feats = (feats - feats.mean()) / sd if sd > 0 else np.zeros_like(feats)
        self.features = np.ascontiguousarray(feats.T)   # row n = UE features on RB n
        self.scale = 1.0 / (self.num_ues - 1) if self.num_ues > 1 else 0.0

    def encode(self, assignment) -> np.ndarray:
        out = np.empty((self.num_rbs, self.state_dim))
        out[:, :self.num_rbs] = np.asarray(assignment) * self.scale
        out[:, self.num_rbs:] = self.features
        return out


def select_actions(target_net: ValueNetwork, states: np.ndarray, epsilon: float,
                   rng: np.random.Generator) -> np.ndarray:
    """One UE index per agent: random with probability epsilon, else the
    argmax of the target network (ties to the lowest UE index).

    All agents act simultaneously against the same target parameters.
    Both random streams are drawn every call so the generator state
    advances identically whatever the explore outcomes.
    """
    num_agents = states.shape[0]
    num_actions = target_net.output_dim
    greedy = np.argmax(forward(target_net, states), axis=1)
    explore = rng.random(num_agents) < epsilon
    randoms = rng.integers(0, num_actions, size=num_agents)
    return np.where(explore, randoms, greedy)


def build_target(experience: ExperienceTuple, target_net: ValueNetwork,
                 discount: float) -> float:
    """Training target: reward + discount * best target-net value at the
    next state. Collapses to the stored reward exactly when discount is 0."""
    if not np.isfinite(experience.reward):
        raise InvalidParameterError("non-finite reward in experience")
    return experience.reward + discount * float(np.max(forward(target_net,
                                                               experience.next_state)))


class TrainStepInfo(NamedTuple):
    loss: float
    targets: np.ndarray
    rewards: np.ndarray


def train_step(train_net: ValueNetwork, adam: AdamState, target_net: ValueNetwork,
               memory: ReplayMemory, cfg: TrainerConfig,
               rng: np.random.Generator) -> TrainStepInfo | None:
    """Sample a batch, build targets, take one Adam step on the training net.

    Trains on all stored tuples while the memory holds fewer than a full
    batch. Returns None (no-op) when the memory is empty.
    """
    if len(memory) == 0:
        return None
    states, actions, rewards, next_states = memory.sample(cfg.batch_size, rng)
    if cfg.discount != 0.0:
        targets = rewards + cfg.discount * forward(target_net, next_states).max(axis=1)
    else:
        targets = rewards
    loss, grad = loss_and_gradient(train_net, states, actions, targets)
    adam_step(train_net, grad, adam)
    return TrainStepInfo(loss=loss, targets=targets, rewards=rewards)


@dataclass
class TrainingResult:
    best_assignment: np.ndarray | None
    best_throughput: float
    selected_assignment: np.ndarray | None
    final_assignment: np.ndarray
    rewards: np.ndarray
    feasible: np.ndarray
    best_so_far: np.ndarray
    episodes: int


def run_training(instance: Instance, cfg: TrainerConfig, *,
                 train_net: ValueNetwork | None = None,
                 rng: np.random.Generator | None = None,
                 log_file=None,
                 batch_callback: Callable[[int, TrainStepInfo], None] | None = None,
                 ) -> TrainingResult:
    """Run the episode loop on one instance.

    Each episode: all agents pick actions from the target network, the
    joint action is evaluated to one common reward, every agent's
    experience is stored, one training step runs, the target network is
    refreshed every ``target_update_period`` episodes, and exploration
    decays. The networks are seeded from ``rng`` unless ``train_net`` is
    given; the target starts as a copy of the training net.

    Returns the best feasible assignment visited (None when every
    visited assignment was infeasible, a legitimate outage outcome).
    ``log_file`` takes a writable text handle for JSON-lines episode
    records; ``batch_callback(episode, info)`` observes every training
    batch.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    encoder = AgentStateEncoder(instance)
    num_ues, num_rbs = instance.num_ues, instance.num_rbs
    if train_net is None:
        train_net = init_network((encoder.state_dim, *cfg.hidden_sizes, num_ues), rng)
    if train_net.input_dim != encoder.state_dim or train_net.output_dim != num_ues:
        raise InvalidParameterError("network shape does not fit this instance")
    target_net = train_net.clone()
    adam = AdamState.for_params(train_net.num_params, cfg.learning_rate,
                                cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon)
    memory = ReplayMemory(cfg.memory_capacity, encoder.state_dim)
    schedule = EpsilonSchedule(cfg.epsilon_start, cfg.epsilon_decay, cfg.epsilon_floor)

    assignment = rng.integers(0, num_ues, size=num_rbs)
    states = encoder.encode(assignment)
    best_assignment = None
    best_throughput = math.nan
    rewards = np.empty(cfg.episodes)
    feasible = np.zeros(cfg.episodes, dtype=bool)
    best_trace = np.full(cfg.episodes, math.nan)
    shared_reward = np.empty(num_rbs)

    for episode in range(cfg.episodes):
        eps = schedule.value(episode)
        actions = select_actions(target_net, states, eps, rng)
        report = evaluate(instance, actions)
        phi = shaped_reward(instance, report)
        next_states = encoder.encode(actions)
        shared_reward[:] = phi     # the reward is common to all agents
        memory.push_batch(states, actions, shared_reward, next_states)
        info = train_step(train_net, adam, target_net, memory, cfg, rng)
        if batch_callback is not None and info is not None:
            batch_callback(episode, info)
        if (episode + 1) % cfg.target_update_period == 0:
            copy_parameters(train_net, target_net)
        if report.feasible and (best_assignment is None or phi > best_throughput):
            best_assignment = actions.copy()
            best_throughput = phi      # equals system throughput when feasible
        rewards[episode] = phi
        feasible[episode] = report.feasible
        best_trace[episode] = best_throughput
        if log_file is not None:
            log_file.write(json.dumps({
                "episode": episode, "epsilon": eps, "reward": phi,
                "feasible": report.feasible,
                "best_throughput": None if best_assignment is None else best_throughput,
            }) + "\n")
        states = next_states

    final_assignment = actions
    selected = final_assignment if cfg.return_last_action else best_assignment
    return TrainingResult(best_assignment=best_assignment,
                          best_throughput=best_throughput,
                          selected_assignment=selected,
                          final_assignment=final_assignment,
                          rewards=rewards, feasible=feasible,
                          best_so_far=best_trace, episodes=cfg.episodes)
