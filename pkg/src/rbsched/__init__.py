"""QoS-constrained resource-block assignment toolkit.

Generates downlink scheduling instances, solves them exactly, trains a
multi-agent deep Q-learning scheduler and a tabular baseline against
them, and benchmarks throughput and outage across QoS levels.
"""

from .assignment import SatisfactionReport, evaluate, reward, shaped_reward
from .config import ScenarioConfig
from .dqn import (AgentStateEncoder, EpsilonSchedule, ExperienceTuple,
                  ReplayMemory, TrainerConfig, TrainingResult, build_target,
                  run_training, select_actions, train_step)
from .errors import (BudgetExceededError, ConfigurationError,
                     InfeasibleScenarioError, InvalidParameterError)
from .experiment import (MetricRow, QosSweep, generate_feasible_instances,
                         run_benchmark, sweep_cores, sweep_episodes,
                         write_metric_rows)
from .neural import (AdamState, ValueNetwork, adam_step, adam_update,
                     copy_parameters, forward, init_network, load_network,
                     loss_and_gradient, save_network)
from .parallel import RunOutcome, run_parallel, select_best
from .radio import (Instance, McsTable, compute_snr, generate_instance,
                    link_adaptation, load_instance, save_instance)
from .solver import INFEASIBLE, OPTIMAL, OptResult, is_feasible, \
    solve_brute_force, solve_pruned
from .tabular import QTable, TabularConfig, run_tabular

__version__ = "0.1.0"
