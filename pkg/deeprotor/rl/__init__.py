from __future__ import annotations

from deeprotor.rl.params import EpsilonSchedule, LearningParams
from deeprotor.rl.policy import epsilon_at, greedy_action, select_action
from deeprotor.rl.replay import Batch, ReplayBuffer, Transition
from deeprotor.rl.tabular import (
    FiniteMDP,
    QTable,
    gridworld_mdp,
    maximization_bias_experiment,
    q_learning_sweeps,
    tabular_q_update,
    value_iteration,
)
from deeprotor.rl.targets import double_dqn_targets, dqn_targets

__all__ = [
    "Batch",
    "EpsilonSchedule",
    "FiniteMDP",
    "LearningParams",
    "QTable",
    "ReplayBuffer",
    "Transition",
    "double_dqn_targets",
    "dqn_targets",
    "epsilon_at",
    "greedy_action",
    "gridworld_mdp",
    "maximization_bias_experiment",
    "q_learning_sweeps",
    "select_action",
    "tabular_q_update",
    "value_iteration",
]
