from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from deeprotor._typing import BoolArray, FloatArray
from deeprotor.exceptions import ConfigError
from deeprotor.rl.params import LearningParams

# row, column offsets of up, down, left, right
GRID_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))


class QTable:
    """Dense action-value table indexed by (state, action)"""

    def __init__(self, n_states: int, n_actions: int, values: Optional[FloatArray] = None):
        if n_states < 1 or n_actions < 1:
            raise ConfigError("a Q-table needs at least one state and one action")
        self.values = np.zeros((n_states, n_actions)) if values is None else np.array(values, dtype=np.float64)
        if self.values.shape != (n_states, n_actions):
            raise ConfigError(f"Q-table values have shape {self.values.shape}, expected {(n_states, n_actions)}")

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def n_actions(self) -> int:
        return self.values.shape[1]

    def __getitem__(self, index: tuple[int, int]) -> float:
        return float(self.values[index])

    def state_max(self, s: int) -> float:
        return float(self.values[s].max())


def tabular_q_update(
    table: QTable, s: int, a: int, r: float, s_next: int, done: bool, params: LearningParams
) -> float:
    """Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)), without bootstrap when ``done``

    Returns the new entry.
    """
    assert 0 <= s < table.n_states and 0 <= s_next < table.n_states, "state index out of range"
    assert 0 <= a < table.n_actions, "action index out of range"
    target = r if done else r + params.gamma * table.state_max(s_next)
    current = table.values[s, a]
    table.values[s, a] = current + params.alpha * (target - current)
    return float(table.values[s, a])


@dataclass(frozen=True)
class FiniteMDP:
    # (S, A, S) transition probabilities
    transitions: FloatArray
    # (S, A) expected immediate reward
    rewards: FloatArray
    # (S,) absorbing states, worth zero
    terminal: BoolArray

    def __post_init__(self):
        n_states, n_actions, n_next = self.transitions.shape
        if n_next != n_states or self.rewards.shape != (n_states, n_actions) or self.terminal.shape != (n_states,):
            raise ConfigError("inconsistent MDP table shapes")
        if not np.allclose(self.transitions.sum(axis=2), 1.0):
            raise ConfigError("transition rows must sum to one")

    @property
    def n_states(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transitions.shape[1]

    def is_deterministic(self) -> bool:
        return bool(np.all(self.transitions.max(axis=2) == 1.0))


def gridworld_mdp(
    rows: int,
    cols: int,
    goal: tuple[int, int],
    walls: Iterable[tuple[int, int]] = (),
    goal_reward: float = 1.0,
) -> FiniteMDP:
    """Deterministic 4-action gridworld; entering ``goal`` pays ``goal_reward`` and ends the episode

    Moves into a wall or off the grid leave the agent in place. State index is ``row * cols + col``.
    """
    wall_set = set(walls)
    if not (0 <= goal[0] < rows and 0 <= goal[1] < cols) or goal in wall_set:
        raise ConfigError(f"goal {goal} must be a free cell of the {rows}x{cols} grid")
    n_states = rows * cols
    transitions = np.zeros((n_states, len(GRID_MOVES), n_states))
    rewards = np.zeros((n_states, len(GRID_MOVES)))
    goal_index = goal[0] * cols + goal[1]
    for row in range(rows):
        for col in range(cols):
            s = row * cols + col
            for a, (dr, dc) in enumerate(GRID_MOVES):
                nr, nc = row + dr, col + dc
                if not (0 <= nr < rows and 0 <= nc < cols) or (nr, nc) in wall_set or (row, col) in wall_set:
                    nr, nc = row, col
                s_next = nr * cols + nc
                transitions[s, a, s_next] = 1.0
                if s_next == goal_index and s != goal_index:
                    rewards[s, a] = goal_reward
    terminal = np.zeros(n_states, dtype=bool)
    terminal[goal_index] = True
    return FiniteMDP(transitions, rewards, terminal)


def value_iteration(
    mdp: FiniteMDP, gamma: float, tolerance: float = 1e-12, max_iterations: int = 100_000
) -> FloatArray:
    """Optimal action values by Bellman optimality sweeps until the sup-norm change is below ``tolerance``"""
    if not 0 <= gamma < 1:
        raise ConfigError("gamma must lie in [0, 1)")
    q = np.zeros((mdp.n_states, mdp.n_actions))
    live = ~mdp.terminal
    for _ in range(max_iterations):
        v = np.where(live, q.max(axis=1), 0.0)
        updated = mdp.rewards + gamma * (mdp.transitions @ v)
        updated[mdp.terminal] = 0.0
        change = float(np.max(np.abs(updated - q)))
        q = updated
        if change <= tolerance:
            break
    return q


def q_learning_sweeps(
    mdp: FiniteMDP,
    params: LearningParams,
    sweeps: int,
    alpha_decay: float = 1.0,
    rng: Optional[np.random.Generator] = None,
) -> QTable:
    """Q-learning over every non-terminal (state, action) pair once per sweep

    Successors come from the transition table, sampled with ``rng`` when the MDP is stochastic. The
    step size is multiplied by ``alpha_decay`` after every sweep.
    """
    if not 0 < alpha_decay <= 1:
        raise ConfigError("alpha decay must lie in (0, 1]")
    deterministic = mdp.is_deterministic()
    if not deterministic and rng is None:
        raise ConfigError("a stochastic MDP needs an rng")
    table = QTable(mdp.n_states, mdp.n_actions)
    successors = mdp.transitions.argmax(axis=2)
    alpha = params.alpha
    for _ in range(sweeps):
        sweep_params = LearningParams(alpha=alpha, gamma=params.gamma)
        for s in range(mdp.n_states):
            if mdp.terminal[s]:
                continue
            for a in range(mdp.n_actions):
                if deterministic:
                    s_next = int(successors[s, a])
                else:
                    assert rng is not None
                    s_next = int(rng.choice(mdp.n_states, p=mdp.transitions[s, a]))
                r = float(mdp.rewards[s, a])
                tabular_q_update(table, s, a, r, s_next, bool(mdp.terminal[s_next]), sweep_params)
        alpha *= alpha_decay
    return table


class MaximizationBiasResult(NamedTuple):
    single_estimator_mean: float
    double_estimator_mean: float


def maximization_bias_experiment(
    n_actions: int = 10, trials: int = 1000, samples: int = 10, seed: int = 0
) -> MaximizationBiasResult:
    """One state, ``n_actions`` actions all worth 0, rewards ~ N(0, 1)

    Each trial estimates every action value twice from independent sample sets. The single estimator
    reports ``max Q1``; the double estimator reports ``Q2[argmax Q1]``.
    """
    rng = np.random.default_rng(seed)
    single = np.empty(trials)
    double = np.empty(trials)
    for trial in range(trials):
        draws = rng.normal(0.0, 1.0, size=(2, n_actions, samples))
        q1, q2 = draws.mean(axis=2)
        single[trial] = q1.max()
        double[trial] = q2[int(np.argmax(q1))]
    return MaximizationBiasResult(float(single.mean()), float(double.mean()))
