from __future__ import annotations

import numpy as np
import pytest

from deeprotor.exceptions import ConfigError
from deeprotor.rl import (
    FiniteMDP,
    LearningParams,
    QTable,
    gridworld_mdp,
    maximization_bias_experiment,
    q_learning_sweeps,
    tabular_q_update,
    value_iteration,
)
from deeprotor.rl.tabular import GRID_MOVES


@pytest.mark.rl
def test_update_examples():
    table = QTable(2, 2)
    table.values[1] = [2.0, -1.0]
    assert tabular_q_update(table, 0, 0, 1.0, 1, False, LearningParams(alpha=0.0, gamma=0.9)) == 0.0
    assert tabular_q_update(table, 0, 0, 1.0, 1, False, LearningParams(alpha=0.5, gamma=0.9)) == pytest.approx(1.4)
    assert table[0, 0] == pytest.approx(1.4)
    # terminal transitions do not bootstrap
    assert tabular_q_update(table, 0, 1, 1.0, 1, True, LearningParams(alpha=1.0, gamma=0.9)) == 1.0
    assert table.state_max(0) == pytest.approx(1.4)


@pytest.mark.rl
def test_qtable_validation():
    with pytest.raises(ConfigError):
        QTable(0, 3)
    with pytest.raises(ConfigError):
        QTable(2, 2, np.zeros((3, 2)))


@pytest.mark.rl
def test_value_iteration_small_cases():
    # one state looping on itself with reward 1
    loop = FiniteMDP(np.ones((1, 1, 1)), np.ones((1, 1)), np.zeros(1, dtype=bool))
    assert value_iteration(loop, 0.9)[0, 0] == pytest.approx(10.0, abs=1e-9)
    mdp = gridworld_mdp(2, 2, goal=(1, 1))
    np.testing.assert_array_equal(value_iteration(mdp, 0.0), mdp.rewards)
    with pytest.raises(ConfigError):
        value_iteration(mdp, 1.0)


@pytest.mark.rl
def test_value_iteration_on_open_grid():
    gamma = 0.9
    mdp = gridworld_mdp(3, 3, goal=(2, 2))
    q = value_iteration(mdp, gamma)
    for row in range(3):
        for col in range(3):
            s = row * 3 + col
            if (row, col) == (2, 2):
                assert np.all(q[s] == 0.0)
                continue
            for a, (dr, dc) in enumerate(GRID_MOVES):
                nr = min(max(row + dr, 0), 2)
                nc = min(max(col + dc, 0), 2)
                # one step into the goal pays 1, every further step discounts it once
                expected = gamma ** (abs(2 - nr) + abs(2 - nc))
                assert q[s, a] == pytest.approx(expected, abs=1e-9)


@pytest.mark.rl
def test_gridworld_walls():
    mdp = gridworld_mdp(3, 3, goal=(0, 2), walls=[(1, 1)])
    assert mdp.is_deterministic()
    # moving down from (0, 1) bumps into the wall
    assert mdp.transitions[1, 1, 1] == 1.0
    # wall cells go nowhere
    assert np.all(mdp.transitions[4, :, 4] == 1.0)
    assert mdp.terminal[2]
    assert mdp.rewards[1, 3] == 1.0
    with pytest.raises(ConfigError):
        gridworld_mdp(3, 3, goal=(1, 1), walls=[(1, 1)])
    with pytest.raises(ConfigError):
        gridworld_mdp(3, 3, goal=(3, 0))


@pytest.mark.rl
def test_mdp_validation():
    with pytest.raises(ConfigError):
        FiniteMDP(np.full((2, 1, 2), 0.4), np.zeros((2, 1)), np.zeros(2, dtype=bool))
    with pytest.raises(ConfigError):
        FiniteMDP(np.ones((1, 1, 1)), np.zeros((1, 2)), np.zeros(1, dtype=bool))


@pytest.mark.rl
def test_q_learning_converges_to_value_iteration():
    walls = [(1, 1), (1, 2), (1, 3), (3, 1), (3, 2), (3, 3)]
    mdp = gridworld_mdp(5, 5, goal=(4, 4), walls=walls)
    table = q_learning_sweeps(mdp, LearningParams(alpha=0.5, gamma=0.9), sweeps=600, alpha_decay=0.999)
    reference = value_iteration(mdp, 0.9)
    assert np.max(np.abs(table.values - reference)) <= 1e-6


@pytest.mark.rl
def test_q_learning_on_stochastic_mdp():
    # action 0 reaches the terminal state half of the time, action 1 never does
    transitions = np.array([[[0.5, 0.5], [1.0, 0.0]], [[0.0, 1.0], [0.0, 1.0]]])
    rewards = np.array([[1.0, 0.0], [0.0, 0.0]])
    mdp = FiniteMDP(transitions, rewards, np.array([False, True]))
    assert not mdp.is_deterministic()
    with pytest.raises(ConfigError):
        q_learning_sweeps(mdp, LearningParams(alpha=0.1, gamma=0.5), sweeps=10)
    a = q_learning_sweeps(mdp, LearningParams(alpha=0.1, gamma=0.5), 50, rng=np.random.default_rng(0))
    b = q_learning_sweeps(mdp, LearningParams(alpha=0.1, gamma=0.5), 50, rng=np.random.default_rng(0))
    assert np.array_equal(a.values, b.values)
    assert np.all(a.values[1] == 0.0)
    with pytest.raises(ConfigError):
        q_learning_sweeps(mdp, LearningParams(), 1, alpha_decay=0.0, rng=np.random.default_rng(0))


@pytest.mark.rl
def test_maximization_bias():
    result = maximization_bias_experiment(n_actions=10, trials=1000, samples=10, seed=0)
    assert result.single_estimator_mean > result.double_estimator_mean
    assert result.single_estimator_mean > 0.3
    assert abs(result.double_estimator_mean) <= 0.05
    assert maximization_bias_experiment(seed=4) == maximization_bias_experiment(seed=4)
