from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from deeprotor.exceptions import ConfigError
from deeprotor.rl import EpsilonSchedule, LearningParams, epsilon_at, greedy_action, select_action


@pytest.mark.rl
def test_epsilon_schedule():
    schedule = EpsilonSchedule(eps_start=1.0, eps_end=0.05, decay_steps=100)
    assert epsilon_at(schedule, 0) == 1.0
    assert epsilon_at(schedule, 100) == 0.05
    assert epsilon_at(schedule, 10**6) == 0.05
    assert epsilon_at(EpsilonSchedule(1.0, 0.0, 10), 5) == pytest.approx(0.5)
    assert epsilon_at(EpsilonSchedule(1.0, 0.2, 0), 0) == 0.2


@pytest.mark.rl
def test_epsilon_is_non_increasing():
    schedule = EpsilonSchedule(eps_start=0.9, eps_end=0.1, decay_steps=37)
    values = [epsilon_at(schedule, step) for step in range(60)]
    assert all(later <= earlier for earlier, later in zip(values, values[1:]))


@pytest.mark.rl
def test_greedy_action():
    assert greedy_action([0.1, 0.9, 0.3]) == 1
    assert select_action([0.1, 0.9, 0.3], 0.0, np.random.default_rng(0)) == 1
    # ties go to the lowest index
    assert greedy_action([0.5, 0.5, 0.1]) == 0
    assert greedy_action(np.array([-1.0, 2.0, 2.0])) == 1


@pytest.mark.rl
def test_full_exploration_is_uniform():
    rng = np.random.default_rng(0)
    counts = Counter(select_action(np.zeros(5), 1.0, rng) for _ in range(10_000))
    assert set(counts) == set(range(5))
    for action in range(5):
        assert abs(counts[action] - 2000) < 200


@pytest.mark.rl
def test_one_uniform_draw_per_greedy_choice():
    rng = np.random.default_rng(7)
    reference = np.random.default_rng(7)
    for _ in range(5):
        select_action([0.0, 1.0], 0.0, rng)
        reference.random()
    assert rng.random() == reference.random()


@pytest.mark.rl
def test_parameter_validation():
    with pytest.raises(ConfigError):
        LearningParams(alpha=1.5)
    with pytest.raises(ConfigError):
        LearningParams(gamma=1.0)
    with pytest.raises(ConfigError):
        LearningParams(batch_size=0)
    with pytest.raises(ConfigError):
        LearningParams(warmup=-1)
    with pytest.raises(ConfigError):
        EpsilonSchedule(eps_start=0.1, eps_end=0.5)
    with pytest.raises(ConfigError):
        EpsilonSchedule(decay_steps=-1)
    # a frozen table is allowed
    assert LearningParams(alpha=0.0).alpha == 0.0
