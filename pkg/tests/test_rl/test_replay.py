from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from deeprotor.exceptions import BufferUnderflowError, CheckpointFormatError, ConfigError
from deeprotor.rl import ReplayBuffer, Transition


def transition(i: int) -> Transition:
    obs = np.full((2, 2), i, dtype=np.float32)
    return Transition(obs, i % 3, float(i), obs + 1, i % 4 == 0)


def labels(buffer: ReplayBuffer) -> list[int]:
    return [int(t.r) for t in buffer]


@pytest.mark.rl
def test_fifo_eviction():
    buffer = ReplayBuffer(3)
    for i in range(1, 5):
        buffer.push(transition(i))
    assert len(buffer) == 3
    assert labels(buffer) == [2, 3, 4]


@pytest.mark.rl
def test_buffer_holds_the_newest_items():
    for capacity in range(1, 6):
        for pushes in range(12):
            buffer = ReplayBuffer(capacity)
            for i in range(pushes):
                buffer.push(transition(i))
            assert len(buffer) == min(capacity, pushes)
            assert labels(buffer) == list(range(max(0, pushes - capacity), pushes))


@pytest.mark.rl
def test_sample_shapes():
    buffer = ReplayBuffer(10)
    for i in range(5):
        buffer.push(transition(i))
    batch = buffer.sample(4, np.random.default_rng(0))
    assert batch.observations.shape == (4, 2, 2)
    assert batch.next_observations.shape == (4, 2, 2)
    assert batch.actions.dtype == np.int64
    assert batch.dones.dtype == bool
    for obs, action, reward, next_obs, done in zip(*batch):
        i = int(reward)
        assert np.all(obs == i)
        assert np.all(next_obs == i + 1)
        assert action == i % 3
        assert done == (i % 4 == 0)


@pytest.mark.rl
def test_sampling_is_uniform():
    buffer = ReplayBuffer(10)
    for i in range(10):
        buffer.push(transition(i))
    rng = np.random.default_rng(0)
    counts: Counter[int] = Counter()
    for _ in range(10_000):
        counts.update(int(r) for r in buffer.sample(10, rng).rewards)
    for i in range(10):
        assert abs(counts[i] - 10_000) < 400


@pytest.mark.rl
def test_sampling_is_deterministic():
    buffer = ReplayBuffer(8)
    for i in range(20):
        buffer.push(transition(i))
    a = buffer.sample(6, np.random.default_rng(5))
    b = buffer.sample(6, np.random.default_rng(5))
    assert np.array_equal(a.rewards, b.rewards)


@pytest.mark.rl
def test_underflow():
    buffer = ReplayBuffer(10)
    for i in range(3):
        buffer.push(transition(i))
    with pytest.raises(BufferUnderflowError):
        buffer.sample(4, np.random.default_rng(0))
    with pytest.raises(ConfigError):
        buffer.sample(0, np.random.default_rng(0))
    with pytest.raises(ConfigError):
        ReplayBuffer(0)


@pytest.mark.rl
def test_state_dict_round_trip():
    buffer = ReplayBuffer(5)
    # wrapped around twice
    for i in range(13):
        buffer.push(transition(i))
    metadata, tensors = buffer.state_dict()
    restored = ReplayBuffer.from_state_dict(metadata, tensors)
    assert restored.capacity == 5
    assert labels(restored) == labels(buffer) == [8, 9, 10, 11, 12]
    a = buffer.sample(7, np.random.default_rng(3))
    b = restored.sample(7, np.random.default_rng(3))
    for left, right in zip(a, b):
        assert np.array_equal(left, right)
    # pushes keep evicting in the same order
    buffer.push(transition(13))
    restored.push(transition(13))
    assert labels(restored) == labels(buffer)


@pytest.mark.rl
def test_state_dict_of_empty_buffer():
    metadata, tensors = ReplayBuffer(4).state_dict()
    assert tensors == {}
    assert len(ReplayBuffer.from_state_dict(metadata, tensors)) == 0


@pytest.mark.rl
def test_state_dict_errors():
    buffer = ReplayBuffer(4)
    for i in range(3):
        buffer.push(transition(i))
    metadata, tensors = buffer.state_dict()
    with pytest.raises(CheckpointFormatError):
        ReplayBuffer.from_state_dict(metadata, {})
    with pytest.raises(CheckpointFormatError):
        ReplayBuffer.from_state_dict({**metadata, "rewards": [0.0]}, tensors)
