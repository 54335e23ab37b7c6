from __future__ import annotations

from collections.abc import Iterator
from typing import Any, NamedTuple

import numpy as np

from deeprotor._typing import BoolArray, FloatArray, IntArray
from deeprotor.exceptions import BufferUnderflowError, CheckpointFormatError, ConfigError

TENSOR_PREFIX = "replay/"


class Transition(NamedTuple):
    s: FloatArray
    a: int
    r: float
    s_next: FloatArray
    # true only for transitions that end the task (no bootstrap)
    done: bool


class Batch(NamedTuple):
    observations: FloatArray
    actions: IntArray
    rewards: FloatArray
    next_observations: FloatArray
    dones: BoolArray


class ReplayBuffer:
    """Fixed-capacity FIFO experience store

    Sampling addresses transitions by age (0 = oldest), so a buffer rebuilt from its FIFO contents
    samples exactly like the original.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigError("replay capacity must be positive")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Transition]:
        if len(self._items) < self.capacity:
            return iter(self._items)
        return iter(self._items[self._next :] + self._items[: self._next])

    def push(self, t: Transition):
        if len(self._items) < self.capacity:
            self._items.append(t)
        else:
            self._items[self._next] = t
            self._next = (self._next + 1) % self.capacity

    def _physical(self, age: int) -> int:
        if len(self._items) < self.capacity:
            return age
        return (self._next + age) % self.capacity

    def sample(self, n: int, rng: np.random.Generator) -> Batch:
        """Uniform draw of ``n`` transitions with replacement"""
        if n < 1:
            raise ConfigError("sample size must be positive")
        if len(self._items) < n:
            raise BufferUnderflowError(f"cannot sample {n} transitions from a buffer holding {len(self._items)}")
        ages = rng.integers(0, len(self._items), size=n)
        chosen = [self._items[self._physical(int(age))] for age in ages]
        return Batch(
            observations=np.stack([t.s for t in chosen]),
            actions=np.array([t.a for t in chosen], dtype=np.int64),
            rewards=np.array([t.r for t in chosen], dtype=np.float64),
            next_observations=np.stack([t.s_next for t in chosen]),
            dones=np.array([t.done for t in chosen], dtype=bool),
        )

    def state_dict(self) -> tuple[dict[str, Any], dict[str, FloatArray]]:
        """Checkpoint form: scalars as metadata, observations as float32 tensors"""
        items = list(self)
        metadata = {
            "capacity": self.capacity,
            "actions": [t.a for t in items],
            "rewards": [t.r for t in items],
            "dones": [t.done for t in items],
        }
        if not items:
            return metadata, {}
        tensors = {
            TENSOR_PREFIX + "s": np.stack([t.s for t in items]).astype(np.float32),
            TENSOR_PREFIX + "s_next": np.stack([t.s_next for t in items]).astype(np.float32),
        }
        return metadata, tensors

    @classmethod
    def from_state_dict(cls, metadata: dict[str, Any], tensors: dict[str, FloatArray]) -> ReplayBuffer:
        buffer = cls(int(metadata["capacity"]))
        actions, rewards, dones = metadata["actions"], metadata["rewards"], metadata["dones"]
        if not actions:
            return buffer
        try:
            s, s_next = tensors[TENSOR_PREFIX + "s"], tensors[TENSOR_PREFIX + "s_next"]
        except KeyError as e:
            raise CheckpointFormatError(f"replay buffer tensor {e} missing")
        if not (len(actions) == len(rewards) == len(dones) == len(s) == len(s_next)):
            raise CheckpointFormatError("replay buffer records have inconsistent lengths")
        for i in range(len(actions)):
            buffer.push(Transition(s[i], int(actions[i]), float(rewards[i]), s_next[i], bool(dones[i])))
        return buffer
