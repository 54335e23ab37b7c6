from __future__ import annotations

from collections.abc import Sequence
from typing import Union

import numpy as np

from deeprotor._typing import FloatArray
from deeprotor.rl.params import EpsilonSchedule


def epsilon_at(schedule: EpsilonSchedule, global_step: int) -> float:
    """Linear decay from ``eps_start`` to ``eps_end`` over ``decay_steps``, constant afterwards"""
    assert global_step >= 0, "global step must be non-negative"
    if schedule.decay_steps == 0 or global_step >= schedule.decay_steps:
        return schedule.eps_end
    fraction = global_step / schedule.decay_steps
    return schedule.eps_start + fraction * (schedule.eps_end - schedule.eps_start)


def greedy_action(qvalues: Union[FloatArray, Sequence[float]]) -> int:
    # np.argmax keeps the lowest index among ties
    return int(np.argmax(np.asarray(qvalues)))


def select_action(qvalues: Union[FloatArray, Sequence[float]], epsilon: float, rng: np.random.Generator) -> int:
    """ε-greedy choice; one uniform draw per call whatever the outcome"""
    values = np.asarray(qvalues)
    assert values.ndim == 1 and values.size > 0, "qvalues must be a non-empty vector"
    if rng.random() < epsilon:
        return int(rng.integers(values.size))
    return greedy_action(values)
