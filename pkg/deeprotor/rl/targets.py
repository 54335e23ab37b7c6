from __future__ import annotations

from typing import Literal

import numpy as np

from deeprotor._typing import FloatArray
from deeprotor.exceptions import ShapeMismatchError
from deeprotor.nn import QNetwork
from deeprotor.rl.replay import Batch

UpdateTarget = Literal["q1", "q2"]


def _bootstrap(batch: Batch, next_values: FloatArray, gamma: float) -> FloatArray:
    rewards = batch.rewards.astype(np.float64)
    return np.where(batch.dones, rewards, rewards + gamma * next_values.astype(np.float64))


def dqn_targets(batch: Batch, net: QNetwork, gamma: float) -> FloatArray:
    """r + gamma * max_a Q(s', a), or r alone on terminal transitions"""
    if len(batch.actions) == 0:
        raise ShapeMismatchError("empty batch")
    next_q = net.forward_batch(batch.next_observations)
    return _bootstrap(batch, next_q.max(axis=1), gamma)


def double_dqn_targets(
    batch: Batch, q1: QNetwork, q2: QNetwork, gamma: float, coin: bool
) -> tuple[UpdateTarget, FloatArray]:
    """Double estimator targets; ``coin`` picks the network to update

    The updated network selects the next action and the other one evaluates it.
    """
    if q1.arch != q2.arch:
        raise ShapeMismatchError("double DQN needs two networks with the same architecture")
    if len(batch.actions) == 0:
        raise ShapeMismatchError("empty batch")
    selector, evaluator = (q1, q2) if coin else (q2, q1)
    rows = np.arange(len(batch.actions))
    # argmax ties go to the lowest action index, same as the greedy policy
    best = np.argmax(selector.forward_batch(batch.next_observations), axis=1)
    next_values = evaluator.forward_batch(batch.next_observations)[rows, best]
    return ("q1" if coin else "q2"), _bootstrap(batch, next_values, gamma)
