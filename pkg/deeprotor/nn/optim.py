from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal, NamedTuple

import numpy as np

from deeprotor._typing import FloatArray, IntArray
from deeprotor.exceptions import ConfigError, NonFiniteLossError, ShapeMismatchError
from deeprotor.nn.layers import Grads, Params
from deeprotor.nn.network import QNetwork


@dataclass
class OptimizerState:
    """Adam hyper-parameters plus first/second moments congruent to the network parameters"""

    step_size: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon_hat: float = 1e-8
    first_moment: Params = field(default_factory=dict)
    second_moment: Params = field(default_factory=dict)
    step: int = 0
    algorithm: Literal["adam"] = "adam"

    def __post_init__(self):
        if self.step_size <= 0 or self.epsilon_hat <= 0:
            raise ConfigError("optimizer step size and epsilon must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("optimizer betas must lie in [0, 1)")

    @classmethod
    def for_network(
        cls,
        net: QNetwork,
        step_size: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon_hat: float = 1e-8,
    ) -> OptimizerState:
        return cls(
            step_size=step_size,
            beta1=beta1,
            beta2=beta2,
            epsilon_hat=epsilon_hat,
            first_moment={key: np.zeros_like(value) for key, value in net.params.items()},
            second_moment={key: np.zeros_like(value) for key, value in net.params.items()},
        )

    def hyper_parameters(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "step_size": self.step_size,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon_hat": self.epsilon_hat,
            "step": self.step,
        }

    def check_congruent(self, net: QNetwork):
        for moments in (self.first_moment, self.second_moment):
            if set(moments) != set(net.params):
                raise ShapeMismatchError("optimizer moments do not match the network parameters")
            for key, value in net.params.items():
                if moments[key].shape != value.shape:
                    raise ShapeMismatchError(f"optimizer moment `{key}` has shape {moments[key].shape}")


def adam_update(net: QNetwork, opt: OptimizerState, grads: Grads):
    """One in-place Adam step on ``net.params``"""
    opt.step += 1
    dtype = net.dtype
    b1, b2 = opt.beta1, opt.beta2
    correction1 = 1.0 - b1**opt.step
    correction2 = 1.0 - b2**opt.step
    for key, param in net.params.items():
        grad = grads[key].astype(dtype, copy=False)
        m = opt.first_moment[key]
        v = opt.second_moment[key]
        m *= b1
        m += (1.0 - b1) * grad
        v *= b2
        v += (1.0 - b2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        param -= (opt.step_size * m_hat / (np.sqrt(v_hat) + opt.epsilon_hat)).astype(dtype, copy=False)


@dataclass(frozen=True)
class LossSpec:
    delta: float = 1.0
    kind: Literal["huber"] = "huber"

    def __post_init__(self):
        if self.delta <= 0:
            raise ConfigError("huber delta must be positive")


class TrainingBatch(NamedTuple):
    # (N, H, W) or (N, H, W, C)
    observations: FloatArray
    actions: IntArray
    targets: FloatArray


def huber_loss(residual: FloatArray, delta: float = 1.0) -> tuple[FloatArray, FloatArray]:
    """Elementwise Huber loss and its derivative with respect to the residual"""
    abs_r = np.abs(residual)
    quadratic = abs_r <= delta
    loss = np.where(quadratic, 0.5 * residual * residual, delta * (abs_r - 0.5 * delta))
    grad = np.where(quadratic, residual, delta * np.sign(residual))
    return loss, grad


def train_step(net: QNetwork, opt: OptimizerState, batch: TrainingBatch, loss: LossSpec = LossSpec()) -> float:
    """Huber regression of the taken-action outputs onto the targets, followed by one Adam update

    Returns the mean loss measured before the update.
    """
    actions = np.asarray(batch.actions, dtype=np.int64)
    targets = np.asarray(batch.targets, dtype=np.float64)
    n = actions.shape[0]
    if n == 0:
        raise ShapeMismatchError("empty training batch")
    if targets.shape != (n,) or len(batch.observations) != n:
        raise ShapeMismatchError("observations, actions and targets must have the same length")
    if not np.all(np.isfinite(targets)):
        raise NonFiniteLossError(f"non-finite training targets: {targets[~np.isfinite(targets)][:5]}")
    if np.any(actions < 0) or np.any(actions >= net.arch.n_actions):
        raise ShapeMismatchError(f"action indices outside [0, {net.arch.n_actions})")

    rows = np.arange(n)
    losses: dict[str, float] = {}

    def taken_action_grad(out: FloatArray) -> FloatArray:
        residual = out[rows, actions].astype(np.float64) - targets
        values, grad = huber_loss(residual, loss.delta)
        losses["mean"] = float(values.mean())
        dout = np.zeros_like(out)
        dout[rows, actions] = grad / n
        return dout

    _, grads = net.gradients(batch.observations, taken_action_grad)
    mean_loss = losses["mean"]
    if not math.isfinite(mean_loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
        bad = [key for key, g in grads.items() if not np.all(np.isfinite(g))]
        raise NonFiniteLossError(f"non-finite loss {mean_loss} (non-finite gradients in {bad or 'none'})")
    adam_update(net, opt, grads)
    return mean_loss
