from __future__ import annotations

from typing import Optional, Union

import numpy as np

from deeprotor._typing import FloatArray
from deeprotor.nn.network import QNetwork
from deeprotor.sensor import ObservationTensor

MIN_COORDINATES = 200
# absolute floor of the relative-error denominator
ERROR_FLOOR = 1e-6


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(ERROR_FLOOR, abs(analytic) + abs(numeric))


def gradient_check(
    net: QNetwork,
    obs: Union[ObservationTensor, FloatArray],
    action_index: int,
    perturbation: float = 1e-5,
    coordinates: int = MIN_COORDINATES,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Max relative error between backprop and central differences of ``Q(obs)[action_index]``

    Runs on a float64 shadow copy of ``net``; ``net`` itself is never touched. Every parameter is
    checked when the network has no more than ``coordinates`` of them.
    """
    assert 0 < perturbation <= 1e-2, "perturbation must lie in (0, 1e-2]"
    shadow = net.astype(np.float64)
    data = obs.data if isinstance(obs, ObservationTensor) else np.asarray(obs)
    data = data.astype(np.float64)
    analytic = shadow.action_gradients(data, action_index)

    index = [(key, i) for key, value in shadow.params.items() for i in range(value.size)]
    rng = rng if rng is not None else np.random.default_rng(0)
    count = max(coordinates, MIN_COORDINATES)
    chosen = range(len(index)) if len(index) <= count else rng.choice(len(index), size=count, replace=False)

    worst = 0.0
    for position in chosen:
        key, i = index[int(position)]
        flat = shadow.params[key].reshape(-1)
        original = flat[i]
        flat[i] = original + perturbation
        plus = float(shadow.forward(data)[action_index])
        flat[i] = original - perturbation
        minus = float(shadow.forward(data)[action_index])
        flat[i] = original
        numeric = (plus - minus) / (2 * perturbation)
        worst = max(worst, relative_error(float(analytic[key].reshape(-1)[i]), numeric))
    return worst
