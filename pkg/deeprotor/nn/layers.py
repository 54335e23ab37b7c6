from __future__ import annotations

import math
from typing import Any, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from deeprotor._typing import FloatArray

Params = dict[str, FloatArray]
Grads = dict[str, FloatArray]


def conv_output_size(n: int, kernel: int, stride: int) -> int:
    return (n - kernel) // stride + 1


def he_uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, dtype: Any) -> FloatArray:
    limit = math.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Conv2D:
    """Valid (unpadded) strided convolution on NCHW tensors, lowered to a matrix product"""

    def __init__(self, name: str, in_channels: int, out_channels: int, kernel: int, stride: int):
        self.name = name
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.stride = stride

    @property
    def weight_key(self) -> str:
        return f"{self.name}.weight"

    @property
    def bias_key(self) -> str:
        return f"{self.name}.bias"

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        return {
            self.weight_key: (self.out_channels, self.in_channels, self.kernel, self.kernel),
            self.bias_key: (self.out_channels,),
        }

    def init_params(self, rng: np.random.Generator, dtype: Any) -> Params:
        shape = self.param_shapes()[self.weight_key]
        fan_in = self.in_channels * self.kernel * self.kernel
        return {
            self.weight_key: he_uniform(rng, shape, fan_in, dtype),
            self.bias_key: np.zeros(self.out_channels, dtype=dtype),
        }

    def forward(self, params: Params, x: FloatArray) -> tuple[FloatArray, Any]:
        n = x.shape[0]
        k, s = self.kernel, self.stride
        # (n, c, out_h, out_w, k, k), a view; no copy until the reshape below
        windows = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::s, ::s]
        out_h, out_w = windows.shape[2], windows.shape[3]
        # rows are output pixels, columns follow the (c, k, k) weight layout
        cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * out_h * out_w, -1)
        weight = params[self.weight_key].reshape(self.out_channels, -1)
        out = cols @ weight.T + params[self.bias_key]
        out = out.reshape(n, out_h, out_w, self.out_channels).transpose(0, 3, 1, 2)
        return out, (x.shape, cols, out_h, out_w)

    def backward(self, params: Params, dout: FloatArray, cache: Any) -> tuple[FloatArray, Grads]:
        x_shape, cols, out_h, out_w = cache
        n, channels = x_shape[0], x_shape[1]
        k, s = self.kernel, self.stride
        weight = params[self.weight_key]
        dout_mat = dout.transpose(0, 2, 3, 1).reshape(-1, self.out_channels)
        grads = {
            self.weight_key: (dout_mat.T @ cols).reshape(weight.shape),
            self.bias_key: dout_mat.sum(axis=0),
        }
        dcols = (dout_mat @ weight.reshape(self.out_channels, -1)).reshape(n, out_h, out_w, channels, k, k)
        dx = np.zeros(x_shape, dtype=dout.dtype)
        # col2im: overlapping windows accumulate
        for i in range(k):
            for j in range(k):
                dx[:, :, i : i + s * out_h : s, j : j + s * out_w : s] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        return dx, grads


class Dense:
    def __init__(self, name: str, in_features: int, out_features: int):
        self.name = name
        self.in_features = in_features
        self.out_features = out_features

    @property
    def weight_key(self) -> str:
        return f"{self.name}.weight"

    @property
    def bias_key(self) -> str:
        return f"{self.name}.bias"

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        return {self.weight_key: (self.in_features, self.out_features), self.bias_key: (self.out_features,)}

    def init_params(self, rng: np.random.Generator, dtype: Any) -> Params:
        return {
            self.weight_key: he_uniform(rng, (self.in_features, self.out_features), self.in_features, dtype),
            self.bias_key: np.zeros(self.out_features, dtype=dtype),
        }

    def forward(self, params: Params, x: FloatArray) -> tuple[FloatArray, Any]:
        return x @ params[self.weight_key] + params[self.bias_key], x

    def backward(self, params: Params, dout: FloatArray, cache: Any) -> tuple[FloatArray, Grads]:
        x = cache
        grads = {self.weight_key: x.T @ dout, self.bias_key: dout.sum(axis=0)}
        return dout @ params[self.weight_key].T, grads


class ReLU:
    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        return {}

    def init_params(self, rng: np.random.Generator, dtype: Any) -> Params:
        return {}

    def forward(self, params: Params, x: FloatArray) -> tuple[FloatArray, Any]:
        mask = x > 0
        return np.where(mask, x, 0).astype(x.dtype), mask

    def backward(self, params: Params, dout: FloatArray, cache: Any) -> tuple[FloatArray, Grads]:
        return np.where(cache, dout, 0).astype(dout.dtype), {}


class Flatten:
    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        return {}

    def init_params(self, rng: np.random.Generator, dtype: Any) -> Params:
        return {}

    def forward(self, params: Params, x: FloatArray) -> tuple[FloatArray, Any]:
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, params: Params, dout: FloatArray, cache: Any) -> tuple[FloatArray, Grads]:
        return dout.reshape(cache), {}


Layer = Union[Conv2D, Dense, ReLU, Flatten]
