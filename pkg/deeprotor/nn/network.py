from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple, Union

import numpy as np

from deeprotor._typing import FloatArray
from deeprotor.exceptions import ShapeMismatchError
from deeprotor.nn.layers import Conv2D, Dense, Flatten, Grads, Layer, Params, ReLU, conv_output_size
from deeprotor.sensor import ObservationTensor


class ConvSpec(NamedTuple):
    out_channels: int
    kernel: int
    stride: int


DEFAULT_CONVS = (ConvSpec(16, 8, 4), ConvSpec(32, 4, 2), ConvSpec(32, 3, 1), ConvSpec(32, 3, 1))


@dataclass(frozen=True)
class Architecture:
    """Conv stack (each followed by ReLU), optional hidden dense layer with ReLU, linear output layer

    ``hidden == 0`` drops the hidden layer and ``convs == ()`` feeds the flattened input straight into
    the dense part.
    """

    convs: tuple[ConvSpec, ...] = DEFAULT_CONVS
    hidden: int = 256
    n_actions: int = 5
    # (height, width, channels)
    input_shape: tuple[int, int, int] = (84, 84, 1)

    def __post_init__(self):
        if self.n_actions < 1 or self.hidden < 0:
            raise ShapeMismatchError("n_actions must be positive and hidden non-negative")
        if min(self.input_shape) < 1:
            raise ShapeMismatchError(f"invalid input shape {self.input_shape}")
        for spec in self.convs:
            if min(spec) < 1:
                raise ShapeMismatchError(f"invalid conv layer {tuple(spec)}")

    def output_shapes(self) -> list[tuple[int, ...]]:
        """Activation shape (without batch axis) after every conv layer, then the dense layers"""
        height, width, channels = self.input_shape
        shapes: list[tuple[int, ...]] = []
        for i, spec in enumerate(self.convs):
            if spec.kernel > height or spec.kernel > width:
                raise ShapeMismatchError(
                    f"conv layer {i} kernel {spec.kernel} does not fit a {height}x{width} input"
                )
            height = conv_output_size(height, spec.kernel, spec.stride)
            width = conv_output_size(width, spec.kernel, spec.stride)
            channels = spec.out_channels
            shapes.append((channels, height, width))
        if self.hidden:
            shapes.append((self.hidden,))
        shapes.append((self.n_actions,))
        return shapes

    def build_layers(self) -> list[Layer]:
        shapes = self.output_shapes()
        layers: list[Layer] = []
        channels = self.input_shape[2]
        for i, spec in enumerate(self.convs):
            layers += [Conv2D(f"conv{i}", channels, spec.out_channels, spec.kernel, spec.stride), ReLU()]
            channels = spec.out_channels
        layers.append(Flatten())
        flat = int(np.prod(shapes[len(self.convs) - 1])) if self.convs else int(np.prod(self.input_shape))
        if self.hidden:
            layers += [Dense("hidden", flat, self.hidden), ReLU()]
            flat = self.hidden
        layers.append(Dense("output", flat, self.n_actions))
        return layers

    def to_dict(self) -> dict[str, Any]:
        return {
            "convs": [list(spec) for spec in self.convs],
            "hidden": self.hidden,
            "n_actions": self.n_actions,
            "input_shape": list(self.input_shape),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Architecture:
        height, width, channels = data["input_shape"]
        return cls(
            convs=tuple(ConvSpec(*spec) for spec in data["convs"]),
            hidden=int(data["hidden"]),
            n_actions=int(data["n_actions"]),
            input_shape=(int(height), int(width), int(channels)),
        )


class QNetwork:
    def __init__(self, arch: Architecture, params: Params):
        self.arch = arch
        self.layers = arch.build_layers()
        expected = {key: shape for layer in self.layers for key, shape in layer.param_shapes().items()}
        if set(params) != set(expected):
            raise ShapeMismatchError(f"parameter names {sorted(params)} do not match {sorted(expected)}")
        for key, shape in expected.items():
            if params[key].shape != shape:
                raise ShapeMismatchError(f"parameter `{key}` has shape {params[key].shape}, expected {shape}")
        # keep the layer order
        self.params: Params = {key: params[key] for key in expected}

    @classmethod
    def initialize(
        cls, arch: Architecture, seed: Union[int, np.random.Generator] = 0, dtype: Any = np.float32
    ) -> QNetwork:
        """He-uniform weights, zero biases; equal seeds give bit-identical networks"""
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        params: Params = {}
        for layer in arch.build_layers():
            params.update(layer.init_params(rng, dtype))
        return cls(arch, params)

    @classmethod
    def zeros(cls, arch: Architecture, dtype: Any = np.float32) -> QNetwork:
        params: Params = {}
        for layer in arch.build_layers():
            params.update({key: np.zeros(shape, dtype=dtype) for key, shape in layer.param_shapes().items()})
        return cls(arch, params)

    @property
    def dtype(self) -> np.dtype[Any]:
        return next(iter(self.params.values())).dtype

    @property
    def parameter_count(self) -> int:
        return sum(int(p.size) for p in self.params.values())

    def copy(self) -> QNetwork:
        return QNetwork(self.arch, {key: value.copy() for key, value in self.params.items()})

    def astype(self, dtype: Any) -> QNetwork:
        return QNetwork(self.arch, {key: value.astype(dtype) for key, value in self.params.items()})

    def copy_from(self, other: QNetwork):
        if other.arch != self.arch:
            raise ShapeMismatchError("cannot copy parameters between different architectures")
        for key, value in other.params.items():
            self.params[key][...] = value

    def prepare_batch(self, x: Union[ObservationTensor, FloatArray]) -> FloatArray:
        """Bring observations into NCHW layout in the parameter dtype

        Accepts one ``ObservationTensor``, one ``(H, W)`` / ``(H, W, C)`` array, or a batch of them.
        """
        height, width, channels = self.arch.input_shape
        data = x.data if isinstance(x, ObservationTensor) else np.asarray(x)
        if data.shape in ((height, width), (height, width, channels)):
            data = data[np.newaxis]
        if data.ndim == 3 and channels == 1:
            data = data[..., np.newaxis]
        if data.ndim != 4 or data.shape[1:] != (height, width, channels):
            raise ShapeMismatchError(f"observation shape {data.shape} does not match {self.arch.input_shape}")
        return data.transpose(0, 3, 1, 2).astype(self.dtype, copy=False)

    def _run(self, batch: FloatArray) -> tuple[FloatArray, list[Any]]:
        caches: list[Any] = []
        out = batch
        for layer in self.layers:
            out, cache = layer.forward(self.params, out)
            caches.append(cache)
        return out, caches

    def forward_batch(self, x: FloatArray) -> FloatArray:
        out, _ = self._run(self.prepare_batch(x))
        return out

    def forward(self, obs: Union[ObservationTensor, FloatArray]) -> FloatArray:
        """Q-values of a single observation, one per action"""
        out = self.forward_batch(obs.data if isinstance(obs, ObservationTensor) else obs)
        if out.shape[0] != 1:
            raise ShapeMismatchError("forward() takes a single observation, use forward_batch()")
        return out[0]

    def gradients(self, x: FloatArray, dout_fn: Any) -> tuple[FloatArray, Grads]:
        """Forward ``x``, then backpropagate ``dout_fn(outputs)`` into parameter gradients"""
        out, caches = self._run(self.prepare_batch(x))
        dout = dout_fn(out)
        grads: Grads = {}
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dout, layer_grads = layer.backward(self.params, dout, cache)
            grads.update(layer_grads)
        return out, grads

    def action_gradients(self, obs: Union[ObservationTensor, FloatArray], action_index: int) -> Grads:
        """Gradient of ``Q(obs)[action_index]`` with respect to every parameter"""

        def select(out: FloatArray) -> FloatArray:
            dout = np.zeros_like(out)
            dout[0, action_index] = 1
            return dout

        _, grads = self.gradients(obs.data if isinstance(obs, ObservationTensor) else obs, select)
        return grads
