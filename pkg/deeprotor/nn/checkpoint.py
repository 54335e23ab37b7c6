"""Versioned binary checkpoint container

Layout (all integers little-endian u32)::

    b"DQNAV1\\n"
    metadata length, metadata (UTF-8 JSON)
    record count
    per record: name length, name (UTF-8), ndim, dims..., float32 data (little-endian, C order)
"""

from __future__ import annotations

import json
import struct
from collections.abc import Mapping
from pathlib import Path
from typing import Any, NamedTuple, Optional, Union

import numpy as np

from deeprotor._typing import FloatArray
from deeprotor.exceptions import CheckpointFormatError, ShapeMismatchError
from deeprotor.nn.network import Architecture, QNetwork
from deeprotor.nn.optim import OptimizerState

MAGIC = b"DQNAV1\n"
MAGIC_FAMILY = b"DQNAV"
_U32 = struct.Struct("<I")
NETWORK_PREFIX = "net/"
FIRST_MOMENT_PREFIX = "adam.m/"
SECOND_MOMENT_PREFIX = "adam.v/"


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise CheckpointFormatError(f"truncated checkpoint while reading {what} at byte {self.offset}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(_U32.size, what))[0]


def encode_records(metadata: Mapping[str, Any], tensors: Mapping[str, FloatArray]) -> bytes:
    meta = json.dumps(metadata, sort_keys=True).encode("utf-8")
    chunks = [MAGIC, _U32.pack(len(meta)), meta, _U32.pack(len(tensors))]
    for name, tensor in tensors.items():
        encoded_name = name.encode("utf-8")
        array = np.ascontiguousarray(tensor, dtype="<f4")
        chunks += [_U32.pack(len(encoded_name)), encoded_name, _U32.pack(array.ndim)]
        chunks += [_U32.pack(dim) for dim in array.shape]
        chunks.append(array.tobytes())
    return b"".join(chunks)


def decode_records(data: bytes) -> tuple[dict[str, Any], dict[str, FloatArray]]:
    if not data.startswith(MAGIC):
        if data.startswith(MAGIC_FAMILY):
            raise CheckpointFormatError(f"unsupported checkpoint version {data[:len(MAGIC)]!r}")
        raise CheckpointFormatError("not a checkpoint file (bad magic)")
    reader = _Reader(data)
    reader.offset = len(MAGIC)
    meta_size = reader.u32("metadata length")
    try:
        metadata = json.loads(reader.take(meta_size, "metadata").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointFormatError(f"corrupt checkpoint metadata: {e}")
    tensors: dict[str, FloatArray] = {}
    for index in range(reader.u32("record count")):
        name = reader.take(reader.u32(f"record {index} name length"), f"record {index} name").decode("utf-8")
        ndim = reader.u32(f"`{name}` rank")
        shape = tuple(reader.u32(f"`{name}` shape") for _ in range(ndim))
        count = int(np.prod(shape, dtype=np.int64))
        raw = reader.take(4 * count, f"`{name}` data")
        tensors[name] = np.frombuffer(raw, dtype="<f4").astype(np.float32).reshape(shape)
    if reader.offset != len(data):
        raise CheckpointFormatError(f"{len(data) - reader.offset} trailing bytes after the last record")
    return metadata, tensors


def prefixed(tensors: Mapping[str, FloatArray], prefix: str) -> dict[str, FloatArray]:
    return {prefix + key: value for key, value in tensors.items()}


def network_tensors(net: QNetwork, prefix: str = NETWORK_PREFIX) -> dict[str, FloatArray]:
    return prefixed(net.params, prefix)


def restore_network(arch: Architecture, tensors: Mapping[str, FloatArray], prefix: str = NETWORK_PREFIX) -> QNetwork:
    params = {key[len(prefix) :]: value.copy() for key, value in tensors.items() if key.startswith(prefix)}
    if not params:
        raise CheckpointFormatError(f"checkpoint holds no `{prefix}` tensors")
    return QNetwork(arch, params)


class Checkpoint(NamedTuple):
    net: QNetwork
    opt: OptimizerState
    metadata: dict[str, Any]
    # every record not owned by the network or the optimizer
    extra: dict[str, FloatArray]


def save_checkpoint(
    net: QNetwork,
    opt: OptimizerState,
    metadata: Mapping[str, Any],
    extra: Optional[Mapping[str, FloatArray]] = None,
) -> bytes:
    full_metadata = dict(metadata)
    full_metadata["architecture"] = net.arch.to_dict()
    full_metadata["optimizer"] = opt.hyper_parameters()
    tensors = network_tensors(net)
    tensors.update(prefixed(opt.first_moment, FIRST_MOMENT_PREFIX))
    tensors.update(prefixed(opt.second_moment, SECOND_MOMENT_PREFIX))
    if extra:
        tensors.update(extra)
    return encode_records(full_metadata, tensors)


def load_checkpoint(data: bytes, expected: Optional[Architecture] = None) -> Checkpoint:
    """Inverse of ``save_checkpoint``; ``expected`` guards against loading into another architecture"""
    metadata, tensors = decode_records(data)
    try:
        arch = Architecture.from_dict(metadata["architecture"])
        hyper = metadata["optimizer"]
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointFormatError(f"checkpoint metadata lacks a valid network description: {e}")
    if expected is not None and arch != expected:
        raise ShapeMismatchError(f"checkpoint architecture {arch.to_dict()} differs from {expected.to_dict()}")
    net = restore_network(arch, tensors)

    def moments(prefix: str) -> dict[str, FloatArray]:
        return {key[len(prefix) :]: value.copy() for key, value in tensors.items() if key.startswith(prefix)}

    opt = OptimizerState(
        step_size=float(hyper["step_size"]),
        beta1=float(hyper["beta1"]),
        beta2=float(hyper["beta2"]),
        epsilon_hat=float(hyper["epsilon_hat"]),
        first_moment=moments(FIRST_MOMENT_PREFIX),
        second_moment=moments(SECOND_MOMENT_PREFIX),
        step=int(hyper["step"]),
    )
    opt.check_congruent(net)
    owned = (NETWORK_PREFIX, FIRST_MOMENT_PREFIX, SECOND_MOMENT_PREFIX)
    extra = {key: value for key, value in tensors.items() if not key.startswith(owned)}
    return Checkpoint(net, opt, metadata, extra)


def write_checkpoint_file(path: Union[str, Path], data: bytes):
    """Atomic replace through a temporary sibling file"""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = file_path.with_name(file_path.name + ".tmp")
    tmp_path.write_bytes(data)
    tmp_path.replace(file_path)


def read_checkpoint_file(path: Union[str, Path]) -> bytes:
    file_path = Path(path)
    if not file_path.is_file():
        raise CheckpointFormatError(f"checkpoint `{path}` does not exist")
    return file_path.read_bytes()
