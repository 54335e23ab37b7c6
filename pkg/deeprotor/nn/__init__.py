from __future__ import annotations

from deeprotor.nn.checkpoint import (
    MAGIC,
    Checkpoint,
    decode_records,
    encode_records,
    load_checkpoint,
    network_tensors,
    prefixed,
    read_checkpoint_file,
    restore_network,
    save_checkpoint,
    write_checkpoint_file,
)
from deeprotor.nn.gradcheck import gradient_check, relative_error
from deeprotor.nn.layers import Conv2D, Dense, Flatten, ReLU, conv_output_size
from deeprotor.nn.network import DEFAULT_CONVS, Architecture, ConvSpec, QNetwork
from deeprotor.nn.optim import LossSpec, OptimizerState, TrainingBatch, adam_update, huber_loss, train_step

__all__ = [
    "Architecture",
    "Checkpoint",
    "Conv2D",
    "ConvSpec",
    "DEFAULT_CONVS",
    "Dense",
    "Flatten",
    "LossSpec",
    "MAGIC",
    "OptimizerState",
    "QNetwork",
    "ReLU",
    "TrainingBatch",
    "adam_update",
    "conv_output_size",
    "decode_records",
    "encode_records",
    "gradient_check",
    "huber_loss",
    "load_checkpoint",
    "network_tensors",
    "prefixed",
    "read_checkpoint_file",
    "relative_error",
    "restore_network",
    "save_checkpoint",
    "train_step",
    "write_checkpoint_file",
]
