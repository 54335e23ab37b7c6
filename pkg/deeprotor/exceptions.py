from __future__ import annotations

import sys
from enum import Enum
from types import TracebackType
from typing import Union


class ErrorCode(Enum):
    # errors
    UNSUPPORTED_PYTHON_VERSION_ERROR = 9
    WRONG_ARGUMENT_ERROR = 13
    CONFIG_ERROR = 20
    ARENA_SYNTAX_ERROR = 21
    ARENA_SEMANTIC_ERROR = 22
    SHAPE_MISMATCH_ERROR = 23
    CHECKPOINT_FORMAT_ERROR = 24
    NON_FINITE_LOSS_ERROR = 25
    EPISODE_FINISHED_ERROR = 26
    BUFFER_UNDERFLOW_ERROR = 27
    METRICS_FORMAT_ERROR = 28
    IO_ERROR = 29

    # abnormal, but not an error
    INTERRUPTED = 101


class SuccessCode(Enum):
    SUCCESS = 0


ReturnCode = Union[ErrorCode, SuccessCode]


class DeepRotorBaseException(Exception):
    code: ErrorCode
    message: str

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(DeepRotorBaseException):
    code = ErrorCode.CONFIG_ERROR


class ArenaSyntaxError(DeepRotorBaseException):
    code = ErrorCode.ARENA_SYNTAX_ERROR

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ArenaSemanticError(DeepRotorBaseException):
    code = ErrorCode.ARENA_SEMANTIC_ERROR


class ShapeMismatchError(DeepRotorBaseException):
    code = ErrorCode.SHAPE_MISMATCH_ERROR


class CheckpointFormatError(DeepRotorBaseException):
    code = ErrorCode.CHECKPOINT_FORMAT_ERROR


class NonFiniteLossError(DeepRotorBaseException):
    code = ErrorCode.NON_FINITE_LOSS_ERROR


class EpisodeFinishedError(DeepRotorBaseException):
    code = ErrorCode.EPISODE_FINISHED_ERROR


class BufferUnderflowError(DeepRotorBaseException):
    code = ErrorCode.BUFFER_UNDERFLOW_ERROR


class MetricsFormatError(DeepRotorBaseException):
    code = ErrorCode.METRICS_FORMAT_ERROR

    def __init__(self, message: str, row_number: int):
        super().__init__(f"row {row_number}: {message}")
        self.row_number = row_number


def handleUncaughtException(exctype: type[BaseException], exception: BaseException, trace: TracebackType | None):
    oldHook(exctype, exception, trace)
    if isinstance(exception, DeepRotorBaseException):
        sys.exit(exception.code.value)


sys.excepthook, oldHook = handleUncaughtException, sys.excepthook
