from __future__ import annotations

import csv
from collections import deque
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Optional, TextIO, Union

from deeprotor._typing import TERMINAL_REASONS, MetricsRow
from deeprotor.exceptions import MetricsFormatError
from deeprotor.processor.parser import read_text_file
from deeprotor.utils.console.logger import Logger

METRICS_HEADER = [
    "episode",
    "steps",
    "total_reward",
    "moving_avg_reward",
    "terminal_reason",
    "epsilon",
    "mean_abs_yaw_rate",
    "mean_roll",
    "mean_pitch",
    "checkpoints_hit",
    "cumulative_collisions",
]
_INT_COLUMNS = ("episode", "steps", "checkpoints_hit", "cumulative_collisions")
_REAL_COLUMNS = ("total_reward", "moving_avg_reward", "epsilon", "mean_abs_yaw_rate", "mean_roll", "mean_pitch")
DEFAULT_WINDOW = 50


def format_real(value: float) -> str:
    return f"{value:.6g}"


def format_metrics_row(row: MetricsRow) -> list[str]:
    fields: list[str] = []
    for column in METRICS_HEADER:
        value = row[column]  # type: ignore
        fields.append(format_real(value) if column in _REAL_COLUMNS else str(value))
    return fields


def write_metrics_header(sink: TextIO):
    csv.writer(sink, lineterminator="\n").writerow(METRICS_HEADER)
    sink.flush()


def write_metrics_row(sink: TextIO, row: MetricsRow):
    """One CSV line in header order, flushed right away"""
    csv.writer(sink, lineterminator="\n").writerow(format_metrics_row(row))
    sink.flush()


class MovingAverage:
    """Mean of the last ``window`` values (all of them while fewer are available)"""

    def __init__(self, window: int = DEFAULT_WINDOW, values: Iterable[float] = ()):
        assert window >= 1, "window must be positive"
        self.window = window
        self._values: deque[float] = deque(values, maxlen=window)

    def push(self, value: float) -> float:
        self._values.append(value)
        return self.value

    @property
    def value(self) -> float:
        return sum(self._values) / len(self._values) if self._values else 0.0

    @property
    def values(self) -> list[float]:
        return list(self._values)


def moving_average(values: Sequence[float], window: int = DEFAULT_WINDOW) -> list[float]:
    averager = MovingAverage(window)
    return [averager.push(v) for v in values]


class MetricsWriter:
    """Owns the metrics CSV of one run

    ``resume_episode`` keeps the rows of episodes before it (rows written after the checkpoint being
    resumed are dropped) and appends from there.
    """

    def __init__(self, path: Union[str, Path], resume_episode: Optional[int] = None):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if resume_episode is not None and self.path.is_file():
            previous = read_metrics_text(read_text_file(self.path, MetricsFormatError))
            kept = [row for row in previous if row["episode"] < resume_episode]
            dropped_any = len(kept) != resume_episode
            self._sink = self.path.open("w", encoding="utf-8", newline="")
            write_metrics_header(self._sink)
            for row in kept:
                write_metrics_row(self._sink, row)
            if dropped_any:
                Logger.warning(f"{self.path} holds {len(kept)} rows before episode {resume_episode}")
        else:
            self._sink = self.path.open("w", encoding="utf-8", newline="")
            write_metrics_header(self._sink)

    def write(self, row: MetricsRow):
        write_metrics_row(self._sink, row)

    def close(self):
        if not self._sink.closed:
            self._sink.close()

    def __enter__(self) -> MetricsWriter:
        return self

    def __exit__(self, *exc_info: object):
        self.close()


def _parse_row(fields: list[str], row_number: int) -> MetricsRow:
    if len(fields) != len(METRICS_HEADER):
        raise MetricsFormatError(f"expected {len(METRICS_HEADER)} columns, got {len(fields)}", row_number)
    values = dict(zip(METRICS_HEADER, fields))
    try:
        ints = {column: int(values[column]) for column in _INT_COLUMNS}
        reals = {column: float(values[column]) for column in _REAL_COLUMNS}
    except ValueError as e:
        raise MetricsFormatError(str(e), row_number)
    reason = values["terminal_reason"]
    if reason not in TERMINAL_REASONS:
        raise MetricsFormatError(f"unknown terminal reason `{reason}`", row_number)
    return MetricsRow(
        episode=ints["episode"],
        steps=ints["steps"],
        total_reward=reals["total_reward"],
        moving_avg_reward=reals["moving_avg_reward"],
        terminal_reason=reason,  # type: ignore
        epsilon=reals["epsilon"],
        mean_abs_yaw_rate=reals["mean_abs_yaw_rate"],
        mean_roll=reals["mean_roll"],
        mean_pitch=reals["mean_pitch"],
        checkpoints_hit=ints["checkpoints_hit"],
        cumulative_collisions=ints["cumulative_collisions"],
    )


def read_metrics_text(text: str) -> list[MetricsRow]:
    """Parse a metrics CSV; row numbers in errors count the header as row 1"""
    rows = list(csv.reader(text.splitlines()))
    if not rows or rows[0] != METRICS_HEADER:
        raise MetricsFormatError("missing or unexpected header", 1)
    return [_parse_row(fields, number) for number, fields in enumerate(rows[1:], start=2)]


def read_metrics(path: Union[str, Path]) -> list[MetricsRow]:
    return read_metrics_text(read_text_file(path, MetricsFormatError))
