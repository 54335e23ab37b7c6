from __future__ import annotations

import math
from typing import Optional, Union

from deeprotor.utils.console.attributes import get_terminal_size
from deeprotor.utils.console.colorful import Color, RGBColor, colored_string
from deeprotor.utils.console.formatter import duration_format
from deeprotor.utils.console.logger import Logger


class ProgressBar:
    def __init__(self, symbols: Union[str, list[str]] = "▏▎▍▌▋▊▉█", remaining_symbol: str = " ", width: int = 40):
        assert len(symbols) >= 2, "need at least two symbols"
        self.width = width
        self.symbols = symbols
        self.remaining_symbol = remaining_symbol
        self.num_symbol = len(symbols)

    def render(
        self,
        fraction: float,
        bar_fore_color: Optional[Color] = None,
        remaining_bar_fore_color: Optional[Color] = None,
        width: Optional[int] = None,
    ) -> str:
        width = width or self.width
        fraction = min(max(fraction, 0.0), 1.0)
        if fraction == 1:
            return colored_string(self.symbols[-1] * width, fore=bar_fore_color)
        length = width * fraction
        length_int = int(length)
        partial = self.symbols[math.floor((length - length_int) * self.num_symbol)]
        return colored_string(self.symbols[-1] * length_int + partial, fore=bar_fore_color) + colored_string(
            (width - length_int - 1) * self.remaining_symbol, fore=remaining_bar_fore_color
        )


_bar = ProgressBar("╸━", "━")


def training_status(
    episode: int, total: int, moving_avg_reward: float, epsilon: float, elapsed: float, label: str = "train"
) -> str:
    """Status line: bar, episode i/N, moving-average reward, epsilon, elapsed time"""
    fraction = episode / total if total else 1.0
    bar_width = min(get_terminal_size()[0] - 60, 40)
    bar = ""
    if bar_width >= 10:
        bar = _bar.render(
            fraction, bar_fore_color="cyan", remaining_bar_fore_color=RGBColor(64, 64, 64), width=bar_width
        )
        bar += " "
    reward_color: Color = "green" if moving_avg_reward > 0 else "yellow"
    return "{}{} {:>6}/{:<6} avg {} eps {:.3f} {}".format(
        bar,
        label,
        episode,
        total,
        colored_string(f"{moving_avg_reward:>9.3f}", fore=reward_color),
        epsilon,
        duration_format(elapsed),
    )


def show_training_progress(
    episode: int, total: int, moving_avg_reward: float, epsilon: float, elapsed: float, label: str = "train"
):
    Logger.status.set(training_status(episode, total, moving_avg_reward, epsilon, elapsed, label))
