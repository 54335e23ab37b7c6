from __future__ import annotations

from pathlib import Path
from typing import NamedTuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from deeprotor._typing import MetricsRow  # noqa: E402
from deeprotor.processor.metrics import DEFAULT_WINDOW, moving_average, read_metrics  # noqa: E402

# deterministic SVG ids and no timestamp
matplotlib.rcParams["svg.hashsalt"] = "deeprotor"
matplotlib.rcParams["path.simplify"] = False
SVG_METADATA = {"Date": None}


class Series(NamedTuple):
    label: str
    # gid of the emitted line, findable in the SVG
    gid: str
    y: list[float]


class PlotSpec(NamedTuple):
    file_name: str
    title: str
    y_label: str
    series: list[Series]


def y_limits(series: list[Series]) -> tuple[float, float]:
    values = [v for s in series for v in s.y]
    low, high = min(values), max(values)
    if low == high:
        return low - 1.0, high + 1.0
    margin = 0.05 * (high - low)
    return low - margin, high + margin


def plot_specs(rows: list[MetricsRow], window: int = DEFAULT_WINDOW) -> list[PlotSpec]:
    rewards = [row["total_reward"] for row in rows]
    return [
        PlotSpec(
            "reward.svg",
            "Average reward",
            "reward",
            [
                Series("episode reward", "reward", rewards),
                Series(f"moving average ({window})", "moving_average", moving_average(rewards, window)),
            ],
        ),
        PlotSpec(
            "episode_length.svg",
            "Episode length",
            "steps",
            [Series("steps", "episode_length", [float(row["steps"]) for row in rows])],
        ),
        PlotSpec(
            "roll.svg",
            "Roll angle",
            "mean roll (deg)",
            [Series("roll", "roll", [row["mean_roll"] for row in rows])],
        ),
        PlotSpec(
            "pitch.svg",
            "Pitch angle",
            "mean pitch (deg)",
            [Series("pitch", "pitch", [row["mean_pitch"] for row in rows])],
        ),
        PlotSpec(
            "yaw_rate.svg",
            "Yaw rate",
            "mean |yaw rate| (deg/s)",
            [Series("|yaw rate|", "yaw_rate", [row["mean_abs_yaw_rate"] for row in rows])],
        ),
    ]


def render_svg(spec: PlotSpec, episodes: list[int], path: Path):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    try:
        for series in spec.series:
            (line,) = ax.plot(episodes, series.y, label=series.label, linewidth=1.0)
            line.set_gid(series.gid)
        ax.set_title(spec.title)
        ax.set_xlabel("episode")
        ax.set_ylabel(spec.y_label)
        if episodes:
            ax.set_ylim(*y_limits(spec.series))
            if len(episodes) == 1:
                ax.set_xlim(episodes[0] - 1, episodes[0] + 1)
        if len(spec.series) > 1:
            ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata=SVG_METADATA)
    finally:
        plt.close(fig)


def emit_plots(
    metrics: Union[str, Path], out_dir: Union[str, Path], window: int = DEFAULT_WINDOW
) -> dict[str, PlotSpec]:
    """Render the figure suite of a metrics CSV into ``out_dir``, one SVG per quantity

    Returns the plotted data keyed by file name.
    """
    rows = read_metrics(metrics)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    episodes = [row["episode"] for row in rows]
    specs = plot_specs(rows, window)
    for spec in specs:
        render_svg(spec, episodes, out / spec.file_name)
    return {spec.file_name: spec for spec in specs}
