from __future__ import annotations

import re
from pathlib import Path

import pytest

from deeprotor.processor.metrics import MetricsWriter
from deeprotor.processor.plotter import Series, emit_plots, y_limits

from ..conftest import scratch_dir
from .test_metrics import make_row

PLOT_FILES = {"reward.svg", "episode_length.svg", "roll.svg", "pitch.svg", "yaw_rate.svg"}


def write_metrics(out: Path, rewards: list[float]) -> Path:
    path = out / "metrics.csv"
    with MetricsWriter(path) as writer:
        for episode, reward in enumerate(rewards):
            writer.write(make_row(episode, reward))
    return path


def path_vertices(svg: str, gid: str) -> int:
    match = re.search(rf'<g id="{gid}">\s*<path d="([^"]*)"', svg)
    assert match is not None, f"no line with id {gid}"
    return len(re.findall(r"[ML]", match.group(1)))


@pytest.mark.processor
def test_emit_plots():
    out = scratch_dir("plot/basic")
    rewards = [-3.0, 1.0, 4.0, 0.5, 2.5]
    specs = emit_plots(write_metrics(out, rewards), out / "figures", window=2)
    assert set(specs) == PLOT_FILES
    assert {p.name for p in (out / "figures").iterdir()} == PLOT_FILES

    reward_spec = specs["reward.svg"]
    assert reward_spec.series[0].y == rewards
    expected = [-3.0, -1.0, 2.5, 2.25, 1.5]
    for got, want in zip(reward_spec.series[1].y, expected):
        assert got == pytest.approx(want, abs=1e-9)

    svg = (out / "figures" / "reward.svg").read_text(encoding="utf-8")
    assert path_vertices(svg, "reward") == len(rewards)
    assert path_vertices(svg, "moving_average") == len(rewards)
    length_svg = (out / "figures" / "episode_length.svg").read_text(encoding="utf-8")
    assert path_vertices(length_svg, "episode_length") == len(rewards)


@pytest.mark.processor
def test_plots_are_deterministic():
    out = scratch_dir("plot/determinism")
    metrics = write_metrics(out, [1.0, 2.0, 0.0])
    emit_plots(metrics, out / "a")
    emit_plots(metrics, out / "b")
    for name in PLOT_FILES:
        assert (out / "a" / name).read_bytes() == (out / "b" / name).read_bytes()


@pytest.mark.processor
def test_constant_and_tiny_inputs():
    assert y_limits([Series("flat", "flat", [2.0, 2.0])]) == (1.0, 3.0)
    low, high = y_limits([Series("a", "a", [0.0, 10.0]), Series("b", "b", [5.0])])
    assert low == pytest.approx(-0.5)
    assert high == pytest.approx(10.5)

    out = scratch_dir("plot/edge")
    emit_plots(write_metrics(out, [4.0, 4.0, 4.0]), out / "flat")
    emit_plots(write_metrics(out, [7.0]), out / "single")
    emit_plots(write_metrics(out, []), out / "empty")
    for name in ("flat", "single", "empty"):
        assert {p.name for p in (out / name).iterdir()} == PLOT_FILES
