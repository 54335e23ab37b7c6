from __future__ import annotations

from typing import Literal, NamedTuple, TypedDict

import numpy as np
import numpy.typing as npt
from typing_extensions import TypeAlias

FloatArray: TypeAlias = npt.NDArray[np.floating]
IntArray: TypeAlias = npt.NDArray[np.integer]
BoolArray: TypeAlias = npt.NDArray[np.bool_]

ZoneTag = Literal["A", "B", "C", "D"]
Algorithm = Literal["dqn", "ddqn", "tabular-grid"]
RewardMode = Literal["line", "checkpoint"]
ActionMode = Literal["yaw-rate", "lateral-roll"]
TerminalReason = Literal["goal", "collision", "deviation", "away_from_goal", "step_limit"]

TERMINAL_REASONS: list[TerminalReason] = ["goal", "collision", "deviation", "away_from_goal", "step_limit"]


class Vec2(NamedTuple):
    x: float
    y: float


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


class Pose(NamedTuple):
    """Camera / vehicle pose, yaw in degrees"""

    x: float
    y: float
    z: float
    yaw: float


class RewardComponents(TypedDict):
    progress: float
    deviation: float
    yaw: float
    checkpoint: float
    goal: float
    collision: float


def empty_components() -> RewardComponents:
    return RewardComponents(progress=0.0, deviation=0.0, yaw=0.0, checkpoint=0.0, goal=0.0, collision=0.0)


def components_total(components: RewardComponents) -> float:
    return (
        components["progress"]
        + components["deviation"]
        + components["yaw"]
        + components["checkpoint"]
        + components["goal"]
        + components["collision"]
    )


class MetricsRow(TypedDict):
    episode: int
    steps: int
    total_reward: float
    moving_avg_reward: float
    terminal_reason: TerminalReason
    epsilon: float
    mean_abs_yaw_rate: float
    mean_roll: float
    mean_pitch: float
    checkpoints_hit: int
    cumulative_collisions: int
