from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple, Optional

from deeprotor._typing import RewardComponents, RewardMode, TerminalReason, Vec2
from deeprotor.exceptions import ConfigError
from deeprotor.vehicle import QuadState
from deeprotor.world import CollisionInfo


@dataclass(frozen=True)
class RewardConfig:
    w_progress: float = 1.0
    w_deviation: float = 0.1
    w_yaw: float = 0.05
    r_goal: float = 50.0
    r_collision: float = 50.0
    r_checkpoint: float = 10.0
    deviation_limit: float = 10.0
    # None: 1.5 x the initial goal distance
    away_limit: Optional[float] = None
    mode: RewardMode = "line"
    goal_terminates: bool = True

    def __post_init__(self):
        weights = (self.w_progress, self.w_deviation, self.w_yaw, self.r_goal, self.r_collision, self.r_checkpoint)
        if not all(math.isfinite(w) and w >= 0 for w in weights):
            raise ConfigError("reward weights must be finite and non-negative")
        # limits may be infinite (no termination) but not NaN
        limits = (self.deviation_limit, self.away_limit if self.away_limit is not None else 1.0)
        if any(math.isnan(limit) or limit <= 0 for limit in limits):
            raise ConfigError("reward limits must be positive")
        if self.mode not in ("line", "checkpoint"):
            raise ConfigError(f"unknown reward mode `{self.mode}`")

    @classmethod
    def primitive(cls) -> RewardConfig:
        """Collision-only reward: no goal, no shaping, no drift limits"""
        return cls(
            w_progress=0.0,
            w_deviation=0.0,
            w_yaw=0.0,
            r_goal=0.0,
            r_checkpoint=0.0,
            deviation_limit=math.inf,
            away_limit=math.inf,
            goal_terminates=False,
        )


@dataclass(frozen=True)
class StepBudget:
    base_steps: int = 200
    steps_per_episode: int = 1
    cap: int = 1000

    def __post_init__(self):
        if self.base_steps < 1 or self.steps_per_episode < 0 or self.cap < self.base_steps:
            raise ConfigError(f"invalid step budget {self}")


class RewardEvents(NamedTuple):
    terminal: Optional[TerminalReason] = None
    checkpoint_entered: bool = False


def max_steps_for_episode(budget: StepBudget, episode_index: int) -> int:
    assert episode_index >= 0, "episode index must be non-negative"
    return min(budget.base_steps + budget.steps_per_episode * episode_index, budget.cap)


def distance(p: Vec2, q: Vec2) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def distance_to_segment(p: Vec2, a: Vec2, b: Vec2) -> float:
    """Euclidean distance from ``p`` to the closed segment ``ab``"""
    abx, aby = b[0] - a[0], b[1] - a[1]
    length2 = abx * abx + aby * aby
    assert length2 > 0, "segment endpoints must differ"
    t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / length2
    t = max(0.0, min(1.0, t))
    return math.hypot(p[0] - (a[0] + t * abx), p[1] - (a[1] + t * aby))


def distance_to_polyline(p: Vec2, points: Sequence[Vec2]) -> float:
    segments = [(a, b) for a, b in zip(points, points[1:]) if a != b]
    if not segments:
        return distance(p, points[0])
    return min(distance_to_segment(p, a, b) for a, b in segments)


def compute_reward(
    prev: QuadState,
    next: QuadState,
    action_value: float,
    cfg: RewardConfig,
    *,
    start: Vec2,
    goal: Vec2,
    max_action: float,
    collision: Optional[CollisionInfo] = None,
    events: RewardEvents = RewardEvents(),
) -> RewardComponents:
    """Per-step reward, broken down into its additive components"""
    next_position = Vec2(next.x, next.y)
    progress = cfg.w_progress * (distance(Vec2(prev.x, prev.y), goal) - distance(next_position, goal))
    deviation = 0.0
    if cfg.mode == "line" and cfg.w_deviation > 0:
        deviation = -cfg.w_deviation * distance_to_segment(next_position, start, goal)
    yaw = -cfg.w_yaw * abs(action_value) / max_action if max_action > 0 else 0.0
    checkpoint = cfg.r_checkpoint if cfg.mode == "checkpoint" and events.checkpoint_entered else 0.0
    return RewardComponents(
        progress=progress,
        deviation=deviation,
        yaw=yaw,
        checkpoint=checkpoint,
        goal=cfg.r_goal if events.terminal == "goal" else 0.0,
        collision=-cfg.r_collision if collision is not None else 0.0,
    )
