from __future__ import annotations

from deeprotor.env.navigation import EnvConfig, EpisodeResult, NavigationEnv, StepInfo
from deeprotor.env.reward import (
    RewardConfig,
    RewardEvents,
    StepBudget,
    compute_reward,
    distance,
    distance_to_polyline,
    distance_to_segment,
    max_steps_for_episode,
)

__all__ = [
    "EnvConfig",
    "EpisodeResult",
    "NavigationEnv",
    "RewardConfig",
    "RewardEvents",
    "StepBudget",
    "StepInfo",
    "compute_reward",
    "distance",
    "distance_to_polyline",
    "distance_to_segment",
    "max_steps_for_episode",
]
