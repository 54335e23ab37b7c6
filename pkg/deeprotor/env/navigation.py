from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, TypedDict

import numpy as np

from deeprotor._typing import (
    Pose,
    RewardComponents,
    TerminalReason,
    Vec2,
    Vec3,
    components_total,
    empty_components,
)
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
from deeprotor.exceptions import ConfigError, EpisodeFinishedError
from deeprotor.sensor import CameraConfig, ObservationTensor, normalize_depth, render_depth
from deeprotor.vehicle import (
    ActionSpace,
    AttitudeCoeffs,
    NoiseModel,
    QuadState,
    apply_action,
    heading_hold_correction,
    normalize_yaw,
)
from deeprotor.world import DEFAULT_ALTITUDE, DEFAULT_VEHICLE_RADIUS, Arena, CollisionInfo, check_collision


@dataclass(frozen=True)
class EnvConfig:
    reward: RewardConfig = field(default_factory=RewardConfig)
    budget: StepBudget = field(default_factory=StepBudget)
    camera: CameraConfig = field(default_factory=CameraConfig)
    actions: ActionSpace = field(default_factory=ActionSpace)
    noise: NoiseModel = field(default_factory=NoiseModel)
    attitude: AttitudeCoeffs = field(default_factory=AttitudeCoeffs)
    dt: float = 0.1
    altitude: float = DEFAULT_ALTITUDE
    vehicle_radius: float = DEFAULT_VEHICLE_RADIUS
    heading_hold: bool = True
    heading_gain: float = 1.0
    render_observation: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.vehicle_radius <= 0 or self.altitude <= 0:
            raise ConfigError("vehicle radius and altitude must be positive")
        if self.heading_gain <= 0:
            raise ConfigError("heading gain must be positive")


class StepInfo(TypedDict):
    step: int
    collision: Optional[CollisionInfo]
    components: RewardComponents
    terminal: Optional[TerminalReason]
    checkpoints_hit: int
    applied_yaw_rate: float


@dataclass
class EpisodeResult:
    steps: int
    total_reward: float
    terminal: TerminalReason
    reward_components: RewardComponents
    checkpoints_hit: int
    mean_abs_yaw_rate: float
    mean_roll: float
    mean_pitch: float


class NavigationEnv:
    """Episodic navigation MDP around one arena

    Each instance owns its rng; instances share nothing mutable and may run side by side.
    """

    def __init__(self, arena: Arena, config: EnvConfig, rng: np.random.Generator):
        self.arena = arena
        self.config = config
        self.rng = rng
        self.state = self._spawn_state()
        self.max_steps = config.budget.base_steps
        self.steps = 0
        self.done = True
        self._target_yaw = self.state.yaw
        self._away_limit = math.inf
        self._next_checkpoint = 0
        self._components = empty_components()
        self._total_reward = 0.0
        self._terminal: Optional[TerminalReason] = None
        self._sum_abs_yaw_rate = 0.0
        self._sum_roll = 0.0
        self._sum_pitch = 0.0
        self._blank = ObservationTensor(
            config.camera.width,
            config.camera.height,
            np.zeros((config.camera.height, config.camera.width), dtype=np.float32),
        )

    @property
    def n_actions(self) -> int:
        return self.config.actions.n

    @property
    def pose(self) -> Pose:
        return Pose(self.state.x, self.state.y, self.state.z, self.state.yaw)

    def _spawn_state(self) -> QuadState:
        start = self.arena.start
        return QuadState(
            x=start.x,
            y=start.y,
            z=self.config.altitude,
            yaw=normalize_yaw(start.yaw),
            forward_speed=self.config.actions.forward_speed,
        )

    def observe(self) -> ObservationTensor:
        if not self.config.render_observation:
            return self._blank
        camera = self.config.camera
        return normalize_depth(render_depth(self.arena, self.pose, camera), camera.max_range)

    def reset(self, episode_index: int, arena: Optional[Arena] = None) -> ObservationTensor:
        if arena is not None:
            self.arena = arena
        self.state = self._spawn_state()
        self._target_yaw = self.state.yaw
        self.steps = 0
        self.done = False
        self.max_steps = max_steps_for_episode(self.config.budget, episode_index)
        initial_distance = distance(self.arena.start_position, self.arena.goal)
        away_limit = self.config.reward.away_limit
        self._away_limit = 1.5 * initial_distance if away_limit is None else away_limit
        self._next_checkpoint = 0
        self._components = empty_components()
        self._total_reward = 0.0
        self._terminal = None
        self._sum_abs_yaw_rate = self._sum_roll = self._sum_pitch = 0.0
        return self.observe()

    def _deviation(self, position: Vec2) -> float:
        if self.config.reward.mode == "checkpoint":
            return distance_to_polyline(position, self.arena.route())
        return distance_to_segment(position, self.arena.start_position, self.arena.goal)

    def step(self, action_index: int) -> tuple[ObservationTensor, float, bool, StepInfo]:
        if self.done:
            raise EpisodeFinishedError("step() called on a finished episode, call reset() first")
        cfg = self.config
        space = cfg.actions
        if not 0 <= action_index < space.n:
            raise ConfigError(f"action index {action_index} outside [0, {space.n})")
        action_value = space.values[action_index]

        correction = 0.0
        if space.mode == "yaw-rate" and cfg.heading_hold:
            correction = heading_hold_correction(self.state, self._target_yaw, cfg.heading_gain)
            self._target_yaw = normalize_yaw(self._target_yaw + action_value * cfg.dt)
        prev = self.state
        self.state = apply_action(prev, action_index, space, cfg.noise, cfg.dt, self.rng, correction, cfg.attitude)
        self.steps += 1
        applied_yaw_rate = action_value + correction if space.mode == "yaw-rate" else 0.0

        position = Vec2(self.state.x, self.state.y)
        collision = check_collision(self.arena, Vec3(self.state.x, self.state.y, self.state.z), cfg.vehicle_radius)
        checkpoint_entered = False
        if self._next_checkpoint < len(self.arena.checkpoints):
            checkpoint = self.arena.checkpoints[self._next_checkpoint]
            if distance(position, Vec2(checkpoint.x, checkpoint.y)) <= checkpoint.radius:
                checkpoint_entered = True
                self._next_checkpoint += 1

        goal_distance = distance(position, self.arena.goal)
        terminal: Optional[TerminalReason] = None
        if collision is not None:
            terminal = "collision"
        elif cfg.reward.goal_terminates and goal_distance <= self.arena.goal_radius:
            terminal = "goal"
        elif self._deviation(position) > cfg.reward.deviation_limit:
            terminal = "deviation"
        elif goal_distance > self._away_limit:
            terminal = "away_from_goal"
        elif self.steps >= self.max_steps:
            terminal = "step_limit"

        components = compute_reward(
            prev,
            self.state,
            action_value,
            cfg.reward,
            start=self.arena.start_position,
            goal=self.arena.goal,
            max_action=space.max_magnitude,
            collision=collision,
            events=RewardEvents(terminal, checkpoint_entered),
        )
        reward = components_total(components)
        for key in self._components:
            self._components[key] += components[key]  # type: ignore
        self._total_reward += reward
        self._sum_abs_yaw_rate += abs(applied_yaw_rate)
        self._sum_roll += self.state.roll
        self._sum_pitch += self.state.pitch
        self._terminal = terminal
        self.done = terminal is not None

        info = StepInfo(
            step=self.steps,
            collision=collision,
            components=components,
            terminal=terminal,
            checkpoints_hit=self._next_checkpoint,
            applied_yaw_rate=applied_yaw_rate,
        )
        return self.observe(), reward, self.done, info

    def result(self) -> EpisodeResult:
        assert self._terminal is not None, "episode has not finished"
        steps = max(self.steps, 1)
        return EpisodeResult(
            steps=self.steps,
            total_reward=self._total_reward,
            terminal=self._terminal,
            reward_components=RewardComponents(**self._components),
            checkpoints_hit=self._next_checkpoint,
            mean_abs_yaw_rate=self._sum_abs_yaw_rate / steps,
            mean_roll=self._sum_roll / steps,
            mean_pitch=self._sum_pitch / steps,
        )
