from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from deeprotor._typing import ActionMode
from deeprotor.exceptions import ConfigError

DEFAULT_YAW_RATES = (-10.0, -5.0, 0.0, 5.0, 10.0)
DEFAULT_ROLLS = (-15.0, 0.0, 15.0)


def wrap_angle(degrees: float) -> float:
    """Map an angle onto (-180, 180]"""
    wrapped = math.fmod(degrees, 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    elif wrapped > 180.0:
        wrapped -= 360.0
    return wrapped


def normalize_yaw(degrees: float) -> float:
    """Map an angle onto [0, 360)"""
    yaw = degrees % 360.0
    # -1e-17 % 360 rounds to 360.0
    return 0.0 if yaw >= 360.0 else yaw


@dataclass(frozen=True)
class QuadState:
    x: float
    y: float
    z: float
    yaw: float
    forward_speed: float
    roll: float = 0.0
    pitch: float = 0.0
    heading_bias: float = 0.0


@dataclass(frozen=True)
class ActionSpace:
    """Discrete action set: yaw rates (deg/s) at fixed forward speed, or lateral rolls (deg) at fixed heading"""

    mode: ActionMode = "yaw-rate"
    rates: tuple[float, ...] = DEFAULT_YAW_RATES
    rolls: tuple[float, ...] = DEFAULT_ROLLS
    forward_speed: float = 2.0
    # m/s of lateral velocity per degree of roll
    lateral_gain: float = 0.1

    def __post_init__(self):
        if self.mode not in ("yaw-rate", "lateral-roll"):
            raise ConfigError(f"unknown action mode `{self.mode}`")
        if self.mode == "lateral-roll" and len(self.rolls) != 3:
            raise ConfigError("lateral-roll mode needs exactly 3 roll values")
        if self.mode == "yaw-rate" and not self.rates:
            raise ConfigError("yaw-rate mode needs at least one rate")
        if self.forward_speed < 0:
            raise ConfigError("forward speed must be non-negative")

    @classmethod
    def yaw_rate(cls, rates: tuple[float, ...] = DEFAULT_YAW_RATES, forward_speed: float = 2.0) -> ActionSpace:
        return cls(mode="yaw-rate", rates=rates, forward_speed=forward_speed)

    @classmethod
    def lateral_roll(
        cls, rolls: tuple[float, ...] = DEFAULT_ROLLS, forward_speed: float = 2.0, lateral_gain: float = 0.1
    ) -> ActionSpace:
        return cls(mode="lateral-roll", rolls=rolls, forward_speed=forward_speed, lateral_gain=lateral_gain)

    @property
    def values(self) -> tuple[float, ...]:
        return self.rates if self.mode == "yaw-rate" else self.rolls

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def max_magnitude(self) -> float:
        return max(abs(v) for v in self.values)


@dataclass(frozen=True)
class NoiseModel:
    yaw_rate_sigma: float = 0.5
    speed_sigma: float = 0.05
    # constant bias, deg/s
    heading_drift_rate: float = 0.2

    def __post_init__(self):
        if min(self.yaw_rate_sigma, self.speed_sigma, self.heading_drift_rate) < 0:
            raise ConfigError("noise magnitudes must be non-negative")

    @classmethod
    def noiseless(cls) -> NoiseModel:
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class AttitudeCoeffs:
    k_roll: float = 2.0
    k_pitch: float = 2.5
    roll_clamp: float = 30.0


def emulate_attitude(yaw_rate: float, forward_speed: float, coeffs: AttitudeCoeffs) -> tuple[float, float]:
    """Bank proportional to the turn rate, nose down proportional to the forward speed"""
    roll = max(-coeffs.roll_clamp, min(coeffs.roll_clamp, coeffs.k_roll * yaw_rate))
    pitch = -coeffs.k_pitch * forward_speed
    return roll, pitch


def heading_hold_correction(state: QuadState, target_yaw: float, gain: float) -> float:
    """Proportional yaw-rate command (deg/s) steering ``state.yaw`` back to ``target_yaw``"""
    assert gain > 0, "gain must be positive"
    return -gain * wrap_angle(state.yaw - target_yaw)


def apply_action(
    state: QuadState,
    action_index: int,
    space: ActionSpace,
    noise: NoiseModel,
    dt: float,
    rng: np.random.Generator,
    correction: float = 0.0,
    attitude: AttitudeCoeffs = AttitudeCoeffs(),
) -> QuadState:
    """Advance the kinematic vehicle by one control period

    ``correction`` is an additional yaw rate (heading hold) added to the commanded rate. Both noise
    draws happen on every call, so the rng stream does not depend on the noise magnitudes.
    """
    assert dt > 0, "dt must be positive"
    assert 0 <= action_index < space.n, f"invalid action index {action_index}"
    eps_yaw = float(rng.normal(0.0, noise.yaw_rate_sigma))
    eps_speed = float(rng.normal(0.0, noise.speed_sigma))
    speed = max(0.0, space.forward_speed + eps_speed)

    if space.mode == "yaw-rate":
        commanded = space.rates[action_index] + correction
        drift = noise.heading_drift_rate
        yaw = normalize_yaw(state.yaw + (commanded + eps_yaw + drift) * dt)
        heading = math.radians(yaw)
        x = state.x + speed * math.cos(heading) * dt
        y = state.y + speed * math.sin(heading) * dt
        roll, pitch = emulate_attitude(commanded, space.forward_speed, attitude)
        return replace(
            state,
            x=x,
            y=y,
            yaw=yaw,
            forward_speed=space.forward_speed,
            roll=roll,
            pitch=pitch,
            heading_bias=state.heading_bias + drift * dt,
        )

    # heading stays put, the roll tilts the thrust sideways
    commanded_roll = max(-attitude.roll_clamp, min(attitude.roll_clamp, space.rolls[action_index]))
    lateral = space.lateral_gain * commanded_roll
    heading = math.radians(state.yaw)
    # positive roll banks right
    x = state.x + (speed * math.cos(heading) + lateral * math.sin(heading)) * dt
    y = state.y + (speed * math.sin(heading) - lateral * math.cos(heading)) * dt
    _, pitch = emulate_attitude(0.0, space.forward_speed, attitude)
    return replace(state, x=x, y=y, forward_speed=space.forward_speed, roll=commanded_roll, pitch=pitch)
