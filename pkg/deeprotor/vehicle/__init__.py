from __future__ import annotations

from deeprotor.vehicle.kinematics import (
    DEFAULT_ROLLS,
    DEFAULT_YAW_RATES,
    ActionSpace,
    AttitudeCoeffs,
    NoiseModel,
    QuadState,
    apply_action,
    emulate_attitude,
    heading_hold_correction,
    normalize_yaw,
    wrap_angle,
)

__all__ = [
    "ActionSpace",
    "AttitudeCoeffs",
    "DEFAULT_ROLLS",
    "DEFAULT_YAW_RATES",
    "NoiseModel",
    "QuadState",
    "apply_action",
    "emulate_attitude",
    "heading_hold_correction",
    "normalize_yaw",
    "wrap_angle",
]
