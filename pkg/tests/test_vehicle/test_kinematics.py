from __future__ import annotations

import numpy as np
import pytest

from deeprotor.exceptions import ConfigError
from deeprotor.vehicle import (
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

YAW_RATES = ActionSpace.yaw_rate()
STILL = NoiseModel.noiseless()


def hover(yaw: float = 0.0) -> QuadState:
    return QuadState(x=0.0, y=0.0, z=2.0, yaw=yaw, forward_speed=2.0)


@pytest.mark.vehicle
def test_yaw_rate_integration():
    rng = np.random.default_rng(0)
    # +10 deg/s
    state = apply_action(hover(), 4, YAW_RATES, STILL, 0.1, rng)
    assert state.yaw == 1.0


@pytest.mark.vehicle
def test_forward_motion():
    rng = np.random.default_rng(0)
    state = apply_action(hover(), 2, YAW_RATES, STILL, 0.1, rng)
    assert state.x == pytest.approx(0.2)
    assert state.y == 0.0

    state = apply_action(hover(90.0), 2, YAW_RATES, STILL, 0.1, rng)
    assert state.y == pytest.approx(0.2)
    assert state.x == pytest.approx(0.0, abs=1e-12)
    assert state.z == 2.0


@pytest.mark.vehicle
def test_yaw_stays_normalized():
    rng = np.random.default_rng(0)
    state = hover(359.5)
    for _ in range(10):
        state = apply_action(state, 4, YAW_RATES, STILL, 0.1, rng)
        assert 0.0 <= state.yaw < 360.0
    assert state.yaw == pytest.approx(9.5)
    assert normalize_yaw(-1e-17) == 0.0


@pytest.mark.vehicle
def test_noise_draws_do_not_depend_on_magnitude():
    noisy_rng, quiet_rng = np.random.default_rng(5), np.random.default_rng(5)
    apply_action(hover(), 1, YAW_RATES, NoiseModel(), 0.1, noisy_rng)
    apply_action(hover(), 1, YAW_RATES, STILL, 0.1, quiet_rng)
    assert noisy_rng.random() == quiet_rng.random()


@pytest.mark.vehicle
def test_same_seed_same_trajectory():
    def fly(seed: int) -> QuadState:
        rng = np.random.default_rng(seed)
        state = hover()
        for i in range(50):
            state = apply_action(state, i % YAW_RATES.n, YAW_RATES, NoiseModel(), 0.1, rng)
        return state

    assert fly(9) == fly(9)


@pytest.mark.vehicle
def test_heading_hold_correction():
    state = hover(30.0)
    assert heading_hold_correction(state, 30.0, 1.0) == 0
    assert heading_hold_correction(hover(40.0), 30.0, 1.0) == pytest.approx(-10.0)
    # 350 degrees past the target is 10 degrees short of it
    assert heading_hold_correction(hover(20.0), 30.0, 1.0) == pytest.approx(10.0)
    assert heading_hold_correction(hover(normalize_yaw(30.0 + 350.0)), 30.0, 1.0) == pytest.approx(10.0)


@pytest.mark.vehicle
def test_wrap_angle():
    for offset in range(-720, 721, 5):
        wrapped = wrap_angle(float(offset))
        assert -180.0 < wrapped <= 180.0
        assert (offset - wrapped) % 360.0 == 0.0
    assert wrap_angle(180.0) == 180.0
    assert wrap_angle(-180.0) == 180.0


@pytest.mark.vehicle
def test_heading_hold_cancels_drift():
    drift = NoiseModel(yaw_rate_sigma=0.0, speed_sigma=0.0, heading_drift_rate=0.2)
    rng = np.random.default_rng(0)
    free, held = hover(), hover()
    for _ in range(500):
        free = apply_action(free, 2, YAW_RATES, drift, 0.1, rng)
        correction = heading_hold_correction(held, 0.0, 1.0)
        held = apply_action(held, 2, YAW_RATES, drift, 0.1, rng, correction=correction)
    assert abs(wrap_angle(free.yaw)) == pytest.approx(10.0)
    # steady state error is drift / gain
    assert abs(wrap_angle(held.yaw)) <= 0.2 + 1e-6
    assert free.heading_bias == pytest.approx(10.0)


@pytest.mark.vehicle
@pytest.mark.parametrize(
    ("start_yaw", "target_yaw", "gain"),
    [(120.0, 90.0, 2.0), (60.0, 90.0, 2.0), (10.0, 350.0, 2.0), (200.0, 170.0, 9.0)],
)
def test_heading_hold_converges_monotonically(start_yaw: float, target_yaw: float, gain: float):
    dt = 0.1
    rng = np.random.default_rng(0)
    state = hover(start_yaw)
    error = abs(wrap_angle(state.yaw - target_yaw))
    steps = 0
    while error >= 1e-6:
        correction = heading_hold_correction(state, target_yaw, gain)
        state = apply_action(state, 2, YAW_RATES, STILL, dt, rng, correction=correction)
        next_error = abs(wrap_angle(state.yaw - target_yaw))
        assert next_error < error
        error = next_error
        steps += 1
        assert steps < 500
    assert error < 1e-6


@pytest.mark.vehicle
def test_emulate_attitude():
    coeffs = AttitudeCoeffs(k_roll=2.0, k_pitch=2.5, roll_clamp=30.0)
    assert emulate_attitude(0.0, 0.0, coeffs) == (0.0, 0.0)
    assert emulate_attitude(10.0, 0.0, coeffs)[0] == 20.0
    assert emulate_attitude(100.0, 0.0, coeffs)[0] == 30.0
    assert emulate_attitude(-100.0, 0.0, coeffs)[0] == -30.0
    assert emulate_attitude(0.0, 2.0, coeffs)[1] == -5.0


@pytest.mark.vehicle
def test_attitude_follows_command():
    rng = np.random.default_rng(0)
    state = apply_action(hover(), 0, YAW_RATES, NoiseModel(), 0.1, rng)
    # -10 deg/s at k_roll 2
    assert state.roll == -20.0
    assert state.pitch == -5.0


@pytest.mark.vehicle
def test_lateral_roll_keeps_heading():
    space = ActionSpace.lateral_roll()
    rng = np.random.default_rng(0)
    state = hover(0.0)
    for _ in range(20):
        state = apply_action(state, 2, space, NoiseModel(), 0.1, rng)
        assert state.yaw == 0.0
    assert state.roll == 15.0

    state = apply_action(hover(0.0), 2, space, STILL, 0.1, rng)
    # banking right at heading 0 drifts towards -y
    assert state.y == pytest.approx(-0.15)
    assert state.x == pytest.approx(0.2)


@pytest.mark.vehicle
def test_action_space_validation():
    assert YAW_RATES.n == 5
    assert YAW_RATES.max_magnitude == 10.0
    assert ActionSpace.lateral_roll().n == 3
    with pytest.raises(ConfigError):
        ActionSpace.lateral_roll(rolls=(-10.0, 10.0))
    with pytest.raises(ConfigError):
        ActionSpace(mode="hover")  # type: ignore
    with pytest.raises(ConfigError):
        NoiseModel(yaw_rate_sigma=-1.0)
