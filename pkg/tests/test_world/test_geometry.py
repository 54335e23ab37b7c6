from __future__ import annotations

import math

import numpy as np
import pytest

from deeprotor._typing import Vec2, Vec3
from deeprotor.world import (
    BOUNDARY,
    Arena,
    Bounds,
    Box,
    Cylinder,
    StartPose,
    check_collision,
    ray_intersect,
    ray_intersect_many,
)


def make_arena(*obstacles: Box | Cylinder, half_size: float = 100.0, walls: bool = True) -> Arena:
    return Arena(
        name="test",
        bounds=Bounds(-half_size, -half_size, half_size, half_size),
        obstacles=tuple(obstacles),
        start=StartPose(0.0, 0.0, 0.0),
        goal=Vec2(half_size / 2, 0.0),
        goal_radius=1.0,
        boundary_is_wall=walls,
    )


@pytest.mark.world
def test_far_from_everything():
    arena = make_arena(Box(20.0, 20.0, 1.0, 1.0, 5.0), Cylinder(-20.0, 0.0, 1.0, 5.0))
    assert check_collision(arena, Vec3(0.0, 0.0, 2.0), 0.5) is None


@pytest.mark.world
def test_box_face_penetration():
    # face at x = 5
    arena = make_arena(Box(6.0, 0.0, 1.0, 1.0, 5.0))
    info = check_collision(arena, Vec3(4.8, 0.0, 1.0), 0.5)
    assert info is not None
    assert info.penetration_depth == pytest.approx(0.3)
    assert info.normal == pytest.approx((-1.0, 0.0, 0.0))
    assert info.position == pytest.approx((5.0, 0.0, 1.0))
    assert info.obstacle_index == 0


@pytest.mark.world
def test_tangent_is_not_a_collision():
    arena = make_arena(Box(6.0, 0.0, 1.0, 1.0, 5.0))
    assert check_collision(arena, Vec3(4.5, 0.0, 1.0), 0.5) is None


@pytest.mark.world
def test_cylinder_penetration():
    arena = make_arena(Cylinder(0.0, 5.0, 1.0, 5.0))
    info = check_collision(arena, Vec3(0.0, 3.75, 2.0), 0.5)
    assert info is not None
    assert info.penetration_depth == pytest.approx(0.25)
    assert info.normal == pytest.approx((0.0, -1.0, 0.0))


@pytest.mark.world
def test_center_inside_box():
    arena = make_arena(Box(0.0, 0.0, 2.0, 2.0, 5.0))
    info = check_collision(arena, Vec3(1.5, 0.0, 2.0), 0.5)
    assert info is not None
    assert info.normal == pytest.approx((1.0, 0.0, 0.0))
    assert info.penetration_depth == pytest.approx(1.0)


@pytest.mark.world
def test_boundary_walls():
    arena = make_arena(half_size=10.0)
    info = check_collision(arena, Vec3(-9.8, 0.0, 2.0), 0.5)
    assert info is not None
    assert info.obstacle_index == BOUNDARY
    assert info.is_boundary
    assert info.normal == pytest.approx((1.0, 0.0, 0.0))
    assert info.penetration_depth == pytest.approx(0.3)
    assert check_collision(make_arena(half_size=10.0, walls=False), Vec3(-9.8, 0.0, 2.0), 0.5) is None


@pytest.mark.world
def test_deepest_contact_wins():
    arena = make_arena(Box(6.0, 0.0, 1.0, 1.0, 5.0), Cylinder(4.0, 1.2, 1.0, 5.0))
    info = check_collision(arena, Vec3(4.8, 0.0, 1.0), 0.5)
    assert info is not None
    depths = [0.3, 0.5 - (math.hypot(0.8, 1.2) - 1.0)]
    assert info.penetration_depth == pytest.approx(max(depths))


@pytest.mark.world
def test_ray_box_face():
    # face at x = 10, spanning the ray
    arena = make_arena(Box(11.0, 0.0, 1.0, 5.0, 5.0))
    assert ray_intersect(arena, Vec3(0.0, 0.0, 2.0), Vec3(1.0, 0.0, 0.0), 40.0) == pytest.approx(10.0)


@pytest.mark.world
def test_ray_cylinder_center_line():
    arena = make_arena(Cylinder(5.0, 0.0, 1.0, 5.0))
    assert ray_intersect(arena, Vec3(0.0, 0.0, 2.0), Vec3(1.0, 0.0, 0.0), 40.0) == pytest.approx(4.0)


@pytest.mark.world
def test_ray_clamped_to_max_range():
    arena = make_arena()
    assert ray_intersect(arena, Vec3(0.0, 0.0, 2.0), Vec3(1.0, 0.0, 0.0), 40.0) == 40.0
    # passes over a short cylinder
    short = make_arena(Cylinder(5.0, 0.0, 1.0, 1.0))
    assert ray_intersect(short, Vec3(0.0, 0.0, 2.0), Vec3(1.0, 0.0, 0.0), 40.0) == 40.0


@pytest.mark.world
def test_ray_ground():
    arena = make_arena()
    d = Vec3(math.cos(math.radians(-30.0)), 0.0, math.sin(math.radians(-30.0)))
    assert ray_intersect(arena, Vec3(0.0, 0.0, 2.0), d, 40.0) == pytest.approx(4.0)


@pytest.mark.world
def test_ray_from_ground_level_ignores_ground():
    arena = make_arena(walls=False)
    down = Vec3(0.0, 0.0, -1.0)
    assert ray_intersect(arena, Vec3(0.0, 0.0, 0.0), down, 40.0) == 40.0
    assert ray_intersect(arena, Vec3(0.0, 0.0, -1.0), down, 40.0) == 40.0
    depths = ray_intersect_many(arena, Vec3(0.0, 0.0, 0.0), np.array([[0.6, 0.0, -0.8], [1.0, 0.0, 0.0]]), 40.0)
    assert np.all(depths > 0.0)


@pytest.mark.world
def test_ray_boundary_wall():
    origin, north = Vec3(0.0, 0.0, 2.0), Vec3(0.0, 1.0, 0.0)
    assert ray_intersect(make_arena(half_size=10.0), origin, north, 40.0) == pytest.approx(10.0)
    assert ray_intersect(make_arena(half_size=10.0, walls=False), origin, north, 40.0) == 40.0


@pytest.mark.world
def test_adding_obstacles_never_increases_depth():
    rng = np.random.default_rng(0)
    directions = rng.normal(size=(500, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    origin = Vec3(0.0, 0.0, 2.0)
    base = make_arena(Box(8.0, 3.0, 1.0, 2.0, 4.0), half_size=30.0)
    richer = make_arena(Box(8.0, 3.0, 1.0, 2.0, 4.0), Cylinder(-6.0, -4.0, 1.5, 6.0), half_size=30.0)
    d_base = ray_intersect_many(base, origin, directions, 40.0)
    d_richer = ray_intersect_many(richer, origin, directions, 40.0)
    assert np.all(d_richer <= d_base)
    assert np.all(d_base > 0.0)
    assert np.all(d_base <= 40.0)
