from __future__ import annotations

import math

import numpy as np

from deeprotor._typing import Vec2, ZoneTag
from deeprotor.exceptions import ArenaSemanticError
from deeprotor.world.arena import (
    DEFAULT_VEHICLE_RADIUS,
    DEFAULT_WALL_HEIGHT,
    Arena,
    Bounds,
    Box,
    Checkpoint,
    Cylinder,
    Obstacle,
    StartPose,
)
from deeprotor.world.format import validate_arena

# fractions of the grid spacing
BLOCK_HALF_EXTENT = 0.25
BLOCK_JITTER = 0.15

WOBBLES_ZONES: list[ZoneTag] = ["A", "B", "C", "D"]


def _grid_side_for(block_count: int) -> int:
    """Smallest odd k whose k x k grid has room for ``block_count`` blocks around a free center cell"""
    k = 1
    while k * k - 1 < block_count:
        k += 2
    return k


def build_blocks_arena(spacing: float, block_count: int, seed: int, size: float | None = None) -> Arena:
    """Square arena of box "blocks" on a jittered grid, start fixed at the center

    The grid is surrounded by a free ring one ``spacing`` wide; the goal sits on that ring, on a
    side picked by ``seed``. Without ``size`` the arena grows to fit ``block_count``.
    """
    if spacing <= 2 * (2 * DEFAULT_VEHICLE_RADIUS):
        raise ArenaSemanticError(f"spacing {spacing} must exceed twice the vehicle diameter")
    if block_count < 0:
        raise ArenaSemanticError("block_count must be non-negative")
    if size is None:
        k = _grid_side_for(block_count)
    else:
        k = int(math.floor(size / spacing)) - 2
        k = k if k % 2 == 1 else k - 1
        if k < 1 or k * k - 1 < block_count:
            raise ArenaSemanticError(f"{block_count} blocks do not fit a {size} m arena at spacing {spacing}")
    rng = np.random.default_rng(seed)
    half_side = (k + 2) * spacing / 2
    center_index = (k - 1) / 2

    cells = [(i, j) for i in range(k) for j in range(k) if not (i == center_index and j == center_index)]
    order = rng.permutation(len(cells))
    jitter = BLOCK_JITTER * spacing
    obstacles: list[Obstacle] = []
    for cell_index in order[:block_count]:
        i, j = cells[int(cell_index)]
        dx, dy = rng.uniform(-jitter, jitter, size=2)
        obstacles.append(
            Box(
                x=float((i - center_index) * spacing + dx),
                y=float((j - center_index) * spacing + dy),
                hx=BLOCK_HALF_EXTENT * spacing,
                hy=BLOCK_HALF_EXTENT * spacing,
                height=float(rng.uniform(0.4, 0.8) * DEFAULT_WALL_HEIGHT),
            )
        )

    ring = (k + 1) * spacing / 2
    goal_angle = float(rng.integers(0, 8)) * math.pi / 4
    # project the direction onto the ring square
    scale = ring / max(abs(math.cos(goal_angle)), abs(math.sin(goal_angle)))
    goal = Vec2(round(scale * math.cos(goal_angle), 9), round(scale * math.sin(goal_angle), 9))
    arena = Arena(
        name="blocks",
        bounds=Bounds(-half_side, -half_side, half_side, half_side),
        obstacles=tuple(obstacles),
        start=StartPose(0.0, 0.0, math.degrees(goal_angle) % 360.0),
        goal=goal,
        goal_radius=max(1.0, 0.2 * spacing),
    )
    return validate_arena(arena)


def build_corridor_arena() -> Arena:
    """Enclosed straight corridor with a single box centered between start and goal"""
    arena = Arena(
        name="corridor",
        bounds=Bounds(0.0, -5.0, 30.0, 5.0),
        obstacles=(Box(15.0, 0.0, 1.0, 1.0, DEFAULT_WALL_HEIGHT),),
        start=StartPose(2.0, 0.0, 0.0),
        goal=Vec2(27.0, 0.0),
        goal_radius=1.5,
    )
    return validate_arena(arena)


def _zone_a(rng: np.random.Generator) -> Arena:
    # pillars straddling the start-goal line
    obstacles = tuple(
        Cylinder(x, float(rng.uniform(-0.5, 0.5)), float(rng.uniform(1.0, 1.5)), 8.0) for x in (14.0, 26.0)
    )
    return Arena(
        name="wobbles-a",
        bounds=Bounds(0.0, -8.0, 40.0, 8.0),
        obstacles=obstacles,
        start=StartPose(2.0, 0.0, 0.0),
        goal=Vec2(36.0, 0.0),
        goal_radius=1.5,
    )


def _zone_b(rng: np.random.Generator) -> Arena:
    # short walls, alternating sides of the corridor
    obstacles = tuple(
        Box(x, side * float(rng.uniform(2.0, 3.0)), 0.3, 3.5, 4.0)
        for x, side in ((12.0, 1.0), (22.0, -1.0), (32.0, 1.0))
    )
    return Arena(
        name="wobbles-b",
        bounds=Bounds(0.0, -8.0, 40.0, 8.0),
        obstacles=obstacles,
        start=StartPose(2.0, 0.0, 0.0),
        goal=Vec2(36.0, 0.0),
        goal_radius=1.5,
    )


def _zone_c(rng: np.random.Generator) -> Arena:
    # serpentine corridor: east, north, west, north, east (four 90 degree turns)
    gap = float(rng.uniform(7.0, 8.0))
    obstacles = (
        Box((30.0 - gap) / 2, 9.0, (30.0 - gap) / 2, 0.3, DEFAULT_WALL_HEIGHT),
        Box(gap + (30.0 - gap) / 2, 18.0, (30.0 - gap) / 2, 0.3, DEFAULT_WALL_HEIGHT),
    )
    checkpoints = (
        Checkpoint(26.5, 4.5, 2.0),
        Checkpoint(26.5, 13.5, 2.0),
        Checkpoint(3.5, 13.5, 2.0),
        Checkpoint(3.5, 22.5, 2.0),
    )
    return Arena(
        name="wobbles-c",
        bounds=Bounds(0.0, 0.0, 30.0, 27.0),
        obstacles=obstacles,
        start=StartPose(3.0, 4.5, 0.0),
        goal=Vec2(26.0, 22.5),
        goal_radius=1.5,
        checkpoints=checkpoints,
    )


def _zone_d(rng: np.random.Generator) -> Arena:
    # walls force a zig-zag through the checkpoints, pillars crowd the gaps
    walls = [
        Box(10.0, -5.75, 0.3, 4.25, 4.0),
        Box(20.0, 5.75, 0.3, 4.25, 4.0),
        Box(30.0, -5.75, 0.3, 4.25, 4.0),
        Box(40.0, 5.75, 0.3, 4.25, 4.0),
    ]
    pillar_sites = [(5.0, -5.0), (15.0, 6.0), (15.0, -7.0), (25.0, -6.0), (25.0, 7.0), (35.0, 6.0), (35.0, -7.0)]
    pillars = [
        Cylinder(x + float(rng.uniform(-0.5, 0.5)), y + float(rng.uniform(-0.5, 0.5)), 1.0, 8.0)
        for x, y in pillar_sites
    ]
    checkpoints = (
        Checkpoint(10.0, 4.0, 2.0),
        Checkpoint(20.0, -4.0, 2.0),
        Checkpoint(30.0, 4.0, 2.0),
        Checkpoint(40.0, -4.0, 2.0),
    )
    return Arena(
        name="wobbles-d",
        bounds=Bounds(0.0, -10.0, 50.0, 10.0),
        obstacles=(*walls, *pillars),
        start=StartPose(2.0, 0.0, 0.0),
        goal=Vec2(46.0, 0.0),
        goal_radius=1.5,
        checkpoints=checkpoints,
    )


def build_wobbles_zone(zone: ZoneTag, seed: int) -> Arena:
    builders = {"A": _zone_a, "B": _zone_b, "C": _zone_c, "D": _zone_d}
    if zone not in builders:
        raise ArenaSemanticError(f"unknown Wobbles zone `{zone}`")
    return validate_arena(builders[zone](np.random.default_rng(seed)))
