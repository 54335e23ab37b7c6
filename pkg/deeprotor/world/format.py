from __future__ import annotations

import math
from typing import Optional

from deeprotor._typing import Vec2, Vec3
from deeprotor.exceptions import ArenaSemanticError, ArenaSyntaxError
from deeprotor.processor.parser import Directive, iter_directives
from deeprotor.world.arena import (
    DEFAULT_ALTITUDE,
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
from deeprotor.world.geometry import check_collision

# directive -> number of numeric arguments
_ARITY = {
    "bounds": 4,
    "wallheight": 1,
    "box": 5,
    "cylinder": 4,
    "start": 3,
    "goal": 3,
    "checkpoint": 3,
}


def _numbers(directive: Directive) -> list[float]:
    expected = _ARITY[directive.keyword]
    if len(directive.args) != expected:
        raise ArenaSyntaxError(
            f"`{directive.keyword}` expects {expected} numbers, got {len(directive.args)}", directive.line_number
        )
    try:
        values = [float(token) for token in directive.args]
    except ValueError:
        raise ArenaSyntaxError(f"`{directive.keyword}` arguments must be numbers", directive.line_number)
    if not all(math.isfinite(v) for v in values):
        raise ArenaSyntaxError(f"`{directive.keyword}` arguments must be finite", directive.line_number)
    return values


def validate_arena(
    arena: Arena, vehicle_radius: float = DEFAULT_VEHICLE_RADIUS, altitude: float = DEFAULT_ALTITUDE
) -> Arena:
    """Enforce the arena invariants, raising ``ArenaSemanticError`` on the first violation"""
    b = arena.bounds
    if not (b.width > 0 and b.height > 0):
        raise ArenaSemanticError("bounds must have positive width and height")
    if arena.wall_height <= 0:
        raise ArenaSemanticError("wall height must be positive")
    if arena.goal_radius <= 0:
        raise ArenaSemanticError("goal radius must be positive")
    for i, obstacle in enumerate(arena.obstacles):
        extents = (obstacle.hx, obstacle.hy) if isinstance(obstacle, Box) else (obstacle.radius,)
        if min(*extents, obstacle.height) <= 0:
            raise ArenaSemanticError(f"obstacle {i} has a non-positive extent")
        fp = obstacle.footprint()
        if not (b.contains(fp.xmin, fp.ymin) and b.contains(fp.xmax, fp.ymax)):
            raise ArenaSemanticError(f"obstacle {i} lies outside bounds")
    for i, checkpoint in enumerate(arena.checkpoints):
        if checkpoint.radius <= 0:
            raise ArenaSemanticError(f"checkpoint {i} radius must be positive")
    for label, (x, y) in (("start", arena.start_position), ("goal", arena.goal)):
        if not b.contains(x, y):
            raise ArenaSemanticError(f"{label} outside bounds")
        if check_collision(arena, Vec3(x, y, altitude), vehicle_radius) is not None:
            raise ArenaSemanticError(f"{label} in collision")
    if arena.start_position == arena.goal:
        raise ArenaSemanticError("start and goal must differ")
    return arena


def parse_arena(
    text: str, vehicle_radius: float = DEFAULT_VEHICLE_RADIUS, altitude: float = DEFAULT_ALTITUDE
) -> Arena:
    """Parse the line-oriented arena format into a validated ``Arena``

    ``walls on|off`` is accepted in addition to the documented directives, so that arenas without
    solid boundaries survive a serialize/parse round trip.
    """
    name = "arena"
    bounds: Optional[Bounds] = None
    wall_height = DEFAULT_WALL_HEIGHT
    boundary_is_wall = True
    obstacles: list[Obstacle] = []
    checkpoints: list[Checkpoint] = []
    start: Optional[StartPose] = None
    goal: Optional[tuple[Vec2, float]] = None

    for directive in iter_directives(text):
        keyword = directive.keyword
        if keyword == "arena":
            if len(directive.args) != 1:
                raise ArenaSyntaxError("`arena` expects a single name token", directive.line_number)
            name = directive.args[0]
        elif keyword == "walls":
            if directive.args not in (["on"], ["off"]):
                raise ArenaSyntaxError("`walls` expects on|off", directive.line_number)
            boundary_is_wall = directive.args[0] == "on"
        elif keyword not in _ARITY:
            raise ArenaSyntaxError(f"unknown directive `{keyword}`", directive.line_number)
        else:
            values = _numbers(directive)
            if keyword == "bounds":
                bounds = Bounds(*values)
            elif keyword == "wallheight":
                wall_height = values[0]
            elif keyword == "box":
                obstacles.append(Box(*values))
            elif keyword == "cylinder":
                obstacles.append(Cylinder(*values))
            elif keyword == "start":
                start = StartPose(*values)
            elif keyword == "goal":
                goal = (Vec2(values[0], values[1]), values[2])
            else:
                checkpoints.append(Checkpoint(*values))

    if bounds is None:
        raise ArenaSemanticError("bounds required")
    if start is None:
        raise ArenaSemanticError("start required")
    if goal is None:
        raise ArenaSemanticError("goal required")
    arena = Arena(
        name=name,
        bounds=bounds,
        obstacles=tuple(obstacles),
        start=start,
        goal=goal[0],
        goal_radius=goal[1],
        checkpoints=tuple(checkpoints),
        wall_height=wall_height,
        boundary_is_wall=boundary_is_wall,
    )
    return validate_arena(arena, vehicle_radius, altitude)


def serialize_arena(arena: Arena) -> str:
    def fmt(*values: float) -> str:
        return " ".join(repr(float(v)) for v in values)

    lines = [
        f"arena {arena.name}",
        f"bounds {fmt(*arena.bounds)}",
        f"wallheight {fmt(arena.wall_height)}",
        f"walls {'on' if arena.boundary_is_wall else 'off'}",
        f"start {fmt(*arena.start)}",
        f"goal {fmt(arena.goal.x, arena.goal.y, arena.goal_radius)}",
    ]
    for obstacle in arena.obstacles:
        if isinstance(obstacle, Box):
            lines.append(f"box {fmt(obstacle.x, obstacle.y, obstacle.hx, obstacle.hy, obstacle.height)}")
        else:
            lines.append(f"cylinder {fmt(obstacle.x, obstacle.y, obstacle.radius, obstacle.height)}")
    for checkpoint in arena.checkpoints:
        lines.append(f"checkpoint {fmt(*checkpoint)}")
    return "\n".join(lines) + "\n"
