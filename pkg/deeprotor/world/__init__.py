from __future__ import annotations

from pathlib import Path

from deeprotor.exceptions import ArenaSemanticError, ArenaSyntaxError, ConfigError
from deeprotor.processor.parser import read_text_file
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
from deeprotor.world.builders import (
    WOBBLES_ZONES,
    build_blocks_arena,
    build_corridor_arena,
    build_wobbles_zone,
)
from deeprotor.world.format import parse_arena, serialize_arena, validate_arena
from deeprotor.world.geometry import (
    BOUNDARY,
    CollisionInfo,
    check_collision,
    ray_intersect,
    ray_intersect_many,
)

BUILTIN_PREFIX = "builtin:"
# resolved per episode by the trainer
RANDOM_WOBBLES_SOURCE = "builtin:wobbles"
BLOCKS_SPACING = 10.0
BLOCKS_COUNT = 12


def is_random_zone_source(source: str) -> bool:
    return source == RANDOM_WOBBLES_SOURCE


def load_arena_source(
    source: str,
    seed: int = 0,
    vehicle_radius: float = DEFAULT_VEHICLE_RADIUS,
    altitude: float = DEFAULT_ALTITUDE,
) -> Arena:
    """Resolve ``builtin:blocks``, ``builtin:wobbles-a..d``, ``builtin:corridor`` or an arena file path"""
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX) :]
        if name == "blocks":
            return build_blocks_arena(BLOCKS_SPACING, BLOCKS_COUNT, seed)
        if name == "corridor":
            return build_corridor_arena()
        if name.startswith("wobbles-") and name[len("wobbles-") :].upper() in WOBBLES_ZONES:
            return build_wobbles_zone(name[len("wobbles-") :].upper(), seed)  # type: ignore
        raise ConfigError(f"unknown builtin arena `{source}`")
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"arena file `{source}` does not exist")
    return parse_arena(read_text_file(path, ArenaSyntaxError), vehicle_radius, altitude)


__all__ = [
    "Arena",
    "ArenaSemanticError",
    "BOUNDARY",
    "Bounds",
    "Box",
    "Checkpoint",
    "CollisionInfo",
    "Cylinder",
    "DEFAULT_ALTITUDE",
    "DEFAULT_VEHICLE_RADIUS",
    "DEFAULT_WALL_HEIGHT",
    "Obstacle",
    "RANDOM_WOBBLES_SOURCE",
    "StartPose",
    "WOBBLES_ZONES",
    "build_blocks_arena",
    "build_corridor_arena",
    "build_wobbles_zone",
    "check_collision",
    "is_random_zone_source",
    "load_arena_source",
    "parse_arena",
    "ray_intersect",
    "ray_intersect_many",
    "serialize_arena",
    "validate_arena",
]
