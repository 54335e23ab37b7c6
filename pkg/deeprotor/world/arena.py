from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

from deeprotor._typing import Vec2

DEFAULT_VEHICLE_RADIUS = 0.5
DEFAULT_ALTITUDE = 2.0
DEFAULT_WALL_HEIGHT = 10.0


class Bounds(NamedTuple):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


class StartPose(NamedTuple):
    x: float
    y: float
    yaw: float


class Checkpoint(NamedTuple):
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class Box:
    """Axis-aligned box extruded from the ground, ``hx``/``hy`` are half extents"""

    x: float
    y: float
    hx: float
    hy: float
    height: float

    def footprint(self) -> Bounds:
        return Bounds(self.x - self.hx, self.y - self.hy, self.x + self.hx, self.y + self.hy)


@dataclass(frozen=True)
class Cylinder:
    """Vertical cylinder standing on the ground"""

    x: float
    y: float
    radius: float
    height: float

    def footprint(self) -> Bounds:
        return Bounds(self.x - self.radius, self.y - self.radius, self.x + self.radius, self.y + self.radius)


Obstacle = Union[Box, Cylinder]


@dataclass(frozen=True)
class Arena:
    """Static 2.5-D scene: vertical extrusions on a ground plane inside an (optionally walled) rectangle

    Arenas are immutable and can be shared between environments. Use ``parse_arena`` or one of
    the builders to obtain a validated instance.
    """

    name: str
    bounds: Bounds
    obstacles: tuple[Obstacle, ...]
    start: StartPose
    goal: Vec2
    goal_radius: float
    checkpoints: tuple[Checkpoint, ...] = ()
    wall_height: float = DEFAULT_WALL_HEIGHT
    boundary_is_wall: bool = True

    @property
    def start_position(self) -> Vec2:
        return Vec2(self.start.x, self.start.y)

    def route(self) -> list[Vec2]:
        """Polyline start -> checkpoints (in order) -> goal"""
        return [self.start_position, *(Vec2(c.x, c.y) for c in self.checkpoints), self.goal]
