from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from deeprotor._typing import FloatArray, Pose, Vec3
from deeprotor.exceptions import ConfigError
from deeprotor.world import Arena, ray_intersect_many


@dataclass(frozen=True)
class CameraConfig:
    width: int = 84
    height: int = 84
    horizontal_fov: float = 90.0
    max_range: float = 40.0
    # height above the vehicle center
    mount_height: float = 0.0

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise ConfigError(f"camera resolution {self.width}x{self.height} must be at least 2x2")
        if not 0 < self.horizontal_fov < 180:
            raise ConfigError(f"camera horizontal fov {self.horizontal_fov} must be in (0, 180)")
        if self.max_range <= 0:
            raise ConfigError("camera max_range must be positive")

    @property
    def focal_length(self) -> float:
        """Pinhole focal length in pixels (square pixels)"""
        return (self.width / 2) / math.tan(math.radians(self.horizontal_fov) / 2)


@dataclass(frozen=True)
class DepthImage:
    width: int
    height: int
    # (height, width) row-major, meters
    data: FloatArray


@dataclass(frozen=True)
class ObservationTensor:
    width: int
    height: int
    # (height, width) row-major, in [0, 1]
    data: FloatArray


def pixel_directions(yaw: float, config: CameraConfig) -> FloatArray:
    """Unit world-frame rays through every pixel center, shape ``(height, width, 3)``

    Camera frame: x forward, y left, z up. Column index grows to the right, row index grows down.
    """
    f = config.focal_length
    u = np.arange(config.width, dtype=np.float64) + 0.5 - config.width / 2
    v = np.arange(config.height, dtype=np.float64) + 0.5 - config.height / 2
    left = np.broadcast_to(-u[np.newaxis, :], (config.height, config.width))
    up = np.broadcast_to(-v[:, np.newaxis], (config.height, config.width))
    forward = np.full((config.height, config.width), f)

    yaw_rad = math.radians(yaw)
    c, s = math.cos(yaw_rad), math.sin(yaw_rad)
    rays = np.stack([c * forward - s * left, s * forward + c * left, up], axis=-1)
    return rays / np.linalg.norm(rays, axis=-1, keepdims=True)


def render_depth(arena: Arena, pose: Pose, config: CameraConfig) -> DepthImage:
    """Depth-perspective frame: per-pixel Euclidean distance along the camera ray"""
    directions = pixel_directions(pose.yaw, config)
    origin = Vec3(pose.x, pose.y, pose.z + config.mount_height)
    depth = ray_intersect_many(arena, origin, directions.reshape(-1, 3), config.max_range)
    return DepthImage(config.width, config.height, depth.reshape(config.height, config.width))


def normalize_depth(img: DepthImage, max_range: float) -> ObservationTensor:
    data = np.clip(img.data / max_range, 0.0, 1.0).astype(np.float32)
    return ObservationTensor(img.width, img.height, data)


def to_pgm(obs: ObservationTensor) -> str:
    """Plain (P2) greymap, maxval 255"""
    pixels = np.rint(255.0 * obs.data.astype(np.float64)).astype(np.int64)
    lines = ["P2", f"{obs.width} {obs.height}", "255"]
    lines += [" ".join(str(int(p)) for p in row) for row in pixels]
    return "\n".join(lines) + "\n"


def write_pgm(path: str | Path, obs: ObservationTensor):
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_text(to_pgm(obs), encoding="ascii")
