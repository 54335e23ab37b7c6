from __future__ import annotations

from deeprotor.sensor.camera import (
    CameraConfig,
    DepthImage,
    ObservationTensor,
    normalize_depth,
    pixel_directions,
    render_depth,
    to_pgm,
    write_pgm,
)

__all__ = [
    "CameraConfig",
    "DepthImage",
    "ObservationTensor",
    "normalize_depth",
    "pixel_directions",
    "render_depth",
    "to_pgm",
    "write_pgm",
]
