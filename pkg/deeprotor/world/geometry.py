from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from deeprotor._typing import FloatArray, Vec3
from deeprotor.world.arena import Arena, Box, Cylinder

BOUNDARY = -1
# depth reported when a ray starts inside a solid
MIN_DEPTH = 1e-6


class CollisionInfo(NamedTuple):
    position: Vec3
    normal: Vec3
    penetration_depth: float
    obstacle_index: int

    @property
    def is_boundary(self) -> bool:
        return self.obstacle_index == BOUNDARY


class _Contact(NamedTuple):
    depth: float
    position: Vec3
    normal: Vec3


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def _outside_contact(center: Vec3, nearest: Vec3, radius: float) -> Optional[_Contact]:
    dx, dy, dz = center.x - nearest.x, center.y - nearest.y, center.z - nearest.z
    distance = math.sqrt(dx * dx + dy * dy + dz * dz)
    # tangent contact is not a collision
    if distance >= radius:
        return None
    return _Contact(radius - distance, nearest, Vec3(dx / distance, dy / distance, dz / distance))


def _box_contact(box: Box, center: Vec3, radius: float) -> Optional[_Contact]:
    lo = (box.x - box.hx, box.y - box.hy, 0.0)
    hi = (box.x + box.hx, box.y + box.hy, box.height)
    nearest = Vec3(*(_clamp(c, lo[i], hi[i]) for i, c in enumerate(center)))
    if nearest != center:
        return _outside_contact(center, nearest, radius)
    # center inside the solid, push out through the closest face (bottom face rests on the ground)
    faces = [
        (center.x - lo[0], Vec3(-1.0, 0.0, 0.0)),
        (hi[0] - center.x, Vec3(1.0, 0.0, 0.0)),
        (center.y - lo[1], Vec3(0.0, -1.0, 0.0)),
        (hi[1] - center.y, Vec3(0.0, 1.0, 0.0)),
        (hi[2] - center.z, Vec3(0.0, 0.0, 1.0)),
    ]
    depth, normal = min(faces, key=lambda face: face[0])
    position = Vec3(center.x + depth * normal.x, center.y + depth * normal.y, center.z + depth * normal.z)
    return _Contact(radius + depth, position, normal)


def _cylinder_contact(cylinder: Cylinder, center: Vec3, radius: float) -> Optional[_Contact]:
    dx, dy = center.x - cylinder.x, center.y - cylinder.y
    rho = math.hypot(dx, dy)
    z = _clamp(center.z, 0.0, cylinder.height)
    if rho > cylinder.radius:
        scale = cylinder.radius / rho
        nearest = Vec3(cylinder.x + dx * scale, cylinder.y + dy * scale, z)
    else:
        nearest = Vec3(center.x, center.y, z)
    if nearest != center:
        return _outside_contact(center, nearest, radius)
    side = cylinder.radius - rho
    top = cylinder.height - center.z
    if side < top:
        ux, uy = (dx / rho, dy / rho) if rho > 0 else (1.0, 0.0)
        position = Vec3(cylinder.x + ux * cylinder.radius, cylinder.y + uy * cylinder.radius, center.z)
        return _Contact(radius + side, position, Vec3(ux, uy, 0.0))
    return _Contact(radius + top, Vec3(center.x, center.y, cylinder.height), Vec3(0.0, 0.0, 1.0))


def _boundary_contact(arena: Arena, center: Vec3, radius: float) -> Optional[_Contact]:
    """Everything outside the bounds is solid up to ``wall_height``"""
    b = arena.bounds
    deepest: Optional[_Contact] = None
    z = _clamp(center.z, 0.0, arena.wall_height)
    # (signed distance into the open arena, inward normal, plane point builder)
    walls = [
        (center.x - b.xmin, Vec3(1.0, 0.0, 0.0), lambda: Vec3(b.xmin, center.y, z)),
        (b.xmax - center.x, Vec3(-1.0, 0.0, 0.0), lambda: Vec3(b.xmax, center.y, z)),
        (center.y - b.ymin, Vec3(0.0, 1.0, 0.0), lambda: Vec3(center.x, b.ymin, z)),
        (b.ymax - center.y, Vec3(0.0, -1.0, 0.0), lambda: Vec3(center.x, b.ymax, z)),
    ]
    for clearance, normal, plane_point in walls:
        nearest = plane_point()
        if clearance <= 0 and z == center.z:
            contact = _Contact(radius - clearance, nearest, normal)
        elif clearance <= 0:
            # above the wall top but outside the bounds
            contact = _outside_contact(center, Vec3(center.x, center.y, z), radius)
        else:
            contact = _outside_contact(center, nearest, radius)
        if contact is not None and (deepest is None or contact.depth > deepest.depth):
            deepest = contact
    return deepest


def check_collision(arena: Arena, center: Vec3, radius: float) -> Optional[CollisionInfo]:
    """Deepest contact between a sphere and the scene, or ``None`` without strict penetration"""
    assert radius > 0, "radius must be positive"
    best: Optional[CollisionInfo] = None
    for index, obstacle in enumerate(arena.obstacles):
        if isinstance(obstacle, Box):
            contact = _box_contact(obstacle, center, radius)
        else:
            contact = _cylinder_contact(obstacle, center, radius)
        if contact is not None and (best is None or contact.depth > best.penetration_depth):
            best = CollisionInfo(contact.position, contact.normal, contact.depth, index)
    if arena.boundary_is_wall:
        contact = _boundary_contact(arena, center, radius)
        if contact is not None and (best is None or contact.depth > best.penetration_depth):
            best = CollisionInfo(contact.position, contact.normal, contact.depth, BOUNDARY)
    return best


def _ray_box(box: Box, origin: FloatArray, directions: FloatArray) -> FloatArray:
    lo = np.array([box.x - box.hx, box.y - box.hy, 0.0])
    hi = np.array([box.x + box.hx, box.y + box.hy, box.height])
    parallel = directions == 0.0
    inside_slab = (origin >= lo) & (origin <= hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - origin) / directions
        t2 = (hi - origin) / directions
    t1 = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), t1)
    t2 = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), t2)
    t_near = np.minimum(t1, t2).max(axis=1)
    t_far = np.maximum(t1, t2).min(axis=1)
    hit = (t_far >= t_near) & (t_far > 0.0)
    return np.where(hit, np.where(t_near > 0.0, t_near, MIN_DEPTH), np.inf)


def _ray_cylinder(cylinder: Cylinder, origin: FloatArray, directions: FloatArray) -> FloatArray:
    ocx, ocy, oz = origin[0] - cylinder.x, origin[1] - cylinder.y, origin[2]
    dx, dy, dz = directions[:, 0], directions[:, 1], directions[:, 2]
    c = ocx * ocx + ocy * ocy - cylinder.radius * cylinder.radius
    result = np.full(directions.shape[0], np.inf)
    if c <= 0.0 and 0.0 <= oz <= cylinder.height:
        result[:] = MIN_DEPTH
        return result

    a = dx * dx + dy * dy
    b = 2.0 * (ocx * dx + ocy * dy)
    disc = b * b - 4.0 * a * c
    with np.errstate(divide="ignore", invalid="ignore"):
        t_side = (-b - np.sqrt(disc)) / (2.0 * a)
    z_side = oz + t_side * dz
    side_hit = (a > 0.0) & (disc >= 0.0) & (t_side > 0.0) & (z_side >= 0.0) & (z_side <= cylinder.height)
    result = np.where(side_hit, t_side, result)

    if oz > cylinder.height:
        with np.errstate(divide="ignore", invalid="ignore"):
            t_top = (cylinder.height - oz) / dz
        px, py = ocx + t_top * dx, ocy + t_top * dy
        top_hit = (dz < 0.0) & (px * px + py * py <= cylinder.radius * cylinder.radius)
        result = np.where(top_hit & (t_top < result), t_top, result)
    return result


def _ray_ground(origin: FloatArray, directions: FloatArray) -> FloatArray:
    dz = directions[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -origin[2] / dz
    return np.where((dz < 0.0) & (t > 0.0), t, np.inf)


def _ray_walls(arena: Arena, origin: FloatArray, directions: FloatArray) -> FloatArray:
    b = arena.bounds
    result = np.full(directions.shape[0], np.inf)
    for axis, lo, hi in ((0, b.xmin, b.xmax), (1, b.ymin, b.ymax)):
        d = directions[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(d < 0.0, (lo - origin[axis]) / d, (hi - origin[axis]) / d)
        z = origin[2] + t * directions[:, 2]
        hit = (d != 0.0) & (t > 0.0) & (z >= 0.0) & (z <= arena.wall_height)
        result = np.where(hit & (t < result), t, result)
    return result


def ray_intersect_many(arena: Arena, origin: Vec3, directions: FloatArray, max_range: float) -> FloatArray:
    """Distance along each unit ray to the nearest surface, clamped to ``max_range``

    ``directions`` has shape ``(N, 3)``; the result has shape ``(N,)`` with values in ``(0, max_range]``.
    """
    assert max_range > 0, "max_range must be positive"
    o = np.asarray(origin, dtype=np.float64)
    dirs = np.asarray(directions, dtype=np.float64).reshape(-1, 3)
    nearest = _ray_ground(o, dirs)
    for obstacle in arena.obstacles:
        t = _ray_box(obstacle, o, dirs) if isinstance(obstacle, Box) else _ray_cylinder(obstacle, o, dirs)
        nearest = np.minimum(nearest, t)
    if arena.boundary_is_wall:
        nearest = np.minimum(nearest, _ray_walls(arena, o, dirs))
    return np.minimum(nearest, max_range)


def ray_intersect(arena: Arena, origin: Vec3, direction: Vec3, max_range: float) -> float:
    norm = math.sqrt(direction[0] ** 2 + direction[1] ** 2 + direction[2] ** 2)
    assert abs(norm - 1.0) <= 1e-9, f"direction must be a unit vector (|d| = {norm})"
    return float(ray_intersect_many(arena, origin, np.array([direction], dtype=np.float64), max_range)[0])
