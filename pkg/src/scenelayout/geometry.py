"""Vector, bounding-box, gap, and facing-angle primitives.

Coordinate frame used throughout: right-handed, +X = right, +Y = backward,
+Z = up, all lengths in meters.  Object positions are box centers (ground
resting means ``position.z == size.z / 2``).  Yaw is a rotation about +Z in
degrees; an object at yaw 0 faces -Y, and positive yaw turns -Y toward -X
(so at yaw 90 the forward direction is -X).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class GeometryError(ValueError):
    pass


class InvalidDimensionError(GeometryError):
    """A box size has a non-positive or non-finite component."""


class UndefinedDirectionError(GeometryError):
    """Facing direction is undefined (coincident xy positions)."""


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z}

    @classmethod
    def from_dict(cls, d: dict) -> "Vec3":
        return cls(float(d["x"]), float(d["y"]), float(d["z"]))


@dataclass(frozen=True)
class Footprint:
    """The xy-plane projection of a box."""

    min_x: float
    max_x: float
    min_y: float
    max_y: float

    def contains(self, other: "Footprint") -> bool:
        """Closed inclusion: ``other`` lies entirely within this footprint."""
        return (
            other.min_x >= self.min_x
            and other.max_x <= self.max_x
            and other.min_y >= self.min_y
            and other.max_y <= self.max_y
        )

    def overlap_area(self, other: "Footprint") -> float:
        dx = min(self.max_x, other.max_x) - max(self.min_x, other.min_x)
        dy = min(self.max_y, other.max_y) - max(self.min_y, other.min_y)
        if dx <= 0.0 or dy <= 0.0:
            return 0.0
        return dx * dy


@dataclass(frozen=True)
class Aabb:
    min: Vec3
    max: Vec3

    def footprint(self) -> Footprint:
        return Footprint(self.min.x, self.max.x, self.min.y, self.max.y)

    @property
    def bottom(self) -> float:
        return self.min.z

    @property
    def top(self) -> float:
        return self.max.z

    def volume(self) -> float:
        return (
            (self.max.x - self.min.x)
            * (self.max.y - self.min.y)
            * (self.max.z - self.min.z)
        )


def _rotated_half_extents(size_x: float, size_y: float, yaw: float) -> tuple[float, float]:
    """Half extents of the axis-aligned box enclosing an (size_x, size_y)
    footprint rotated by ``yaw`` degrees.  Exact at multiples of 90 so that
    square-angle poses keep their true extents."""
    r = yaw % 360.0
    if r % 90.0 == 0.0:
        if r % 180.0 == 0.0:
            return size_x / 2.0, size_y / 2.0
        return size_y / 2.0, size_x / 2.0
    t = math.radians(r)
    c, s = abs(math.cos(t)), abs(math.sin(t))
    return (size_x * c + size_y * s) / 2.0, (size_x * s + size_y * c) / 2.0


def aabb_from_pose(size: Vec3, position: Vec3, yaw: float) -> Aabb:
    """Axis-aligned box for a center-anchored pose.

    For arbitrary yaw the box conservatively encloses the rotated footprint;
    at multiples of 90 degrees the x/y extents swap exactly.
    """
    if not (size.x > 0 and size.y > 0 and size.z > 0) or not size.is_finite():
        raise InvalidDimensionError(f"box size must be positive and finite, got {size}")
    if not math.isfinite(yaw):
        raise InvalidDimensionError(f"yaw must be finite, got {yaw}")
    hx, hy = _rotated_half_extents(size.x, size.y, yaw)
    hz = size.z / 2.0
    return Aabb(
        Vec3(position.x - hx, position.y - hy, position.z - hz),
        Vec3(position.x + hx, position.y + hy, position.z + hz),
    )


def horizontal_gap(a: Aabb, b: Aabb) -> float:
    """Euclidean distance between the closest points of the xy footprints.

    Zero when the footprints overlap or touch.
    """
    dx = max(a.min.x - b.max.x, b.min.x - a.max.x, 0.0)
    dy = max(a.min.y - b.max.y, b.min.y - a.max.y, 0.0)
    return math.hypot(dx, dy)


def boxes_collide(a: Aabb, b: Aabb, penetration_tol: float = 0.001) -> bool:
    """True iff the boxes interpenetrate by more than ``penetration_tol`` on
    all three axes simultaneously.  Face-touching is not a collision."""
    ox = min(a.max.x, b.max.x) - max(a.min.x, b.min.x)
    oy = min(a.max.y, b.max.y) - max(a.min.y, b.min.y)
    oz = min(a.max.z, b.max.z) - max(a.min.z, b.min.z)
    return ox > penetration_tol and oy > penetration_tol and oz > penetration_tol


def forward_direction(yaw: float) -> tuple[float, float]:
    """Unit xy forward vector for a given yaw: (0, -1) at yaw 0."""
    t = math.radians(yaw)
    return (-math.sin(t), -math.cos(t))


def yaw_facing(source_xy: tuple[float, float], target_xy: tuple[float, float]) -> float:
    """Yaw (degrees, in [0, 360)) whose forward direction points from source
    to target."""
    dx = target_xy[0] - source_xy[0]
    dy = target_xy[1] - source_xy[1]
    if math.hypot(dx, dy) <= 0.0:
        raise UndefinedDirectionError("cannot aim at a coincident xy position")
    return math.degrees(math.atan2(-dx, -dy)) % 360.0


def facing_angle(source_pos: Vec3, source_yaw: float, target_pos: Vec3) -> float:
    """Absolute angle in [0, 180] between the source's forward direction and
    the center-to-center direction projected onto the xy plane.

    Computed as a yaw difference rather than through acos so that boundary
    angles (e.g. exactly 10 degrees off) come out exact.
    """
    dx = target_pos.x - source_pos.x
    dy = target_pos.y - source_pos.y
    if math.hypot(dx, dy) <= 0.0:
        raise UndefinedDirectionError("facing angle undefined for coincident xy positions")
    aim = math.degrees(math.atan2(-dx, -dy))
    diff = (source_yaw - aim) % 360.0
    return min(diff, 360.0 - diff)
