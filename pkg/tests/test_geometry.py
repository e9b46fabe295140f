import math

import pytest
from hypothesis import given, strategies as st

from scenelayout.geometry import (
    InvalidDimensionError,
    UndefinedDirectionError,
    Vec3,
    aabb_from_pose,
    boxes_collide,
    facing_angle,
    forward_direction,
    horizontal_gap,
    yaw_facing,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
sizes = st.floats(min_value=0.05, max_value=8, allow_nan=False)
yaws = st.floats(min_value=-720, max_value=720, allow_nan=False)


def rotated_corner_bounds(size_x, size_y, cx, cy, yaw_deg):
    """Independent oracle: rotate the four footprint corners explicitly and
    take their axis-aligned bounds."""
    t = math.radians(yaw_deg)
    corners = []
    for sx in (-size_x / 2, size_x / 2):
        for sy in (-size_y / 2, size_y / 2):
            rx = sx * math.cos(t) - sy * math.sin(t)
            ry = sx * math.sin(t) + sy * math.cos(t)
            corners.append((cx + rx, cy + ry))
    xs = [c[0] for c in corners]
    ys = [c[1] for c in corners]
    return min(xs), max(xs), min(ys), max(ys)


def unit_box(cx, cy, cz=0.5):
    return aabb_from_pose(Vec3(1, 1, 1), Vec3(cx, cy, cz), 0)


class TestAabbFromPose:
    def test_identity_case(self):
        box = aabb_from_pose(Vec3(2, 1, 1), Vec3(0, 0, 0.5), 0)
        assert box.min == Vec3(-1, -0.5, 0)
        assert box.max == Vec3(1, 0.5, 1)

    def test_90_degree_extent_swap(self):
        box = aabb_from_pose(Vec3(2, 1, 1), Vec3(0, 0, 0.5), 90)
        assert box.min == Vec3(-0.5, -1, 0)
        assert box.max == Vec3(0.5, 1, 1)

    def test_45_degree_enclosing_box(self):
        # Oracle: rotated-corner bounds of a unit footprint at 45 degrees give
        # half-extents sqrt(2)/2 in x and y.
        min_x, max_x, min_y, max_y = rotated_corner_bounds(1, 1, 0, 0, 45)
        assert max_x == pytest.approx(math.sqrt(2) / 2)
        box = aabb_from_pose(Vec3(1, 1, 1), Vec3(0, 0, 0.5), 45)
        assert box.min.x == pytest.approx(min_x)
        assert box.max.x == pytest.approx(max_x)
        assert box.min.y == pytest.approx(min_y)
        assert box.max.y == pytest.approx(max_y)

    @given(yaw=yaws, sx=sizes, sy=sizes)
    def test_matches_corner_oracle_for_any_yaw(self, yaw, sx, sy):
        box = aabb_from_pose(Vec3(sx, sy, 1), Vec3(0, 0, 0.5), yaw)
        min_x, max_x, min_y, max_y = rotated_corner_bounds(sx, sy, 0, 0, yaw)
        assert box.min.x == pytest.approx(min_x, abs=1e-9)
        assert box.max.x == pytest.approx(max_x, abs=1e-9)
        assert box.min.y == pytest.approx(min_y, abs=1e-9)
        assert box.max.y == pytest.approx(max_y, abs=1e-9)

    def test_rejects_non_positive_size(self):
        with pytest.raises(InvalidDimensionError):
            aabb_from_pose(Vec3(0, 1, 1), Vec3(0, 0, 0), 0)
        with pytest.raises(InvalidDimensionError):
            aabb_from_pose(Vec3(1, -2, 1), Vec3(0, 0, 0), 0)

    @given(yaw=yaws, sx=sizes, sy=sizes, sz=sizes, cx=finite, cy=finite)
    def test_full_turn_identity(self, yaw, sx, sy, sz, cx, cy):
        a = aabb_from_pose(Vec3(sx, sy, sz), Vec3(cx, cy, sz / 2), yaw)
        b = aabb_from_pose(Vec3(sx, sy, sz), Vec3(cx, cy, sz / 2), yaw + 360)
        assert a.min.x == pytest.approx(b.min.x, abs=1e-9)
        assert a.max.y == pytest.approx(b.max.y, abs=1e-9)

    @given(quarter=st.integers(min_value=0, max_value=3), sx=sizes, sy=sizes, sz=sizes)
    def test_volume_exact_at_square_angles(self, quarter, sx, sy, sz):
        box = aabb_from_pose(Vec3(sx, sy, sz), Vec3(0, 0, sz / 2), 90.0 * quarter)
        assert box.volume() == sx * sy * sz


class TestHorizontalGap:
    def test_axis_separated_unit_boxes(self):
        assert horizontal_gap(unit_box(0, 0), unit_box(2.5, 0)) == pytest.approx(1.5)

    def test_overlapping_boxes(self):
        assert horizontal_gap(unit_box(0, 0), unit_box(0.5, 0.5)) == 0.0

    def test_diagonal_offset_closest_corners(self):
        # Oracle: for unit boxes centered (0,0) and (2,2), the closest points
        # are the corners (0.5, 0.5) and (1.5, 1.5), sqrt(2) apart.
        corner_dist = math.hypot(1.5 - 0.5, 1.5 - 0.5)
        assert horizontal_gap(unit_box(0, 0), unit_box(2, 2)) == pytest.approx(corner_dist)

    @given(ax=finite, ay=finite, bx=finite, by=finite)
    def test_symmetry_and_self_gap(self, ax, ay, bx, by):
        a, b = unit_box(ax, ay), unit_box(bx, by)
        assert horizontal_gap(a, b) == horizontal_gap(b, a)
        assert horizontal_gap(a, a) == 0.0


class TestBoxesCollide:
    def test_face_touching_is_not_collision(self):
        assert not boxes_collide(unit_box(0, 0), unit_box(1, 0), 0.001)

    def test_half_overlap_collides(self):
        assert boxes_collide(unit_box(0, 0), unit_box(0.5, 0.5, 1.0), 0.001)

    def test_sub_tolerance_overlap_ignored(self):
        assert not boxes_collide(unit_box(0, 0), unit_box(0.9995, 0, 0.5), 0.001)

    @given(ax=finite, ay=finite, bx=finite, by=finite)
    def test_symmetric_and_reflexive(self, ax, ay, bx, by):
        a, b = unit_box(ax, ay), unit_box(bx, by)
        assert boxes_collide(a, b, 0.001) == boxes_collide(b, a, 0.001)
        assert boxes_collide(a, a, 0.001)


class TestFacingAngle:
    def test_forward_is_negative_y(self):
        assert facing_angle(Vec3(0, 0, 0), 0, Vec3(0, -3, 0)) == pytest.approx(0.0)

    def test_perpendicular(self):
        assert facing_angle(Vec3(0, 0, 0), 0, Vec3(3, 0, 0)) == pytest.approx(90.0)

    def test_yaw_90_faces_negative_x(self):
        # Hand trigonometry oracle: forward(yaw) = (-sin yaw, -cos yaw), so at
        # yaw 90 forward is (-1, 0), aligned with a target at (-2, 0).
        fx, fy = forward_direction(90)
        assert (fx, fy) == (pytest.approx(-1.0), pytest.approx(0.0, abs=1e-12))
        assert facing_angle(Vec3(0, 0, 0), 90, Vec3(-2, 0, 0)) == pytest.approx(0.0)

    def test_coincident_positions_rejected(self):
        with pytest.raises(UndefinedDirectionError):
            facing_angle(Vec3(1, 2, 0), 0, Vec3(1, 2, 5))

    @given(yaw=yaws, tx=finite, ty=finite)
    def test_full_turn_identity(self, yaw, tx, ty):
        if math.hypot(tx, ty) < 1e-6:
            return
        a = facing_angle(Vec3(0, 0, 0), yaw, Vec3(tx, ty, 0))
        b = facing_angle(Vec3(0, 0, 0), yaw + 360, Vec3(tx, ty, 0))
        assert a == pytest.approx(b, abs=1e-9)

    @given(yaw=yaws, tx=finite, ty=finite)
    def test_aiming_yields_zero_angle(self, yaw, tx, ty):
        if math.hypot(tx, ty) < 1e-6:
            return
        aim = yaw_facing((0, 0), (tx, ty))
        assert facing_angle(Vec3(0, 0, 0), aim, Vec3(tx, ty, 0)) == pytest.approx(0.0, abs=1e-5)
