"""Unit tests for planar primitives, predicates and the obstacle index."""
import math

import pytest
from bundler.errors import InvalidGeometryError
from bundler.geometry import (
    Circle,
    ConvexPolygon,
    Point,
    Segment,
    SpatialIndex,
    angle_between,
    distance_point_to_polygon,
    intersects,
    segment_enters_interior,
    segments_cross_properly,
)


def _square(x0: float, y0: float, side: float = 2.0) -> ConvexPolygon:
    return ConvexPolygon(
        (Point(x0, y0), Point(x0 + side, y0), Point(x0 + side, y0 + side), Point(x0, y0 + side))
    )


class TestPoint:
    def test_arithmetic(self):
        p = Point(1, 2) + Point(3, -1) * 2
        assert p == Point(7, 0)
        assert (Point(3, 4) - Point(0, 0)).norm() == 5

    def test_left_normal_is_counterclockwise(self):
        n = Point(1, 0).left_normal()
        assert n == Point(0, 1)
        assert Point(1, 0).cross(n) > 0

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidGeometryError, match="non-finite"):
            Point(math.inf, 0)

    def test_unit_of_zero_vector(self):
        with pytest.raises(InvalidGeometryError):
            Point(0, 0).unit()

    def test_angle_between_signed(self):
        assert angle_between(Point(1, 0), Point(0, 1)) == pytest.approx(math.pi / 2)
        assert angle_between(Point(0, 1), Point(1, 0)) == pytest.approx(-math.pi / 2)


class TestConvexPolygon:
    def test_from_points_drops_collinear_and_interior(self):
        poly = ConvexPolygon.from_points(
            [Point(0, 0), Point(1, 0), Point(2, 0), Point(2, 2), Point(0, 2), Point(1, 1)]
        )
        assert len(poly.vertices) == 4
        assert poly.area == pytest.approx(4.0)

    def test_rejects_clockwise(self):
        with pytest.raises(InvalidGeometryError, match="counterclockwise"):
            ConvexPolygon((Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)))

    def test_rejects_degenerate(self):
        with pytest.raises(InvalidGeometryError):
            ConvexPolygon.from_points([Point(0, 0), Point(1, 1), Point(2, 2)])

    def test_scaled_about_center(self):
        poly = _square(-1, -1).scaled(Point(0, 0), 0.5)
        assert poly.area == pytest.approx(1.0)


class TestDistances:
    def test_outside(self):
        assert distance_point_to_polygon(Point(3, 1), _square(0, 0)) == pytest.approx(1.0)

    def test_corner(self):
        assert distance_point_to_polygon(Point(5, 6), _square(0, 0)) == pytest.approx(5.0)

    def test_inside_and_on_boundary_are_zero(self):
        sq = _square(0, 0)
        assert distance_point_to_polygon(Point(1, 1), sq) == 0.0
        assert distance_point_to_polygon(Point(2, 1), sq) == 0.0
        assert sq.contains(Point(1, 1))


class TestPredicates:
    def test_intersects_shapes(self):
        sq = _square(0, 0)
        assert intersects(Point(2, 2), sq)
        assert not intersects(Point(2.5, 2.5), sq)
        assert intersects(Circle(Point(3, 1), 1.0), sq)
        assert not intersects(Circle(Point(3, 1), 0.9), sq)
        assert intersects(Segment(Point(-1, 1), Point(3, 1)), sq)

    def test_boundary_contact_does_not_enter_interior(self):
        region = _square(0, 0).shape
        assert not segment_enters_interior(Point(0, 0), Point(2, 0), region)
        assert not segment_enters_interior(Point(2, -1), Point(2, 3), region)
        assert segment_enters_interior(Point(-1, 1), Point(3, 1), region)

    def test_proper_crossing(self):
        assert segments_cross_properly(Point(0, 0), Point(2, 2), Point(0, 2), Point(2, 0))
        # T-junction: touching is not a proper crossing
        assert not segments_cross_properly(Point(0, 0), Point(2, 0), Point(1, 0), Point(1, 2))
        assert not segments_cross_properly(Point(0, 0), Point(1, 0), Point(0, 1), Point(1, 1))

    def test_circle_rejects_negative_radius(self):
        with pytest.raises(InvalidGeometryError):
            Circle(Point(0, 0), -1.0)


class TestSpatialIndex:
    def _index(self) -> SpatialIndex:
        return SpatialIndex([_square(0, 0), _square(10, 0), _square(0, 10)])

    def test_bounding_box_candidates(self):
        idx = self._index()
        assert len(idx) == 3
        assert idx.query(Segment(Point(1, 1), Point(11, 1))) == [0, 1]
        assert idx.query((20.0, 20.0, 30.0, 30.0)) == []

    def test_hits_are_exact(self):
        idx = self._index()
        assert idx.hits(Segment(Point(1, 1), Point(11, 1))) == [0, 1]
        corner_miss = Segment(Point(1.5, 3), Point(3, 1.5))
        assert idx.query(corner_miss) == [0]
        assert idx.hits(corner_miss) == []
        assert idx.hits(Point(11, 1)) == [1]

    def test_nearest_distance_capped(self):
        idx = self._index()
        assert idx.nearest_distance(Point(5, 1), 10.0) == pytest.approx(3.0)
        assert idx.nearest_distance(Point(5, 1), 2.0) == pytest.approx(2.0)

    def test_empty_index(self):
        idx = SpatialIndex([])
        assert idx.query(Point(0, 0)) == []
        assert idx.nearest_distance(Point(0, 0), 4.0) == 4.0
