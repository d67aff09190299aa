"""Biarc fitting: endpoints, tangent continuity, degenerate inputs."""
import math

import numpy as np
import pytest
from bundler.errors import BiarcFitError, InvalidGeometryError
from bundler.geometry import ArcPiece, LinePiece, Point, angle_between, arc_from_point_tangent, fit_biarc


def _assert_continuous(biarc, p0, t0, p1, t1):
    assert biarc.start.distance_to(p0) <= 1e-9
    assert biarc.end.distance_to(p1) <= 1e-9
    assert biarc.arc1.end.distance_to(biarc.arc2.start) <= 1e-9
    assert biarc.join_deviation() <= 1e-9
    assert abs(angle_between(biarc.arc1.start_tangent, t0)) <= 1e-9
    assert abs(angle_between(biarc.arc2.end_tangent, t1)) <= 1e-9


class TestArcFromPointTangent:
    def test_quarter_circle(self):
        arc = arc_from_point_tangent(Point(0, 0), Point(1, 0), Point(1, 1))
        assert isinstance(arc, ArcPiece)
        assert arc.radius == pytest.approx(1.0)
        assert arc.center.distance_to(Point(0, 1)) == pytest.approx(0.0, abs=1e-12)
        assert arc.sweep == pytest.approx(math.pi / 2)
        assert arc.point_at(0.5).distance_to(Point(math.sqrt(0.5), 1 - math.sqrt(0.5))) <= 1e-12

    def test_straight_ahead_is_a_line(self):
        piece = arc_from_point_tangent(Point(0, 0), Point(1, 0), Point(3, 0))
        assert isinstance(piece, LinePiece)
        assert piece.length == pytest.approx(3.0)

    def test_target_behind(self):
        with pytest.raises(BiarcFitError, match="behind"):
            arc_from_point_tangent(Point(0, 0), Point(1, 0), Point(-3, 0))


class TestFitBiarc:
    def test_quarter_turn_stays_on_one_circle(self):
        p0, t0, p1, t1 = Point(0, 0), Point(1, 0), Point(2, 2), Point(0, 1)
        b = fit_biarc(p0, t0, p1, t1)
        _assert_continuous(b, p0, t0, p1, t1)
        assert b.arc1.radius == pytest.approx(2.0)
        assert b.arc2.radius == pytest.approx(2.0)
        assert b.length == pytest.approx(math.pi)

    def test_s_curve_joins_at_midpoint(self):
        p0, t0, p1, t1 = Point(0, 0), Point(1, 0), Point(4, 1), Point(1, 0)
        b = fit_biarc(p0, t0, p1, t1)
        _assert_continuous(b, p0, t0, p1, t1)
        assert b.join.distance_to(Point(2, 0.5)) <= 1e-12
        assert b.arc1.sweep > 0 > b.arc2.sweep

    def test_collinear_tangents_give_straight_pieces(self):
        b = fit_biarc(Point(0, 0), Point(1, 0), Point(5, 0), Point(1, 0))
        assert all(isinstance(p, LinePiece) for p in b.pieces)
        assert b.length == pytest.approx(5.0)

    def test_random_configurations_are_tangent_continuous(self):
        rng = np.random.default_rng(7)
        fitted = 0
        for _ in range(200):
            p0 = Point(*rng.uniform(-5, 5, size=2))
            p1 = Point(*rng.uniform(-5, 5, size=2))
            a0, a1 = rng.uniform(-math.pi, math.pi, size=2)
            t0, t1 = Point(math.cos(a0), math.sin(a0)), Point(math.cos(a1), math.sin(a1))
            try:
                b = fit_biarc(p0, t0, p1, t1)
            except BiarcFitError:
                continue
            _assert_continuous(b, p0, t0, p1, t1)
            samples = b.sample(32)
            assert samples[0] == b.start and samples[-1] == b.end
            fitted += 1
        assert fitted > 150

    def test_antiparallel_without_offset_fails(self):
        with pytest.raises(BiarcFitError):
            fit_biarc(Point(0, 0), Point(1, 0), Point(2, 0), Point(-1, 0))

    def test_requires_unit_tangents(self):
        with pytest.raises(InvalidGeometryError, match="unit vector"):
            fit_biarc(Point(0, 0), Point(2, 0), Point(1, 1), Point(0, 1))

    def test_coincident_endpoints(self):
        with pytest.raises(InvalidGeometryError, match="coincide"):
            fit_biarc(Point(1, 1), Point(1, 0), Point(1, 1), Point(0, 1))
