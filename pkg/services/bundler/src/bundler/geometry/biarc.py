"""Tangent-continuous two-piece curves for hub segments.

The join point is chosen with equal control-leg lengths: with
``q0 = p0 + d*t0`` and ``q1 = p1 - d*t1`` the leg length ``d`` solves
``|q1 - q0| = 2d`` and the join is the midpoint of ``q0 q1``. Pieces whose
turning angle vanishes are kept as explicit straight pieces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

from ..errors import BiarcFitError, InvalidGeometryError
from .primitives import EPS, TANGENT_TOL, Point, angle_between

STRAIGHT_SWEEP = 1e-10


@dataclass(frozen=True)
class LinePiece:
    start: Point
    end: Point

    is_straight: ClassVar[bool] = True

    @property
    def length(self) -> float:
        return self.start.distance_to(self.end)

    @property
    def start_tangent(self) -> Point:
        return (self.end - self.start).unit()

    @property
    def end_tangent(self) -> Point:
        return self.start_tangent

    @property
    def curvature(self) -> float:
        return 0.0

    def point_at(self, s: float) -> Point:
        if s <= 0:
            return self.start
        if s >= 1:
            return self.end
        return self.start + (self.end - self.start) * s

    def tangent_at(self, s: float) -> Point:
        return self.start_tangent


@dataclass(frozen=True)
class ArcPiece:
    center: Point
    radius: float
    start_angle: float
    sweep: float  # signed; positive turns counterclockwise
    start: Point
    end: Point
    start_tangent: Point

    is_straight: ClassVar[bool] = False

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    @property
    def end_tangent(self) -> Point:
        return self.start_tangent.rotated(self.sweep)

    @property
    def curvature(self) -> float:
        return math.copysign(1.0 / self.radius, self.sweep)

    def point_at(self, s: float) -> Point:
        if s <= 0:
            return self.start
        if s >= 1:
            return self.end
        a = self.start_angle + s * self.sweep
        return Point(self.center.x + self.radius * math.cos(a), self.center.y + self.radius * math.sin(a))

    def tangent_at(self, s: float) -> Point:
        return self.start_tangent.rotated(s * self.sweep)


Piece = Union[LinePiece, ArcPiece]


@dataclass(frozen=True)
class Biarc:
    arc1: Piece
    arc2: Piece
    join: Point

    @property
    def start(self) -> Point:
        return self.arc1.start

    @property
    def end(self) -> Point:
        return self.arc2.end

    @property
    def pieces(self) -> tuple[Piece, Piece]:
        return (self.arc1, self.arc2)

    @property
    def length(self) -> float:
        return self.arc1.length + self.arc2.length

    def join_deviation(self) -> float:
        """Angle between the tangents of the two pieces at the join."""
        return abs(angle_between(self.arc1.end_tangent, self.arc2.start_tangent))

    def sample(self, n: int = 64) -> list[Point]:
        half = max(n // 2, 1)
        pts = [self.arc1.point_at(i / half) for i in range(half)]
        pts += [self.arc2.point_at(i / half) for i in range(half + 1)]
        return pts


def arc_from_point_tangent(p: Point, t: Point, q: Point) -> Piece:
    """Circular arc leaving ``p`` along unit tangent ``t`` and ending at ``q``."""
    d = q - p
    chord = d.norm()
    if chord <= EPS:
        raise BiarcFitError("arc endpoints coincide")
    sweep = 2.0 * angle_between(t, d)
    if abs(sweep) <= STRAIGHT_SWEEP:
        if t.dot(d) <= 0:
            raise BiarcFitError("target lies behind the start tangent")
        return LinePiece(p, q)
    signed_r = chord * chord / (2.0 * t.cross(d))
    center = p + t.left_normal() * signed_r
    return ArcPiece(
        center=center,
        radius=abs(signed_r),
        start_angle=math.atan2(p.y - center.y, p.x - center.x),
        sweep=sweep,
        start=p,
        end=q,
        start_tangent=t,
    )


def _checked_unit(t: Point, name: str) -> Point:
    if abs(t.norm() - 1.0) > TANGENT_TOL:
        raise InvalidGeometryError(f"{name} must be a unit vector, got length {t.norm()}")
    return t.unit()


def fit_biarc(p0: Point, t0: Point, p1: Point, t1: Point) -> Biarc:
    """Biarc from ``p0`` (tangent ``t0``) to ``p1`` (tangent ``t1``).

    Raises ``BiarcFitError`` when no two-piece fit exists, e.g. antiparallel
    tangents with zero lateral offset.
    """
    t0 = _checked_unit(t0, "t0")
    t1 = _checked_unit(t1, "t1")
    if p0.distance_to(p1) <= EPS:
        raise InvalidGeometryError("biarc endpoints coincide")

    v = p1 - p0
    t = t0 + t1
    vt = v.dot(t)
    vv = v.dot(v)
    a = 2.0 * (1.0 - t0.dot(t1))
    denom = vt + math.sqrt(max(vt * vt + a * vv, 0.0))
    if denom <= EPS:
        raise BiarcFitError("parallel tangents without forward offset")
    d = vv / denom

    q0 = p0 + t0 * d
    q1 = p1 - t1 * d
    join = Point((q0.x + q1.x) / 2, (q0.y + q1.y) / 2)
    scale = max(1.0, math.sqrt(vv))
    if join.distance_to(p0) <= TANGENT_TOL * scale or join.distance_to(p1) <= TANGENT_TOL * scale:
        raise BiarcFitError("join point collapses onto an endpoint")

    tm = (q1 - q0).unit()
    arc1 = arc_from_point_tangent(p0, t0, join)
    arc2 = arc_from_point_tangent(join, tm, p1)
    biarc = Biarc(arc1=arc1, arc2=arc2, join=join)
    if abs(angle_between(biarc.arc2.end_tangent, t1)) > TANGENT_TOL:
        raise BiarcFitError("fitted end tangent deviates from the requested one")
    return biarc
