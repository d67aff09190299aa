"""Planar primitives and predicates shared by every stage.

Predicates use an absolute tolerance of ``EPS`` drawing units; fitted-curve
checks (tangency, continuity, containment) use ``TANGENT_TOL``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import shapely
from shapely.geometry import LineString, MultiPoint
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon
from shapely.geometry.polygon import orient

from ..errors import InvalidGeometryError

EPS = 1e-12
TANGENT_TOL = 1e-9


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidGeometryError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def dot(self, other: "Point") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Point":
        n = self.norm()
        if n <= EPS:
            raise InvalidGeometryError("cannot normalize a zero-length vector")
        return Point(self.x / n, self.y / n)

    def left_normal(self) -> "Point":
        return Point(-self.y, self.x)

    def rotated(self, angle: float) -> "Point":
        c, s = math.cos(angle), math.sin(angle)
        return Point(c * self.x - s * self.y, s * self.x + c * self.y)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def midpoint(a: Point, b: Point) -> Point:
    return Point((a.x + b.x) / 2, (a.y + b.y) / 2)


def angle_between(u: Point, v: Point) -> float:
    """Signed angle turning direction ``u`` into direction ``v``, in (-pi, pi]."""
    return math.atan2(u.cross(v), u.dot(v))


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (min(self.a.x, self.b.x), min(self.a.y, self.b.y), max(self.a.x, self.b.x), max(self.a.y, self.b.y))

    @cached_property
    def shape(self) -> LineString:
        return LineString([self.a.as_tuple(), self.b.as_tuple()])


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.radius) or self.radius < 0:
            raise InvalidGeometryError(f"invalid circle radius {self.radius}")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        c, r = self.center, self.radius
        return (c.x - r, c.y - r, c.x + r, c.y + r)

    def contains(self, p: Point, tol: float = TANGENT_TOL) -> bool:
        return self.center.distance_to(p) <= self.radius + tol


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices counterclockwise."""

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        n = len(self.vertices)
        if n < 3:
            raise InvalidGeometryError(f"polygon needs at least 3 vertices, got {n}")
        if len(set(self.vertices)) != n:
            raise InvalidGeometryError("polygon has repeated vertices")
        for i in range(n):
            a, b, c = self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]
            if (b - a).cross(c - b) <= 0:
                raise InvalidGeometryError("polygon is not strictly convex and counterclockwise")

    @classmethod
    def from_points(cls, points: Iterable[Point]) -> "ConvexPolygon":
        """Convex hull of ``points`` with collinear vertices dropped."""
        hull = MultiPoint([p.as_tuple() for p in points]).convex_hull
        if not isinstance(hull, Polygon) or hull.area <= EPS:
            raise InvalidGeometryError("points do not span a polygon")
        ring = list(orient(hull, 1.0).exterior.coords)[:-1]
        return cls(tuple(strictly_convex_ring([Point(x, y) for x, y in ring])))

    @cached_property
    def shape(self) -> Polygon:
        return Polygon([v.as_tuple() for v in self.vertices])

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return self.shape.bounds

    @property
    def area(self) -> float:
        return self.shape.area

    def edges(self) -> list[Segment]:
        n = len(self.vertices)
        return [Segment(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, p: Point) -> bool:
        return distance_point_to_polygon(p, self) == 0.0

    def scaled(self, center: Point, factor: float) -> "ConvexPolygon":
        return ConvexPolygon(tuple(center + (v - center) * factor for v in self.vertices))


def strictly_convex_ring(ring: Sequence[Point]) -> list[Point]:
    """Drop vertices whose turn is not strictly positive (collinear or reflex)."""
    pts = list(ring)
    changed = True
    while changed and len(pts) > 3:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if (b - a).cross(c - b) <= EPS * max(1.0, (b - a).norm() * (c - b).norm()):
                del pts[i]
                changed = True
                break
    return pts


Shape = Union[Segment, Circle, Point]


def distance_point_to_polygon(p: Point, poly: ConvexPolygon) -> float:
    """Euclidean distance from ``p`` to the closed region of ``poly`` (0 inside)."""
    if poly.area <= EPS:
        raise InvalidGeometryError("degenerate polygon")
    return float(poly.shape.distance(ShapelyPoint(p.x, p.y)))


def intersects(shape: Shape, poly: ConvexPolygon) -> bool:
    """True iff ``shape`` touches or crosses the closed region of ``poly``."""
    if isinstance(shape, Point):
        return distance_point_to_polygon(shape, poly) <= EPS
    if isinstance(shape, Circle):
        return distance_point_to_polygon(shape.center, poly) <= shape.radius + EPS
    return float(poly.shape.distance(shape.shape)) <= EPS


def segment_enters_interior(a: Point, b: Point, region: Polygon) -> bool:
    """True iff the open segment ab meets the interior of ``region``; boundary contact is allowed."""
    line = LineString([a.as_tuple(), b.as_tuple()])
    return bool(shapely.relate_pattern(line, region, "T********"))


def segments_cross_properly(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Proper crossing of segments ab and cd; touching within ``EPS`` does not count."""
    o1 = (b - a).cross(c - a)
    o2 = (b - a).cross(d - a)
    o3 = (d - c).cross(a - c)
    o4 = (d - c).cross(b - c)
    if min(abs(o1), abs(o2), abs(o3), abs(o4)) <= EPS:
        return False
    return (o1 > 0) != (o2 > 0) and (o3 > 0) != (o4 > 0)
