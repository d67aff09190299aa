"""Spatial index over obstacle polygons (STR-packed R-tree)."""
from __future__ import annotations

from typing import Sequence

import shapely
from shapely.strtree import STRtree

from .primitives import Circle, ConvexPolygon, Point, Segment, Shape, intersects


def _bounds(shape: Shape) -> tuple[float, float, float, float]:
    if isinstance(shape, Point):
        return (shape.x, shape.y, shape.x, shape.y)
    return shape.bounds


class SpatialIndex:
    """Read-only after build. ``query`` returns bounding-box candidates,
    ``hits`` the exact subset that touches or crosses each polygon."""

    def __init__(self, polygons: Sequence[ConvexPolygon]):
        self.polygons = list(polygons)
        self._tree = STRtree([p.shape for p in self.polygons]) if self.polygons else None

    def __len__(self) -> int:
        return len(self.polygons)

    def query_bounds(self, bounds: tuple[float, float, float, float]) -> list[int]:
        if self._tree is None:
            return []
        return sorted(int(i) for i in self._tree.query(shapely.box(*bounds)))

    def query(self, shape: Shape | tuple[float, float, float, float]) -> list[int]:
        if isinstance(shape, (Point, Segment, Circle)):
            return self.query_bounds(_bounds(shape))
        return self.query_bounds(shape)

    def hits(self, shape: Shape) -> list[int]:
        return [i for i in self.query(shape) if intersects(shape, self.polygons[i])]

    def nearest_distance(self, p: Point, within: float) -> float:
        """Distance from ``p`` to the closest polygon, capped at ``within``."""
        best = within
        for i in self.query(Circle(p, within)):
            best = min(best, float(self.polygons[i].shape.distance(shapely.Point(p.x, p.y))))
        return best
