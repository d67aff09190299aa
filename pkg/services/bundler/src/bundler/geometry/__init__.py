from .biarc import ArcPiece, Biarc, LinePiece, Piece, arc_from_point_tangent, fit_biarc
from .index import SpatialIndex
from .primitives import (
    EPS,
    TANGENT_TOL,
    Circle,
    ConvexPolygon,
    Point,
    Segment,
    Shape,
    angle_between,
    distance_point_to_polygon,
    intersects,
    midpoint,
    segment_enters_interior,
    segments_cross_properly,
    strictly_convex_ring,
)

__all__ = [
    "EPS",
    "TANGENT_TOL",
    "ArcPiece",
    "Biarc",
    "Circle",
    "ConvexPolygon",
    "LinePiece",
    "Piece",
    "Point",
    "Segment",
    "Shape",
    "SpatialIndex",
    "angle_between",
    "arc_from_point_tangent",
    "distance_point_to_polygon",
    "fit_biarc",
    "intersects",
    "midpoint",
    "segment_enters_interior",
    "segments_cross_properly",
    "strictly_convex_ring",
]
