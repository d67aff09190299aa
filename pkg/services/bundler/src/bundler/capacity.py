"""Capacity – constrained Delaunay triangulation over the shrunk obstacles,
capacity segments between different obstacles, and the overflow ledger.

A capacity segment ``ab`` joins obstacles A and B and has capacity
``(|a,B| + |b,A|) / 2``. Its routing width is the total width of the assigned
paths plus one separation between each adjacent pair; the overflow penalty is
the part of that width exceeding the capacity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import triangle as tr
from shapely.geometry import LineString
from shapely.strtree import STRtree

from .errors import LedgerError
from .geometry import EPS, Point, distance_point_to_polygon, segments_cross_properly
from .log import log_event
from .routing_graph import Obstacle


@dataclass(frozen=True)
class Triangulation:
    vertices: tuple[Point, ...]
    owners: tuple[Optional[int], ...]
    triangles: tuple[tuple[int, int, int], ...]
    constrained: frozenset[tuple[int, int]]

    def edges(self) -> list[tuple[int, int]]:
        found: set[tuple[int, int]] = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                found.add((u, v) if u < v else (v, u))
        return sorted(found)


def constrained_delaunay(
    points: Sequence[Point],
    segments: Sequence[tuple[int, int]] = (),
    owners: Optional[Sequence[Optional[int]]] = None,
) -> Triangulation:
    """CDT of ``points`` keeping ``segments`` as edges; the convex hull is kept whole.

    Exact duplicate points are merged (segments remapped) with a warning event.
    Fewer than three distinct points, or all of them collinear, give an empty
    triangulation.
    """
    owners = list(owners) if owners is not None else [None] * len(points)
    first_at: dict[tuple[float, float], int] = {}
    remap: list[int] = []
    verts: list[Point] = []
    vert_owners: list[Optional[int]] = []
    for p, o in zip(points, owners):
        key = p.as_tuple()
        if key not in first_at:
            first_at[key] = len(verts)
            verts.append(p)
            vert_owners.append(o)
        remap.append(first_at[key])
    if len(verts) < len(points):
        log_event("cdt_duplicate_vertices", stage="routing", duplicates=len(points) - len(verts))

    segs = sorted({(min(remap[a], remap[b]), max(remap[a], remap[b])) for a, b in segments if remap[a] != remap[b]})
    empty = Triangulation(tuple(verts), tuple(vert_owners), (), frozenset(segs))
    if len(verts) < 3:
        return empty
    xy = np.array([p.as_tuple() for p in verts], dtype=float)
    centered = xy - xy.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=EPS * max(1.0, float(np.abs(centered).max()))) < 2:
        return empty

    data: dict[str, np.ndarray] = {"vertices": xy}
    if segs:
        data["segments"] = np.array(segs, dtype=np.int32)
    out = tr.triangulate(data, "pcQ" if segs else "Q")
    if len(out["vertices"]) != len(verts):
        # Steiner points carry no obstacle
        verts = [Point(float(x), float(y)) for x, y in out["vertices"]]
        vert_owners = vert_owners + [None] * (len(verts) - len(vert_owners))
    triangles = tuple(tuple(int(i) for i in t) for t in out.get("triangles", []))
    return Triangulation(tuple(verts), tuple(vert_owners), triangles, frozenset(segs))


def build_cdt(obstacles: Sequence[Obstacle]) -> Triangulation:
    """CDT over every shrunk obstacle ring, with the ring sides as constraints."""
    points: list[Point] = []
    owners: list[int] = []
    segments: list[tuple[int, int]] = []
    for ob in obstacles:
        first = len(points)
        ring = ob.shrunk_ring
        points.extend(ring)
        owners.extend([ob.index] * len(ring))
        segments.extend((first + k, first + (k + 1) % len(ring)) for k in range(len(ring)))
    return constrained_delaunay(points, segments, owners)


@dataclass(frozen=True)
class CapacitySegment:
    index: int
    a: Point
    b: Point
    obstacle_a: int
    obstacle_b: int
    capacity: float


def extract_capacity_segments(cdt: Triangulation, obstacles: Sequence[Obstacle]) -> list[CapacitySegment]:
    hulls = {ob.index: ob.shrunk_hull for ob in obstacles}
    segments: list[CapacitySegment] = []
    for u, v in cdt.edges():
        oa, ob = cdt.owners[u], cdt.owners[v]
        if oa is None or ob is None or oa == ob:
            continue
        a, b = cdt.vertices[u], cdt.vertices[v]
        cap = (distance_point_to_polygon(a, hulls[ob]) + distance_point_to_polygon(b, hulls[oa])) / 2
        segments.append(CapacitySegment(len(segments), a, b, oa, ob, cap))
    return segments


class CapacityLedger:
    """Per-segment path assignment with incrementally maintained total overflow.

    Single writer: the router assigns each path once and the optimizer never
    touches the ledger.
    """

    def __init__(self, segments: Sequence[CapacitySegment], separation: float):
        self.segments = list(segments)
        self.separation = separation
        self._assigned: list[dict[int, float]] = [{} for _ in self.segments]
        self._penalty: list[float] = [0.0] * len(self.segments)
        self._paths: dict[int, tuple[int, ...]] = {}
        self._total = 0.0
        self._tree = (
            STRtree([LineString([s.a.as_tuple(), s.b.as_tuple()]) for s in self.segments]) if self.segments else None
        )
        self._crossed_cache: dict[tuple[tuple[float, float], tuple[float, float]], tuple[int, ...]] = {}

    # ── geometry ──

    def crossed_by_edge(self, p: Point, q: Point) -> tuple[int, ...]:
        """Capacity segments the open segment pq crosses properly."""
        key = (p.as_tuple(), q.as_tuple()) if p.as_tuple() <= q.as_tuple() else (q.as_tuple(), p.as_tuple())
        hit = self._crossed_cache.get(key)
        if hit is None:
            hit = ()
            if self._tree is not None:
                line = LineString([p.as_tuple(), q.as_tuple()])
                hit = tuple(
                    sorted(
                        int(i)
                        for i in self._tree.query(line)
                        if segments_cross_properly(p, q, self.segments[int(i)].a, self.segments[int(i)].b)
                    )
                )
            self._crossed_cache[key] = hit
        return hit

    def crossed_by_polyline(self, points: Sequence[Point]) -> tuple[int, ...]:
        ids: set[int] = set()
        for p, q in zip(points, points[1:]):
            ids.update(self.crossed_by_edge(p, q))
        return tuple(sorted(ids))

    # ── widths and penalties ──

    def routing_width(self, sid: int) -> float:
        widths = self._assigned[sid]
        if not widths:
            return 0.0
        return math.fsum(widths.values()) + (len(widths) - 1) * self.separation

    def penalty(self, sid: int) -> float:
        return max(self.routing_width(sid) - self.segments[sid].capacity, 0.0)

    def assigned(self, sid: int) -> list[int]:
        return sorted(self._assigned[sid])

    def paths_of(self, path_id: int) -> tuple[int, ...]:
        return self._paths.get(path_id, ())

    @property
    def total(self) -> float:
        return self._total

    def recompute_total(self) -> float:
        return math.fsum(self.penalty(i) for i in range(len(self.segments)))

    def delta_for_segments(self, sids: Sequence[int], width: float) -> float:
        """Increase of the total overflow if one more path of ``width`` crossed ``sids``."""
        delta = 0.0
        for sid in sids:
            widths = self._assigned[sid]
            w = self.routing_width(sid) + width + (self.separation if widths else 0.0)
            delta += max(w - self.segments[sid].capacity, 0.0) - self._penalty[sid]
        return delta

    def delta_for_edge(self, p: Point, q: Point, width: float) -> float:
        return self.delta_for_segments(self.crossed_by_edge(p, q), width)

    # ── mutation ──

    def assign_path(self, path_id: int, points: Sequence[Point], width: float) -> tuple[int, ...]:
        if path_id in self._paths:
            raise LedgerError(f"path {path_id} is already assigned")
        sids = self.crossed_by_polyline(points)
        for sid in sids:
            self._assigned[sid][path_id] = width
            self._penalty[sid] = self.penalty(sid)
        self._total = math.fsum(self._penalty)
        self._paths[path_id] = sids
        return sids

    def remove_path(self, path_id: int) -> None:
        sids = self._paths.pop(path_id, None)
        if sids is None:
            raise LedgerError(f"path {path_id} is not assigned")
        for sid in sids:
            del self._assigned[sid][path_id]
            self._penalty[sid] = self.penalty(sid)
        self._total = math.fsum(self._penalty)

    def format_table(self) -> str:
        lines = [f"{'segment':>7}  {'obstacles':>11}  {'capacity':>10}  {'width':>10}  {'penalty':>10}  paths"]
        for s in self.segments:
            lines.append(
                f"{s.index:>7}  {f'{s.obstacle_a}-{s.obstacle_b}':>11}  {s.capacity:>10.4f}  "
                f"{self.routing_width(s.index):>10.4f}  {self.penalty(s.index):>10.4f}  "
                f"{','.join(str(p) for p in self.assigned(s.index))}"
            )
        lines.append(f"total overflow: {self._total:.6f}")
        return "\n".join(lines)


def build_capacity_ledger(obstacles: Sequence[Obstacle], separation: float) -> CapacityLedger:
    cdt = build_cdt(obstacles)
    return CapacityLedger(extract_capacity_segments(cdt, obstacles), separation)
