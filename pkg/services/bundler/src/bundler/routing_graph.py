"""Routing graph – obstacles, sparse visibility graph, obstacle shrinking.

Node ids: the center of obstacle ``i`` (input node ``i``) has id ``i``; the
hull boundary vertices follow, obstacle by obstacle, counterclockwise around
each hull. Ids are never reused after the optimizer removes nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Literal, Optional, Sequence

import networkx as nx
import numpy as np
import shapely
from shapely.geometry import LineString, Polygon
from shapely.strtree import STRtree

from contracts.graph_input_v1 import EllipseBoundary, NodeSpec, RectangleBoundary

from .errors import InputError, InvalidGeometryError, ObstacleShrinkError
from .geometry import (
    EPS,
    ConvexPolygon,
    Point,
    Segment,
    SpatialIndex,
    angle_between,
    intersects,
    segment_enters_interior,
    strictly_convex_ring,
)
from .log import log_event

NodeKind = Literal["center", "intermediate"]
EdgeKind = Literal["visibility", "spoke"]

BOUNDARY_CLEARANCE = 1e-6
SEARCH_ITERATIONS = 20
MITRE_LIMIT = 10.0


# ── Obstacles ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Obstacle:
    index: int
    node_id: str
    center: Point
    boundary: tuple[Point, ...]
    hull: ConvexPolygon
    ring: tuple[Point, ...]  # hull corners plus augmented points, counterclockwise
    padding: float
    scale: float = 1.0

    @cached_property
    def boundary_shape(self) -> Polygon:
        return Polygon([p.as_tuple() for p in self.boundary])

    @cached_property
    def region(self) -> Polygon:
        return Polygon([p.as_tuple() for p in self.ring])

    @cached_property
    def shrunk_hull(self) -> ConvexPolygon:
        return self.hull if self.scale == 1.0 else self.hull.scaled(self.center, self.scale)

    @cached_property
    def shrunk_ring(self) -> tuple[Point, ...]:
        return tuple(self.center + (p - self.center) * self.scale for p in self.ring)

    @property
    def radius(self) -> float:
        return max(self.center.distance_to(v) for v in self.hull.vertices)


def sample_boundary(node: NodeSpec, ellipse_samples: int = 16) -> list[Point]:
    """Boundary curve of ``node`` as a polygon in absolute coordinates."""
    c = Point(node.x, node.y)
    b = node.boundary
    if isinstance(b, RectangleBoundary):
        hw, hh = b.width / 2, b.height / 2
        return [c + Point(-hw, -hh), c + Point(hw, -hh), c + Point(hw, hh), c + Point(-hw, hh)]
    if isinstance(b, EllipseBoundary):
        steps = np.linspace(0.0, 2 * math.pi, ellipse_samples, endpoint=False)
        return [c + Point(b.rx * math.cos(t), b.ry * math.sin(t)) for t in steps]
    return [c + Point(x, y) for x, y in b.points]


def reduce_corners(hull: ConvexPolygon, k_max: int) -> ConvexPolygon:
    """Drop sides until at most ``k_max`` corners remain.

    The removed side is the one whose two end corners turn least in total; its
    neighbouring sides are extended until they meet, so the result contains the input.
    """
    pts = list(hull.vertices)
    while len(pts) > k_max:
        n = len(pts)
        turns = [angle_between(pts[i] - pts[i - 1], pts[(i + 1) % n] - pts[i]) for i in range(n)]
        best: Optional[tuple[float, int]] = None
        for i in range(n):
            total = turns[i] + turns[(i + 1) % n]
            if total < math.pi - 1e-9 and (best is None or total < best[0]):
                best = (total, i)
        if best is None:
            break
        i = best[1]
        j = (i + 1) % n
        a, b = pts[i - 1], pts[i]
        c, d = pts[j], pts[(j + 1) % n]
        d1, d2 = b - a, d - c
        pts[i] = b + d1 * ((c - b).cross(d2) / d1.cross(d2))
        del pts[j]
    return ConvexPolygon(tuple(strictly_convex_ring(pts)))


def padded_hull(boundary: Sequence[Point], padding: float, k_max: int) -> ConvexPolygon:
    hull = ConvexPolygon.from_points(boundary)
    if padding > 0:
        grown = hull.shape.buffer(padding, join_style="mitre", mitre_limit=MITRE_LIMIT)
        hull = ConvexPolygon.from_points(Point(x, y) for x, y in list(grown.exterior.coords)[:-1])
    return reduce_corners(hull, k_max)


def _overlapping_pairs(hulls: Sequence[ConvexPolygon]) -> list[tuple[int, int]]:
    shapes = [h.shape for h in hulls]
    left, right = STRtree(shapes).query(shapes, predicate="intersects")
    return sorted({(int(i), int(j)) for i, j in zip(left, right) if i < j})


def _separating_factor(
    bi: Sequence[Point], bj: Sequence[Point], pad_i: float, pad_j: float, k_max: int, names: tuple[str, str]
) -> float:
    def disjoint(f: float) -> bool:
        return not padded_hull(bi, f * pad_i, k_max).shape.intersects(padded_hull(bj, f * pad_j, k_max).shape)

    if not disjoint(0.0):
        raise InputError(f"boundaries of nodes '{names[0]}' and '{names[1]}' overlap or touch")
    lo, hi = 0.0, 1.0
    for _ in range(SEARCH_ITERATIONS):
        mid = (lo + hi) / 2
        if disjoint(mid):
            lo = mid
        else:
            hi = mid
    return lo


def build_obstacles(
    nodes: Sequence[NodeSpec],
    *,
    padding: float,
    k_max: int = 8,
    ellipse_samples: int = 16,
) -> list[Obstacle]:
    """One padded convex obstacle per node; padding is reduced pairwise until hulls are disjoint."""
    boundaries: list[list[Point]] = []
    for node in nodes:
        pts = sample_boundary(node, ellipse_samples)
        shape = Polygon([p.as_tuple() for p in pts])
        if not shape.is_valid or shape.area <= EPS:
            raise InvalidGeometryError(f"boundary of node '{node.id}' is not a simple polygon")
        if not shape.contains(shapely.Point(node.x, node.y)):
            raise InvalidGeometryError(f"center of node '{node.id}' lies outside its boundary")
        boundaries.append(pts)

    pads = [padding] * len(nodes)
    hulls = [padded_hull(b, padding, k_max) for b in boundaries]
    for _ in range(len(nodes) + 1):
        pairs = _overlapping_pairs(hulls) if hulls else []
        if not pairs:
            break
        for i, j in pairs:
            if not hulls[i].shape.intersects(hulls[j].shape):
                continue
            f = _separating_factor(boundaries[i], boundaries[j], pads[i], pads[j], k_max, (nodes[i].id, nodes[j].id))
            pads[i] *= f
            pads[j] *= f
            hulls[i] = padded_hull(boundaries[i], pads[i], k_max)
            hulls[j] = padded_hull(boundaries[j], pads[j], k_max)
    else:
        raise InputError("obstacle hulls could not be separated")

    return [
        Obstacle(
            index=i,
            node_id=node.id,
            center=Point(node.x, node.y),
            boundary=tuple(boundaries[i]),
            hull=hulls[i],
            ring=hulls[i].vertices,
            padding=pads[i],
        )
        for i, node in enumerate(nodes)
    ]


def augment_boundary_points(obstacle: Obstacle, cone_angle: float) -> Obstacle:
    """Add points on hull sides so no angular gap seen from the center exceeds ``cone_angle``."""
    c = obstacle.center
    verts = obstacle.hull.vertices
    ring: list[Point] = []
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        ring.append(a)
        gap = angle_between(a - c, b - c)
        if gap <= cone_angle + 1e-9:
            continue
        extra = math.ceil(gap / cone_angle - 1e-9) - 1
        side = b - a
        for j in range(1, extra + 1):
            ray = (a - c).rotated(gap * j / (extra + 1))
            ring.append(a + side * ((a - c).cross(ray) / ray.cross(side)))
    return replace(obstacle, ring=tuple(ring))


# ── Graph ─────────────────────────────────────────────────────────────────────


class RoutingGraph:
    """Embedded straight-line graph over obstacle centers and hull boundary vertices."""

    def __init__(self, obstacles: Sequence[Obstacle]):
        self.obstacles: list[Obstacle] = list(obstacles)
        self.positions: dict[int, Point] = {}
        self.kinds: dict[int, NodeKind] = {}
        self.owner: dict[int, int] = {}
        self.adj: dict[int, set[int]] = {}
        self.edge_kinds: dict[tuple[int, int], EdgeKind] = {}
        self._next_id = 0
        self._index: Optional[SpatialIndex] = None
        for ob in self.obstacles:
            self.add_node(ob.center, "center", owner=ob.index)

    @staticmethod
    def key(u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def add_node(self, p: Point, kind: NodeKind = "intermediate", owner: Optional[int] = None) -> int:
        v = self._next_id
        self._next_id += 1
        self.positions[v] = p
        self.kinds[v] = kind
        self.adj[v] = set()
        if owner is not None:
            self.owner[v] = owner
        return v

    def add_edge(self, u: int, v: int, kind: EdgeKind = "visibility") -> None:
        if u == v:
            raise ValueError(f"self-loop on routing node {u}")
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.edge_kinds.setdefault(self.key(u, v), kind)

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.edge_kinds.pop(self.key(u, v), None)

    def remove_node(self, v: int) -> None:
        for w in list(self.adj[v]):
            self.remove_edge(v, w)
        del self.adj[v], self.positions[v], self.kinds[v]
        self.owner.pop(v, None)

    def has_edge(self, u: int, v: int) -> bool:
        return self.key(u, v) in self.edge_kinds

    def is_center(self, v: int) -> bool:
        return self.kinds[v] == "center"

    def nodes(self) -> list[int]:
        return sorted(self.positions)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.edge_kinds)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def length(self, u: int, v: int) -> float:
        return self.positions[u].distance_to(self.positions[v])

    def move(self, v: int, p: Point) -> None:
        self.positions[v] = p

    def clockwise(self, v: int) -> list[int]:
        """Neighbours of ``v`` in clockwise order (decreasing polar angle)."""
        pv = self.positions[v]
        return sorted(self.adj[v], key=lambda w: (-(self.positions[w] - pv).angle(), w))

    @property
    def node_count(self) -> int:
        return len(self.positions)

    @property
    def edge_count(self) -> int:
        return len(self.edge_kinds)

    @property
    def index(self) -> SpatialIndex:
        """Spatial index over the shrunk hulls."""
        if self._index is None:
            self._index = SpatialIndex([ob.shrunk_hull for ob in self.obstacles])
        return self._index

    def set_obstacles(self, obstacles: Sequence[Obstacle]) -> None:
        self.obstacles = list(obstacles)
        self._index = None

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for v in self.nodes():
            g.add_node(v, pos=self.positions[v].as_tuple(), kind=self.kinds[v])
        for u, v in self.edges():
            g.add_edge(u, v, length=self.length(u, v), kind=self.edge_kinds[(u, v)])
        return g

    def copy(self) -> "RoutingGraph":
        g = RoutingGraph.__new__(RoutingGraph)
        g.obstacles = list(self.obstacles)
        g.positions = dict(self.positions)
        g.kinds = dict(self.kinds)
        g.owner = dict(self.owner)
        g.adj = {v: set(ns) for v, ns in self.adj.items()}
        g.edge_kinds = dict(self.edge_kinds)
        g._next_id = self._next_id
        g._index = self._index
        return g


# ── Visibility ────────────────────────────────────────────────────────────────


def _inside_wedge(d: np.ndarray, nxt: np.ndarray, prv: np.ndarray) -> np.ndarray:
    """Directions ``d`` pointing strictly into the hull interior at a boundary vertex
    with side vectors ``nxt`` (to the next vertex) and ``prv`` (to the previous one)."""
    c1 = nxt[..., 0] * d[:, 1] - nxt[..., 1] * d[:, 0]
    c2 = d[:, 0] * prv[..., 1] - d[:, 1] * prv[..., 0]
    corner = nxt[..., 0] * prv[..., 1] - nxt[..., 1] * prv[..., 0]
    return np.where(corner > EPS, (c1 > EPS) & (c2 > EPS), c1 > EPS)


class _Sightlines:
    def __init__(self, obstacles: Sequence[Obstacle]):
        self.regions = [ob.region for ob in obstacles]
        self.tree = STRtree(self.regions) if self.regions else None

    def visible(self, a: Point, b: Point) -> bool:
        if self.tree is None:
            return True
        line = LineString([a.as_tuple(), b.as_tuple()])
        return not any(segment_enters_interior(a, b, self.regions[int(i)]) for i in self.tree.query(line))


def _duplicates_direction(graph: RoutingGraph, u: int, w: int) -> bool:
    for a, b in ((u, w), (w, u)):
        pa = graph.positions[a]
        d = graph.positions[b] - pa
        for x in graph.adj[a]:
            e = graph.positions[x] - pa
            if abs(d.cross(e)) <= 1e-9 * d.norm() * e.norm() and d.dot(e) > 0:
                return True
    return False


def build_sparse_visibility_graph(obstacles: Sequence[Obstacle], cone_angle: float) -> RoutingGraph:
    """Cone-restricted visibility graph over the obstacles' boundary vertices.

    Every boundary vertex keeps, per cone of aperture ``cone_angle`` in a fixed
    global orientation, an edge to the closest visible boundary vertex (ties by
    smaller id). Centers are joined to all boundary vertices of their own obstacle.
    """
    graph = RoutingGraph(obstacles)
    ids: list[int] = []
    owner: list[int] = []
    prev_row: list[int] = []
    next_row: list[int] = []
    for ob in obstacles:
        first = len(ids)
        m = len(ob.ring)
        for k, p in enumerate(ob.ring):
            v = graph.add_node(p, "intermediate", owner=ob.index)
            graph.add_edge(ob.index, v, "spoke")
            ids.append(v)
            owner.append(ob.index)
            prev_row.append(first + (k - 1) % m)
            next_row.append(first + (k + 1) % m)
    if not ids:
        return graph

    xy = np.array([graph.positions[v].as_tuple() for v in ids])
    own = np.array(owner)
    rows = np.arange(len(ids))
    prv = xy[prev_row] - xy
    nxt = xy[next_row] - xy
    n_cones = max(1, math.ceil(2 * math.pi / cone_angle - 1e-9))
    sight = _Sightlines(obstacles)

    for row in range(len(ids)):
        d = xy - xy[row]
        dist = np.hypot(d[:, 0], d[:, 1])
        ring_neighbour = (rows == prev_row[row]) | (rows == next_row[row])
        ok = (dist > EPS) & ((own != own[row]) | ring_neighbour)
        ok &= ~_inside_wedge(d, nxt[row], prv[row])
        ok &= ~_inside_wedge(-d, nxt, prv)
        cand = np.nonzero(ok)[0]
        if cand.size == 0:
            continue
        angles = np.mod(np.arctan2(d[cand, 1], d[cand, 0]), 2 * math.pi)
        cones = np.minimum((angles // cone_angle).astype(int), n_cones - 1)
        filled: set[int] = set()
        u = ids[row]
        for k in np.lexsort((cand, dist[cand], cones)):
            cone = int(cones[k])
            if cone in filled:
                continue
            w = ids[int(cand[k])]
            if own[cand[k]] != own[row] and not sight.visible(graph.positions[u], graph.positions[w]):
                continue
            filled.add(cone)
            if not graph.has_edge(u, w) and not _duplicates_direction(graph, u, w):
                graph.add_edge(u, w, "visibility")

    _join_components(graph, sight)
    return graph


def _join_components(graph: RoutingGraph, sight: _Sightlines) -> None:
    """Join components by their shortest mutually visible boundary-vertex pair."""
    while True:
        comps = sorted((sorted(c) for c in nx.connected_components(graph.to_networkx())), key=lambda c: c[0])
        if len(comps) <= 1:
            return
        first = [v for v in comps[0] if not graph.is_center(v)]
        rest = [v for c in comps[1:] for v in c if not graph.is_center(v)]
        pairs = sorted((graph.length(a, b), a, b) for a in first for b in rest)
        for _, a, b in pairs:
            if sight.visible(graph.positions[a], graph.positions[b]) and not _duplicates_direction(graph, a, b):
                graph.add_edge(a, b, "visibility")
                log_event("visibility_components_joined", stage="routing", nodes=[a, b])
                break
        else:
            return


# ── Shrinking ─────────────────────────────────────────────────────────────────


def _boundary_floor(ob: Obstacle) -> float:
    """Smallest scale keeping the boundary curve inside with clearance."""
    boundary = ob.boundary_shape

    def clear(f: float) -> bool:
        poly = ob.hull.scaled(ob.center, f).shape
        return poly.contains(boundary) and poly.exterior.distance(boundary) >= BOUNDARY_CLEARANCE

    if not clear(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(SEARCH_ITERATIONS):
        mid = (lo + hi) / 2
        if clear(mid):
            hi = mid
        else:
            lo = mid
    return hi


def shrink_obstacles(graph: RoutingGraph, obstacles: Optional[Sequence[Obstacle]] = None) -> list[Obstacle]:
    """Scale each hull toward its center until no visibility edge touches it.

    The scale is the largest factor in ``[boundary floor, 1 - padding/2R]``
    (R = farthest corner from the center) for which the hull is clear.
    """
    obstacles = list(graph.obstacles if obstacles is None else obstacles)
    vis = [e for e, kind in sorted(graph.edge_kinds.items()) if kind == "visibility"]
    segments = [Segment(graph.positions[u], graph.positions[v]) for u, v in vis]
    tree = STRtree([s.shape for s in segments]) if segments else None

    shrunk: list[Obstacle] = []
    for ob in obstacles:
        near = [(vis[int(k)], segments[int(k)]) for k in sorted(tree.query(ob.hull.shape))] if tree else []

        def blocking(f: float) -> list[tuple[int, int]]:
            poly = ob.hull.scaled(ob.center, f)
            return [e for e, seg in near if intersects(seg, poly)]

        floor = _boundary_floor(ob)
        top = max(floor, 1.0 - 0.5 * ob.padding / ob.radius)
        if not blocking(top):
            scale = top
        else:
            bad = blocking(floor)
            if bad:
                raise ObstacleShrinkError(ob.node_id, bad)
            lo, hi = floor, top
            for _ in range(SEARCH_ITERATIONS):
                mid = (lo + hi) / 2
                if blocking(mid):
                    hi = mid
                else:
                    lo = mid
            scale = lo
        shrunk.append(replace(ob, scale=scale))

    graph.set_obstacles(shrunk)
    return shrunk


def verify_routing_graph(graph: RoutingGraph) -> list[str]:
    """Invariant violations of a built graph; empty when the graph is sound."""
    problems: list[str] = []
    index = graph.index
    for (u, v), kind in sorted(graph.edge_kinds.items()):
        hits = index.hits(Segment(graph.positions[u], graph.positions[v]))
        if kind == "visibility" and hits:
            problems.append(f"visibility edge {u}-{v} touches obstacles {hits}")
        if kind == "spoke":
            c = u if graph.is_center(u) else v
            if hits != [graph.owner[c]]:
                problems.append(f"spoke {u}-{v} touches obstacles {hits}")
    for v in graph.nodes():
        if not graph.is_center(v) and index.hits(graph.positions[v]):
            problems.append(f"intermediate node {v} lies inside an obstacle")
    return problems


def build_routing_graph(
    nodes: Sequence[NodeSpec],
    *,
    padding: float,
    cone_angle: float = math.pi / 6,
    k_max: int = 8,
    ellipse_samples: int = 16,
) -> RoutingGraph:
    obstacles = build_obstacles(nodes, padding=padding, k_max=k_max, ellipse_samples=ellipse_samples)
    obstacles = [augment_boundary_points(ob, cone_angle) for ob in obstacles]
    graph = build_sparse_visibility_graph(obstacles, cone_angle)
    shrink_obstacles(graph)
    return graph
