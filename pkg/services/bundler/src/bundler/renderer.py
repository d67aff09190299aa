"""Renderer – bundle bases on hubs, parallel bundle segments, biarc hub segments, SVG.

Every bundle attaches to each of its end hubs through a base: a row of slots,
one per path, in bundle order. Slots sit at lateral offsets from the edge line,
so the bundle segments of one edge are parallel. When a hub is too small for a
bundle, or an obstacle sits too close to the edge, all widths and separations
of that edge shrink by one common factor.
At obstacle centers the hub is the node's boundary curve and paths end on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import drawsvg as draw
import shapely
from shapely.geometry import LineString

from .errors import BiarcFitError, InvalidGeometryError
from .geometry import EPS, ArcPiece, LinePiece, Piece, Point, fit_biarc, midpoint
from .log import log_event
from .nudger import Hub, bundle_width
from .ordering import BundleOrdering, Edge
from .router import Path
from .routing_graph import RoutingGraph

CENTER_SUPPORT_FACTOR = 0.9
CORRIDOR_FACTOR = 1.0 - 1e-6
HAIRLINE = 0.25


# ── bundle bases ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Slot:
    path: int
    offset: float  # along the left normal of the edge's canonical direction
    width: float  # after scaling
    point: Point


@dataclass(frozen=True)
class BundleBase:
    edge: Edge
    node: int
    direction: Point  # unit, from ``node`` along the edge
    scale: float
    extent: float  # scaled bundle width
    slots: tuple[Slot, ...]  # bundle order

    @property
    def chord(self) -> tuple[Point, Point]:
        return self.slots[0].point, self.slots[-1].point

    def slot_of(self, pid: int) -> Slot:
        for s in self.slots:
            if s.path == pid:
                return s
        raise KeyError(pid)


def _lateral_support(boundary: Sequence[Point], center: Point, normal: Point) -> float:
    proj = [normal.dot(q - center) for q in boundary]
    return max(min(max(proj), -min(proj)), 0.0)


def _boundary_exit(region: shapely.Polygon, origin: Point, direction: Point, reach: float) -> Point:
    """Last point where the ray from ``origin`` along ``direction`` leaves ``region``."""
    ray = LineString([origin.as_tuple(), (origin + direction * reach).as_tuple()])
    coords = shapely.get_coordinates(ray.intersection(region.exterior))
    if len(coords) == 0:
        return origin
    return max((Point(float(x), float(y)) for x, y in coords), key=lambda q: direction.dot(q - origin))


class _BaseBuilder:
    def __init__(self, graph: RoutingGraph, hubs: dict[int, Hub], separation: float):
        self.graph = graph
        self.hubs = hubs
        self.separation = separation

    def node_scale(self, x: int, normal: Point, total: float) -> float:
        if total <= EPS:
            return 1.0
        if self.graph.is_center(x):
            ob = self.graph.obstacles[self.graph.owner[x]]
            room = CENTER_SUPPORT_FACTOR * _lateral_support(ob.boundary, ob.center, normal)
            return min(1.0, room / (total / 2))
        hub = self.hubs.get(x)
        r = hub.radius if hub is not None else 0.0
        return min(1.0, 2 * r / total)

    def corridor_scale(self, u: int, v: int, total: float) -> float:
        """Scale keeping every lateral offset within the edge's clearance from
        obstacles other than those of its center endpoints."""
        if total <= EPS:
            return 1.0
        g = self.graph
        own = {g.owner[c] for c in (u, v) if g.is_center(c)}
        pu, pv = g.positions[u], g.positions[v]
        half = total / 2
        line = LineString([pu.as_tuple(), pv.as_tuple()])
        bounds = (min(pu.x, pv.x) - half, min(pu.y, pv.y) - half, max(pu.x, pv.x) + half, max(pu.y, pv.y) + half)
        clearance = half
        for i in g.index.query_bounds(bounds):
            if i not in own:
                clearance = min(clearance, float(g.index.polygons[i].shape.distance(line)))
        return min(1.0, CORRIDOR_FACTOR * clearance / half)

    def slot_point(self, x: int, direction: Point, normal: Point, offset: float, half_extent: float) -> Point:
        g = self.graph
        px = g.positions[x]
        if g.is_center(x):
            ob = g.obstacles[g.owner[x]]
            origin = px + normal * offset
            reach = max(origin.distance_to(q) for q in ob.boundary) + 1.0
            return _boundary_exit(ob.boundary_shape, origin, direction, reach)
        hub = self.hubs.get(x)
        r = hub.radius if hub is not None else 0.0
        h = math.sqrt(max(r * r - half_extent * half_extent, 0.0))
        return px + direction * h + normal * offset


def place_bundle_bases(
    graph: RoutingGraph,
    paths: Sequence[Path],
    ordering: BundleOrdering,
    hubs: dict[int, Hub],
    separation: float,
) -> dict[tuple[Edge, int], BundleBase]:
    builder = _BaseBuilder(graph, hubs, separation)
    widths = {p.id: p.width for p in paths}
    bases: dict[tuple[Edge, int], BundleBase] = {}
    for edge, order in sorted(ordering.orders.items()):
        if not order:
            continue
        u, v = edge
        d = (graph.positions[v] - graph.positions[u]).unit()
        n = d.left_normal()
        ws = [widths[pid] for pid in order]
        total = bundle_width(ws, separation)
        scale = min(
            builder.node_scale(u, n, total), builder.node_scale(v, n, total), builder.corridor_scale(u, v, total)
        )

        offsets = []
        used = 0.0
        for w in ws:
            offsets.append(scale * (total / 2 - used - w / 2))
            used += w + separation
        half = scale * total / 2
        for x, dx in ((u, d), (v, -d)):
            slots = tuple(
                Slot(pid, off, scale * w, builder.slot_point(x, dx, n, off, half))
                for pid, off, w in zip(order, offsets, ws)
            )
            bases[(edge, x)] = BundleBase(edge, x, dx, scale, scale * total, slots)
    return bases


# ── curves ────────────────────────────────────────────────────────────────────


def build_hub_segment(
    p_in: Point, t_in: Point, p_out: Point, t_out: Point, *, node: Optional[int] = None, run_id: str = ""
) -> tuple[Piece, ...]:
    """Tangent-continuous connector inside a hub.

    One biarc when it fits, two biarcs through the midpoint otherwise, and a
    straight piece as the last resort.
    """
    if p_in.distance_to(p_out) <= EPS:
        return ()
    try:
        return fit_biarc(p_in, t_in, p_out, t_out).pieces
    except (BiarcFitError, InvalidGeometryError):
        pass
    m = midpoint(p_in, p_out)
    tm = (p_out - p_in).unit()
    try:
        return fit_biarc(p_in, t_in, m, tm).pieces + fit_biarc(m, tm, p_out, t_out).pieces
    except (BiarcFitError, InvalidGeometryError):
        log_event("hub_segment_fallback", run_id, "rendering", node=node)
        return (LinePiece(p_in, p_out),)


@dataclass(frozen=True)
class RenderedPath:
    edge_index: int
    width: float  # stroke width, scaled like the narrowest bundle the path runs through
    pieces: tuple[Piece, ...]

    @property
    def start(self) -> Point:
        return self.pieces[0].start

    @property
    def end(self) -> Point:
        return self.pieces[-1].end

    def sample(self, per_piece: int = 128) -> list[Point]:
        pts: list[Point] = []
        for piece in self.pieces:
            pts.extend(piece.point_at(i / per_piece) for i in range(per_piece))
        if self.pieces:
            pts.append(self.end)
        return pts


def build_rendered_paths(
    graph: RoutingGraph,
    paths: Sequence[Path],
    bases: dict[tuple[Edge, int], BundleBase],
    *,
    run_id: str = "",
) -> list[RenderedPath]:
    rendered: list[RenderedPath] = []
    pos = graph.positions
    for p in sorted(paths, key=lambda p: p.id):
        pieces: list[Piece] = []
        prev: Optional[tuple[Point, Point]] = None
        stroke = p.width
        for a, b in zip(p.nodes, p.nodes[1:]):
            edge = graph.key(a, b)
            slot_a, slot_b = bases[(edge, a)].slot_of(p.id), bases[(edge, b)].slot_of(p.id)
            stroke = min(stroke, slot_a.width, slot_b.width)
            sa, sb = slot_a.point, slot_b.point
            direction = (pos[b] - pos[a]).unit()
            if prev is not None:
                pieces.extend(build_hub_segment(prev[0], prev[1], sa, direction, node=a, run_id=run_id))
            if sa.distance_to(sb) > EPS:
                pieces.append(LinePiece(sa, sb))
            prev = (sb, direction)
        rendered.append(RenderedPath(p.id, stroke, tuple(pieces)))
    return rendered


# ── drawing ───────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RenderOptions:
    show_obstacles: bool = False
    show_hubs: bool = False
    timestamp: Optional[str] = None
    path_color: str = "#1f4e79"
    node_color: str = "#333333"
    margin: float = 2.0


def _bounds(graph: RoutingGraph, rendered: Sequence[RenderedPath]) -> tuple[float, float, float, float]:
    xs: list[float] = []
    ys: list[float] = []
    for ob in graph.obstacles:
        for q in ob.hull.vertices:
            xs.append(q.x)
            ys.append(q.y)
    for rp in rendered:
        for piece in rp.pieces:
            for q in (piece.start, piece.end):
                xs.append(q.x)
                ys.append(q.y)
    if not xs:
        return (0.0, 0.0, 1.0, 1.0)
    return (min(xs), min(ys), max(xs), max(ys))


def _outline(points: Sequence[Point], **style) -> draw.Lines:
    flat = [c for q in points for c in q.as_tuple()]
    return draw.Lines(*flat, close=True, **style)


def _curve(rp: RenderedPath, color: str) -> draw.Path:
    path = draw.Path(
        stroke=color,
        stroke_width=rp.width if rp.width > 0 else HAIRLINE,
        fill="none",
        id=f"edge-{rp.edge_index}",
    )
    if not rp.pieces:
        return path
    path.M(*rp.start.as_tuple())
    for piece in rp.pieces:
        if isinstance(piece, ArcPiece):
            large = 1 if abs(piece.sweep) > math.pi else 0
            sweep = 1 if piece.sweep > 0 else 0
            path.A(piece.radius, piece.radius, 0, large, sweep, piece.end.x, piece.end.y)
        else:
            path.L(*piece.end.as_tuple())
    return path


def render(
    graph: RoutingGraph,
    rendered: Sequence[RenderedPath],
    hubs: dict[int, Hub],
    options: RenderOptions = RenderOptions(),
) -> draw.Drawing:
    """SVG drawing with one group per layer and one path element per input edge."""
    min_x, min_y, max_x, max_y = _bounds(graph, rendered)
    widest = max((rp.width for rp in rendered), default=0.0)
    pad = options.margin + widest
    extra = {"data_generated": options.timestamp} if options.timestamp else {}
    d = draw.Drawing(max_x - min_x + 2 * pad, max_y - min_y + 2 * pad, origin=(min_x - pad, min_y - pad), **extra)

    if options.show_obstacles:
        layer = draw.Group(id="obstacles")
        for ob in graph.obstacles:
            layer.append(_outline(ob.hull.vertices, fill="none", stroke="#bbbbbb", stroke_dasharray="2,2"))
        d.append(layer)
    if options.show_hubs:
        layer = draw.Group(id="hubs")
        for v in sorted(hubs):
            c = graph.positions[v]
            layer.append(draw.Circle(c.x, c.y, hubs[v].radius, fill="none", stroke="#d98c1f"))
        d.append(layer)

    nodes = draw.Group(id="nodes")
    for ob in graph.obstacles:
        nodes.append(_outline(ob.boundary, fill="#f4f4f4", stroke=options.node_color, id=f"node-{ob.node_id}"))
    d.append(nodes)

    layer = draw.Group(id="paths")
    for rp in sorted(rendered, key=lambda r: r.edge_index):
        layer.append(_curve(rp, options.path_color))
    d.append(layer)
    return d
