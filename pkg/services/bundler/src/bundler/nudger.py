"""Nudger – hub sizing and routing-graph optimization after routing.

Every intermediate node gets a circular hub. The graph is valid when no two
hubs overlap, no hub overlaps an obstacle, and every edge stays clear of
obstacles other than those of its own center endpoints. Touching is allowed.
The capacity overflow is frozen during optimization, so only the ink and
length terms of the routing cost move.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import shapely

from .geometry import EPS, Circle, Point, Segment, midpoint
from .log import log_event
from .router import CostParams, Path, routing_cost
from .routing_graph import RoutingGraph
from .settings import OptimizerParams

MIN_HUB_RADIUS = 1e-6
RADIUS_SEARCH_ITERATIONS = 40
CLEARANCE_FACTOR = 1.0 - 1e-6
TOUCH_TOL = 1e-9
IMPROVEMENT_TOL = 1e-9

AcceptHook = Callable[[str, int], None]


@dataclass(frozen=True)
class Hub:
    node: int
    desired_radius: float
    allowed_radius: float

    @property
    def radius(self) -> float:
        return min(self.desired_radius, self.allowed_radius)


@dataclass(frozen=True)
class ValidityReport:
    flags: dict[int, bool]
    violations: tuple[tuple[int, str], ...]

    @property
    def valid(self) -> bool:
        return not self.violations


# ── bundles ───────────────────────────────────────────────────────────────────


def prune_unused(graph: RoutingGraph, paths: Sequence[Path]) -> RoutingGraph:
    """Remove edges and intermediate nodes no path uses; centers stay."""
    used_edges = {e for p in paths for e in p.edges()}
    used_nodes = {v for p in paths for v in p.nodes}
    for e in graph.edges():
        if e not in used_edges:
            graph.remove_edge(*e)
    for v in graph.nodes():
        if not graph.is_center(v) and v not in used_nodes:
            graph.remove_node(v)
    return graph


def edge_bundles(paths: Sequence[Path]) -> dict[tuple[int, int], list[int]]:
    bundles: dict[tuple[int, int], list[int]] = {}
    for p in paths:
        for e in p.edges():
            bundles.setdefault(e, []).append(p.id)
    return {e: sorted(ids) for e, ids in sorted(bundles.items())}


def bundle_width(widths: Sequence[float], separation: float) -> float:
    """Σ widths + (count − 1)·separation; 0 for an unused edge."""
    if not widths:
        return 0.0
    return math.fsum(widths) + (len(widths) - 1) * separation


def desired_radius(
    directions: Sequence[float],
    widths: Sequence[float],
    separation: float,
    *,
    mu: float,
    cap: float,
) -> float:
    """Smallest radius ≥ μ·max width at which adjacent bundles enter the hub apart.

    A bundle of width w entering a circle of radius r covers the half-angle
    asin(w / 2r); between neighbouring bundles the remaining arc must be
    nonnegative and its chord at least ``separation``.
    """
    w_max = max(widths, default=0.0)
    hi = max(cap, MIN_HUB_RADIUS)
    lo = min(max(mu * w_max, MIN_HUB_RADIUS), hi)
    order = sorted(range(len(directions)), key=lambda i: directions[i])

    def feasible(r: float) -> bool:
        if len(order) < 2:
            return True
        for a, b in zip(order, order[1:] + order[:1]):
            phi = (directions[b] - directions[a]) % (2 * math.pi)
            gap = phi - math.asin(min(1.0, widths[a] / (2 * r))) - math.asin(min(1.0, widths[b] / (2 * r)))
            if gap < 0 or 2 * r * math.sin(gap / 2) < separation - EPS:
                return False
        return True

    if feasible(lo):
        return lo
    if not feasible(hi):
        return hi
    for _ in range(RADIUS_SEARCH_ITERATIONS):
        mid = (lo + hi) / 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def compute_hub_radii(
    graph: RoutingGraph,
    paths: Sequence[Path],
    separation: float,
    opt: OptimizerParams,
) -> dict[int, Hub]:
    """Desired and allowed radius for every intermediate node on some path."""
    by_id = {p.id: p for p in paths}
    widths = {e: bundle_width([by_id[i].width for i in ids], separation) for e, ids in edge_bundles(paths).items()}
    desired: dict[int, float] = {}
    for v in graph.nodes():
        if graph.is_center(v) or not graph.adj[v]:
            continue
        pv = graph.positions[v]
        nbrs = graph.neighbors(v)
        ew = [widths.get(graph.key(v, w), 0.0) for w in nbrs]
        cap = opt.radius_cap if opt.radius_cap is not None else opt.radius_cap_factor * max(ew, default=0.0)
        dirs = [(graph.positions[w] - pv).angle() for w in nbrs]
        desired[v] = desired_radius(dirs, ew, separation, mu=opt.mu, cap=cap)

    ids = sorted(desired)
    if not ids:
        return {}
    xy = np.array([graph.positions[v].as_tuple() for v in ids])
    want = np.array([desired[v] for v in ids])
    hubs: dict[int, Hub] = {}
    for i, v in enumerate(ids):
        hubs[v] = Hub(v, desired[v], _allowed_radius(graph, graph.positions[v], desired[v], xy, want, skip=i))
    return hubs


def _allowed_radius(
    graph: RoutingGraph, p: Point, want: float, xy: np.ndarray, wants: np.ndarray, skip: Optional[int] = None
) -> float:
    """Largest radius keeping the hub clear of obstacles and of its share of
    the gap to every other hub (split in proportion to desired radii)."""
    allowed = graph.index.nearest_distance(p, within=2 * want) * CLEARANCE_FACTOR
    if len(xy):
        d = np.hypot(xy[:, 0] - p.x, xy[:, 1] - p.y)
        share = d * want / (want + wants) * CLEARANCE_FACTOR
        if skip is not None:
            share[skip] = np.inf
        allowed = min(allowed, float(share.min()))
    return max(allowed, 0.0)


def escape_direction(graph: RoutingGraph, p: Point, r: float) -> Optional[Point]:
    """Σ of unit vectors from the centers of obstacles closer than ``r`` toward ``p``."""
    sx = sy = 0.0
    here = shapely.Point(p.x, p.y)
    for i in graph.index.query(Circle(p, r)):
        ob = graph.obstacles[i]
        if float(ob.shrunk_hull.shape.distance(here)) < r:
            u = (p - ob.center).unit()
            sx += u.x
            sy += u.y
    direction = Point(sx, sy)
    if direction.norm() <= 1e-12:
        return None
    return direction.unit()


def local_cost(
    p: Point,
    neighbours: Sequence[Point],
    path_ends: Sequence[tuple[Point, Point, float]],
    params: CostParams,
) -> float:
    """Part of the routing cost that depends on one node's position ``p``."""
    ink = math.fsum(p.distance_to(q) for q in neighbours)
    length = math.fsum((p.distance_to(a) + p.distance_to(b)) / st for a, b, st in path_ends)
    return params.k_ink * ink + params.k_len * length


def descent_direction(
    p: Point,
    neighbours: Sequence[Point],
    path_ends: Sequence[tuple[Point, Point, float]],
    params: CostParams,
) -> Point:
    """Negative gradient of ``local_cost`` at ``p``."""
    dx = dy = 0.0

    def toward(q: Point, k: float) -> None:
        nonlocal dx, dy
        d = q - p
        n = d.norm()
        if n > EPS:
            dx += k * d.x / n
            dy += k * d.y / n

    for q in neighbours:
        toward(q, params.k_ink)
    for a, b, st in path_ends:
        toward(a, params.k_len / st)
        toward(b, params.k_len / st)
    return Point(dx, dy)


def check_validity(graph: RoutingGraph, hubs: dict[int, Hub]) -> ValidityReport:
    violations: list[tuple[int, str]] = []
    ids = sorted(hubs)
    if ids:
        xy = np.array([graph.positions[v].as_tuple() for v in ids])
        radii = np.array([hubs[v].radius for v in ids])
        d = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
        overlap = radii[:, None] + radii[None, :] > d + TOUCH_TOL
        np.fill_diagonal(overlap, False)
        for i, j in zip(*np.nonzero(np.triu(overlap))):
            violations.append((ids[i], f"hub overlaps hub {ids[j]}"))
        for v, r in zip(ids, radii):
            clearance = graph.index.nearest_distance(graph.positions[v], within=2 * float(r) + 1.0)
            if clearance <= 0 or clearance < r - TOUCH_TOL:
                violations.append((v, f"hub overlaps an obstacle (clearance {clearance:.6g}, radius {r:.6g})"))
    for a, b in graph.edges():
        if not _edge_clear(graph, a, b, graph.positions[a], graph.positions[b]):
            violations.append((a, f"edge {a}-{b} crosses an obstacle"))
    bad = {v for v, _ in violations}
    return ValidityReport({v: v not in bad for v in ids}, tuple(violations))


def _edge_clear(graph: RoutingGraph, a: int, b: int, pa: Point, pb: Point) -> bool:
    allowed = {graph.owner[c] for c in (a, b) if graph.is_center(c)}
    return set(graph.index.hits(Segment(pa, pb))) <= allowed


# ── optimizer ─────────────────────────────────────────────────────────────────


@dataclass
class OptimizationResult:
    graph: RoutingGraph
    paths: list[Path]
    hubs: dict[int, Hub]
    moves: Counter[str] = field(default_factory=Counter)


class Nudger:
    """Mutates ``graph`` and the node lists of ``paths`` in place."""

    def __init__(
        self,
        graph: RoutingGraph,
        paths: Sequence[Path],
        params: CostParams,
        opt: OptimizerParams,
        *,
        overflow: float = 0.0,
        on_accept: Optional[AcceptHook] = None,
        trace: bool = False,
        run_id: str = "",
    ):
        self.graph = graph
        self.paths = {p.id: p for p in paths}
        self.params = params
        self.opt = opt
        self.overflow = overflow
        self.on_accept = on_accept
        self.trace = trace
        self.run_id = run_id
        self.moves: Counter[str] = Counter()
        self.hubs: dict[int, Hub] = {}
        self._reindex_paths()
        self.recompute_hubs()

    # ── bookkeeping ──

    def _reindex_paths(self) -> None:
        self.through: dict[int, set[int]] = {}
        for p in self.paths.values():
            for v in p.nodes:
                self.through.setdefault(v, set()).add(p.id)

    def recompute_hubs(self) -> None:
        self.hubs = compute_hub_radii(self.graph, list(self.paths.values()), self.params.separation, self.opt)
        self._sync_hub_arrays()

    def _sync_hub_arrays(self) -> None:
        self._hub_ids = sorted(self.hubs)
        self._hub_row = {v: i for i, v in enumerate(self._hub_ids)}
        self._hub_xy = np.array([self.graph.positions[v].as_tuple() for v in self._hub_ids]).reshape(-1, 2)
        self._hub_r = np.array([self.hubs[v].radius for v in self._hub_ids])
        self._hub_want = np.array([self.hubs[v].desired_radius for v in self._hub_ids])

    def cost(self) -> float:
        return routing_cost(self.graph, list(self.paths.values()), self.params, self.overflow).total

    def validity(self) -> ValidityReport:
        return check_validity(self.graph, self.hubs)

    def _path_ends(self, u: int) -> list[tuple[Point, Point, float]]:
        pos = self.graph.positions
        ends = []
        for pid in sorted(self.through.get(u, ())):
            p = self.paths[pid]
            i = p.nodes.index(u)
            if 0 < i < len(p.nodes) - 1:
                ends.append((pos[p.nodes[i - 1]], pos[p.nodes[i + 1]], p.straight))
        return ends

    def _move(self, v: int, q: Point, phase: str, delta: float) -> None:
        old = self.graph.positions[v]
        self.graph.move(v, q)
        row = self._hub_row.get(v)
        if row is not None:
            self._hub_xy[row] = q.as_tuple()
        self._accepted(phase, v, move=[q.x - old.x, q.y - old.y], cost_delta=delta)

    def _accepted(self, phase: str, v: int, **extra) -> None:
        self.moves[phase] += 1
        if self.trace:
            log_event("nudge_move", self.run_id, "optimization", node=v, phase=phase, **extra)
        if self.on_accept is not None:
            self.on_accept(phase, v)

    def _valid_at(
        self, v: int, q: Point, r: float, neighbours: Sequence[int], exclude: frozenset[int] = frozenset()
    ) -> bool:
        clearance = self.graph.index.nearest_distance(q, within=2 * r + 1.0)
        if clearance <= 0 or clearance < r - TOUCH_TOL:
            return False
        if len(self._hub_ids):
            d = np.hypot(self._hub_xy[:, 0] - q.x, self._hub_xy[:, 1] - q.y)
            clash = self._hub_r + r > d + TOUCH_TOL
            for w in exclude | {v}:
                row = self._hub_row.get(w)
                if row is not None:
                    clash[row] = False
            if clash.any():
                return False
        pos = self.graph.positions
        return all(_edge_clear(self.graph, v, x, q, pos[x]) for x in neighbours)

    def _allowed_at(self, v: int, q: Point) -> float:
        return _allowed_radius(self.graph, q, self.hubs[v].desired_radius, self._hub_xy, self._hub_want, self._hub_row[v])

    # ── escape ──

    def escape_obstacles(self, v: int) -> bool:
        """Step ``v`` away from nearby obstacles until its allowed radius grows.

        Up to ``max_escape_attempts`` tries, each of length θ·r along the summed
        escape direction, halving r after every rejected try.
        """
        hub = self.hubs[v]
        p = self.graph.positions[v]
        before = self._allowed_at(v, p)
        if before >= hub.desired_radius:
            return False
        r = hub.desired_radius
        for _ in range(self.opt.max_escape_attempts):
            direction = escape_direction(self.graph, p, r)
            if direction is None:
                return False
            q = p + direction * (self.opt.theta * r)
            if self._valid_at(v, q, hub.radius, self.graph.neighbors(v)) and self._allowed_at(v, q) > before + EPS:
                self._move(v, q, "escape", 0.0)
                return True
            r /= 2
        return False

    # ── descent ──

    def descend_node(self, u: int) -> bool:
        """Fixed-size steps along the negative gradient while the local cost strictly drops."""
        hub = self.hubs[u]
        step = self.opt.descent_step_factor * hub.desired_radius
        pos = self.graph.positions
        moved = False
        for _ in range(self.opt.max_descent_steps):
            p = pos[u]
            nbrs = [pos[w] for w in self.graph.neighbors(u)]
            ends = self._path_ends(u)
            direction = descent_direction(p, nbrs, ends, self.params)
            if direction.norm() <= EPS:
                break
            q = p + direction.unit() * step
            old, new = local_cost(p, nbrs, ends, self.params), local_cost(q, nbrs, ends, self.params)
            if not (new < old) or not self._valid_at(u, q, hub.radius, self.graph.neighbors(u)):
                break
            self._move(u, q, "descent", new - old)
            moved = True
        return moved

    # ── simplification ──

    def _try_shortcut(self, v: int) -> bool:
        g = self.graph
        if v not in g.positions or g.is_center(v) or g.degree(v) != 2:
            return False
        a, b = g.neighbors(v)
        if g.has_edge(a, b):
            return False
        detour = g.length(a, b) - g.length(a, v) - g.length(v, b)
        weight = self.params.k_ink + self.params.k_len * math.fsum(
            1.0 / self.paths[pid].straight for pid in self.through.get(v, ())
        )
        delta = weight * detour
        if delta >= -IMPROVEMENT_TOL or not _edge_clear(g, a, b, g.positions[a], g.positions[b]):
            return False
        g.remove_node(v)
        g.add_edge(a, b, "spoke" if g.is_center(a) or g.is_center(b) else "visibility")
        for pid in self.through.pop(v, set()):
            self.paths[pid].nodes.remove(v)
        self.hubs.pop(v, None)
        self._sync_hub_arrays()
        self._accepted("shortcut", v, cost_delta=delta)
        return True

    def _try_glue(self, u: int, v: int) -> bool:
        g = self.graph
        if u not in g.positions or v not in g.positions or not g.has_edge(u, v):
            return False
        if g.is_center(u) or g.is_center(v):
            return False
        for pid in self.through.get(u, set()) & self.through.get(v, set()):
            nodes = self.paths[pid].nodes
            if abs(nodes.index(u) - nodes.index(v)) != 1:
                return False

        pos = g.positions
        nbrs = sorted((g.adj[u] | g.adj[v]) - {u, v})
        before_edges = {g.key(u, x) for x in g.adj[u]} | {g.key(v, x) for x in g.adj[v]}
        ink_before = math.fsum(g.length(*e) for e in before_edges)
        affected = sorted(self.through.get(u, set()) | self.through.get(v, set()))
        merged = {pid: _collapse([u if x == v else x for x in self.paths[pid].nodes]) for pid in affected}
        len_before = {pid: self.paths[pid].length(g) for pid in affected}
        radius = max(self.hubs[u].radius, self.hubs[v].radius) if u in self.hubs and v in self.hubs else 0.0

        best: Optional[tuple[float, Point]] = None
        for q in (pos[u], pos[v], midpoint(pos[u], pos[v])):
            at = dict(pos)
            at[u] = q
            ink_after = math.fsum(q.distance_to(pos[x]) for x in nbrs)
            length_delta = math.fsum(
                (_length(merged[pid], at) - len_before[pid]) / self.paths[pid].straight for pid in affected
            )
            delta = self.params.k_ink * (ink_after - ink_before) + self.params.k_len * length_delta
            if delta >= -IMPROVEMENT_TOL or (best is not None and delta >= best[0]):
                continue
            if self._valid_at(u, q, radius, nbrs, exclude=frozenset({v})):
                best = (delta, q)
        if best is None:
            return False

        delta, q = best
        for x in sorted(g.adj[v] - {u}):
            if not g.has_edge(u, x):
                g.add_edge(u, x, g.edge_kinds[g.key(v, x)])
        g.remove_node(v)
        g.move(u, q)
        for pid in affected:
            self.paths[pid].nodes = merged[pid]
        self.through.setdefault(u, set()).update(self.through.pop(v, set()))
        if u in self.hubs and v in self.hubs:
            hu, hv = self.hubs[u], self.hubs.pop(v)
            self.hubs[u] = Hub(u, max(hu.desired_radius, hv.desired_radius), radius)
        self._sync_hub_arrays()
        self._accepted("glue", u, merged=v, cost_delta=delta)
        return True

    def simplify_graph(self) -> int:
        """Shortcut degree-two nodes and glue adjacent intermediates while that
        strictly lowers the routing cost and keeps the graph valid."""
        applied = 0
        changed = True
        while changed:
            changed = False
            for v in self.graph.nodes():
                if self._try_shortcut(v):
                    applied += 1
                    changed = True
            for u, v in self.graph.edges():
                if self._try_glue(u, v):
                    applied += 1
                    changed = True
        return applied

    # ── driver ──

    def optimize(self) -> OptimizationResult:
        """Escape once, then descent passes, then simplification."""
        for v in sorted(self.hubs):
            self.escape_obstacles(v)
        self.recompute_hubs()
        for _ in range(self.opt.descent_passes):
            for v in sorted(self.hubs):
                self.descend_node(v)
        self.simplify_graph()
        self.recompute_hubs()
        return OptimizationResult(self.graph, [self.paths[i] for i in sorted(self.paths)], self.hubs, self.moves)


def _collapse(nodes: list[int]) -> list[int]:
    out: list[int] = []
    for v in nodes:
        if not out or out[-1] != v:
            out.append(v)
    return out


def _length(nodes: Sequence[int], at: dict[int, Point]) -> float:
    return math.fsum(at[a].distance_to(at[b]) for a, b in zip(nodes, nodes[1:]))


def optimize(
    graph: RoutingGraph,
    paths: Sequence[Path],
    params: CostParams,
    opt: OptimizerParams,
    *,
    overflow: float = 0.0,
    on_accept: Optional[AcceptHook] = None,
    trace: bool = False,
    run_id: str = "",
) -> OptimizationResult:
    return Nudger(graph, paths, params, opt, overflow=overflow, on_accept=on_accept, trace=trace, run_id=run_id).optimize()
