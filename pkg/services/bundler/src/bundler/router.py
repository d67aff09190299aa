"""Router – routing cost, Dijkstra for one path, exact DP for paths sharing a source.

Paths start and end at obstacle centers and never pass through another
center; both searches enforce this, so routed path sets always satisfy the
terminal property the ordering step relies on.
"""
from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from contracts.bundle_result_v1 import CostBreakdown

from .capacity import CapacityLedger
from .errors import InputError, InstanceTooLargeError, InvariantViolation, UnroutableEdgeError
from .geometry import EPS, Point
from .log import log_event
from .routing_graph import RoutingGraph
from .settings import PipelineConfig


@dataclass(frozen=True)
class CostParams:
    k_ink: float = 1.0
    k_len: float = 500.0
    k_cap: float = 5010.0
    path_width: float = 1.0
    separation: float = 1.0

    def __post_init__(self) -> None:
        if min(self.k_ink, self.k_len, self.k_cap, self.path_width, self.separation) < 0:
            raise InputError("cost weights, width and separation must be nonnegative")
        if self.k_ink <= 0 and self.k_len <= 0 and self.k_cap <= 0:
            raise InputError("at least one of k_ink, k_len, k_cap must be positive")

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "CostParams":
        return cls(
            k_ink=config.k_ink,
            k_len=config.k_len,
            k_cap=float(config.k_cap),
            path_width=config.path_width,
            separation=config.path_separation,
        )


@dataclass(frozen=True)
class EdgeRequest:
    index: int
    source: int  # center node id
    target: int
    width: float
    source_name: str = ""
    target_name: str = ""


@dataclass
class Path:
    id: int
    source: int
    target: int
    nodes: list[int]
    width: float
    straight: float  # |st|
    added_cost: float = 0.0

    def edges(self) -> list[tuple[int, int]]:
        return [RoutingGraph.key(a, b) for a, b in zip(self.nodes, self.nodes[1:])]

    def length(self, graph: RoutingGraph) -> float:
        return math.fsum(graph.length(a, b) for a, b in zip(self.nodes, self.nodes[1:]))

    def points(self, graph: RoutingGraph) -> list[Point]:
        return [graph.positions[v] for v in self.nodes]


def routing_cost(graph: RoutingGraph, paths: Sequence[Path], params: CostParams, overflow: float = 0.0) -> CostBreakdown:
    """k_ink·I + k_len·Σ ℓ_st/|st| + k_cap·C, with I over the union of used edges."""
    used: set[tuple[int, int]] = set()
    ratios: list[float] = []
    for p in paths:
        if p.straight <= EPS:
            raise InputError(f"path {p.id} joins coincident centers")
        used.update(p.edges())
        ratios.append(p.length(graph) / p.straight)
    ink = math.fsum(graph.length(u, v) for u, v in used)
    length_term = math.fsum(ratios)
    total = params.k_ink * ink + params.k_len * length_term + params.k_cap * overflow
    return CostBreakdown(ink=ink, length_term=length_term, overflow=overflow, total=total)


class RoutingState:
    """Paths routed so far, per-edge usage counts, accumulated ink and the capacity ledger."""

    def __init__(self, graph: RoutingGraph, ledger: CapacityLedger, params: CostParams, *, trace: bool = False):
        self.graph = graph
        self.ledger = ledger
        self.params = params
        self.trace = trace
        self.paths: dict[int, Path] = {}
        self.usage: Counter[tuple[int, int]] = Counter()
        self.ink = 0.0

    def straight(self, s: int, t: int) -> float:
        d = self.graph.length(s, t)
        if d <= EPS:
            raise InputError(f"centers {s} and {t} coincide")
        return d

    def edge_weight(self, u: int, v: int, straight: float, width: float) -> float:
        """k_ink·δ_e + k_len·ℓ_e/|st| + k_cap·ΔC_e against the current ledger."""
        p = self.params
        length = self.graph.length(u, v)
        ink = 0.0 if self.usage[RoutingGraph.key(u, v)] else length
        w = p.k_ink * ink + p.k_len * length / straight
        if p.k_cap > 0:
            w += p.k_cap * self.ledger.delta_for_edge(self.graph.positions[u], self.graph.positions[v], width)
        if w < 0:
            raise InvariantViolation(f"negative weight {w} on edge {u}-{v}")
        return w

    def commit(self, path: Path) -> float:
        """Record ``path``; returns the increase of the routing cost it causes."""
        if path.id in self.paths:
            raise InvariantViolation(f"path {path.id} routed twice")
        ink_before, cap_before = self.ink, self.ledger.total
        for e in path.edges():
            if not self.usage[e]:
                self.ink += self.graph.length(*e)
            self.usage[e] += 1
        self.ledger.assign_path(path.id, path.points(self.graph), path.width)
        self.paths[path.id] = path
        p = self.params
        path.added_cost = (
            p.k_ink * (self.ink - ink_before)
            + p.k_len * path.length(self.graph) / path.straight
            + p.k_cap * (self.ledger.total - cap_before)
        )
        if self.trace:
            log_event("edge_routed", stage="routing", edge=path.id, nodes=len(path.nodes), added_cost=path.added_cost)
        return path.added_cost

    def recompute_ink(self) -> float:
        return math.fsum(self.graph.length(*e) for e, n in self.usage.items() if n > 0)

    def cost(self) -> CostBreakdown:
        return routing_cost(self.graph, [self.paths[i] for i in sorted(self.paths)], self.params, self.ledger.total)


# ── single path ───────────────────────────────────────────────────────────────


def _unwind_pred(pred: dict[int, Optional[int]], v: int) -> list[int]:
    seq = [v]
    while (u := pred[seq[-1]]) is not None:
        seq.append(u)
    seq.reverse()
    return seq


def shortest_route(state: RoutingState, s: int, t: int, width: float) -> tuple[Optional[float], list[int], int]:
    """Dijkstra from center ``s`` to center ``t`` under frozen weights.

    Returns (cost, nodes, settled count); cost is None when ``t`` is unreachable.
    Equal-cost candidates resolve to the lexicographically smaller node sequence.
    """
    graph = state.graph
    straight = state.straight(s, t)
    dist: dict[int, float] = {s: 0.0}
    pred: dict[int, Optional[int]] = {s: None}
    done: set[int] = set()
    heap: list[tuple[float, int]] = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == t:
            return d, _unwind_pred(pred, t), len(done)
        for v in graph.neighbors(u):
            if v in done or (graph.is_center(v) and v != t):
                continue
            nd = d + state.edge_weight(u, v, straight, width)
            old = dist.get(v)
            if old is None or nd < old or (nd == old and _unwind_pred(pred, u) + [v] < _unwind_pred(pred, v)):
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return None, [], len(done)


def route_single(state: RoutingState, request: EdgeRequest, *, commit: bool = True) -> Path:
    cost, nodes, reached = shortest_route(state, request.source, request.target, request.width)
    if cost is None:
        raise UnroutableEdgeError(
            request.index, request.source_name or str(request.source), request.target_name or str(request.target), reached
        )
    path = Path(
        id=request.index,
        source=request.source,
        target=request.target,
        nodes=nodes,
        width=request.width,
        straight=state.straight(request.source, request.target),
    )
    if commit:
        state.commit(path)
    return path


# ── multi-terminal DP ─────────────────────────────────────────────────────────


def _erase_loops(nodes: list[int]) -> list[int]:
    # zero-weight ties can revisit a node
    out: list[int] = []
    seen: dict[int, int] = {}
    for v in nodes:
        if v in seen:
            for w in out[seen[v] + 1 :]:
                del seen[w]
            del out[seen[v] + 1 :]
            continue
        seen[v] = len(out)
        out.append(v)
    return out


def route_multi_dp(
    state: RoutingState,
    root: int,
    terminals: Sequence[int],
    *,
    max_terminals: int = 8,
) -> Optional[tuple[float, dict[int, list[int]]]]:
    """Exact minimum of ink + length terms for paths from ``root`` to every terminal.

    States are (node, terminal subset): a subset is either split at a node or
    extended along an edge, whose weight for subset P is
    k_ink·δ_e + k_len·ℓ_e·Σ_{t∈P} 1/|root t|. Capacity is left to the commit.
    Returns (cost, root-to-terminal node lists) or None when a terminal is unreachable.
    """
    k = len(terminals)
    if k > max_terminals:
        raise InstanceTooLargeError(f"{k} terminals exceed the multi-path limit of {max_terminals}")
    if len(set(terminals)) != k or root in terminals:
        raise InputError("terminals must be distinct and differ from the root")
    if k == 0:
        return 0.0, {}

    graph = state.graph
    p = state.params
    inv = [1.0 / state.straight(root, t) for t in terminals]
    full = (1 << k) - 1
    inv_sum = [0.0] * (full + 1)
    for mask in range(1, full + 1):
        low = (mask & -mask).bit_length() - 1
        inv_sum[mask] = inv_sum[mask & (mask - 1)] + inv[low]

    def ink_of(u: int, v: int) -> float:
        return 0.0 if state.usage[RoutingGraph.key(u, v)] else graph.length(u, v)

    def can_branch(v: int) -> bool:
        return v == root or not graph.is_center(v)

    f: list[dict[int, float]] = [{} for _ in range(full + 1)]
    back: list[dict[int, tuple]] = [{} for _ in range(full + 1)]
    for mask in range(1, full + 1):
        fm, bm = f[mask], back[mask]
        if mask & (mask - 1) == 0:
            t = terminals[mask.bit_length() - 1]
            fm[t], bm[t] = 0.0, ("base",)
        else:
            sub = (mask - 1) & mask
            while sub:
                rest = mask ^ sub
                if sub < rest:
                    fa, fb = f[sub], f[rest]
                    for v in sorted(fa.keys() & fb.keys()):
                        if not can_branch(v):
                            continue
                        c = fa[v] + fb[v]
                        if v not in fm or c < fm[v]:
                            fm[v], bm[v] = c, ("split", sub)
                sub = (sub - 1) & mask

        heap = sorted((c, v) for v, c in fm.items())
        done: set[int] = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done or d > fm[x]:
                continue
            done.add(x)
            if x == root or (graph.is_center(x) and bm[x][0] != "base"):
                continue
            for y in graph.neighbors(x):
                if y in done or (graph.is_center(y) and y != root):
                    continue
                nd = d + p.k_ink * ink_of(x, y) + p.k_len * graph.length(x, y) * inv_sum[mask]
                if y not in fm or nd < fm[y]:
                    fm[y], bm[y] = nd, ("edge", x)
                    heapq.heappush(heap, (nd, y))

    if root not in f[full]:
        return None
    by_terminal = {terminals[i]: i for i in range(k)}

    def unwind(mask: int, v: int) -> dict[int, list[int]]:
        chain = [v]
        step = back[mask][v]
        while step[0] == "edge":
            chain.append(step[1])
            step = back[mask][step[1]]
        if step[0] == "base":
            return {chain[-1]: chain}
        out: dict[int, list[int]] = {}
        for part in (step[1], mask ^ step[1]):
            for t, tail in unwind(part, chain[-1]).items():
                out[t] = chain[:-1] + tail
        return out

    routes = {t: _erase_loops(nodes) for t, nodes in unwind(full, root).items()}
    return f[full][root], {t: routes[t] for t in sorted(routes, key=by_terminal.__getitem__)}


# ── all edges ─────────────────────────────────────────────────────────────────


def _route_shared_sources(
    state: RoutingState, ordered: Sequence[EdgeRequest], threshold: int, max_terminals: int
) -> dict[int, Path]:
    routed: dict[int, Path] = {}
    centers = sorted({r.source for r in ordered} | {r.target for r in ordered})
    for center in centers:
        group: dict[int, EdgeRequest] = {}
        for req in ordered:
            if req.index in routed or center not in (req.source, req.target):
                continue
            group.setdefault(req.target if req.source == center else req.source, req)
        if len(group) < threshold:
            continue
        chosen = list(group.items())[:max_terminals]
        result = route_multi_dp(state, center, [other for other, _ in chosen], max_terminals=max_terminals)
        if result is None:
            continue
        _, routes = result
        for other, req in chosen:
            nodes = routes[other] if req.source == center else list(reversed(routes[other]))
            path = Path(
                id=req.index,
                source=req.source,
                target=req.target,
                nodes=nodes,
                width=req.width,
                straight=state.straight(req.source, req.target),
            )
            state.commit(path)
            routed[req.index] = path
        log_event("multi_path_routed", stage="routing", center=center, terminals=len(chosen))
    return routed


def route_all(
    state: RoutingState,
    requests: Sequence[EdgeRequest],
    *,
    multi_dp_threshold: int = 0,
    max_terminals: int = 8,
) -> list[Path]:
    """Route every request; shorter center distances go first so long edges can reuse their ink.

    With ``multi_dp_threshold`` > 0, centers with at least that many unrouted
    incident edges are routed jointly by the DP before the sequential pass.
    """
    ordered = sorted(requests, key=lambda r: (state.straight(r.source, r.target), r.index))
    routed: dict[int, Path] = {}
    if multi_dp_threshold > 0:
        routed.update(_route_shared_sources(state, ordered, multi_dp_threshold, max_terminals))
    for req in ordered:
        if req.index not in routed:
            routed[req.index] = route_single(state, req)
    return [routed[r.index] for r in sorted(requests, key=lambda r: r.index)]
