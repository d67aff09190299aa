"""Synthetic inputs – seeded random graphs and ordering instances for tests and benchmarks."""
from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np

from contracts.graph_input_v1 import EdgeSpec, EllipseBoundary, GraphInputV1, NodeSpec, RectangleBoundary
from contracts.order_instance_v1 import OrderInstanceV1, OrderNode, OrderPath

from .errors import InputError

CELL = 10.0
MIN_SIZE = 1.0
MAX_SIZE = 4.0


def random_graph_input(
    n_nodes: int,
    n_edges: int,
    *,
    seed: int = 0,
    ellipse_share: float = 0.3,
) -> GraphInputV1:
    """Disjoint rectangles and ellipses on a jittered grid, joined by distinct random edges."""
    max_edges = n_nodes * (n_nodes - 1) // 2
    if n_edges > max_edges:
        raise InputError(f"{n_nodes} nodes admit at most {max_edges} distinct edges, {n_edges} requested")
    rng = np.random.default_rng(seed)
    side = max(1, math.ceil(math.sqrt(2 * n_nodes)))
    cells = rng.choice(side * side, size=n_nodes, replace=False)
    jitter = CELL / 2 - MAX_SIZE / 2 - 1.0

    nodes: list[NodeSpec] = []
    for i, cell in enumerate(cells):
        gx, gy = divmod(int(cell), side)
        x = gx * CELL + float(rng.uniform(-jitter, jitter))
        y = gy * CELL + float(rng.uniform(-jitter, jitter))
        w, h = (float(s) for s in rng.uniform(MIN_SIZE, MAX_SIZE, size=2))
        if rng.random() < ellipse_share:
            boundary = EllipseBoundary(rx=w / 2, ry=h / 2)
        else:
            boundary = RectangleBoundary(width=w, height=h)
        nodes.append(NodeSpec(id=f"n{i}", x=x, y=y, boundary=boundary))

    pairs = list(itertools.combinations(range(n_nodes), 2))
    chosen = rng.choice(len(pairs), size=n_edges, replace=False) if n_edges else []
    edges = [EdgeSpec(source=f"n{pairs[k][0]}", target=f"n{pairs[k][1]}") for k in sorted(int(c) for c in chosen)]
    return GraphInputV1(nodes=nodes, edges=edges)


def _embedded_nodes(rng: np.random.Generator, n: int) -> tuple[np.ndarray, list[OrderNode]]:
    xy = rng.uniform(0.0, 100.0, size=(n, 2))
    return xy, [OrderNode(id=f"v{i}", x=float(x), y=float(y)) for i, (x, y) in enumerate(xy)]


def _instance(name: str, nodes: list[OrderNode], g: nx.Graph, paths: list[list[int]]) -> OrderInstanceV1:
    return OrderInstanceV1(
        name=name,
        nodes=nodes,
        edges=[(f"v{u}", f"v{v}") for u, v in sorted(tuple(sorted(e)) for e in g.edges())],
        paths=[OrderPath(id=f"p{i}", nodes=[f"v{v}" for v in p]) for i, p in enumerate(paths)],
    )


def random_order_instance(
    n_nodes: int,
    n_paths: int,
    *,
    seed: int = 0,
    neighbours: int = 3,
    terminal_share: float = 0.4,
) -> OrderInstanceV1:
    """k-nearest-neighbour graph plus its spanning tree, with paths that only end at terminals.

    Paths run between two terminals through non-terminals only, so no node is
    both an end of one path and an interior node of another.
    """
    if n_nodes < 3:
        raise InputError("random ordering instances need at least 3 nodes")
    rng = np.random.default_rng(seed)
    xy, nodes = _embedded_nodes(rng, n_nodes)

    full = nx.Graph()
    dist = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=-1)
    for u, v in itertools.combinations(range(n_nodes), 2):
        full.add_edge(u, v, length=float(dist[u, v]))
    g = nx.minimum_spanning_tree(full, weight="length")
    for u in range(n_nodes):
        for v in np.argsort(dist[u])[1 : neighbours + 1]:
            g.add_edge(u, int(v))
    for u, v in g.edges():
        g[u][v]["w"] = float(rng.uniform(1.0, 2.0))

    k = min(n_nodes - 1, max(2, round(terminal_share * n_nodes)))
    terminals = sorted(int(t) for t in rng.choice(n_nodes, size=k, replace=False))
    inner = set(range(n_nodes)) - set(terminals)

    paths: list[list[int]] = []
    for _ in range(20 * max(n_paths, 1)):
        if len(paths) == n_paths:
            break
        s, t = (int(v) for v in rng.choice(terminals, size=2, replace=False))
        try:
            paths.append(nx.shortest_path(g.subgraph(inner | {s, t}), s, t, weight="w"))
        except nx.NetworkXNoPath:
            continue
    return _instance(f"random-{seed}", nodes, g, paths)


def random_tree_instance(n_nodes: int, n_paths: int, *, seed: int = 0) -> OrderInstanceV1:
    """Random recursive tree; paths join leaves."""
    if n_nodes < 2:
        raise InputError("random tree instances need at least 2 nodes")
    rng = np.random.default_rng(seed)
    _, nodes = _embedded_nodes(rng, n_nodes)
    g = nx.Graph()
    g.add_node(0)
    for v in range(1, n_nodes):
        g.add_edge(int(rng.integers(0, v)), v)
    leaves = sorted(v for v in g.nodes if g.degree(v) == 1)
    paths = []
    for _ in range(n_paths):
        s, t = (int(v) for v in rng.choice(leaves, size=2, replace=False))
        paths.append(nx.shortest_path(g, s, t))
    return _instance(f"tree-{seed}", nodes, g, paths)
