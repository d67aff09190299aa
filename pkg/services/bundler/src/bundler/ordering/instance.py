"""Ordering instance – embedded graph with clockwise neighbour lists and simple paths.

An edge order lists the paths on an edge left to right while travelling the edge
from its smaller to its larger node id. Clockwise means decreasing polar angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Mapping, Sequence

import networkx as nx

from contracts.order_instance_v1 import OrderInstanceV1

from ..errors import InputError, PathTerminalPropertyError

if TYPE_CHECKING:
    from ..router import Path
    from ..routing_graph import RoutingGraph

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class OrderInstance:
    clockwise: Mapping[int, tuple[int, ...]]
    paths: Mapping[int, tuple[int, ...]]
    node_names: Mapping[int, str] = field(default_factory=dict)
    path_names: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for x, ring in self.clockwise.items():
            if len(set(ring)) != len(ring):
                raise InputError(f"clockwise order of node '{self.node_name(x)}' repeats a neighbour")
            for y in ring:
                if x not in self.clockwise.get(y, ()):
                    raise InputError(f"edge {self.node_name(x)}-{self.node_name(y)} is missing its reverse")
        for pid, nodes in self.paths.items():
            if len(nodes) < 2:
                raise InputError(f"path '{self.path_name(pid)}' has fewer than two nodes")
            if len(set(nodes)) != len(nodes):
                raise InputError(f"path '{self.path_name(pid)}' is not simple")
            for a, b in zip(nodes, nodes[1:]):
                if b not in self.clockwise.get(a, ()):
                    raise InputError(
                        f"path '{self.path_name(pid)}' uses missing edge {self.node_name(a)}-{self.node_name(b)}"
                    )
        terminal_of: dict[int, int] = {}
        for pid in sorted(self.paths):
            nodes = self.paths[pid]
            terminal_of.setdefault(nodes[0], pid)
            terminal_of.setdefault(nodes[-1], pid)
        for pid in sorted(self.paths):
            for v in self.paths[pid][1:-1]:
                if v in terminal_of:
                    raise PathTerminalPropertyError(
                        self.node_name(v), self.path_name(terminal_of[v]), self.path_name(pid)
                    )

    # ── construction ──

    @classmethod
    def from_contract(cls, doc: OrderInstanceV1) -> "OrderInstance":
        index = {n.id: i for i, n in enumerate(doc.nodes)}
        adjacency: dict[int, list[int]] = {i: [] for i in range(len(doc.nodes))}
        for u, v in doc.edges:
            adjacency[index[u]].append(index[v])
            adjacency[index[v]].append(index[u])
        if doc.clockwise is not None:
            given = {index[k]: [index[y] for y in ring] for k, ring in doc.clockwise.items()}
        else:
            given = {}
        clockwise: dict[int, tuple[int, ...]] = {}
        for x, nbrs in adjacency.items():
            if x in given:
                clockwise[x] = tuple(given[x])
            else:
                px = doc.nodes[x]
                clockwise[x] = tuple(
                    sorted(
                        nbrs,
                        key=lambda y: (-math.atan2(doc.nodes[y].y - px.y, doc.nodes[y].x - px.x), y),
                    )
                )
        paths = {i: tuple(index[v] for v in p.nodes) for i, p in enumerate(doc.paths)}
        return cls(
            clockwise,
            paths,
            node_names={i: n.id for i, n in enumerate(doc.nodes)},
            path_names={i: p.id for i, p in enumerate(doc.paths)},
        )

    @classmethod
    def from_routing(cls, graph: "RoutingGraph", paths: Sequence["Path"]) -> "OrderInstance":
        clockwise = {v: tuple(graph.clockwise(v)) for v in graph.nodes()}
        return cls(clockwise, {p.id: tuple(p.nodes) for p in paths})

    # ── naming ──

    def node_name(self, v: int) -> str:
        return self.node_names.get(v, str(v))

    def path_name(self, pid: int) -> str:
        return self.path_names.get(pid, str(pid))

    # ── derived structure ──

    @cached_property
    def _rotation(self) -> dict[int, dict[int, int]]:
        return {x: {y: i for i, y in enumerate(ring)} for x, ring in self.clockwise.items()}

    def rank(self, x: int, start: int, y: int) -> int:
        """Clockwise steps from neighbour ``start`` to neighbour ``y`` around ``x``."""
        rot = self._rotation[x]
        return (rot[y] - rot[start]) % len(rot)

    @cached_property
    def edge_paths(self) -> dict[Edge, tuple[int, ...]]:
        on: dict[Edge, list[int]] = {}
        for pid in sorted(self.paths):
            nodes = self.paths[pid]
            for a, b in zip(nodes, nodes[1:]):
                on.setdefault(edge_key(a, b), []).append(pid)
        return {e: tuple(ids) for e, ids in sorted(on.items())}

    @cached_property
    def _path_edges(self) -> dict[int, dict[Edge, int]]:
        return {
            pid: {edge_key(a, b): i for i, (a, b) in enumerate(zip(nodes, nodes[1:]))}
            for pid, nodes in self.paths.items()
        }

    def path_edges(self, pid: int) -> dict[Edge, int]:
        """Edges of a path mapped to their position along it."""
        return self._path_edges[pid]

    @cached_property
    def terminals(self) -> frozenset[int]:
        return frozenset(v for nodes in self.paths.values() for v in (nodes[0], nodes[-1]))

    def aligned(self, pid: int, x: int, y: int) -> tuple[tuple[int, ...], int]:
        """The path's nodes oriented so the edge reads x then y, and the index of x."""
        nodes = self.paths[pid]
        i = self._path_edges[pid][edge_key(x, y)]
        if nodes[i] == x:
            return nodes, i
        rev = nodes[::-1]
        return rev, len(nodes) - 2 - i

    def edges(self) -> list[Edge]:
        return sorted({edge_key(x, y) for x, ring in self.clockwise.items() for y in ring})

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.clockwise)
        g.add_edges_from(self.edges())
        return g

    @property
    def total_length(self) -> int:
        return sum(len(nodes) - 1 for nodes in self.paths.values())


@dataclass(frozen=True)
class BundleOrdering:
    orders: Mapping[Edge, tuple[int, ...]]

    @cached_property
    def _positions(self) -> dict[Edge, dict[int, int]]:
        return {e: {pid: i for i, pid in enumerate(order)} for e, order in self.orders.items()}

    def order(self, u: int, v: int) -> tuple[int, ...]:
        """Paths on edge uv, left to right travelling from u to v."""
        order = self.orders.get(edge_key(u, v), ())
        return order if u < v else order[::-1]

    def position(self, edge: Edge, pid: int) -> int:
        return self._positions[edge][pid]

    def left_of(self, p: int, q: int, u: int, v: int) -> bool:
        """Whether path ``p`` runs left of ``q`` on edge uv travelling from u to v."""
        pos = self._positions[edge_key(u, v)]
        return (pos[p] < pos[q]) == (u < v)

    def covers(self, instance: OrderInstance) -> bool:
        return all(sorted(self.orders.get(e, ())) == sorted(ids) for e, ids in instance.edge_paths.items())
