"""Obstacles, sparse visibility graph and obstacle shrinking."""
import math

import networkx as nx
import pytest
from bundler.errors import InputError, InvalidGeometryError
from bundler.geometry import ConvexPolygon, Point, angle_between
from bundler.routing_graph import (
    augment_boundary_points,
    build_obstacles,
    build_routing_graph,
    padded_hull,
    reduce_corners,
    sample_boundary,
    verify_routing_graph,
)
from contracts.graph_input_v1 import NodeSpec


def _rect(node_id: str, x: float, y: float, w: float = 2.0, h: float = 2.0) -> NodeSpec:
    return NodeSpec(id=node_id, x=x, y=y, boundary={"kind": "rectangle", "width": w, "height": h})


def _ellipse(node_id: str, x: float, y: float, rx: float = 1.5, ry: float = 1.0) -> NodeSpec:
    return NodeSpec(id=node_id, x=x, y=y, boundary={"kind": "ellipse", "rx": rx, "ry": ry})


def _regular(n: int, r: float = 1.0) -> ConvexPolygon:
    return ConvexPolygon.from_points(
        Point(r * math.cos(2 * math.pi * k / n), r * math.sin(2 * math.pi * k / n)) for k in range(n)
    )


THREE_NODES = [_rect("a", 0, 0), _ellipse("b", 10, 1), _rect("c", 4, 8, 3, 1)]


class TestBoundaries:
    def test_rectangle_and_ellipse_sampling(self):
        assert sample_boundary(_rect("a", 1, 1)) == [Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2)]
        pts = sample_boundary(_ellipse("e", 0, 0, 2, 1), ellipse_samples=12)
        assert len(pts) == 12
        assert pts[0] == Point(2, 0)

    def test_polygon_offsets_are_relative(self):
        node = NodeSpec(id="p", x=5, y=5, boundary={"kind": "polygon", "points": [(-1, -1), (1, -1), (0, 2)]})
        assert sample_boundary(node)[2] == Point(5, 7)

    def test_reduce_corners_keeps_containment(self):
        octagon = _regular(8)
        for k in (7, 6, 5, 4):
            reduced = reduce_corners(octagon, k)
            assert len(reduced.vertices) <= k
            assert reduced.shape.buffer(1e-9).covers(octagon.shape)

    def test_padded_rectangle(self):
        hull = padded_hull(sample_boundary(_rect("a", 0, 0, 4, 2)), 1.0, 8)
        assert len(hull.vertices) == 4
        assert hull.area == pytest.approx(6 * 4)

    def test_padding_respects_corner_limit(self):
        hull = padded_hull(sample_boundary(_ellipse("e", 0, 0)), 0.5, 6)
        assert len(hull.vertices) <= 6


class TestBuildObstacles:
    def test_padding_reduced_until_disjoint(self):
        obstacles = build_obstacles([_rect("a", 0, 0), _rect("b", 3, 0)], padding=1.0)
        assert not obstacles[0].hull.shape.intersects(obstacles[1].hull.shape)
        assert all(ob.padding < 0.5 for ob in obstacles)

    def test_far_apart_keep_full_padding(self):
        obstacles = build_obstacles([_rect("a", 0, 0), _rect("b", 20, 0)], padding=1.0)
        assert [ob.padding for ob in obstacles] == [1.0, 1.0]

    def test_overlapping_boundaries_rejected(self):
        with pytest.raises(InputError, match="'a' and 'b' overlap"):
            build_obstacles([_rect("a", 0, 0), _rect("b", 1, 0)], padding=0.5)

    def test_center_outside_boundary(self):
        node = NodeSpec(id="p", x=0, y=0, boundary={"kind": "polygon", "points": [(1, 1), (3, 1), (2, 3)]})
        with pytest.raises(InvalidGeometryError, match="outside its boundary"):
            build_obstacles([node], padding=0.5)

    def test_augmented_ring_has_no_wide_gaps(self):
        ob = build_obstacles([_rect("a", 0, 0, 6, 1)], padding=0.5)[0]
        cone = math.pi / 6
        ring = augment_boundary_points(ob, cone).ring
        c = ob.center
        for a, b in zip(ring, ring[1:] + ring[:1]):
            assert angle_between(a - c, b - c) <= cone + 1e-9
        assert len(ring) >= 12


class TestRoutingGraph:
    def test_invariants_hold(self):
        graph = build_routing_graph(THREE_NODES, padding=0.5)
        assert verify_routing_graph(graph) == []
        assert nx.is_connected(graph.to_networkx())

    def test_centers_come_first_and_reach_their_ring(self):
        graph = build_routing_graph(THREE_NODES, padding=0.5)
        for ob in graph.obstacles:
            assert graph.is_center(ob.index)
            spokes = [w for w in graph.neighbors(ob.index) if graph.edge_kinds[graph.key(ob.index, w)] == "spoke"]
            assert len(spokes) == len(ob.ring)
            assert all(graph.owner[w] == ob.index for w in spokes)

    def test_obstacles_shrunk_inside_padding(self):
        graph = build_routing_graph(THREE_NODES, padding=0.5)
        for ob in graph.obstacles:
            assert ob.scale < 1.0
            assert ob.shrunk_hull.shape.covers(ob.boundary_shape)

    def test_clockwise_is_decreasing_angle(self):
        graph = build_routing_graph(THREE_NODES, padding=0.5)
        v = graph.obstacles[0].index
        p = graph.positions[v]
        angles = [(graph.positions[w] - p).angle() for w in graph.clockwise(v)]
        assert angles == sorted(angles, reverse=True)

    def test_copy_is_independent(self):
        graph = build_routing_graph(THREE_NODES, padding=0.5)
        clone = graph.copy()
        u, v = next(e for e, kind in graph.edge_kinds.items() if kind == "visibility")
        clone.remove_edge(u, v)
        assert graph.has_edge(u, v)
        assert not clone.has_edge(u, v)

    def test_empty_input(self):
        graph = build_routing_graph([], padding=0.5)
        assert graph.node_count == 0
        assert graph.edge_count == 0
