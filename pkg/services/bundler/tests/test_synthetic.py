"""Seeded synthetic inputs."""
import networkx as nx
import pytest
from bundler.errors import InputError
from bundler.ordering import OrderInstance
from bundler.routing_graph import build_obstacles
from bundler.synthetic import random_graph_input, random_order_instance, random_tree_instance


class TestRandomGraphInput:
    def test_sizes_and_determinism(self):
        doc = random_graph_input(12, 20, seed=4)
        assert len(doc.nodes) == 12
        assert len(doc.edges) == 20
        assert len({(e.source, e.target) for e in doc.edges}) == 20
        assert doc == random_graph_input(12, 20, seed=4)
        assert doc != random_graph_input(12, 20, seed=5)

    def test_boundaries_are_disjoint(self):
        doc = random_graph_input(15, 10, seed=1)
        obstacles = build_obstacles(doc.nodes, padding=0.5)
        for a in obstacles:
            for b in obstacles[a.index + 1 :]:
                assert not a.boundary_shape.intersects(b.boundary_shape)

    def test_too_many_edges(self):
        with pytest.raises(InputError, match="at most 3 distinct edges"):
            random_graph_input(3, 4)


class TestRandomOrderInstances:
    def test_terminal_property_holds(self):
        for seed in range(20):
            doc = random_order_instance(10, 5, seed=seed)
            inst = OrderInstance.from_contract(doc)
            assert len(doc.paths) <= 5
            for nodes in inst.paths.values():
                assert not set(nodes[1:-1]) & inst.terminals

    def test_graph_is_connected(self):
        inst = OrderInstance.from_contract(random_order_instance(15, 4, seed=3))
        assert nx.is_connected(inst.graph())

    def test_needs_three_nodes(self):
        with pytest.raises(InputError):
            random_order_instance(2, 1)

    def test_tree_instance(self):
        doc = random_tree_instance(9, 4, seed=2)
        inst = OrderInstance.from_contract(doc)
        assert nx.is_tree(inst.graph())
        assert len(doc.paths) == 4
        assert doc.name == "tree-2"
