import pytest
from contracts.bundle_result_v1 import BundleStatsV1, RouteRecord
from contracts.order_instance_v1 import OrderInstanceV1


def _line_instance(**extra):
    payload = {
        "nodes": [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 1, "y": 0}, {"id": "c", "x": 2, "y": 0}],
        "edges": [("a", "b"), ("b", "c")],
        "paths": [{"id": "p1", "nodes": ["a", "b", "c"]}],
    }
    payload.update(extra)
    return payload


class TestOrderInstance:
    def test_valid(self):
        inst = OrderInstanceV1(**_line_instance())
        assert inst.schema_version == "order_instance.v1"
        assert inst.clockwise is None

    def test_path_must_follow_edges(self):
        with pytest.raises(ValueError, match="missing edge a-c"):
            OrderInstanceV1(**_line_instance(paths=[{"id": "p1", "nodes": ["a", "c"]}]))

    def test_path_must_be_simple(self):
        with pytest.raises(ValueError, match="not simple"):
            OrderInstanceV1(**_line_instance(paths=[{"id": "p1", "nodes": ["a", "b", "a"]}]))

    def test_clockwise_must_permute_neighbours(self):
        with pytest.raises(ValueError, match="not a permutation"):
            OrderInstanceV1(**_line_instance(clockwise={"b": ["a"]}))

    def test_duplicate_edge(self):
        with pytest.raises(ValueError, match="duplicates edge"):
            OrderInstanceV1(**_line_instance(edges=[("a", "b"), ("b", "a"), ("b", "c")]))


class TestRouteRecord:
    def test_points_match_nodes(self):
        with pytest.raises(ValueError, match="has 2 nodes but 3 points"):
            RouteRecord(
                edge_index=0, source="a", target="b", width=1.0,
                nodes=[0, 1], points=[(0, 0), (1, 0), (2, 0)],
                length=2.0, straight_length=2.0,
            )

    def test_stats_defaults(self):
        stats = BundleStatsV1(k_ink=1, k_len=500, k_cap=5010)
        assert stats.crossings == 0
        assert stats.timings is None
        assert stats.schema_version == "bundle_stats.v1"
