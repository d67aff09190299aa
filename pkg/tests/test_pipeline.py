"""End-to-end pipeline runs on small positioned graphs."""
import json
from pathlib import Path

import pytest
import shapely
from bundler.ordering import OrderInstance
from bundler.pipeline import edge_requests, run_ordering_only, run_pipeline
from bundler.settings import PipelineConfig
from bundler.synthetic import random_graph_input
from contracts.graph_input_v1 import GraphInputV1
from contracts.order_instance_v1 import OrderInstanceV1

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _load_fixture(name: str) -> dict:
    with open(FIXTURES / name) as f:
        return json.load(f)


def _assert_curves_avoid_other_obstacles(run) -> None:
    ends = {p.id: (p.source, p.target) for p in run.paths}
    for rp in run.rendered:
        pts = rp.sample(128)
        xs = [q.x for q in pts]
        ys = [q.y for q in pts]
        for ob in run.graph.obstacles:
            if ob.index in ends[rp.edge_index]:
                continue
            assert not shapely.contains_xy(ob.shrunk_hull.shape, xs, ys).any(), (rp.edge_index, ob.node_id)


def _rect(node_id: str, x: float, y: float, side: float = 2.0) -> dict:
    return {"id": node_id, "x": x, "y": y, "boundary": {"kind": "rectangle", "width": side, "height": side}}


@pytest.fixture(autouse=True)
def _quiet(monkeypatch):
    monkeypatch.setenv("BUNDLER_LOG", "0")


class TestMinimalRuns:
    def test_two_nodes_one_edge(self):
        doc = GraphInputV1(nodes=[_rect("a", 0, 0), _rect("b", 10, 0)], edges=[{"source": "a", "target": "b"}])
        run = run_pipeline(doc, PipelineConfig(), timestamp=False)
        assert len(run.rendered) == 1
        assert run.stats.crossings == 0
        assert run.stats.sizes.nodes == 2
        assert run.stats.k_cap == pytest.approx(5010.0)
        assert run.stats.timings is None
        assert run.stats.generated_at is None
        route = run.result.routes[0]
        assert (route.source, route.target) == ("a", "b")
        assert route.nodes[0] == 0 and route.nodes[-1] == 1
        assert route.length >= route.straight_length - 1e-9

    def test_no_edges(self):
        doc = GraphInputV1(nodes=[_rect("a", 0, 0)], edges=[])
        run = run_pipeline(doc, PipelineConfig(), timestamp=False)
        assert run.result.routes == []
        assert run.stats.cost_final.total == 0.0
        assert 'id="node-a"' in run.drawing.as_svg()

    def test_route_avoids_node_in_the_way(self):
        doc = GraphInputV1(
            nodes=[_rect("a", 0, 0), _rect("b", 10, 0.3), _rect("c", 20, 0)],
            edges=[{"source": "a", "target": "c"}],
        )
        run = run_pipeline(doc, PipelineConfig(), timestamp=False)
        middle = run.graph.obstacles[1].boundary_shape.buffer(-1e-3)
        curve = shapely.LineString([q.as_tuple() for q in run.rendered[0].sample(64)])
        assert not curve.intersects(middle)
        assert 1 not in run.result.routes[0].nodes


class TestFixtureGraph:
    def test_full_run(self):
        doc = GraphInputV1.model_validate(_load_fixture("small_graph.json"))
        run = run_pipeline(doc, PipelineConfig())
        assert [r.edge_index for r in run.result.routes] == list(range(5))
        assert run.stats.crossings == run.stats.unavoidable_crossings
        assert run.stats.timings is not None
        assert run.stats.timings.overall >= run.stats.timings.routing
        assert run.stats.sizes.capacity_segments == len(run.ledger.segments)
        assert run.ledger.total == pytest.approx(run.ledger.recompute_total(), abs=1e-9)
        assert run.outcome.ordering.covers(OrderInstance.from_routing(run.graph, run.paths))
        for rp in run.rendered:
            for a, b in zip(rp.pieces, rp.pieces[1:]):
                assert a.end.distance_to(b.start) <= 1e-9
        assert run.result.routes[4].width == 2.0
        _assert_curves_avoid_other_obstacles(run)

    def test_deterministic_without_timestamp(self):
        doc = GraphInputV1.model_validate(_load_fixture("small_graph.json"))
        first = run_pipeline(doc, PipelineConfig(), timestamp=False)
        second = run_pipeline(doc, PipelineConfig(), timestamp=False)
        assert first.drawing.as_svg() == second.drawing.as_svg()
        assert first.result.model_dump_json() == second.result.model_dump_json()

    def test_width_precedence(self):
        doc = GraphInputV1.model_validate(_load_fixture("small_graph.json"))
        config = PipelineConfig(path_width=1.5, edge_widths={4: 0.5, 0: 3.0})
        widths = [r.width for r in edge_requests(doc, config)]
        assert widths == [3.0, 1.5, 1.5, 1.5, 0.5]

    @pytest.mark.parametrize("algorithm", ["simple", "linear", "both"])
    def test_ordering_algorithms_agree(self, algorithm):
        doc = GraphInputV1.model_validate(_load_fixture("small_graph.json"))
        run = run_pipeline(doc, PipelineConfig(ordering=algorithm), timestamp=False)
        assert run.stats.crossings == run.stats.unavoidable_crossings
        assert run.stats.ordering_algorithm == algorithm


class TestRandomGraphs:
    def test_random_inputs_run_clean(self):
        for seed in range(3):
            doc = random_graph_input(8, 10, seed=seed)
            run = run_pipeline(doc, PipelineConfig(), timestamp=False)
            assert len(run.result.routes) == 10
            assert run.stats.crossings == run.stats.unavoidable_crossings
            _assert_curves_avoid_other_obstacles(run)


class TestOrderingOnly:
    def test_four_terminal_report(self):
        doc = OrderInstanceV1.model_validate(_load_fixture("four_terminal.json"))
        _, outcome, report = run_ordering_only(doc, "linear")
        assert report.crossings == doc.expected_crossings == 1
        assert report.nice is True
        assert report.instance == "four_terminal"
        assert sorted(report.orders["west_hub|east_hub"]) == ["nw_ne", "nw_se", "sw_ne", "sw_se"]
        assert outcome.unavoidable == 1
