import pytest
from contracts.graph_input_v1 import EdgeSpec, GraphInputV1


def _node(node_id: str, x: float, y: float, **boundary):
    boundary = boundary or {"kind": "rectangle", "width": 4.0, "height": 2.0}
    return {"id": node_id, "x": x, "y": y, "boundary": boundary}


def test_valid_graph():
    g = GraphInputV1(
        nodes=[_node("a", 0, 0), _node("b", 10, 0, kind="ellipse", rx=2, ry=1)],
        edges=[{"source": "a", "target": "b"}],
    )
    assert g.schema_version == "graph_input.v1"
    assert g.nodes[1].boundary.kind == "ellipse"
    assert g.edges[0].width is None
    assert g.node_index() == {"a": 0, "b": 1}


def test_polygon_boundary():
    g = GraphInputV1(
        nodes=[_node("p", 0, 0, kind="polygon", points=[(-1, -1), (1, -1), (0, 2)])],
    )
    assert len(g.nodes[0].boundary.points) == 3


def test_rejects_self_loop():
    with pytest.raises(ValueError, match="self-loop"):
        EdgeSpec(source="a", target="a")


def test_rejects_unknown_endpoint():
    with pytest.raises(ValueError, match="unknown node 'zz'"):
        GraphInputV1(nodes=[_node("a", 0, 0)], edges=[{"source": "a", "target": "zz"}])


def test_rejects_coincident_centers():
    with pytest.raises(ValueError, match="coincident centers"):
        GraphInputV1(nodes=[_node("a", 1, 1), _node("b", 1, 1)])


def test_rejects_duplicate_ids():
    with pytest.raises(ValueError, match="duplicate node id"):
        GraphInputV1(nodes=[_node("a", 0, 0), _node("a", 5, 5)])


def test_rejects_non_positive_size():
    with pytest.raises(Exception):
        GraphInputV1(nodes=[_node("a", 0, 0, kind="rectangle", width=0, height=2)])


def test_rejects_negative_width():
    with pytest.raises(Exception):
        EdgeSpec(source="a", target="b", width=-1)


def test_rejects_nan_coordinate():
    with pytest.raises(ValueError, match="finite"):
        GraphInputV1(nodes=[_node("a", float("nan"), 0)])
