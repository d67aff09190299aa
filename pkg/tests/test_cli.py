"""CLI: outputs, config reuse and exit codes."""
import json
from pathlib import Path

import pytest
from bundler import cli
from bundler.errors import LedgerError, UnroutableEdgeError

FIXTURES = Path(__file__).resolve().parent / "fixtures"
GRAPH = str(FIXTURES / "small_graph.json")
FOUR_TERMINAL = str(FIXTURES / "four_terminal.json")


@pytest.fixture(autouse=True)
def _quiet(monkeypatch):
    monkeypatch.setenv("BUNDLER_LOG", "0")
    for name in ("BUNDLER_K_LEN", "BUNDLER_K_INK", "BUNDLER_K_CAP", "BUNDLER_ORDERING"):
        monkeypatch.delenv(name, raising=False)


def _exit_code(argv: list[str]) -> int:
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    return exc.value.code


class TestBundling:
    def test_writes_all_outputs(self, tmp_path, capsys):
        svg, routes, stats = tmp_path / "out.svg", tmp_path / "routes.json", tmp_path / "stats.json"
        cli.main([GRAPH, "--svg", str(svg), "--routes", str(routes), "--stats", str(stats), "--show-hubs"])
        out = capsys.readouterr().out
        assert "[bundler] 4 nodes, 5 edges, k_cap=5010" in out
        assert f"[bundler] wrote drawing to {svg}" in out
        assert svg.read_text().startswith("<?xml")
        result = json.loads(routes.read_text())
        assert result["schema_version"] == "bundle_result.v1"
        assert len(result["routes"]) == 5
        assert json.loads(stats.read_text())["schema_version"] == "bundle_stats.v1"

    def test_no_timestamp_is_byte_identical(self, tmp_path):
        outputs = []
        for i in range(2):
            svg, routes = tmp_path / f"{i}.svg", tmp_path / f"{i}.json"
            cli.main([GRAPH, "--no-timestamp", "--svg", str(svg), "--routes", str(routes)])
            outputs.append((svg.read_bytes(), routes.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_stats_file_replays_config(self, tmp_path):
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        cli.main([GRAPH, "--k-len", "7", "--separation", "0.5", "--stats", str(first)])
        cli.main([GRAPH, "--config", str(first), "--stats", str(second)])
        config = json.loads(second.read_text())["config"]
        assert config["k_len"] == 7.0
        assert config["path_separation"] == 0.5
        assert config["k_cap"] == pytest.approx(80.0)

    def test_dump_capacity(self, capsys):
        cli.main([GRAPH, "--dump-capacity"])
        assert "total overflow:" in capsys.readouterr().out


class TestOrderingOnly:
    def test_report(self, tmp_path, capsys):
        orders = tmp_path / "orders.json"
        cli.main([FOUR_TERMINAL, "--ordering-only", "--ordering", "both", "--orders", str(orders)])
        assert "1 crossings (1 unavoidable), algorithm=both" in capsys.readouterr().out
        report = json.loads(orders.read_text())
        assert report["schema_version"] == "ordering_report.v1"
        assert report["crossings"] == 1
        assert report["nice"] is True

    def test_terminal_property_violation(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {
                    "nodes": [{"id": "a"}, {"id": "b", "x": 1}, {"id": "c", "x": 2}],
                    "edges": [["a", "b"], ["b", "c"]],
                    "paths": [{"id": "long", "nodes": ["a", "b", "c"]}, {"id": "short", "nodes": ["a", "b"]}],
                }
            )
        )
        assert _exit_code([str(bad), "--ordering-only"]) == 2
        assert "node 'b' is a terminal of path 'short'" in capsys.readouterr().err


class TestExitCodes:
    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"nodes": [')
        assert _exit_code([str(bad)]) == 2
        assert "invalid JSON at line 1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert _exit_code([str(tmp_path / "absent.json")]) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_schema_violation(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"nodes": [], "edges": [{"source": "a", "target": "b"}]}))
        assert _exit_code([str(bad)]) == 2
        assert "references unknown node 'a'" in capsys.readouterr().err

    def test_overlapping_nodes(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        rect = {"kind": "rectangle", "width": 2, "height": 2}
        nodes = [{"id": "a", "x": 0, "y": 0, "boundary": rect}, {"id": "b", "x": 1, "y": 0, "boundary": rect}]
        bad.write_text(json.dumps({"nodes": nodes}))
        assert _exit_code([str(bad)]) == 2
        assert "overlap" in capsys.readouterr().err

    def test_unroutable_edge(self, monkeypatch, capsys):
        def unroutable(*args, **kwargs):
            raise UnroutableEdgeError(3, "depot", "tower", 12)

        monkeypatch.setattr(cli, "run_pipeline", unroutable)
        assert _exit_code([GRAPH]) == 3
        assert "edge 3 (depot -> tower) is unroutable" in capsys.readouterr().err

    def test_invariant_violation(self, monkeypatch, capsys):
        def broken(*args, **kwargs):
            raise LedgerError("path 0 already assigned")

        monkeypatch.setattr(cli, "run_pipeline", broken)
        assert _exit_code([GRAPH]) == 4
        assert "[bundler] error: path 0 already assigned" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path, capsys):
        target = tmp_path / "missing" / "out.svg"
        assert _exit_code([GRAPH, "--svg", str(target)]) == 2
        assert f"[bundler] error: cannot write drawing to {target}" in capsys.readouterr().err

    def test_bad_config_value(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"path_separation": -1}))
        assert _exit_code([GRAPH, "--config", str(config)]) == 2
        assert "path_separation" in capsys.readouterr().err
