"""CLI entrypoint for the metro-line bundler.

Usage:
    # Bundle a positioned graph and write the drawing, routes and stats:
    python -m bundler graph.json --svg out.svg --routes routes.json --stats stats.json

    # Deterministic run (no timestamp, no wall-clock timings):
    python -m bundler graph.json --svg out.svg --no-timestamp

    # Re-run with the config recorded in an earlier stats file:
    python -m bundler graph.json --config stats.json --svg again.svg

    # Order the paths of a standalone ordering instance:
    python -m bundler instance.json --ordering-only --ordering both --orders orders.json

Environment variables (a local .env is read first):
    BUNDLER_K_INK, BUNDLER_K_LEN, BUNDLER_K_CAP   cost weights
    BUNDLER_WIDTH, BUNDLER_SEPARATION            path width and separation
    BUNDLER_CONE_ANGLE, BUNDLER_ORDERING         routing graph cone, ordering algorithm
    BUNDLER_SEED                                 seed recorded with the config
    BUNDLER_LOG=0                                silence JSON event lines
"""
from __future__ import annotations

import argparse
import json
import sys
import uuid
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from contracts.graph_input_v1 import GraphInputV1
from contracts.order_instance_v1 import OrderInstanceV1

from .errors import BundlerError
from .pipeline import run_ordering_only, run_pipeline
from .renderer import RenderOptions
from .settings import load_settings


class CliInputError(Exception):
    """Unreadable or malformed input, reported with exit code 2."""


def _parse_args(argv: Optional[list[str]]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="metroline", description="Ordered metro-line edge bundling")
    parser.add_argument("input", help="graph_input.v1 JSON (order_instance.v1 with --ordering-only)")
    parser.add_argument("--config", help="pipeline config JSON or a bundle_stats.v1 file from an earlier run")

    cost = parser.add_argument_group("routing cost")
    cost.add_argument("--k-ink", type=float)
    cost.add_argument("--k-len", type=float)
    cost.add_argument("--k-cap", type=float)
    cost.add_argument("--width", type=float, help="default path width")
    cost.add_argument("--separation", type=float, help="gap between adjacent paths")
    cost.add_argument("--cone-angle", type=float, help="visibility cone angle in radians")
    cost.add_argument("--multi-dp", type=int, metavar="N", help="route centers with >= N edges jointly")

    parser.add_argument("--ordering", choices=["simple", "linear", "both", "nice"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--ordering-only", action="store_true", help="order a standalone instance")

    out = parser.add_argument_group("outputs")
    out.add_argument("--svg", metavar="OUT")
    out.add_argument("--routes", metavar="OUT", help="bundle_result.v1 JSON (stats and routes)")
    out.add_argument("--stats", metavar="OUT", help="bundle_stats.v1 JSON")
    out.add_argument("--orders", metavar="OUT", help="ordering_report.v1 JSON (with --ordering-only)")
    out.add_argument("--no-timestamp", action="store_true", help="byte-identical outputs across runs")
    out.add_argument("--show-obstacles", action="store_true")
    out.add_argument("--show-hubs", action="store_true")

    debug = parser.add_argument_group("debugging")
    debug.add_argument("--dump-capacity", action="store_true", help="print the capacity segment table")
    debug.add_argument("--trace-routing", action="store_true")
    debug.add_argument("--trace-nudge", action="store_true", help="log every accepted optimizer move")
    return parser.parse_args(argv)


def _read_json(path: str) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise CliInputError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise CliInputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e


def _validation_message(path: str, err: ValidationError) -> str:
    first = err.errors()[0]
    where = ".".join(str(part) for part in first["loc"]) or "<root>"
    more = f" (+{err.error_count() - 1} more)" if err.error_count() > 1 else ""
    return f"{path}: {where}: {first['msg']}{more}"


def _write(path: str, text: str, what: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliInputError(f"cannot write {what} to {path}: {e.strerror}") from e
    print(f"[bundler] wrote {what} to {path}")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "k_ink": args.k_ink,
        "k_len": args.k_len,
        "k_cap": args.k_cap,
        "path_width": args.width,
        "path_separation": args.separation,
        "cone_angle": args.cone_angle,
        "multi_dp_threshold": args.multi_dp,
        "ordering": args.ordering,
        "seed": args.seed,
    }


def _run_ordering_only(args: argparse.Namespace, run_id: str) -> None:
    try:
        doc = OrderInstanceV1.model_validate(_read_json(args.input))
    except ValidationError as e:
        raise CliInputError(_validation_message(args.input, e)) from e
    algorithm = args.ordering or "linear"
    instance, outcome, report = run_ordering_only(doc, algorithm, run_id=run_id)
    print(
        f"[bundler] {len(instance.paths)} paths on {len(instance.edge_paths)} edges: "
        f"{outcome.crossings} crossings ({outcome.unavoidable} unavoidable), algorithm={outcome.algorithm}"
    )
    if doc.expected_crossings is not None and doc.expected_crossings != outcome.crossings:
        print(f"[bundler] expected {doc.expected_crossings} crossings")
    if args.orders:
        _write(args.orders, report.model_dump_json(indent=2), "orders")


def _run_bundling(args: argparse.Namespace, run_id: str) -> None:
    try:
        config = load_settings(args.config, _overrides(args))
    except ValidationError as e:
        raise CliInputError(_validation_message(args.config or "config", e)) from e
    except OSError as e:
        raise CliInputError(f"cannot read {args.config}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise CliInputError(f"{args.config}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e

    try:
        doc = GraphInputV1.model_validate(_read_json(args.input))
    except ValidationError as e:
        raise CliInputError(_validation_message(args.input, e)) from e

    print(f"[bundler] {len(doc.nodes)} nodes, {len(doc.edges)} edges, k_cap={config.k_cap:g}")
    result = run_pipeline(
        doc,
        config,
        run_id=run_id,
        timestamp=not args.no_timestamp,
        trace_routing=args.trace_routing,
        trace_nudge=args.trace_nudge,
        render_options=RenderOptions(show_obstacles=args.show_obstacles, show_hubs=args.show_hubs),
    )
    stats = result.stats
    print(
        f"[bundler] cost {stats.cost_routed.total:.3f} routed, {stats.cost_final.total:.3f} final; "
        f"{stats.crossings} crossings ({stats.unavoidable_crossings} unavoidable)"
    )
    if args.dump_capacity:
        print(result.ledger.format_table())
    if args.svg:
        _write(args.svg, result.drawing.as_svg(), "drawing")
    if args.routes:
        _write(args.routes, result.result.model_dump_json(indent=2), "routes")
    if args.stats:
        _write(args.stats, stats.model_dump_json(indent=2), "stats")


def main(argv: Optional[list[str]] = None) -> None:
    load_dotenv()
    args = _parse_args(argv)
    run_id = uuid.uuid4().hex[:12]
    try:
        if args.ordering_only:
            _run_ordering_only(args, run_id)
        else:
            _run_bundling(args, run_id)
    except CliInputError as e:
        print(f"[bundler] error: {e}", file=sys.stderr)
        sys.exit(2)
    except BundlerError as e:
        print(f"[bundler] error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except ValidationError as e:
        print(f"[bundler] error: {_validation_message(args.input, e)}", file=sys.stderr)
        sys.exit(2)


if __name__ == "__main__":
    main()
