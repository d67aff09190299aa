"""Pipeline – routing, hub optimization, ordering and rendering end to end.

``run_pipeline`` takes a validated ``GraphInputV1`` and a resolved
``PipelineConfig`` and returns everything a caller may want to write out:
the result contract, the drawing and the intermediate structures.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Optional

import drawsvg as draw

from contracts.bundle_result_v1 import (
    BundleResultV1,
    BundleStatsV1,
    GraphSizes,
    OrderingReportV1,
    RouteRecord,
    StageTimings,
)
from contracts.graph_input_v1 import GraphInputV1
from contracts.order_instance_v1 import OrderInstanceV1

from .capacity import CapacityLedger, build_capacity_ledger
from .errors import InvariantViolation
from .log import log_event, stage_timer
from .nudger import Hub, optimize, prune_unused
from .ordering import OrderingOutcome, OrderInstance, compute_ordering, is_nice
from .renderer import RenderedPath, RenderOptions, build_rendered_paths, place_bundle_bases, render
from .router import CostParams, EdgeRequest, Path, RoutingState, route_all, routing_cost
from .routing_graph import RoutingGraph, build_routing_graph
from .settings import PipelineConfig


@dataclass
class PipelineResult:
    result: BundleResultV1
    routed_graph: RoutingGraph
    graph: RoutingGraph  # after pruning and optimization
    paths: list[Path]
    hubs: dict[int, Hub]
    ledger: CapacityLedger
    outcome: OrderingOutcome
    rendered: list[RenderedPath]
    drawing: draw.Drawing

    @property
    def stats(self) -> BundleStatsV1:
        return self.result.stats


def edge_requests(doc: GraphInputV1, config: PipelineConfig) -> list[EdgeRequest]:
    """One request per input edge; width from config override, then the edge, then the default."""
    index = doc.node_index()
    requests = []
    for i, edge in enumerate(doc.edges):
        if i in config.edge_widths:
            width = config.edge_widths[i]
        elif edge.width is not None:
            width = edge.width
        else:
            width = config.path_width
        requests.append(EdgeRequest(i, index[edge.source], index[edge.target], width, edge.source, edge.target))
    return requests


def route_records(doc: GraphInputV1, graph: RoutingGraph, paths: list[Path]) -> list[RouteRecord]:
    records = []
    for p in paths:
        edge = doc.edges[p.id]
        records.append(
            RouteRecord(
                edge_index=p.id,
                source=edge.source,
                target=edge.target,
                width=p.width,
                nodes=list(p.nodes),
                points=[q.as_tuple() for q in p.points(graph)],
                length=p.length(graph),
                straight_length=p.straight,
            )
        )
    return records


def run_pipeline(
    doc: GraphInputV1,
    config: PipelineConfig,
    *,
    run_id: str = "",
    timestamp: bool = True,
    trace_routing: bool = False,
    trace_nudge: bool = False,
    render_options: Optional[RenderOptions] = None,
) -> PipelineResult:
    timings: dict[str, float] = {}
    started = time.perf_counter()
    log_event("pipeline_start", run_id, nodes=len(doc.nodes), edges=len(doc.edges))

    with stage_timer("routing", timings, run_id):
        graph = build_routing_graph(
            doc.nodes,
            padding=float(config.padding),
            cone_angle=config.cone_angle,
            k_max=config.k_max_corners,
            ellipse_samples=config.ellipse_samples,
        )
        ledger = build_capacity_ledger(graph.obstacles, config.path_separation)
        params = CostParams.from_config(config)
        state = RoutingState(graph, ledger, params, trace=trace_routing)
        routed = route_all(
            state,
            edge_requests(doc, config),
            multi_dp_threshold=config.multi_dp_threshold,
            max_terminals=config.dp_max_terminals,
        )
        cost_routed = state.cost()

    with stage_timer("optimization", timings, run_id):
        # the optimizer rewrites node lists in place; keep the routed paths intact
        working = [replace(p, nodes=list(p.nodes)) for p in routed]
        pruned = prune_unused(graph.copy(), working)
        opt = optimize(
            pruned, working, params, config.optimizer, overflow=ledger.total, trace=trace_nudge, run_id=run_id
        )
        cost_final = routing_cost(opt.graph, opt.paths, params, ledger.total)
        if cost_final.total > cost_routed.total + 1e-6 * max(1.0, cost_routed.total):
            log_event(
                "optimization_cost_increase",
                run_id,
                "optimization",
                routed=cost_routed.total,
                final=cost_final.total,
            )
        log_event("optimization_moves", run_id, "optimization", **dict(sorted(opt.moves.items())))

    with stage_timer("ordering", timings, run_id):
        instance = OrderInstance.from_routing(opt.graph, opt.paths)
        outcome = compute_ordering(instance, config.ordering)
        if not outcome.ordering.covers(instance):
            raise InvariantViolation("ordering does not cover every used edge")

    generated = datetime.now(timezone.utc) if timestamp else None
    with stage_timer("rendering", timings, run_id):
        bases = place_bundle_bases(opt.graph, opt.paths, outcome.ordering, opt.hubs, config.path_separation)
        rendered = build_rendered_paths(opt.graph, opt.paths, bases, run_id=run_id)
        options = render_options or RenderOptions()
        options = replace(options, timestamp=generated.isoformat() if generated else None)
        drawing = render(opt.graph, rendered, opt.hubs, options)

    timings["overall"] = time.perf_counter() - started
    stats = BundleStatsV1(
        k_ink=config.k_ink,
        k_len=config.k_len,
        k_cap=float(config.k_cap),
        sizes=GraphSizes(
            nodes=len(doc.nodes),
            edges=len(doc.edges),
            routing_nodes=graph.node_count,
            routing_edges=graph.edge_count,
            pruned_nodes=opt.graph.node_count,
            pruned_edges=opt.graph.edge_count,
            capacity_segments=len(ledger.segments),
        ),
        cost_routed=cost_routed,
        cost_final=cost_final,
        crossings=outcome.crossings,
        unavoidable_crossings=outcome.unavoidable,
        ordering_algorithm=outcome.algorithm,
        timings=StageTimings(**timings) if timestamp else None,
        config=config.model_dump(mode="json"),
        generated_at=generated,
    )
    log_event(
        "pipeline_done",
        run_id,
        cost=round(cost_final.total, 6),
        crossings=outcome.crossings,
        unavoidable=outcome.unavoidable,
    )
    return PipelineResult(
        result=BundleResultV1(stats=stats, routes=route_records(doc, opt.graph, opt.paths)),
        routed_graph=graph,
        graph=opt.graph,
        paths=opt.paths,
        hubs=opt.hubs,
        ledger=ledger,
        outcome=outcome,
        rendered=rendered,
        drawing=drawing,
    )


# ── ordering only ─────────────────────────────────────────────────────────────


def ordering_report(instance: OrderInstance, outcome: OrderingOutcome, name: str = "") -> OrderingReportV1:
    orders = {
        f"{instance.node_name(u)}|{instance.node_name(v)}": [instance.path_name(pid) for pid in ids]
        for (u, v), ids in outcome.ordering.orders.items()
    }
    return OrderingReportV1(
        instance=name,
        algorithm=outcome.algorithm,
        crossings=outcome.crossings,
        unavoidable_crossings=outcome.unavoidable,
        nice=outcome.nice,
        orders=orders,
    )


def run_ordering_only(
    doc: OrderInstanceV1, algorithm: str, *, run_id: str = ""
) -> tuple[OrderInstance, OrderingOutcome, OrderingReportV1]:
    """Order a standalone instance; niceness is always reported."""
    instance = OrderInstance.from_contract(doc)
    outcome = compute_ordering(instance, algorithm)  # type: ignore[arg-type]
    if outcome.nice is None:
        outcome = replace(outcome, nice=is_nice(instance, outcome.ordering))
    if doc.expected_crossings is not None and doc.expected_crossings != outcome.crossings:
        log_event(
            "expected_crossings_mismatch",
            run_id,
            "ordering",
            instance=doc.name,
            expected=doc.expected_crossings,
            got=outcome.crossings,
        )
    log_event("ordering_done", run_id, "ordering", algorithm=outcome.algorithm, crossings=outcome.crossings)
    return instance, outcome, ordering_report(instance, outcome, doc.name)
