"""BundleResultV1 – routes, cost breakdown and run statistics."""
from __future__ import annotations

from datetime import datetime
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class CostBreakdown(BaseModel):
    ink: float = Field(default=0.0, ge=0)
    length_term: float = Field(default=0.0, ge=0)
    overflow: float = Field(default=0.0, ge=0)
    total: float = Field(default=0.0, ge=0)


class GraphSizes(BaseModel):
    nodes: int = Field(default=0, ge=0)
    edges: int = Field(default=0, ge=0)
    routing_nodes: int = Field(default=0, ge=0)
    routing_edges: int = Field(default=0, ge=0)
    pruned_nodes: int = Field(default=0, ge=0)
    pruned_edges: int = Field(default=0, ge=0)
    capacity_segments: int = Field(default=0, ge=0)


class StageTimings(BaseModel):
    routing: float = Field(default=0.0, ge=0)
    optimization: float = Field(default=0.0, ge=0)
    ordering: float = Field(default=0.0, ge=0)
    rendering: float = Field(default=0.0, ge=0)
    overall: float = Field(default=0.0, ge=0)


class RouteRecord(BaseModel):
    edge_index: int = Field(ge=0)
    source: str
    target: str
    width: float = Field(ge=0)
    nodes: list[int] = Field(min_length=2)
    points: list[tuple[float, float]] = Field(min_length=2)
    length: float = Field(ge=0)
    straight_length: float = Field(gt=0)

    @model_validator(mode="after")
    def points_match_nodes(self) -> "RouteRecord":
        if len(self.points) != len(self.nodes):
            raise ValueError(
                f"route {self.edge_index} has {len(self.nodes)} nodes but {len(self.points)} points"
            )
        return self


class BundleStatsV1(BaseModel):
    schema_version: Literal["bundle_stats.v1"] = "bundle_stats.v1"

    k_ink: float
    k_len: float
    k_cap: float
    sizes: GraphSizes = Field(default_factory=GraphSizes)
    cost_routed: CostBreakdown = Field(default_factory=CostBreakdown)
    cost_final: CostBreakdown = Field(default_factory=CostBreakdown)
    crossings: int = Field(default=0, ge=0)
    unavoidable_crossings: int = Field(default=0, ge=0)
    ordering_algorithm: str = "linear"
    timings: Optional[StageTimings] = None
    config: dict[str, Any] = Field(default_factory=dict)
    generated_at: Optional[datetime] = None


class OrderingReportV1(BaseModel):
    schema_version: Literal["ordering_report.v1"] = "ordering_report.v1"

    instance: str = ""
    algorithm: str
    crossings: int = Field(ge=0)
    unavoidable_crossings: int = Field(ge=0)
    nice: Optional[bool] = None
    # "u|v" -> path ids left to right travelling from u to v
    orders: dict[str, list[str]] = Field(default_factory=dict)


class BundleResultV1(BaseModel):
    schema_version: Literal["bundle_result.v1"] = "bundle_result.v1"

    stats: BundleStatsV1
    routes: list[RouteRecord] = Field(default_factory=list)
