"""GraphInputV1 – positioned graph handed to the bundler.

Node positions are fixed; each node carries the boundary curve its edges attach
to. Polygon boundary points are offsets from the node position.
"""
from __future__ import annotations

import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator


class RectangleBoundary(BaseModel):
    kind: Literal["rectangle"] = "rectangle"
    width: float = Field(gt=0)
    height: float = Field(gt=0)


class EllipseBoundary(BaseModel):
    kind: Literal["ellipse"] = "ellipse"
    rx: float = Field(gt=0)
    ry: float = Field(gt=0)


class PolygonBoundary(BaseModel):
    kind: Literal["polygon"] = "polygon"
    points: list[tuple[float, float]] = Field(min_length=3)

    @field_validator("points")
    @classmethod
    def points_finite(cls, v: list[tuple[float, float]]) -> list[tuple[float, float]]:
        for x, y in v:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("polygon boundary points must be finite")
        return v


Boundary = Annotated[
    Union[RectangleBoundary, EllipseBoundary, PolygonBoundary],
    Field(discriminator="kind"),
]


class NodeSpec(BaseModel):
    id: str = Field(min_length=1)
    x: float
    y: float
    boundary: Boundary

    @field_validator("x", "y")
    @classmethod
    def coordinate_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("node coordinates must be finite")
        return v


class EdgeSpec(BaseModel):
    source: str
    target: str
    width: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def no_self_loop(self) -> "EdgeSpec":
        if self.source == self.target:
            raise ValueError(f"self-loop on node '{self.source}' is not allowed")
        return self


class GraphInputV1(BaseModel):
    schema_version: Literal["graph_input.v1"] = "graph_input.v1"

    nodes: list[NodeSpec] = Field(default_factory=list)
    edges: list[EdgeSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def references_consistent(self) -> "GraphInputV1":
        ids: set[str] = set()
        positions: dict[tuple[float, float], str] = {}
        for node in self.nodes:
            if node.id in ids:
                raise ValueError(f"duplicate node id '{node.id}'")
            ids.add(node.id)
            other = positions.get((node.x, node.y))
            if other is not None:
                raise ValueError(f"nodes '{other}' and '{node.id}' have coincident centers")
            positions[(node.x, node.y)] = node.id
        for i, edge in enumerate(self.edges):
            for end in (edge.source, edge.target):
                if end not in ids:
                    raise ValueError(f"edges.{i} references unknown node '{end}'")
        return self

    def node_index(self) -> dict[str, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}
