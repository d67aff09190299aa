"""OrderInstanceV1 – standalone path-ordering instance.

An embedded graph (node positions, optional explicit clockwise neighbour lists)
plus the simple paths whose per-edge order is to be computed.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class OrderNode(BaseModel):
    id: str = Field(min_length=1)
    x: float = 0.0
    y: float = 0.0


class OrderPath(BaseModel):
    id: str = Field(min_length=1)
    nodes: list[str] = Field(min_length=2)


class OrderInstanceV1(BaseModel):
    schema_version: Literal["order_instance.v1"] = "order_instance.v1"

    name: str = ""
    nodes: list[OrderNode] = Field(default_factory=list)
    edges: list[tuple[str, str]] = Field(default_factory=list)
    clockwise: Optional[dict[str, list[str]]] = None
    paths: list[OrderPath] = Field(default_factory=list)
    expected_crossings: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def structure_consistent(self) -> "OrderInstanceV1":
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids in order instance")
        known = set(ids)

        adjacency: dict[str, set[str]] = {i: set() for i in ids}
        for i, (u, v) in enumerate(self.edges):
            if u not in known or v not in known:
                raise ValueError(f"edges.{i} references an unknown node")
            if u == v:
                raise ValueError(f"edges.{i} is a self-loop on '{u}'")
            if v in adjacency[u]:
                raise ValueError(f"edges.{i} duplicates edge {u}-{v}")
            adjacency[u].add(v)
            adjacency[v].add(u)

        if self.clockwise is not None:
            for node, order in self.clockwise.items():
                if node not in known:
                    raise ValueError(f"clockwise order given for unknown node '{node}'")
                if sorted(order) != sorted(adjacency[node]):
                    raise ValueError(f"clockwise order of '{node}' is not a permutation of its neighbours")

        path_ids = [p.id for p in self.paths]
        if len(set(path_ids)) != len(path_ids):
            raise ValueError("duplicate path ids in order instance")
        for p in self.paths:
            if len(set(p.nodes)) != len(p.nodes):
                raise ValueError(f"path '{p.id}' is not simple")
            for a, b in zip(p.nodes, p.nodes[1:]):
                if a not in known or b not in adjacency[a]:
                    raise ValueError(f"path '{p.id}' uses missing edge {a}-{b}")
        return self
