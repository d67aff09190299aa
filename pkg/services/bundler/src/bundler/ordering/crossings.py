"""Crossings between path pairs along their maximal common subpaths.

Each shared stretch of two paths is a ``CommonRun``. At either end the two paths
either both terminate or fork; a fork fixes which path must be on the left for
the pair to separate without crossing. A run whose two forks disagree crosses
under every ordering.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .instance import BundleOrdering, OrderInstance, edge_key


@dataclass(frozen=True)
class CommonRun:
    first: int
    second: int
    nodes: tuple[int, ...]  # oriented along ``first``
    start_left: Optional[bool]  # side of ``first`` demanded by the fork at nodes[0]
    end_left: Optional[bool]

    @property
    def unavoidable(self) -> bool:
        return self.start_left is not None and self.end_left is not None and self.start_left != self.end_left

    def sides(self, ordering: BundleOrdering) -> list[bool]:
        return [ordering.left_of(self.first, self.second, a, b) for a, b in zip(self.nodes, self.nodes[1:])]

    def crossings(self, ordering: BundleOrdering) -> int:
        sides = self.sides(ordering)
        n = sum(1 for a, b in zip(sides, sides[1:]) if a != b)
        if self.start_left is not None and self.start_left != sides[0]:
            n += 1
        if self.end_left is not None and self.end_left != sides[-1]:
            n += 1
        return n


def _runs_of_pair(instance: OrderInstance, p: int, q: int) -> list[CommonRun]:
    nodes = instance.paths[p]
    shared = instance.path_edges(q)
    runs: list[CommonRun] = []
    i = 0
    last = len(nodes) - 1
    while i < last:
        if edge_key(nodes[i], nodes[i + 1]) not in shared:
            i += 1
            continue
        j = i
        while j + 1 < last and edge_key(nodes[j + 1], nodes[j + 2]) in shared:
            j += 1
        run = nodes[i : j + 2]
        qs, b = instance.aligned(q, run[0], run[1])
        k = len(run) - 1

        start_left = None
        if i > 0 and b > 0:
            c0, c1 = run[0], run[1]
            start_left = instance.rank(c0, c1, nodes[i - 1]) > instance.rank(c0, c1, qs[b - 1])
        end_left = None
        if j + 2 <= last and b + k + 1 < len(qs):
            ck, prev = run[-1], run[-2]
            end_left = instance.rank(ck, prev, nodes[j + 2]) < instance.rank(ck, prev, qs[b + k + 1])
        runs.append(CommonRun(p, q, tuple(run), start_left, end_left))
        i = j + 1
    return runs


def common_runs(instance: OrderInstance) -> list[CommonRun]:
    pairs: set[tuple[int, int]] = set()
    for ids in instance.edge_paths.values():
        pairs.update(combinations(ids, 2))
    runs: list[CommonRun] = []
    for p, q in sorted(pairs):
        runs.extend(_runs_of_pair(instance, p, q))
    return runs


def unavoidable_crossings(instance: OrderInstance) -> list[CommonRun]:
    return [r for r in common_runs(instance) if r.unavoidable]


def count_crossings(instance: OrderInstance, ordering: BundleOrdering) -> int:
    return sum(r.crossings(ordering) for r in common_runs(instance))


def is_nice(instance: OrderInstance, ordering: BundleOrdering) -> bool:
    """Every pair keeps one relative order along each of its common subpaths."""
    return all(len(set(r.sides(ordering))) == 1 for r in common_runs(instance))
