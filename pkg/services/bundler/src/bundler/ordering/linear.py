"""Linear-time ordering by deleting and re-inserting non-terminal nodes.

Phase 1 deletes every non-terminal v. The paths through v are grouped by the
pair of incident edges they use; each group becomes a new edge joining the two
far endpoints, inserted into each endpoint's clockwise ring where the old edge
was, ordered by how far clockwise around v the group turns. Parallel edges stay
separate. Phase 2 walks the replacements backwards: an edge's order is the
concatenation of its replacements' orders in clockwise order at the endpoint
they fan out from.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .instance import BundleOrdering, Edge, OrderInstance


@dataclass
class DeletionForest:
    """Replacement structure over edge ids. Ids below ``len(original)`` are the
    instance's edges; a replacement edge is a child of both edges it merges."""

    ends: list[tuple[int, int]] = field(default_factory=list)
    paths: list[tuple[int, ...]] = field(default_factory=list)
    original: dict[Edge, int] = field(default_factory=dict)
    children: dict[int, tuple[int, ...]] = field(default_factory=dict)
    anchor: dict[int, int] = field(default_factory=dict)  # endpoint the children fan out from

    def new_edge(self, a: int, b: int, paths: tuple[int, ...]) -> int:
        self.ends.append((a, b))
        self.paths.append(paths)
        return len(self.ends) - 1

    def reconstruct(self) -> dict[int, tuple[int, ...]]:
        """Order of every edge id, left to right travelling from ends[e][0] to ends[e][1]."""
        order: dict[int, tuple[int, ...]] = {}
        for e in reversed(range(len(self.ends))):
            kids = self.children.get(e)
            if kids is None:
                order[e] = tuple(sorted(self.paths[e]))
                continue
            x = self.anchor[e]
            seq: list[int] = []
            for c in kids:
                seq.extend(order[c] if self.ends[c][0] == x else reversed(order[c]))
            order[e] = tuple(seq) if self.ends[e][0] == x else tuple(reversed(seq))
        return order


class _Rings:
    """Clockwise edge rings per node as cyclic linked lists."""

    def __init__(self) -> None:
        self.nxt: dict[tuple[int, int], int] = {}
        self.prv: dict[tuple[int, int], int] = {}
        self.head: dict[int, int] = {}

    def link(self, x: int, ring: list[int]) -> None:
        for a, b in zip(ring, ring[1:] + ring[:1]):
            self.nxt[(x, a)] = b
            self.prv[(x, b)] = a
        self.head[x] = ring[0]

    def walk(self, x: int) -> list[int]:
        start = e = self.head[x]
        ring = []
        while True:
            ring.append(e)
            e = self.nxt[(x, e)]
            if e == start:
                return ring

    def replace(self, x: int, e: int, kids: list[int]) -> None:
        p, n = self.prv.pop((x, e)), self.nxt.pop((x, e))
        if p == e:
            self.link(x, kids)
            return
        chain = [p, *kids, n]
        for a, b in zip(chain, chain[1:]):
            self.nxt[(x, a)] = b
            self.prv[(x, b)] = a
        if self.head[x] == e:
            self.head[x] = kids[0]

    def drop(self, x: int) -> None:
        for e in self.walk(x):
            del self.nxt[(x, e)], self.prv[(x, e)]
        del self.head[x]


def delete_nonterminals(instance: OrderInstance) -> DeletionForest:
    forest = DeletionForest()
    for key, ids in instance.edge_paths.items():
        forest.original[key] = forest.new_edge(key[0], key[1], ids)

    rings = _Rings()
    for x, ring in instance.clockwise.items():
        ids = [forest.original[k] for y in ring if (k := (min(x, y), max(x, y))) in forest.original]
        if ids:
            rings.link(x, ids)

    for v in sorted(set(rings.head) - instance.terminals):
        incident = rings.walk(v)
        t = len(incident)
        slots: dict[int, list[int]] = {}
        for idx, e in enumerate(incident):
            for pid in forest.paths[e]:
                slots.setdefault(pid, []).append(idx)
        groups: dict[tuple[int, int], list[int]] = {}
        for pid, (a, b) in sorted(slots.items()):
            groups.setdefault((a, b), []).append(pid)

        def far(idx: int) -> int:
            s, r = forest.ends[incident[idx]]
            return r if s == v else s

        fans: dict[int, list[tuple[int, int]]] = {idx: [] for idx in range(t)}
        for (a, b), ids in sorted(groups.items()):
            n = forest.new_edge(far(a), far(b), tuple(ids))
            fans[a].append(((b - a) % t, n))
            fans[b].append(((a - b) % t, n))
        for idx, e in enumerate(incident):
            kids = [n for _, n in sorted(fans[idx])]
            x = far(idx)
            forest.children[e] = tuple(kids)
            forest.anchor[e] = x
            rings.replace(x, e, kids)
        rings.drop(v)
    return forest


def order_linear(instance: OrderInstance) -> BundleOrdering:
    forest = delete_nonterminals(instance)
    order = forest.reconstruct()
    return BundleOrdering({key: order[e] for key, e in forest.original.items()})
