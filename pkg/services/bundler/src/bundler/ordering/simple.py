"""Sort-based ordering: one comparator per edge, resolved by the nearest fork
or an already ordered edge along the pair's common subpath.
"""
from __future__ import annotations

from functools import cmp_to_key

from .instance import BundleOrdering, Edge, OrderInstance, edge_key


class ForkSorter:
    """Orders edges one at a time, reusing decisions on edges already ordered."""

    def __init__(self, instance: OrderInstance):
        self.instance = instance
        self.orders: dict[Edge, tuple[int, ...]] = {}
        self._pos: dict[Edge, dict[int, int]] = {}

    def _known_side(self, p: int, q: int, a: int, b: int) -> bool | None:
        pos = self._pos.get(edge_key(a, b))
        if pos is None:
            return None
        return (pos[p] < pos[q]) == (a < b)

    def left_of(self, p: int, q: int, x: int, y: int) -> bool:
        """Whether ``p`` belongs left of ``q`` on edge xy travelling from x to y.

        Looks behind x first, then beyond y; coincident pairs fall back to path id.
        """
        inst = self.instance
        ps, a = inst.aligned(p, x, y)
        qs, b = inst.aligned(q, x, y)

        i, j = a - 1, b - 1
        while i >= 0 and j >= 0 and ps[i] == qs[j]:
            side = self._known_side(p, q, ps[i], ps[i + 1])
            if side is not None:
                return side
            i -= 1
            j -= 1
        if i >= 0 and j >= 0:
            c0, c1 = ps[i + 1], ps[i + 2]
            return inst.rank(c0, c1, ps[i]) > inst.rank(c0, c1, qs[j])

        i, j = a + 2, b + 2
        while i < len(ps) and j < len(qs) and ps[i] == qs[j]:
            side = self._known_side(p, q, ps[i - 1], ps[i])
            if side is not None:
                return side
            i += 1
            j += 1
        if i < len(ps) and j < len(qs):
            ck, prev = ps[i - 1], ps[i - 2]
            return inst.rank(ck, prev, ps[i]) < inst.rank(ck, prev, qs[j])
        return p < q

    def sort_edge(self, x: int, y: int) -> tuple[int, ...]:
        key = edge_key(x, y)
        ordered = sorted(
            self.instance.edge_paths[key],
            key=cmp_to_key(lambda p, q: -1 if self.left_of(p, q, x, y) else 1),
        )
        order = tuple(ordered) if x < y else tuple(reversed(ordered))
        self.orders[key] = order
        self._pos[key] = {pid: i for i, pid in enumerate(order)}
        return order

    def result(self) -> BundleOrdering:
        return BundleOrdering(dict(sorted(self.orders.items())))


def order_simple(instance: OrderInstance) -> BundleOrdering:
    sorter = ForkSorter(instance)
    for u, v in instance.edge_paths:
        sorter.sort_edge(u, v)
    return sorter.result()
