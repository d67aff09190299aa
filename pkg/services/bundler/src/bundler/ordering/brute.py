"""Exhaustive minimum over all per-edge permutations (test oracle)."""
from __future__ import annotations

import math
from itertools import permutations, product

from ..errors import InstanceTooLargeError
from .crossings import common_runs
from .instance import BundleOrdering, OrderInstance, edge_key

SEARCH_LIMIT = 10**7


def search_space(instance: OrderInstance) -> int:
    return math.prod(math.factorial(len(ids)) for ids in instance.edge_paths.values())


def brute_force_min(instance: OrderInstance, *, limit: int = SEARCH_LIMIT) -> tuple[int, BundleOrdering]:
    space = search_space(instance)
    if space > limit:
        raise InstanceTooLargeError(f"{space} candidate orderings exceed the brute-force limit of {limit}")

    free = [e for e, ids in instance.edge_paths.items() if len(ids) > 1]
    fixed = {e: ids for e, ids in instance.edge_paths.items() if len(ids) <= 1}
    slot = {e: i for i, e in enumerate(free)}
    candidates = [
        [(perm, {pid: k for k, pid in enumerate(perm)}) for perm in permutations(instance.edge_paths[e])]
        for e in free
    ]

    # per run: forks plus, per edge, the slot it reads and whether it is walked against its canonical direction
    runs = []
    for r in common_runs(instance):
        steps = [(slot[edge_key(a, b)], a > b) for a, b in zip(r.nodes, r.nodes[1:])]
        runs.append((r.first, r.second, steps, r.start_left, r.end_left))

    best = -1
    witness: tuple = ()
    for choice in product(*candidates):
        total = 0
        for p, q, steps, start_left, end_left in runs:
            prev = None
            for s, flipped in steps:
                pos = choice[s][1]
                side = (pos[p] < pos[q]) != flipped
                if prev is not None and side != prev:
                    total += 1
                elif prev is None and start_left is not None and side != start_left:
                    total += 1
                prev = side
            if end_left is not None and prev != end_left:
                total += 1
            if best >= 0 and total >= best:
                break
        if best < 0 or total < best:
            best, witness = total, choice
            if best == 0:
                break

    orders = dict(fixed)
    for e, (perm, _) in zip(free, witness):
        orders[e] = perm
    return max(best, 0), BundleOrdering(dict(sorted(orders.items())))
