"""Nice orderings on trees.

Rooted at a terminal, edges are ordered from the deepest up, each one looking
toward the root first. A pair's first ordered common edge is then at the deep
end of its common subpath, so any crossing lands on that endpoint and the pair
keeps one order everywhere else.
"""
from __future__ import annotations

import networkx as nx

from ..errors import InputError
from .instance import BundleOrdering, OrderInstance, edge_key
from .simple import ForkSorter


def order_nice_tree(instance: OrderInstance) -> BundleOrdering:
    g = instance.graph()
    if g.number_of_nodes() == 0 or not instance.paths:
        return BundleOrdering({})
    if not nx.is_tree(g):
        raise InputError("nice ordering needs a tree; the instance graph has cycles or is disconnected")

    root = min(instance.terminals)
    depth = nx.single_source_shortest_path_length(g, root)
    parent = dict(nx.bfs_predecessors(g, root))
    sorter = ForkSorter(instance)
    for child in sorted(parent, key=lambda c: (-depth[c], c)):
        if edge_key(child, parent[child]) in instance.edge_paths:
            sorter.sort_edge(parent[child], child)
    return sorter.result()
