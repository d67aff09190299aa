from .brute import brute_force_min, search_space
from .crossings import CommonRun, common_runs, count_crossings, is_nice, unavoidable_crossings
from .instance import BundleOrdering, Edge, OrderInstance, edge_key
from .linear import DeletionForest, delete_nonterminals, order_linear
from .nice import order_nice_tree
from .select import ALGORITHMS, OrderingOutcome, compute_ordering
from .simple import ForkSorter, order_simple

__all__ = [
    "ALGORITHMS",
    "BundleOrdering",
    "CommonRun",
    "DeletionForest",
    "Edge",
    "ForkSorter",
    "OrderInstance",
    "OrderingOutcome",
    "brute_force_min",
    "common_runs",
    "compute_ordering",
    "count_crossings",
    "delete_nonterminals",
    "edge_key",
    "is_nice",
    "order_linear",
    "order_nice_tree",
    "order_simple",
    "search_space",
    "unavoidable_crossings",
]
