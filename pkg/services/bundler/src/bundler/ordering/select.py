from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Optional

from ..errors import OrderingMismatchError
from .crossings import count_crossings, is_nice, unavoidable_crossings
from .instance import BundleOrdering, OrderInstance
from .linear import order_linear
from .nice import order_nice_tree
from .simple import order_simple

Algorithm = Literal["simple", "linear", "both", "nice"]

ALGORITHMS: dict[str, Callable[[OrderInstance], BundleOrdering]] = {
    "simple": order_simple,
    "linear": order_linear,
    "nice": order_nice_tree,
}


@dataclass(frozen=True)
class OrderingOutcome:
    algorithm: str
    ordering: BundleOrdering
    crossings: int
    unavoidable: int
    nice: Optional[bool] = None


def compute_ordering(instance: OrderInstance, algorithm: Algorithm = "linear") -> OrderingOutcome:
    """Run the selected algorithm; ``both`` runs simple and linear and insists they agree."""
    unavoidable = len(unavoidable_crossings(instance))
    if algorithm != "both":
        ordering = ALGORITHMS[algorithm](instance)
        nice = is_nice(instance, ordering) if algorithm == "nice" else None
        return OrderingOutcome(algorithm, ordering, count_crossings(instance, ordering), unavoidable, nice)

    simple = order_simple(instance)
    linear = order_linear(instance)
    n_simple, n_linear = count_crossings(instance, simple), count_crossings(instance, linear)
    if n_simple != n_linear:
        raise OrderingMismatchError(f"simple ordering has {n_simple} crossings, linear ordering has {n_linear}")
    return OrderingOutcome("both", linear, n_linear, unavoidable)
