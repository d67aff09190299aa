"""Exception hierarchy. Each class carries the CLI exit code it maps to."""
from __future__ import annotations


class BundlerError(Exception):
    exit_code = 4


class InputError(BundlerError, ValueError):
    exit_code = 2


class InvalidGeometryError(InputError):
    pass


class PathTerminalPropertyError(InputError):
    def __init__(self, node: str, terminal_of: str, intermediate_of: str):
        self.node = node
        super().__init__(
            f"node '{node}' is a terminal of path '{terminal_of}' "
            f"and an intermediate of path '{intermediate_of}'"
        )


class InstanceTooLargeError(InputError):
    pass


class UnroutableEdgeError(BundlerError):
    exit_code = 3

    def __init__(self, edge_index: int, source: str, target: str, reachable: int):
        self.edge_index = edge_index
        self.source = source
        self.target = target
        self.reachable = reachable
        super().__init__(
            f"edge {edge_index} ({source} -> {target}) is unroutable: "
            f"{reachable} routing nodes reachable from '{source}', target not among them"
        )


class InvariantViolation(BundlerError):
    exit_code = 4


class LedgerError(InvariantViolation):
    pass


class ObstacleShrinkError(InvariantViolation):
    def __init__(self, node_id: str, edge_ids: list[tuple[int, int]]):
        self.node_id = node_id
        self.edge_ids = edge_ids
        super().__init__(
            f"obstacle of node '{node_id}' cannot shrink clear of visibility edges {edge_ids[:5]}"
        )


class BiarcFitError(InvariantViolation):
    pass


class OrderingMismatchError(InvariantViolation):
    pass
