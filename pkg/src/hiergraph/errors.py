"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes (bad input vs. I/O vs. invariant
failures), so every module raises subclasses of HierGraphError rather
than bare ValueError/OSError where the distinction matters.
"""

from __future__ import annotations


class HierGraphError(Exception):
    """Base class for all package-specific errors."""


class BadInputError(HierGraphError):
    """Caller passed something malformed or semantically invalid."""


class GraphFormatError(BadInputError):
    """An input file line could not be parsed; carries the line number."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class LoopEdgeError(BadInputError):
    """A self-loop was found in the input; names the offending node."""

    def __init__(self, path: str, line_no: int, node: int):
        super().__init__(f"{path}:{line_no}: loop edge at node {node}")
        self.node = node


class UnknownNodeError(BadInputError):
    def __init__(self, node: int):
        super().__init__(f"unknown graph node id {node}")
        self.node = node


class UnknownSuperNodeError(BadInputError):
    def __init__(self, node_id: int):
        super().__init__(f"unknown tree node id {node_id}")
        self.node_id = node_id


class PartitionError(HierGraphError):
    """Partitioning could not be carried out as requested."""


class BalanceError(PartitionError):
    """Requested balance tolerance is unachievable; reports the minimum."""

    def __init__(self, requested: float, minimal_feasible: float):
        super().__init__(
            f"balance tolerance {requested:.4f} unachievable; "
            f"minimal feasible epsilon is {minimal_feasible:.4f}"
        )
        self.requested = requested
        self.minimal_feasible = minimal_feasible


class TreeError(HierGraphError):
    """Structural problem in a graph tree or its store."""


class NotALeafError(TreeError):
    def __init__(self, node_id: int):
        super().__init__(f"tree node {node_id} is not a leaf")
        self.node_id = node_id


class LeafNotLoadedError(TreeError):
    def __init__(self, node_id: int):
        super().__init__(f"leaf {node_id} is not loaded")
        self.node_id = node_id


class ResidualEdgeError(TreeError):
    """Fill finished with unresolved edges at the root: corrupt input."""


class StoreError(HierGraphError):
    """On-disk store is missing pieces or fails verification."""


class StoreVersionError(StoreError):
    pass


class ChecksumError(StoreError):
    def __init__(self, path: str):
        super().__init__(f"checksum mismatch for {path}")
        self.path = path


class DegeneratePairError(BadInputError):
    """Connectivity asked for a pair (x, x)."""


class AncestorPairError(BadInputError):
    """Connectivity asked for an ancestor/descendant pair: undefined."""


class AuditFailure(HierGraphError):
    """A store audit found at least one violated invariant."""
