"""Exception types shared across the package.

Every error raised by the library is a subclass of :class:`XBoundedError`,
so callers can catch one type at the CLI boundary.
"""

from __future__ import annotations


class XBoundedError(Exception):
    """Base class for all library errors."""


class Disconnected(XBoundedError):
    """The instance graph is not connected.

    Components can be decided independently; the CLI does exactly that.
    """


class LoopEdge(XBoundedError):
    """An edge joins a vertex to itself, which the data model forbids."""


class MissingLabel(XBoundedError):
    """A vertex has no level label, or a label is not a nonnegative integer."""


class WalkNotInGraph(XBoundedError):
    """A walk refers to vertices or edges that do not exist or do not match."""


class BudgetExceeded(XBoundedError):
    """A bounded search ran out of its visit budget before completing."""


class PreconditionViolated(XBoundedError):
    """Input does not satisfy a documented precondition of the operation."""


class UnknownLeaf(XBoundedError):
    """A leaf id is not present in the tree."""


class TooManyLeaves(XBoundedError):
    """Order enumeration refused: the tree has more leaves than the bound."""


class StaircaseViolation(XBoundedError):
    """A column contains a 0/1 entry below an ambiguous entry.

    Carries the offending column id and row index.
    """

    def __init__(self, column, row):
        super().__init__(f"column {column!r} has a 0/1 entry below '*' (row index {row})")
        self.column = column
        self.row = row


class TooLarge(XBoundedError):
    """Exhaustive enumeration refused: the search space exceeds the bound."""


class NotATree(XBoundedError):
    """The operation requires a tree (connected, acyclic) input."""


class NotATheta(XBoundedError):
    """The operation requires a theta graph: two poles joined by three or
    more internally disjoint paths, every interior vertex of degree two."""


class Infeasible(XBoundedError):
    """No cyclic column order satisfies the accumulated constraints.

    Carries the id of the first row whose restriction failed.
    """

    def __init__(self, row_id):
        super().__init__(f"no cyclic order satisfies the constraints; first failing row: {row_id!r}")
        self.row_id = row_id


class InvalidCertificate(XBoundedError):
    """A certificate does not validate against its instance."""
