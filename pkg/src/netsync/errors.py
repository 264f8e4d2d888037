"""Package-level exception types."""
from __future__ import annotations

__all__ = ["SynchronizabilityError", "DegenerateNodeError"]


class SynchronizabilityError(RuntimeError):
    """The requested bound does not exist for this network.

    Raised when the information matrix is singular (absolute case: some agent
    has no path to a reference node or to an agent with prior information;
    relative case: the agent graph is disconnected), or when a series
    evaluation is provably divergent.

    Attributes
    ----------
    unreachable : tuple of int
        Agents with no path to any information source, when that diagnosis
        applies; empty otherwise.
    """

    def __init__(self, message: str, unreachable: tuple[int, ...] = ()):
        super().__init__(message)
        self.unreachable = tuple(unreachable)


class DegenerateNodeError(ValueError):
    """A node has zero total information, so no transition row can be formed."""

    def __init__(self, node: int):
        super().__init__(f"node {node} has zero information (isolated with no prior)")
        self.node = node
