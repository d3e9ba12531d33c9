"""
Exception types raised by the gdofkit core.

All of them derive from ValueError so callers that already guard
with ``except ValueError`` keep working.
"""

from typing import Optional


class GdofError(ValueError):
    """Base class for every gdofkit failure."""


class DimensionMismatchError(GdofError):
    """A point or row does not match the dimension of the region."""


class UnboundedRegionError(GdofError):
    """Vertex enumeration was asked for an unbounded region."""


class VertexLimitError(GdofError):
    """Too many rows for exhaustive vertex enumeration."""


class InvalidChannelError(GdofError):
    """Channel strengths are malformed, negative, or of the wrong shape."""


class RegimeViolationError(GdofError):
    """An operation was called outside the parameter regime it is defined for."""


class ConstraintViolationError(GdofError):
    """Scheme parameters break one of the variant's constraint rows."""

    def __init__(self, message: str, row: Optional[str] = None) -> None:
        super().__init__(message)
        self.row = row


class InvalidPermutationError(GdofError):
    """A permutation, merge point or tail ordering is not well formed."""


class BudgetError(GdofError):
    """A pattern generation budget is empty or inconsistent."""


class InfeasibleSchemeError(GdofError):
    """A scheme whose decoding check fails was handed to the simulator."""
