"""Exception hierarchy shared by all graphonlab modules."""

from __future__ import annotations


class GraphonLabError(Exception):
    """Base class for every error raised by graphonlab."""


class LevelTooLarge(GraphonLabError):
    """A tower level above the configured cap was requested."""


class OutOfDomain(GraphonLabError, ValueError):
    """A point lies outside the domain of the requested operation."""


class OutOfRange(GraphonLabError, ValueError):
    """A parameter lies outside its admissible range."""


class MTooLarge(GraphonLabError, ValueError):
    """The Conlon-Fox parameter does not fit a machine word."""


class TailNotConvergent(GraphonLabError):
    """A row integral cannot be resolved to the requested tolerance."""


class GridMismatch(GraphonLabError, ValueError):
    """Block-weight sets refer to a grid incompatible with the graphon."""


class BudgetExceeded(GraphonLabError):
    """An enumeration or iteration budget was exhausted."""


class TooManyBlocks(GraphonLabError, ValueError):
    """Exhaustive search requested on too many blocks."""


class NullPart(GraphonLabError, ValueError):
    """A partition contains a part of measure zero."""


class PreconditionViolated(GraphonLabError, ValueError):
    """The hypotheses of a constructive argument do not hold."""


class DegreeUnassignable(GraphonLabError):
    """A sampled degree is not within tolerance of any expected degree."""


class MeasureMismatch(GraphonLabError):
    """Recovered part measures disagree with the expected ones."""


class IncompatibleGraphs(GraphonLabError, ValueError):
    """Decorated graphs in one constraint have different root graphs."""


class ExpressionSyntaxError(GraphonLabError, ValueError):
    """Malformed density expression; ``position`` is 1-based."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text
