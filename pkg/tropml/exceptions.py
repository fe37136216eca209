"""The exceptions used by tropml."""
from __future__ import annotations

from .const import EXIT_DIMENSION, EXIT_FAILURE, EXIT_GEOMETRY, EXIT_PARSE, EXIT_SOLVER


class TropmlError(Exception):
    """Exception to indicate a general tropml error."""

    exit_code = EXIT_FAILURE


class InputError(TropmlError):
    """Exception to indicate malformed input data."""

    exit_code = EXIT_PARSE


class ParseError(InputError):
    """Exception to indicate a text that could not be parsed."""

    def __init__(self, message: str, offset: int) -> None:
        """Initialize with the byte offset of the offending character."""
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class NonFiniteError(InputError):
    """Exception to indicate a NaN or infinite coordinate."""


class RaggedRowsError(InputError):
    """Exception to indicate rows of different lengths."""


class DuplicateLabelError(InputError):
    """Exception to indicate a leaf label used twice."""


class SingleClassError(InputError):
    """Exception to indicate that only one class label is present."""


class ModelFormatError(InputError):
    """Exception to indicate a model file that could not be decoded."""


class InvalidParameterError(InputError, ValueError):
    """Exception to indicate a parameter outside its valid range."""


class DimensionError(TropmlError):
    """Exception to indicate inputs of the wrong shape."""

    exit_code = EXIT_DIMENSION


class DimensionMismatchError(DimensionError):
    """Exception to indicate points of different lengths."""


class TooShortError(DimensionError):
    """Exception to indicate a point with fewer than two coordinates."""


class NotSquareError(DimensionError):
    """Exception to indicate a matrix that is not square."""


class BadDimensionError(DimensionError):
    """Exception to indicate a dimension the operation does not accept."""


class EmptyInputError(DimensionError):
    """Exception to indicate an empty point set."""


class TooFewPointsError(DimensionError):
    """Exception to indicate too few points for the method."""


class TooFewLeavesError(DimensionError):
    """Exception to indicate a tree with fewer than two leaves."""


class SolverError(TropmlError):
    """Exception to indicate a numerical solver failure."""

    exit_code = EXIT_SOLVER


class SolverFailureError(SolverError):
    """Exception to indicate that the linear program did not solve."""


class GeometryError(TropmlError):
    """Exception to indicate a violated geometric precondition."""

    exit_code = EXIT_GEOMETRY


class StartOutsideHullError(GeometryError):
    """Exception to indicate a chain start outside the polytope."""


class StartOutsideBallError(GeometryError):
    """Exception to indicate a chain start outside the enclosing ball."""


class DegenerateDirectionError(GeometryError):
    """Exception to indicate that no non-degenerate direction was found."""


class NotUltrametricError(GeometryError):
    """Exception to indicate a vector that is not an ultrametric."""


class InvalidRadiusError(GeometryError):
    """Exception to indicate a non-positive ball radius."""
