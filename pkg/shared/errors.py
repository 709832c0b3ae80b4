"""
Exception hierarchy shared by every package.

Input problems subclass ValueError so callers that only know the builtin
contract keep working; numerical degeneracy stays separate so the CLI can
map it to its own exit code.
"""
from __future__ import annotations

from typing import Iterable, Optional


class ApproxError(Exception):
    """Root of all errors raised by the approximation stack."""


class InputError(ApproxError, ValueError):
    """Malformed user input (function source, degree, file contents)."""


class ParseError(InputError):
    """Syntax error in a function expression, with a 1-based position."""

    def __init__(
        self,
        message: str,
        line: int = 1,
        column: int = 1,
        expected: Optional[Iterable[str]] = None,
    ) -> None:
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected or ()))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class DomainError(ApproxError, ArithmeticError):
    """Evaluation landed on a branch cut or a pole of a primitive."""

    def __init__(self, message: str, subexpression: str = "") -> None:
        self.subexpression = subexpression
        if subexpression:
            message = f"{message} in '{subexpression}'"
        super().__init__(message)


class DegenerateError(ApproxError):
    """Degenerate weights or interpolation data."""


class SingularSolveError(DegenerateError):
    """A linear solve hit a (numerically) singular matrix."""


class CoincidentPointsError(DegenerateError):
    """Two interpolation nodes are closer than the collision threshold."""


class ConstructionError(DegenerateError):
    """An interpolant could not be built inside an iteration."""

    def __init__(self, message: str, iteration: int) -> None:
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {message}")


class PoleOnCircleError(ApproxError):
    """The approximant has a pole on the unit circle."""

    def __init__(self, theta: float) -> None:
        self.theta = theta
        super().__init__(f"approximant has a pole on the unit circle at theta={theta:.12g}")


class UndersampledError(ApproxError):
    """Phase increments of an error curve are too large to count windings."""
