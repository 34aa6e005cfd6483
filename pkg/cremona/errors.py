from __future__ import annotations

from typing import Any, Dict, Optional, Sequence

__all__ = (
    "CremonaException",
    "UsageError",
    "CheckFailed",
    "ParseError",
    "UnknownNameError",
    "DegreeError",
    "ComputationError",
    "SingularError",
    "ExceptionalLocusError",
    "PoleError",
    "NotAnInvariantError",
    "EmptyCurve",
    "ZeroDivisorFound",
    "ResourceError",
    "NonBirationalWarning",
)


class CremonaException(Exception):
    """
    Base of every error raised by cremona.

    Attributes:
        message (str): The message for the error.
        exit_code (int): The process exit status the command line maps this error to.

    """

    exit_code: int = 3

    def __init__(self, message: str = "") -> None:
        self.message: str = message
        super().__init__(message)


class UsageError(CremonaException):
    """
    Represents an invalid call or invalid input, caught before any computation.
    """

    exit_code = 2


class CheckFailed(UsageError):
    """
    Represents a command whose preconditions on the flags do not hold.
    """

    pass


class ParseError(UsageError):
    """
    Represents malformed model or polynomial text.

    Attributes:
        line (int): The 1-based line of the offending token.
        column (int): The 1-based column of the offending token.
        source_line (str): The text of the offending line.

    """

    def __init__(self, reason: str, line: int, column: int, source_line: str = "") -> None:
        self.reason = reason
        self.line = line
        self.column = column
        self.source_line = source_line

        super().__init__(f"line {line}, column {column}: {reason}")


class UnknownNameError(ParseError, NameError):
    """
    Represents an identifier that is neither a declared variable nor a parameter.
    """

    pass


class DegreeError(UsageError):
    """
    Represents a right-hand side whose total degree exceeds two.

    Attributes:
        degree (int): The offending total degree.

    """

    def __init__(self, message: str, degree: int) -> None:
        self.degree = degree
        super().__init__(message)


class ComputationError(CremonaException):
    """
    Represents the failure of a well-formed computation.
    """

    exit_code = 3


class SingularError(ComputationError):
    """
    Represents a linear system whose determinant is identically zero.
    """

    pass


class ExceptionalLocusError(ComputationError):
    """
    Represents an exact evaluation on the exceptional locus, where a denominator vanishes.

    Attributes:
        state (Optional[Sequence[Any]]): The offending point, when one is known.

    """

    def __init__(self, message: str, state: Optional[Sequence[Any]] = None) -> None:
        self.state = state
        super().__init__(message)


class PoleError(ComputationError):
    """
    Represents a float step whose linear system is numerically singular.

    Attributes:
        state (Sequence[float]): The state the step started from.
        dt (float): The step size.
        det (float): The determinant that fell below the threshold.

    """

    def __init__(self, state: Sequence[float], dt: float, det: float) -> None:
        self.state = tuple(state)
        self.dt = dt
        self.det = det

        super().__init__(f"pole passage at state {self.state} with dt={dt!r} (det={det:.3e})")


class NotAnInvariantError(ComputationError):
    """
    Represents a claimed first integral whose Lie derivative does not vanish.

    Attributes:
        residual (Any): The Lie derivative polynomial.

    """

    def __init__(self, name: str, residual: Any) -> None:
        self.name = name
        self.residual = residual

        super().__init__(f"{name!r} is not conserved: Lie derivative is {residual}")


class EmptyCurve(ComputationError):
    """
    Represents a sampling request for a polynomial free of state variables.
    At such a step the equiperiodic set is either everything or nothing.
    """

    pass


class ZeroDivisorFound(ComputationError):
    """
    Represents a non-invertible residue in a quotient ring whose modulus is not irreducible.

    Attributes:
        factor (Any): The nontrivial common factor of the residue and the modulus.

    """

    def __init__(self, factor: Any) -> None:
        self.factor = factor
        super().__init__(f"zero divisor found, modulus splits off {factor}")


class ResourceError(CremonaException):
    """
    Represents an exceeded resource budget.

    Attributes:
        stage (int): The stage at which the budget was exceeded.
        diagnostics (Dict[str, Any]): Sizes observed up to that stage.
        partial (Any): The partial result computed before the budget ran out.

    """

    exit_code = 4

    def __init__(
        self,
        message: str,
        stage: int = 0,
        diagnostics: Optional[Dict[str, Any]] = None,
        partial: Any = None,
    ) -> None:
        self.stage = stage
        self.diagnostics = diagnostics or {}
        self.partial = partial

        super().__init__(message)


class NonBirationalWarning(UserWarning):
    """
    Issued when the literal product rule is requested for a system with cross terms.
    The resulting scheme is not jointly linear in the hatted variables.
    """

    pass
