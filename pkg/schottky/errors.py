"""Definition of schottky exceptions.

Every error raised by the package derives from SchottkyError and from the
builtin exception a caller would expect for the situation, so that callers may
catch either.  Invalid input raises a ValueError subclass, numerical breakdown
an ArithmeticError subclass, and exhausted iteration caps a RuntimeError
subclass.

Usage:
    >>> from schottky.errors import NotSymmetric
    >>> try:
    ...     validate_riemann_matrix([[1j, 0.1], [0.0, 1j]])
    ... except ValueError as e:
    ...     print(e)
    Riemann matrix must be symmetric.
"""

from typing import Any, Optional


class SchottkyError(Exception):
    """Base class of all schottky errors."""


class InvalidMatrix(SchottkyError, ValueError):
    """Input cannot be interpreted as a Riemann matrix."""


class NotSquare(InvalidMatrix):
    """Input matrix is not square."""


class NotSymmetric(InvalidMatrix):
    """Input matrix is not symmetric within tolerance."""


class NotPositiveDefinite(InvalidMatrix):
    """Imaginary part of the input matrix fails a Cholesky factorization."""


class InvalidCharacteristic(SchottkyError, ValueError):
    """Characteristic vectors are malformed or not half-integer."""


class RankDeficient(SchottkyError, ValueError):
    """Lattice basis does not have full rank."""


class InvalidDelta(SchottkyError, ValueError):
    """Precision parameter is not in the open interval (0, 1)."""


class SingularDenominator(SchottkyError, ArithmeticError):
    """The factor C B + D of a modular transformation is near singular."""


class SingularA(SchottkyError, ArithmeticError):
    """The A block of a period matrix pair (A|B) is singular."""


class NoConvergence(SchottkyError, RuntimeError):
    """An iteration cap was exhausted."""


class DegenerateEll(SchottkyError, ValueError):
    """Half-period start parameter at or outside the interval ends."""


class WrongGenus(SchottkyError, ValueError):
    """Operation is only defined for a different genus."""


class UnknownName(SchottkyError, KeyError):
    """No embedded matrix carries the requested name."""

    def __str__(self) -> str:
        """Return the message without KeyError quoting."""
        return str(self.args[0]) if self.args else ""


class StartFailed(SchottkyError, ArithmeticError):
    """A Newton start could not be continued.

    Attributes:
        trace: The iteration records collected before the failure, if any.
    """

    trace: Optional[Any]

    def __init__(self, message: str, trace: Optional[Any] = None) -> None:
        """Init a StartFailed error.

        Args:
            message: Error message.
            trace: Partial iteration trace.
        """
        super().__init__(message)
        self.trace = trace


class TrivialConfiguration(StartFailed):
    """Two trisecant points coincide up to sign modulo the lattice."""


class DenominatorUnderflow(StartFailed):
    """The odd-theta denominator of the Fay coefficients underflowed."""


class DampingExhausted(StartFailed):
    """Step halving could not contain the residual growth."""
