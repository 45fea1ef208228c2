"""Definition of the RiemannMatrix and Characteristic classes.

A RiemannMatrix is the object under test: a complex symmetric g×g matrix with
positive-definite imaginary part, i.e. a point of the Siegel halfspace.  It is
validated upon instantiation and immutable afterwards.

A Characteristic is a pair of real g-vectors (p, q) shifting the lattice sum of
a theta function.  Half-integer characteristics carry a parity.

Usage:
    >>> from schottky import RiemannMatrix, Characteristic
    >>> B = RiemannMatrix(1j * np.eye(4))
    >>> B.g
    4
    >>> Characteristic([0.5, 0, 0, 0], [0.5, 0, 0, 0]).parity
    'odd'
"""

from typing import Any, Dict, Tuple

import numpy as np

from .errors import (
    InvalidCharacteristic,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
)

SYMMETRY_TOL = 1e-12


def validate_riemann_matrix(raw: Any) -> "RiemannMatrix":
    """Validate a raw matrix and return it as a RiemannMatrix.

    Args:
        raw: A g×g array-like of complex numbers.

    Returns:
        The validated RiemannMatrix.

    Raises:
        NotSquare: Input is not a square two-dimensional array.
        NotSymmetric: Largest asymmetry exceeds 1e-12.
        NotPositiveDefinite: The imaginary part fails a Cholesky factorization.
    """
    try:
        B = np.array(raw, dtype=complex)
    except (TypeError, ValueError):
        raise NotSquare("Riemann matrix must be a square complex array.")

    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] == 0:
        raise NotSquare("Riemann matrix must be a square complex array.")

    if not np.all(np.isfinite(B)):
        raise NotSquare("Riemann matrix must contain only finite values.")

    if np.max(np.abs(B - B.T)) > SYMMETRY_TOL:
        raise NotSymmetric("Riemann matrix must be symmetric.")

    B = 0.5 * (B + B.T)

    try:
        np.linalg.cholesky(B.imag)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(
            "Imaginary part of a Riemann matrix must be positive definite."
        )

    return RiemannMatrix._trusted(B)


class RiemannMatrix:
    """Define the RiemannMatrix class.

    Attributes:
        g: The genus.
        matrix: The read-only complex g×g array.
        real: Real part of the matrix.
        imag: Imaginary part of the matrix.

    Usage:
        >>> B = RiemannMatrix([[1j, 0.5], [0.5, 2j]])
    """

    __slots__ = ("_matrix",)

    _matrix: np.ndarray

    def __init__(self, raw: Any) -> None:
        """Init a RiemannMatrix.

        Args:
            raw: A g×g array-like of complex numbers.
        """
        if isinstance(raw, RiemannMatrix):
            self._matrix = raw._matrix
            return

        self._matrix = validate_riemann_matrix(raw)._matrix

        return

    @classmethod
    def _trusted(cls, matrix: np.ndarray) -> "RiemannMatrix":
        """Wrap an array known to satisfy the invariants."""
        obj = cls.__new__(cls)
        m = np.array(matrix, dtype=complex)
        m.setflags(write=False)
        obj._matrix = m

        return obj

    @property
    def g(self) -> int:
        """Get the genus."""
        return int(self._matrix.shape[0])

    @property
    def matrix(self) -> np.ndarray:
        """Get the matrix."""
        return self._matrix

    @property
    def real(self) -> np.ndarray:
        """Get the real part."""
        return self._matrix.real

    @property
    def imag(self) -> np.ndarray:
        """Get the imaginary part."""
        return self._matrix.imag

    def scaled(self, factor: float) -> "RiemannMatrix":
        """Return the matrix multiplied by a positive real factor.

        Args:
            factor: A positive real number.

        Returns:
            A new RiemannMatrix.
        """
        if factor <= 0:
            raise ValueError("Scale factor must be positive.")

        return RiemannMatrix._trusted(factor * self._matrix)

    def __eq__(self, other: object) -> bool:
        """Return True if both matrices are bitwise equal."""
        if isinstance(other, RiemannMatrix):
            return bool(np.array_equal(self._matrix, other._matrix))

        return False

    def __hash__(self) -> int:
        """Hash the raw bytes of the matrix."""
        return hash(self._matrix.tobytes())

    def __repr__(self) -> str:
        """Return a printable representation of the matrix."""
        min_eig = np.min(np.linalg.eigvalsh(self.imag))

        return f"<{type(self).__name__} g={self.g}, min_eig_im={min_eig:.4g}>"

    def _serialize_to_dict(self) -> Dict[str, Any]:
        """Serialize to a MatrixFile document."""
        return {
            "g": self.g,
            "re": self.real.tolist(),
            "im": self.imag.tolist(),
        }

    @classmethod
    def _deserialize_from_dict(cls, doc: Dict[str, Any]) -> "RiemannMatrix":
        """Deserialize a MatrixFile document.

        Args:
            doc: Mapping with keys g, re and im.

        Returns:
            The validated RiemannMatrix.

        Raises:
            InvalidMatrix: Missing fields or mismatched dimensions.
        """
        try:
            g = int(doc["g"])
            re = np.array(doc["re"], dtype=float)
            im = np.array(doc["im"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise NotSquare("Matrix document must contain g, re and im.")

        if re.shape != (g, g) or im.shape != (g, g):
            raise NotSquare("Matrix document dimensions must match g.")

        return validate_riemann_matrix(re + 1j * im)


class Characteristic:
    """Define the Characteristic class.

    Attributes:
        p: Real g-vector shifting the summation lattice.
        q: Real g-vector shifting the argument.
        g: Length of the vectors.
        is_half_integer: Both 2p and 2q are integer vectors.
        parity: "even" or "odd", for half-integer characteristics only.

    Usage:
        >>> Characteristic.zero(2)
        <Characteristic p=[0. 0.], q=[0. 0.]>
    """

    __slots__ = ("_p", "_q")

    _p: np.ndarray
    _q: np.ndarray

    def __init__(self, p: Any, q: Any) -> None:
        """Init a Characteristic.

        Args:
            p: Real g-vector.
            q: Real g-vector.

        Raises:
            InvalidCharacteristic: Vectors are not real, finite and of equal
                length.
        """
        try:
            p_arr = np.array(p, dtype=float).reshape(-1)
            q_arr = np.array(q, dtype=float).reshape(-1)
        except (TypeError, ValueError):
            raise InvalidCharacteristic("Characteristic must be real vectors.")

        if p_arr.shape != q_arr.shape or p_arr.size == 0:
            raise InvalidCharacteristic(
                "Characteristic vectors must have equal, nonzero length."
            )

        if not (np.all(np.isfinite(p_arr)) and np.all(np.isfinite(q_arr))):
            raise InvalidCharacteristic("Characteristic must be finite.")

        p_arr.setflags(write=False)
        q_arr.setflags(write=False)
        self._p = p_arr
        self._q = q_arr

        return

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        """Return the zero characteristic of length g."""
        return cls(np.zeros(g), np.zeros(g))

    @classmethod
    def odd_default(cls, g: int) -> "Characteristic":
        """Return the odd characteristic (e_1/2, e_1/2)."""
        e1 = np.zeros(g)
        e1[0] = 0.5

        return cls(e1, e1)

    @classmethod
    def from_doubled(cls, p2: Any, q2: Any) -> "Characteristic":
        """Build a characteristic from doubled integer vectors.

        Args:
            p2: Integer vector equal to 2p.
            q2: Integer vector equal to 2q.

        Returns:
            The Characteristic (p2/2, q2/2).
        """
        return cls(
            np.asarray(p2, dtype=float) / 2, np.asarray(q2, dtype=float) / 2
        )

    @property
    def p(self) -> np.ndarray:
        """Get p."""
        return self._p

    @property
    def q(self) -> np.ndarray:
        """Get q."""
        return self._q

    @property
    def g(self) -> int:
        """Get the vector length."""
        return int(self._p.size)

    @property
    def is_half_integer(self) -> bool:
        """Return True if 2p and 2q are integer vectors."""
        return bool(
            np.all(2 * self._p == np.round(2 * self._p))
            and np.all(2 * self._q == np.round(2 * self._q))
        )

    @property
    def is_zero(self) -> bool:
        """Return True if both vectors vanish."""
        return not (np.any(self._p) or np.any(self._q))

    @property
    def parity(self) -> str:
        """Return "even" or "odd" from 4⟨p,q⟩ mod 2.

        Raises:
            InvalidCharacteristic: The characteristic is not half-integer.
        """
        p2, q2 = self.doubled()

        return "even" if int(np.dot(p2, q2)) % 2 == 0 else "odd"

    def doubled(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the integer vectors (2p, 2q).

        Raises:
            InvalidCharacteristic: The characteristic is not half-integer.
        """
        if not self.is_half_integer:
            raise InvalidCharacteristic(
                "Characteristic must be half-integer for this operation."
            )

        return (
            np.round(2 * self._p).astype(np.int64),
            np.round(2 * self._q).astype(np.int64),
        )

    def __eq__(self, other: object) -> bool:
        """Return True if both vectors are equal."""
        if isinstance(other, Characteristic):
            return bool(
                np.array_equal(self._p, other._p)
                and np.array_equal(self._q, other._q)
            )

        return False

    def __hash__(self) -> int:
        """Hash the vectors."""
        return hash((self._p.tobytes(), self._q.tobytes()))

    def __repr__(self) -> str:
        """Return a printable representation."""
        return f"<{type(self).__name__} p={self._p}, q={self._q}>"


def as_riemann_matrix(B: Any) -> RiemannMatrix:
    """Return B as a RiemannMatrix, validating raw input.

    Args:
        B: A RiemannMatrix or a raw g×g array-like.

    Returns:
        A RiemannMatrix.
    """
    if isinstance(B, RiemannMatrix):
        return B

    return validate_riemann_matrix(B)
