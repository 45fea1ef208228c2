"""Siegel reduction of Riemann matrices.

A symplectic transform R = [[A, B], [C, D]] ∈ Sp(2g, ℤ) acts on the Siegel
halfspace by B0 ↦ (A B0 + B)(C B0 + D)^{-1}.  Theta functions, the Kummer map
and the Schottky verdicts are compatible with this action, so any matrix may
be replaced by an equivalent one whose lattice has a long shortest vector,
which keeps theta series short.

siegel_reduce iterates three steps until none applies:

1. a unimodular basis change putting the exact shortest vector of Im B first,
2. integer shifts moving every entry of Re B into [-1/2, 1/2],
3. a quasi-inversion on a leading block whose determinant has modulus < 1.

Usage:
    >>> reduced, report = siegel_reduce(RiemannMatrix([[0.1j]]))
    >>> reduced.matrix
    array([[0.+10.j]])
"""

from dataclasses import dataclass
import logging
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from .errors import NoConvergence, SingularDenominator
from .lattice import (
    integer_inverse,
    minkowski_like_basis,
    shortest_vector_length,
    symmetric_round,
)
from .riemann import (
    Characteristic,
    RiemannMatrix,
    as_riemann_matrix,
    validate_riemann_matrix,
)
from .theta import default_radius, theta

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 200
MAX_CONDITION = 1e12
INVERSION_TOL = 1e-12


def _symplectic_form(g: int) -> np.ndarray:
    """Return J = [[0, I], [-I, 0]]."""
    eye = np.eye(g, dtype=np.int64)
    zero = np.zeros((g, g), dtype=np.int64)

    return np.block([[zero, eye], [-eye, zero]])


class SymplecticTransform:
    """An integer 2g×2g matrix R with RᵀJR = J.

    Attributes:
        g: The genus.
        matrix: The read-only integer matrix.
        A: Upper-left block.
        B: Upper-right block.
        C: Lower-left block.
        D: Lower-right block.

    Usage:
        >>> SymplecticTransform([[0, -1], [1, 0]])
        <SymplecticTransform g=1>
    """

    __slots__ = ("_matrix",)

    _matrix: np.ndarray

    def __init__(self, matrix: Any) -> None:
        """Init a SymplecticTransform.

        Args:
            matrix: Integer 2g×2g array-like.

        Raises:
            ValueError: Entries are not integers or RᵀJR ≠ J.
        """
        raw = np.asarray(matrix)

        if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] % 2:
            raise ValueError("Transform must be a square 2g×2g matrix.")

        if not np.array_equal(raw, np.round(raw)):
            raise ValueError("Transform must have integer entries.")

        R = np.round(raw).astype(np.int64)
        J = _symplectic_form(R.shape[0] // 2)

        if not np.array_equal(R.T @ J @ R, J):
            raise ValueError("Transform must satisfy RᵀJR = J.")

        R.setflags(write=False)
        self._matrix = R

        return

    @classmethod
    def from_blocks(
        cls, A: Any, B: Any, C: Any, D: Any
    ) -> "SymplecticTransform":
        """Build a transform from its four g×g blocks."""
        return cls(np.block([[A, B], [C, D]]))

    @classmethod
    def identity(cls, g: int) -> "SymplecticTransform":
        """Return the identity transform."""
        return cls(np.eye(2 * g, dtype=np.int64))

    @classmethod
    def translation(cls, S: Any) -> "SymplecticTransform":
        """Return B ↦ B + S for a symmetric integer matrix S."""
        S = np.asarray(S, dtype=np.int64)
        g = S.shape[0]
        eye = np.eye(g, dtype=np.int64)

        return cls.from_blocks(eye, S, np.zeros_like(S), eye)

    @classmethod
    def basis_change(cls, U: Any) -> "SymplecticTransform":
        """Return B ↦ U B Uᵀ for a unimodular integer matrix U."""
        U = np.asarray(U, dtype=np.int64)
        zero = np.zeros_like(U)

        return cls.from_blocks(U, zero, zero, integer_inverse(U).T)

    @classmethod
    def quasi_inversion(cls, g: int, k: int) -> "SymplecticTransform":
        """Return the inversion acting on the leading k×k block.

        With k = g this is the full inversion B ↦ -B^{-1}.
        """
        if not 1 <= k <= g:
            raise ValueError("Block size must lie between 1 and g.")

        lead = np.diag([1] * k + [0] * (g - k)).astype(np.int64)
        rest = np.eye(g, dtype=np.int64) - lead

        return cls.from_blocks(rest, -lead, lead, rest)

    @property
    def g(self) -> int:
        """Get the genus."""
        return int(self._matrix.shape[0] // 2)

    @property
    def matrix(self) -> np.ndarray:
        """Get the integer matrix."""
        return self._matrix

    @property
    def A(self) -> np.ndarray:
        """Get block A."""
        return self._matrix[: self.g, : self.g]

    @property
    def B(self) -> np.ndarray:
        """Get block B."""
        return self._matrix[: self.g, self.g :]

    @property
    def C(self) -> np.ndarray:
        """Get block C."""
        return self._matrix[self.g :, : self.g]

    @property
    def D(self) -> np.ndarray:
        """Get block D."""
        return self._matrix[self.g :, self.g :]

    def inverse(self) -> "SymplecticTransform":
        """Return R^{-1} = -J Rᵀ J."""
        J = _symplectic_form(self.g)

        return SymplecticTransform(-J @ self._matrix.T @ J)

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """Compose transforms; (R2 @ R1) acts as R1 followed by R2."""
        if not isinstance(other, SymplecticTransform):
            return NotImplemented

        if other.g != self.g:
            raise ValueError("Transforms must have the same genus.")

        return SymplecticTransform(self._matrix @ other._matrix)

    def __eq__(self, other: object) -> bool:
        """Return True if both matrices are equal."""
        if isinstance(other, SymplecticTransform):
            return bool(np.array_equal(self._matrix, other._matrix))

        return False

    def __hash__(self) -> int:
        """Hash the integer matrix."""
        return hash(self._matrix.tobytes())

    def __repr__(self) -> str:
        """Return a printable representation."""
        return f"<{type(self).__name__} g={self.g}>"

    def _serialize_to_list(self) -> list:
        """Serialize to nested lists of ints."""
        return self._matrix.tolist()


@dataclass(frozen=True)
class ReductionReport:
    """Summary of a Siegel reduction.

    Attributes:
        input_ymin: Shortest vector length before reduction.
        output_ymin: Shortest vector length after reduction.
        transform: Accumulated transform mapping input to output.
        iterations: Number of loop iterations performed.
    """

    input_ymin: float
    output_ymin: float
    transform: SymplecticTransform
    iterations: int

    def _serialize_to_dict(self) -> Dict[str, Any]:
        """Serialize to a JSON-ready mapping."""
        return {
            "input_ymin": self.input_ymin,
            "output_ymin": self.output_ymin,
            "transform": self.transform._serialize_to_list(),
            "iterations": self.iterations,
        }

    @classmethod
    def _deserialize_from_dict(cls, doc: Dict[str, Any]) -> "ReductionReport":
        """Deserialize from a mapping written by _serialize_to_dict."""
        return cls(
            input_ymin=float(doc["input_ymin"]),
            output_ymin=float(doc["output_ymin"]),
            transform=SymplecticTransform(doc["transform"]),
            iterations=int(doc["iterations"]),
        )


def transform_characteristic(
    R: SymplecticTransform, char: Characteristic
) -> Characteristic:
    """Return the characteristic attached to a theta function after R.

    p̃ = D p − C q + ½diag(C Dᵀ), q̃ = −B p + A q + ½diag(A Bᵀ).

    Args:
        R: A symplectic transform.
        char: The characteristic (p, q).

    Returns:
        The transformed characteristic.
    """
    A, B, C, D = R.A, R.B, R.C, R.D
    p, q = char.p, char.q
    p_new = D @ p - C @ q + 0.5 * np.diag(C @ D.T)
    q_new = -B @ p + A @ q + 0.5 * np.diag(A @ B.T)

    return Characteristic(p_new, q_new)


def apply_modular(B0: Any, R: SymplecticTransform) -> RiemannMatrix:
    """Apply a modular transformation (A B0 + B)(C B0 + D)^{-1}.

    Args:
        B0: RiemannMatrix or raw matrix.
        R: Symplectic transform of the same genus.

    Returns:
        The transformed, validated RiemannMatrix.

    Raises:
        SingularDenominator: C B0 + D has condition number above 1e12.
    """
    B0 = as_riemann_matrix(B0)

    if R.g != B0.g:
        raise ValueError("Transform and matrix must have the same genus.")

    M = R.C @ B0.matrix + R.D
    cond = np.linalg.cond(M)

    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularDenominator(
            "Denominator C·B + D of the modular transform is singular."
        )

    N = R.A @ B0.matrix + R.B
    out = np.linalg.solve(M.T, N.T).T

    return validate_riemann_matrix(0.5 * (out + out.T))


def _inversion_candidate(B: np.ndarray) -> Tuple[Optional[int], float]:
    """Return the leading block size whose determinant is smallest below 1."""
    g = B.shape[0]
    best_k: Optional[int] = None
    best_det = 1.0 - INVERSION_TOL

    for k in sorted({1, min(2, g), g}):
        det = abs(np.linalg.det(B[:k, :k]))

        if det < best_det:
            best_k, best_det = k, det

    return best_k, best_det


def siegel_reduce(
    B0: Any, max_iter: int = DEFAULT_MAX_ITER
) -> Tuple[RiemannMatrix, ReductionReport]:
    """Bring a Riemann matrix approximately into Siegel's fundamental domain.

    Args:
        B0: RiemannMatrix or raw matrix.
        max_iter: Iteration cap.

    Returns:
        The reduced matrix and a ReductionReport whose transform maps B0 to
        it.

    Raises:
        NoConvergence: The cap was reached while an inversion still applied.
    """
    B = as_riemann_matrix(B0)
    g = B.g
    input_ymin = shortest_vector_length(B)
    total = SymplecticTransform.identity(g)
    checkpoint: Optional[Tuple[RiemannMatrix, SymplecticTransform]] = None

    for iteration in range(1, max_iter + 1):
        R = SymplecticTransform.basis_change(minkowski_like_basis(B.imag))
        B = apply_modular(B, R)
        total = R @ total

        S = symmetric_round(B.real)

        if np.any(S):
            R = SymplecticTransform.translation(-S)
            B = apply_modular(B, R)
            total = R @ total

        if checkpoint is None:
            checkpoint = (B, total)

        k, det = _inversion_candidate(B.matrix)
        logger.debug(
            "reduction iteration %d: Y11=%.6g, det=%.6g, invert=%s",
            iteration,
            B.imag[0, 0],
            det,
            k,
        )

        if k is None:
            break

        R = SymplecticTransform.quasi_inversion(g, k)
        B = apply_modular(B, R)
        total = R @ total
    else:
        raise NoConvergence(
            f"Siegel reduction did not converge in {max_iter} iterations."
        )

    output_ymin = shortest_vector_length(B)

    if output_ymin < input_ymin - 1e-12 and checkpoint is not None:
        logger.warning(
            "reduction lowered y_min from %.6g to %.6g; keeping first basis "
            "reduction",
            input_ymin,
            output_ymin,
        )
        B, total = checkpoint
        output_ymin = shortest_vector_length(B)

    return B, ReductionReport(
        input_ymin=input_ymin,
        output_ymin=output_ymin,
        transform=total,
        iterations=iteration,
    )


def modular_theta_consistency(
    B0: Any,
    R: SymplecticTransform,
    z_samples: Iterable[Any],
    char: Optional[Characteristic] = None,
    radius: Optional[int] = None,
) -> float:
    """Return the spread over z of the modular transformation ratio.

    With M = C B0 + D and B̃ = R·B0, the ratio

        Θ[p̃,q̃](M^{-T} z, B̃) / (exp(πi zᵀ M^{-1} C z)·Θ[p,q](z, B0))

    is a constant independent of z.

    Args:
        B0: RiemannMatrix or raw matrix.
        R: Symplectic transform.
        z_samples: Complex g-vectors.
        char: Characteristic of the untransformed theta. Defaults to zero.
        radius: Hypercube half-width for both sums. Defaults to the larger
            of the two default radii.

    Returns:
        max_k |r_k − r_0| / |r_0| over the samples.
    """
    B0 = as_riemann_matrix(B0)
    g = B0.g
    Bt = apply_modular(B0, R)
    char = Characteristic.zero(g) if char is None else char
    char_t = transform_characteristic(R, char)

    if radius is None:
        radius = max(default_radius(B0), default_radius(Bt))

    M = R.C @ B0.matrix + R.D
    Minv = np.linalg.inv(M)
    ratios = []

    for z in z_samples:
        z = np.asarray(z, dtype=complex)
        lhs = theta(Minv.T @ z, Bt, char_t, radius).value
        factor = np.exp(np.pi * 1j * (z @ Minv @ R.C @ z))
        rhs = factor * theta(z, B0, char, radius).value
        ratios.append(lhs / rhs)

    if not ratios:
        return 0.0

    r0 = ratios[0]

    return float(max(abs(r - r0) for r in ratios) / abs(r0))
