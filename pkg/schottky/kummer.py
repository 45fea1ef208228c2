"""Kummer map and the Fay trisecant function.

The Kummer map sends a point Z of the Jacobian to the 2^g second-order theta
values

    K_ε(Z) = exp(½πi⟨ε,Bε⟩ + 2πi⟨ε,Z⟩)·Θ(2Z + Bε, 2B),   ε ∈ {0,1}^g.

A Riemann matrix is a Jacobian exactly when some non-trivial triple (X, Y, Z)
makes K(X), K(Y), K(Z) linearly dependent.  The Fay function

    F = c₁·K(Z) + c₂·K(Y) − K(X),
    c₁ = λ(Y,X)/λ(Y,Z),  c₂ = λ(X,Z)/λ(Y,Z),  λ(a,b) = Θ*(a+b)·Θ*(a−b),

with Θ* an odd theta function, vanishes at such triples.  Four components of
the triple are pinned to remove the symmetries of the problem; the remaining
3g − 4 are the unknowns of the Newton iteration.

Usage:
    >>> fixed, x = split_triple(triple)
    >>> evaluation = fay_function(x, fixed, B, radius=5)
    >>> evaluation.residual, evaluation.delta
"""

from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DenominatorUnderflow, TrivialConfiguration
from .index import Index
from .riemann import Characteristic, RiemannMatrix, as_riemann_matrix
from .theta import (
    TWO_PI_I,
    binary_vectors,
    theta,
    theta_sums,
    wrap_to_fundamental,
)
from .utils import as_complex_vector

DEFAULT_TRIVIAL_TOL = 1e-6
UNDERFLOW = 1e-300

Position = Tuple[int, int]
DEFAULT_PINNED: Tuple[Position, ...] = ((0, 0), (0, 1), (1, 0), (2, 0))


@dataclass(frozen=True)
class KummerPoint:
    """Second-order theta values of a point and their derivatives.

    Attributes:
        values: Complex 2^g vector indexed by ε ∈ {0,1}^g.
        jacobian: Complex 2^g×g matrix of ∂K_ε/∂Z_j.
    """

    values: np.ndarray
    jacobian: np.ndarray


@dataclass(frozen=True)
class TrisecantTriple:
    """Three points X, Y, Z of the Jacobian."""

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    @property
    def g(self) -> int:
        """Get the genus."""
        return int(self.X.size)

    def stacked(self) -> np.ndarray:
        """Return the concatenation (X, Y, Z) of length 3g."""
        return np.concatenate([self.X, self.Y, self.Z])

    @classmethod
    def from_stacked(cls, v: Any) -> "TrisecantTriple":
        """Split a 3g vector into a triple."""
        v = np.asarray(v, dtype=complex)
        g = v.size // 3

        return cls(v[:g].copy(), v[g : 2 * g].copy(), v[2 * g :].copy())


@dataclass(frozen=True)
class FixedComponents:
    """Values of the pinned components of a triple.

    Attributes:
        values: One complex value per pinned position.
        positions: (vector, component) pairs; vector 0, 1, 2 is X, Y, Z.
    """

    values: Tuple[complex, ...]
    positions: Tuple[Position, ...] = DEFAULT_PINNED

    def __post_init__(self) -> None:
        """Check that values and positions agree."""
        if len(self.values) != len(self.positions):
            raise ValueError("Each pinned position needs exactly one value.")

        if not all(np.isfinite(v) for v in self.values):
            raise ValueError("Pinned values must be finite.")

    def value_at(self, position: Position) -> complex:
        """Return the pinned value at a position."""
        return self.values[self.positions.index(position)]

    @property
    def X1(self) -> complex:
        """Get X_1."""
        return self.value_at((0, 0))

    @property
    def X2(self) -> complex:
        """Get X_2."""
        return self.value_at((0, 1))

    @property
    def Y1(self) -> complex:
        """Get Y_1."""
        return self.value_at((1, 0))

    @property
    def Z1(self) -> complex:
        """Get Z_1."""
        return self.value_at((2, 0))


@dataclass(frozen=True)
class FayEvaluation:
    """The Fay function at a point.

    Attributes:
        F: Complex 2^g residual vector.
        jacobian: Complex 2^g×(3g−4) derivative over the free coordinates.
        residual: ‖F‖₂.
        delta: Smallest singular value of [K(X), K(Y), K(Z)].
        x: Free coordinates after wrapping.
        fixed: Pinned components after wrapping.
        triple: The wrapped triple.
        c1: Coefficient of K(Z).
        c2: Coefficient of K(Y).
    """

    F: np.ndarray
    jacobian: np.ndarray
    residual: float
    delta: float
    x: np.ndarray
    fixed: FixedComponents
    triple: TrisecantTriple
    c1: complex = 0j
    c2: complex = 0j
    kummer_vectors: Optional[np.ndarray] = field(default=None, repr=False)


def kummer(
    Z: Any,
    B: Any,
    radius: int,
    index: Optional[Index] = None,
) -> KummerPoint:
    """Evaluate the Kummer map and its derivative at Z.

    The derivative of component ε is factor·(2∇Θ + 2πi·Θ·ε), the chain rule
    through both the argument 2Z + Bε and the exponential factor.

    Args:
        Z: Complex g-vector.
        B: RiemannMatrix or raw matrix.
        radius: Hypercube half-width of the theta sums over 2B.
        index: Index supplying the lattice table.

    Returns:
        A KummerPoint.
    """
    B = as_riemann_matrix(B)
    Z = as_complex_vector(Z, B.g, "Z")
    eps = binary_vectors(B.g)
    Beps = eps @ B.matrix
    W = 2 * Z[None, :] + Beps
    values, grads = theta_sums(W, B.scaled(2), radius, index=index)
    factor = np.exp(
        0.5 * np.pi * 1j * np.sum(Beps * eps, axis=1) + TWO_PI_I * (eps @ Z)
    )
    jacobian = factor[:, None] * (2 * grads + TWO_PI_I * values[:, None] * eps)

    return KummerPoint(values=factor * values, jacobian=jacobian)


def lambda_pair(
    a: Any,
    b: Any,
    B: Any,
    radius: int,
    index: Optional[Index] = None,
    char: Optional[Characteristic] = None,
) -> Tuple[complex, np.ndarray, np.ndarray]:
    """Evaluate λ(a, b) = Θ*(a+b)·Θ*(a−b) and its gradients.

    Args:
        a: Complex g-vector.
        b: Complex g-vector.
        B: RiemannMatrix or raw matrix.
        radius: Hypercube half-width.
        index: Index supplying the lattice table.
        char: Odd characteristic of Θ*. Defaults to (e_1/2, e_1/2).

    Returns:
        λ, ∇_a λ and ∇_b λ.
    """
    B = as_riemann_matrix(B)
    a = as_complex_vector(a, B.g, "a")
    b = as_complex_vector(b, B.g, "b")
    char = Characteristic.odd_default(B.g) if char is None else char
    plus = theta(a + b, B, char, radius, index)
    minus = theta(a - b, B, char, radius, index)

    value = plus.value * minus.value
    grad_a = minus.value * plus.gradient + plus.value * minus.gradient
    grad_b = minus.value * plus.gradient - plus.value * minus.gradient

    return complex(value), grad_a, grad_b


def linear_dependence_delta(KX: Any, KY: Any, KZ: Any) -> float:
    """Return the smallest singular value of the matrix [KX, KY, KZ].

    The tall matrix is first reduced to its 3×3 triangular factor by a QR
    factorization, whose singular values are those of the original.

    Args:
        KX: Complex vector.
        KY: Complex vector.
        KZ: Complex vector of the same length.

    Returns:
        The smallest singular value Δ.
    """
    cols = [np.asarray(v, dtype=complex).reshape(-1) for v in (KX, KY, KZ)]

    if len({c.size for c in cols}) != 1:
        raise ValueError("Kummer vectors must have the same length.")

    M = np.column_stack(cols)

    if M.shape[0] < 3:
        return 0.0

    R = np.linalg.qr(M, mode="r")

    return float(np.linalg.svd(R, compute_uv=False)[-1])


def is_trivial(
    X: Any,
    Y: Any,
    Z: Any,
    B: Any,
    tol: float = DEFAULT_TRIVIAL_TOL,
) -> bool:
    """Return True if two points coincide up to sign modulo the lattice.

    Args:
        X: Complex g-vector.
        Y: Complex g-vector.
        Z: Complex g-vector.
        B: RiemannMatrix or raw matrix.
        tol: Distance below which points are considered equal.

    Returns:
        True for a trivial configuration.
    """
    B = as_riemann_matrix(B)
    X, Y, Z = (as_complex_vector(v, B.g) for v in (X, Y, Z))

    for u, v in ((X, Y), (Y, Z), (X, Z)):
        for sign in (1, -1):
            wrapped, _, _ = wrap_to_fundamental(u - sign * v, B)

            if np.linalg.norm(wrapped) < tol:
                return True

    return False


def free_positions(
    g: int, pinned: Sequence[Position] = DEFAULT_PINNED
) -> List[int]:
    """Return flat indices into (X, Y, Z) of the free coordinates."""
    taken = {v * g + j for v, j in pinned}

    if len(taken) != len(pinned) or any(
        not (0 <= v < 3 and 0 <= j < g) for v, j in pinned
    ):
        raise ValueError("Pinned positions must be distinct and in range.")

    return [i for i in range(3 * g) if i not in taken]


def split_triple(
    triple: TrisecantTriple, pinned: Sequence[Position] = DEFAULT_PINNED
) -> Tuple[FixedComponents, np.ndarray]:
    """Split a triple into pinned components and free coordinates.

    Returns:
        (FixedComponents, x) with x of length 3g − len(pinned).
    """
    v = triple.stacked()
    g = triple.g
    fixed = FixedComponents(
        values=tuple(complex(v[p * g + j]) for p, j in pinned),
        positions=tuple(pinned),
    )

    return fixed, v[free_positions(g, pinned)]


def assemble_triple(
    x: Any, fixed: FixedComponents, g: int
) -> TrisecantTriple:
    """Rebuild a triple from free coordinates and pinned components."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    free = free_positions(g, fixed.positions)

    if x.size != len(free):
        raise ValueError(f"Free coordinates must have length {len(free)}.")

    v = np.zeros(3 * g, dtype=complex)
    v[free] = x

    for (p, j), value in zip(fixed.positions, fixed.values):
        v[p * g + j] = value

    return TrisecantTriple.from_stacked(v)


def triple_from_abel_images(
    a1: Any, a2: Any, a3: Any, a4: Any
) -> TrisecantTriple:
    """Build X, Y, Z from the Abel images of four points.

    X = ½(a3 + a4 − a1 − a2), Y = ½(a1 + a4 − a2 − a3),
    Z = ½(a1 + a3 − a2 − a4).
    """
    a1, a2, a3, a4 = (np.asarray(a, dtype=complex) for a in (a1, a2, a3, a4))

    return TrisecantTriple(
        X=0.5 * (a3 + a4 - a1 - a2),
        Y=0.5 * (a1 + a4 - a2 - a3),
        Z=0.5 * (a1 + a3 - a2 - a4),
    )


def fay_function(
    x: Any,
    fixed: FixedComponents,
    B: Any,
    radius: int,
    tol: float = DEFAULT_TRIVIAL_TOL,
    check_trivial: bool = True,
    index: Optional[Index] = None,
) -> FayEvaluation:
    """Evaluate the Fay function, its Jacobian and the dependence measure Δ.

    The triple is assembled from (fixed, x), each point is wrapped to the
    fundamental domain, and the pinned components take their wrapped values.

    Args:
        x: Free coordinates, length 3g − 4.
        fixed: Pinned components.
        B: RiemannMatrix or raw matrix.
        radius: Hypercube half-width of all theta sums.
        tol: Non-triviality tolerance.
        check_trivial: Raise on trivial configurations.
        index: Index supplying the lattice tables.

    Returns:
        A FayEvaluation.

    Raises:
        TrivialConfiguration: Two points coincide up to sign.
        DenominatorUnderflow: |λ(Y, Z)| < 1e-300.
    """
    B = as_riemann_matrix(B)
    g = B.g
    raw = assemble_triple(x, fixed, g)
    X, Y, Z = (wrap_to_fundamental(v, B)[0] for v in (raw.X, raw.Y, raw.Z))
    triple = TrisecantTriple(X, Y, Z)
    fixed, x = split_triple(triple, fixed.positions)

    if check_trivial and is_trivial(X, Y, Z, B, tol):
        raise TrivialConfiguration("Trisecant points coincide up to sign.")

    KX, KY, KZ = (kummer(v, B, radius, index) for v in (X, Y, Z))
    L1, dL1_Y, dL1_Z = lambda_pair(Y, Z, B, radius, index)
    L2, dL2_Y, dL2_X = lambda_pair(Y, X, B, radius, index)
    L3, dL3_X, dL3_Z = lambda_pair(X, Z, B, radius, index)

    if abs(L1) < UNDERFLOW:
        raise DenominatorUnderflow("Denominator λ(Y, Z) underflowed.")

    c1 = L2 / L1
    c2 = L3 / L1
    F = c1 * KZ.values + c2 * KY.values - KX.values

    # Coefficient gradients by the quotient rule.
    dc1 = (dL2_X / L1, dL2_Y / L1 - L2 * dL1_Y / L1**2, -L2 * dL1_Z / L1**2)
    dc2 = (dL3_X / L1, -L3 * dL1_Y / L1**2, dL3_Z / L1 - L3 * dL1_Z / L1**2)

    J_X = np.outer(KZ.values, dc1[0]) + np.outer(KY.values, dc2[0])
    J_X -= KX.jacobian
    J_Y = np.outer(KZ.values, dc1[1]) + np.outer(KY.values, dc2[1])
    J_Y += c2 * KY.jacobian
    J_Z = np.outer(KZ.values, dc1[2]) + np.outer(KY.values, dc2[2])
    J_Z += c1 * KZ.jacobian
    full = np.hstack([J_X, J_Y, J_Z])

    K = np.column_stack([KX.values, KY.values, KZ.values])

    return FayEvaluation(
        F=F,
        jacobian=full[:, free_positions(g, fixed.positions)],
        residual=float(np.linalg.norm(F)),
        delta=linear_dependence_delta(K[:, 0], K[:, 1], K[:, 2]),
        x=x,
        fixed=fixed,
        triple=triple,
        c1=complex(c1),
        c2=complex(c2),
        kummer_vectors=K,
    )
