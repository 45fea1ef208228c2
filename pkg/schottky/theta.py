"""Riemann theta functions with characteristics.

Theta functions are evaluated by summing the lattice series

    Θ[p,q](z, B) = Σ_N exp(πi⟨N+p, B(N+p)⟩ + 2πi⟨N+p, z+q⟩)

over the hypercube N ∈ [-N_δ, N_δ]^g.  The exponential terms of a block of
lattice points are formed once and shared by the value (a sum) and the
gradient (one matrix product with the points), so every evaluation returns
both.  Quadratic forms come from an Index of LatticeTables keyed on the
matrix, the radius and the shift.

Usage:
    >>> from schottky.theta import theta
    >>> theta(np.zeros(1), RiemannMatrix([[1j]]), radius=20).value
    (1.0864348112133...+0j)
"""

from dataclasses import dataclass
import math
from typing import Any, Optional, Tuple

import numpy as np

from .errors import InvalidDelta
from .index import DEFAULT_INDEX, Index, LatticeTable
from .lattice import shortest_vector_length
from .riemann import Characteristic, RiemannMatrix, as_riemann_matrix
from .utils import as_complex_vector, round_half_toward_zero

DEFAULT_THETA_TOL = 1e-12
DEFAULT_MIN_RADIUS = 5
TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class ThetaEval:
    """A theta value and its gradient with respect to z.

    Attributes:
        value: Θ[p,q](z, B).
        gradient: Complex g-vector of ∂Θ/∂z_i.
    """

    value: complex
    gradient: np.ndarray


def truncation_radius(y_min: float, delta: float) -> int:
    """Return the hypercube half-width N_δ for precision delta.

    N_δ = ceil(sqrt(-ln δ / (π y_min)) + 1/2), with y_min the shortest vector
    length of the lattice of Im B.

    Args:
        y_min: Positive shortest vector length.
        delta: Precision in (0, 1).

    Returns:
        A positive integer.

    Raises:
        InvalidDelta: delta is not in (0, 1).
        ValueError: y_min is not positive.

    Usage:
        >>> truncation_radius(math.sqrt(3) / 2, 1e-12)
        4
    """
    if not 0 < delta < 1:
        raise InvalidDelta("Precision must lie strictly between 0 and 1.")

    if not y_min > 0:
        raise ValueError("Shortest vector length must be positive.")

    radius = math.sqrt(-math.log(delta) / (math.pi * y_min)) + 0.5

    return int(math.ceil(radius))


def default_radius(
    B: RiemannMatrix,
    tol: float = DEFAULT_THETA_TOL,
    min_radius: int = DEFAULT_MIN_RADIUS,
) -> int:
    """Return max(truncation_radius(y_min(B), tol), min_radius).

    Args:
        B: The Riemann matrix.
        tol: Truncation precision.
        min_radius: Lower bound on the radius.

    Returns:
        The radius used for theta sums on B.
    """
    return max(truncation_radius(shortest_vector_length(B), tol), min_radius)


def _sum_table(
    W: np.ndarray, table: LatticeTable, max_terms: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Sum exp(πi quad + 2πi⟨P, w⟩) and its P-weighted sum per row w.

    Partial sums are accumulated block by block in table order.
    """
    k, g = W.shape
    values = np.zeros(k, dtype=complex)
    grads = np.zeros((k, g), dtype=complex)
    max_rows = max(1, max_terms // max(k, 1))

    for points, quad in table.chunks(max_rows):
        E = np.exp(np.pi * 1j * quad[None, :] + TWO_PI_I * (W @ points.T))
        values += E.sum(axis=1)
        grads += E @ points

    return values, TWO_PI_I * grads


def theta_sums(
    W: Any,
    B: RiemannMatrix,
    radius: int,
    shift: Optional[np.ndarray] = None,
    index: Optional[Index] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate Σ exp(πi⟨N+p,B(N+p)⟩ + 2πi⟨N+p,w⟩) for a batch of w.

    Args:
        W: Complex (k, g) array of arguments w = z + q.
        B: The Riemann matrix.
        radius: Hypercube half-width.
        shift: The characteristic p. Defaults to zero.
        index: Index supplying the lattice table.

    Returns:
        Values (k,) and gradients (k, g).
    """
    index = DEFAULT_INDEX if index is None else index
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    table = index.get(B, radius, shift)

    return _sum_table(W, table, index.max_terms)


def theta(
    z: Any,
    B: Any,
    char: Optional[Characteristic] = None,
    radius: int = DEFAULT_MIN_RADIUS,
    index: Optional[Index] = None,
) -> ThetaEval:
    """Evaluate Θ[p,q](z, B) and its gradient by direct summation.

    Args:
        z: Complex g-vector.
        B: RiemannMatrix or raw matrix.
        char: Characteristic (p, q). Defaults to zero.
        radius: Hypercube half-width N_δ.
        index: Index supplying the lattice table.

    Returns:
        A ThetaEval.

    Usage:
        >>> theta(np.zeros(2), RiemannMatrix(1j * np.eye(2)))
    """
    B = as_riemann_matrix(B)
    z = as_complex_vector(z, B.g)
    char = Characteristic.zero(B.g) if char is None else char
    _check_char(char, B.g)

    values, grads = theta_sums(
        (z + char.q)[None, :], B, radius, char.p, index=index
    )

    return ThetaEval(value=complex(values[0]), gradient=grads[0])


def theta_via_zero_char(
    z: Any,
    B: Any,
    char: Optional[Characteristic] = None,
    table: Optional[LatticeTable] = None,
    radius: int = DEFAULT_MIN_RADIUS,
    index: Optional[Index] = None,
) -> ThetaEval:
    """Evaluate Θ[p,q](z, B) through the zero-characteristic theta function.

    Θ[p,q](z) = Θ(z + Bp + q)·exp(πi⟨p,Bp⟩ + 2πi⟨p,z+q⟩), reusing the
    unshifted table of ⟨N, BN⟩ for every characteristic.

    Args:
        z: Complex g-vector.
        B: RiemannMatrix or raw matrix.
        char: Characteristic (p, q). Defaults to zero.
        table: Precomputed unshifted LatticeTable for B.
        radius: Hypercube half-width, used when no table is given.
        index: Index supplying the table when none is given.

    Returns:
        A ThetaEval.
    """
    B = as_riemann_matrix(B)
    z = as_complex_vector(z, B.g)
    char = Characteristic.zero(B.g) if char is None else char
    _check_char(char, B.g)
    index = DEFAULT_INDEX if index is None else index

    if table is None:
        table = index.get(B, radius)
    elif np.any(table.shift):
        raise ValueError("Table must be unshifted.")

    p, q = char.p, char.q
    w = z + B.matrix @ p + q
    values, grads = _sum_table(w[None, :], table, index.max_terms)
    factor = np.exp(
        np.pi * 1j * (p @ B.matrix @ p) + TWO_PI_I * (p @ (z + q))
    )

    return ThetaEval(
        value=complex(factor * values[0]),
        gradient=factor * (grads[0] + TWO_PI_I * p * values[0]),
    )


def characteristics_of(z: Any, B: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Return the real vectors (p, q) with z = p + B q.

    The 2g×2g real system [[I, Re B], [0, Im B]]·(p, q) = (Re z, Im z) is
    solved directly.

    Args:
        z: Complex g-vector.
        B: RiemannMatrix or raw matrix.

    Returns:
        The real characteristics p and q.
    """
    B = as_riemann_matrix(B)
    g = B.g
    z = as_complex_vector(z, g)
    system = np.block([[np.eye(g), B.real], [np.zeros((g, g)), B.imag]])
    sol = np.linalg.solve(system, np.concatenate([z.real, z.imag]))

    return sol[:g], sol[g:]


def wrap_to_fundamental(
    z: Any, B: Any
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Move z into the fundamental domain of the Jacobian.

    Args:
        z: Complex g-vector.
        B: RiemannMatrix or raw matrix.

    Returns:
        (z_wrapped, m, n) with z = z_wrapped + m + B n and the characteristics
        of z_wrapped in [-1/2, 1/2]; halves round toward zero.

    Usage:
        >>> wrap_to_fundamental(B.matrix[:, 0], B)
        (array([0j, ...]), array([0, ...]), array([1, 0, ...]))
    """
    B = as_riemann_matrix(B)
    z = as_complex_vector(z, B.g)
    p, q = characteristics_of(z, B)
    n = round_half_toward_zero(q)
    m = round_half_toward_zero(p)
    wrapped = z - m - B.matrix @ n

    return wrapped, m, n


def binary_addition_residual(
    z1: Any,
    z2: Any,
    B: Any,
    alpha: Any,
    beta: Any,
    gamma: Any,
    delta: Any,
    radius: int = DEFAULT_MIN_RADIUS,
    index: Optional[Index] = None,
) -> float:
    """Return the residual of the binary addition theorem.

    Θ[α,γ](z1+z2, B)·Θ[β,δ](z1−z2, B) is compared to
    Σ_ε Θ[(α+β+ε)/2, γ+δ](2z1, 2B)·Θ[(α−β+ε)/2, γ−δ](2z2, 2B).

    Args:
        z1: Complex g-vector.
        z2: Complex g-vector.
        B: RiemannMatrix or raw matrix.
        alpha: Real g-vector.
        beta: Real g-vector.
        gamma: Real g-vector.
        delta: Real g-vector.
        radius: Hypercube half-width.
        index: Index supplying the lattice tables.

    Returns:
        Absolute difference of both sides divided by max(1, |lhs|).
    """
    B = as_riemann_matrix(B)
    g = B.g
    z1 = as_complex_vector(z1, g)
    z2 = as_complex_vector(z2, g)
    a, b, c, d = (
        np.asarray(v, dtype=float) for v in (alpha, beta, gamma, delta)
    )
    B2 = B.scaled(2)

    lhs = (
        theta(z1 + z2, B, Characteristic(a, c), radius, index).value
        * theta(z1 - z2, B, Characteristic(b, d), radius, index).value
    )
    rhs = 0j

    for eps in binary_vectors(g):
        first = Characteristic((a + b + eps) / 2, c + d)
        second = Characteristic((a - b + eps) / 2, c - d)
        rhs += (
            theta(2 * z1, B2, first, radius, index).value
            * theta(2 * z2, B2, second, radius, index).value
        )

    return float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def binary_vectors(g: int) -> np.ndarray:
    """Return all ε ∈ {0,1}^g as rows, ε_1 most significant."""
    grid = np.indices((2,) * g).reshape(g, -1).T

    return grid.astype(float)


def _check_char(char: Characteristic, g: int) -> None:
    """Check that a characteristic matches the genus."""
    if not isinstance(char, Characteristic):
        raise TypeError("Characteristic must be a Characteristic instance.")

    if char.g != g:
        raise ValueError(f"Characteristic must have length {g}.")

    return
