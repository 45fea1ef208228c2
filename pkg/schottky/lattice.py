"""Lattice tools for the imaginary part of a Riemann matrix.

The imaginary part Y = TᵀT of a Riemann matrix defines the lattice T·ℤ^g.
Its shortest vector length y_min controls how fast theta series converge, and
driving it up is the job of Siegel reduction.  This module provides the
Cholesky factor, LLL basis reduction with the accompanying unimodular matrix,
exact shortest-vector enumeration, and the integer helpers needed to turn a
shortest vector into a unimodular basis change.

Usage:
    >>> T = cholesky_im(RiemannMatrix(1j * np.diag([2.0, 3.0])))
    >>> shortest_lattice_vector(T)
    <LatticeResult vector=[1 0], length=1.414>
"""

from dataclasses import dataclass
from typing import Any, List, Tuple

import numpy as np

from .errors import NotPositiveDefinite, RankDeficient
from .riemann import RiemannMatrix
from .utils import round_half_toward_zero

RANK_TOL = 1e-13
TIE_TOL = 1e-10


@dataclass(frozen=True)
class LatticeResult:
    """Shortest vector of a lattice T·ℤ^g.

    Attributes:
        vector: Integer coefficient vector n*.
        length: Euclidean length ‖T n*‖.
    """

    vector: np.ndarray
    length: float

    def __repr__(self) -> str:
        """Return a printable representation."""
        return (
            f"<{type(self).__name__} vector={self.vector}, "
            f"length={self.length:.4g}>"
        )


def cholesky_im(B: RiemannMatrix) -> np.ndarray:
    """Return the upper-triangular T with Im B = TᵀT.

    Args:
        B: A RiemannMatrix.

    Returns:
        A real upper-triangular g×g array.

    Raises:
        NotPositiveDefinite: Im B is not positive definite.
    """
    Y = B.imag if isinstance(B, RiemannMatrix) else np.asarray(B).imag

    try:
        L = np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(
            "Imaginary part of a Riemann matrix must be positive definite."
        )

    return np.triu(L.T)


def _check_basis(T: Any) -> np.ndarray:
    """Validate a square real basis with full rank."""
    T = np.array(T, dtype=float)

    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise RankDeficient("Lattice basis must be a square real matrix.")

    s = np.linalg.svd(T, compute_uv=False)

    if s[-1] <= RANK_TOL * max(s[0], 1.0):
        raise RankDeficient("Lattice basis must have full rank.")

    return T


def _gram_schmidt(b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return the Gram-Schmidt coefficients and squared norms of columns."""
    n = b.shape[1]
    bstar = np.zeros_like(b)
    mu = np.zeros((n, n))
    norms = np.zeros(n)

    for i in range(n):
        v = b[:, i].copy()

        for j in range(i):
            mu[i, j] = np.dot(b[:, i], bstar[:, j]) / norms[j]
            v -= mu[i, j] * bstar[:, j]

        bstar[:, i] = v
        norms[i] = np.dot(v, v)

    return mu, norms


def lll_reduce(
    basis: Any, delta: float = 0.99
) -> Tuple[np.ndarray, np.ndarray]:
    """LLL-reduce the columns of a real basis.

    Args:
        basis: Square real matrix whose columns span the lattice.
        delta: Lovász parameter in (1/4, 1).

    Returns:
        The reduced basis and the unimodular integer matrix V with
        reduced = basis @ V.

    Raises:
        RankDeficient: The basis does not have full rank.

    Usage:
        >>> reduced, V = lll_reduce(np.array([[1.0, 0.9], [0.0, 0.1]]))
    """
    b = _check_basis(basis).copy()
    n = b.shape[1]
    V = np.eye(n, dtype=np.int64)
    k = 1

    while k < n:
        # Size reduction of column k against all earlier columns.
        for j in range(k - 1, -1, -1):
            mu, _ = _gram_schmidt(b)
            r = int(np.rint(mu[k, j]))

            if r:
                b[:, k] -= r * b[:, j]
                V[:, k] -= r * V[:, j]

        mu, norms = _gram_schmidt(b)

        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[:, [k - 1, k]] = b[:, [k, k - 1]]
            V[:, [k - 1, k]] = V[:, [k, k - 1]]
            k = max(k - 1, 1)

    return b, V


def _normalize_sign(n: np.ndarray) -> np.ndarray:
    """Flip n so that its first nonzero entry is positive."""
    nz = np.flatnonzero(n)

    if nz.size and n[nz[0]] < 0:
        return -n

    return n


def _enumerate_short(
    R: np.ndarray, radius_sq: float
) -> List[Tuple[float, np.ndarray]]:
    """Enumerate all nonzero m with ‖R m‖² ≤ radius_sq.

    R is upper triangular.  The enumeration runs from the last coordinate to
    the first, bounding each coordinate by the remaining squared radius.
    """
    n = R.shape[0]
    diag = np.diag(R)
    found: List[Tuple[float, np.ndarray]] = []
    m = np.zeros(n, dtype=np.int64)

    def descend(i: int, partial: float) -> None:
        center = -np.dot(R[i, i + 1 :], m[i + 1 :]) / diag[i]
        budget = radius_sq - partial

        if budget < 0:
            return

        half = np.sqrt(budget) / abs(diag[i])
        lo = int(np.ceil(center - half - 1e-12))
        hi = int(np.floor(center + half + 1e-12))

        for v in range(lo, hi + 1):
            m[i] = v
            t = diag[i] * (v - center)
            s = partial + t * t

            if s > radius_sq * (1 + 1e-12):
                continue

            if i == 0:
                if np.any(m):
                    found.append((s, m.copy()))
            else:
                descend(i - 1, s)

        m[i] = 0

        return

    descend(n - 1, 0.0)

    return found


def shortest_lattice_vector(T: Any) -> LatticeResult:
    """Find the exact shortest nonzero vector of the lattice T·ℤ^g.

    The basis is LLL-reduced first; the shortest reduced column bounds a
    Fincke-Pohst enumeration that collects every candidate.  Among vectors of
    equal length the lexicographically smallest integer vector with first
    nonzero entry positive is returned.

    Args:
        T: Square real basis, typically from cholesky_im.

    Returns:
        A LatticeResult with the coefficient vector in the original basis.

    Raises:
        RankDeficient: The basis does not have full rank.

    Usage:
        >>> shortest_lattice_vector(np.eye(3)).length
        1.0
    """
    T = _check_basis(T)
    reduced, V = lll_reduce(T)
    bound = float(np.min(np.sum(reduced * reduced, axis=0)))

    _, R = np.linalg.qr(reduced)
    candidates = _enumerate_short(R, bound * (1 + 1e-9))

    # The LLL columns themselves are always admissible.
    if not candidates:  # pragma: no cover
        j = int(np.argmin(np.sum(reduced * reduced, axis=0)))
        e = np.zeros(T.shape[0], dtype=np.int64)
        e[j] = 1
        candidates = [(bound, e)]

    exact = [
        (float(np.dot(T @ (V @ m), T @ (V @ m))), V @ m) for _, m in candidates
    ]
    best = min(s for s, _ in exact)
    ties = [
        tuple(int(x) for x in _normalize_sign(n))
        for s, n in exact
        if s <= best * (1 + TIE_TOL)
    ]
    vector = np.array(min(ties), dtype=np.int64)

    return LatticeResult(
        vector=vector, length=float(np.linalg.norm(T @ vector))
    )


def shortest_vector_length(B: RiemannMatrix) -> float:
    """Return y_min, the shortest vector length of the lattice of Im B."""
    return shortest_lattice_vector(cholesky_im(B)).length


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (d, s, t) with s·a + t·b = d = gcd(a, b) ≥ 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1

    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t

    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t

    return old_r, old_s, old_t


def unimodular_completion(v: Any) -> np.ndarray:
    """Return a unimodular integer matrix whose first column is v.

    Args:
        v: A primitive integer vector (gcd of its entries is 1).

    Returns:
        An integer matrix U with det U = ±1 and U[:, 0] = v.

    Raises:
        ValueError: v is zero or not primitive.
    """
    w = [int(x) for x in np.asarray(v).reshape(-1)]
    n = len(w)
    U = np.eye(n, dtype=np.int64)

    # Eliminate entries bottom-up; U accumulates the inverse operations so
    # that U @ e_1 == v at the end.
    for i in range(n - 1, 0, -1):
        a, b = w[i - 1], w[i]

        if b == 0:
            continue

        d, s, t = _egcd(a, b)
        # M = [[s, t], [-b/d, a/d]] maps (a, b) to (d, 0); det M = 1.
        inv = np.array([[a // d, -t], [b // d, s]], dtype=np.int64)
        U[:, [i - 1, i]] = U[:, [i - 1, i]] @ inv
        w[i - 1], w[i] = d, 0

    if abs(w[0]) != 1:
        raise ValueError("Vector must be primitive and nonzero.")

    if w[0] == -1:
        U[:, 0] = -U[:, 0]

    return U


def integer_inverse(U: Any) -> np.ndarray:
    """Return the exact inverse of a unimodular integer matrix.

    Raises:
        ValueError: U is not unimodular.
    """
    U = np.asarray(U, dtype=np.int64)
    inv = np.rint(np.linalg.inv(U.astype(float))).astype(np.int64)

    if not np.array_equal(U @ inv, np.eye(U.shape[0], dtype=np.int64)):
        raise ValueError("Matrix must be unimodular.")

    return inv


def minkowski_like_basis(Y: Any) -> np.ndarray:
    """Return a unimodular U making U Y Uᵀ start with the shortest vector.

    The lattice of Y is LLL-reduced, then the shortest vector of the reduced
    lattice is completed to a unimodular basis.  The result is the row-basis
    change for B ↦ U B Uᵀ.

    Args:
        Y: Real symmetric positive-definite matrix.

    Returns:
        An integer matrix with determinant ±1.
    """
    Y = np.asarray(Y, dtype=float)
    T = np.triu(np.linalg.cholesky(Y).T)
    _, V = lll_reduce(T)
    Y1 = V.T @ Y @ V
    T1 = np.triu(np.linalg.cholesky(0.5 * (Y1 + Y1.T)).T)
    s = shortest_lattice_vector(T1).vector
    W = unimodular_completion(s)

    return (V @ W).T


def symmetric_round(X: Any) -> np.ndarray:
    """Round a real symmetric matrix entrywise, half toward zero."""
    S = round_half_toward_zero(np.asarray(X, dtype=float))

    return np.triu(S) + np.triu(S, 1).T
