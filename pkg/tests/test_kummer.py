"""Tests for schottky.kummer module."""

import numpy as np
import pytest

from schottky.errors import TrivialConfiguration
from schottky.kummer import (
    DEFAULT_PINNED,
    FayEvaluation,
    FixedComponents,
    TrisecantTriple,
    assemble_triple,
    fay_function,
    free_positions,
    is_trivial,
    kummer,
    lambda_pair,
    linear_dependence_delta,
    split_triple,
    triple_from_abel_images,
)
from schottky.riemann import Characteristic, RiemannMatrix
from schottky.siegel import siegel_reduce
from schottky.theta import default_radius, theta
from schottky.zoo import diagonal_perturbation, embedded


def _point(rng, B, spread=0.3):
    """Return p + B q with p, q inside the fundamental domain."""
    p = rng.uniform(-spread, spread, B.g)
    q = rng.uniform(-spread, spread, B.g)

    return p + B.matrix @ q


def _triple(rng, B):
    """Return a random non-trivial triple."""
    return TrisecantTriple(*(_point(rng, B) for _ in range(3)))


def test_kummer_genus_one():
    """Test the two Kummer components of B = (i) at the origin."""
    n = np.arange(-20, 21)
    even = np.sum(np.exp(-2 * np.pi * n**2))
    odd = np.sum(np.exp(-2 * np.pi * (n + 0.5) ** 2))
    result = kummer(np.zeros(1), RiemannMatrix([[1j]]), radius=10)

    assert result.values[0] == pytest.approx(even, abs=1e-13)
    assert result.values[1] == pytest.approx(odd, abs=1e-13)


def test_kummer_shape_and_evenness(rng, random_matrix):
    """Test the 2^g shape and K(Z) = K(−Z)."""
    B = random_matrix(4)

    for _ in range(20):
        Z = _point(rng, B)
        plus = kummer(Z, B, radius=5)
        minus = kummer(-Z, B, radius=5)

        assert plus.values.shape == (16,)
        assert plus.jacobian.shape == (16, 4)
        assert np.allclose(plus.values, minus.values, atol=1e-10)


def test_kummer_jacobian_finite_differences(rng, random_matrix):
    """Test the Kummer derivative against central differences."""
    h = 1e-5

    for g in (2, 3):
        B = random_matrix(g)
        Z = _point(rng, B)
        result = kummer(Z, B, radius=6)

        for j in range(g):
            e = np.zeros(g)
            e[j] = h
            fd = (
                kummer(Z + e, B, radius=6).values
                - kummer(Z - e, B, radius=6).values
            ) / (2 * h)

            assert np.linalg.norm(fd - result.jacobian[:, j]) <= 1e-6 * max(
                1.0, np.linalg.norm(result.jacobian[:, j])
            )


def test_lambda_pair(rng, random_matrix):
    """Test λ against theta products and its symmetries."""
    B = random_matrix(3)
    odd = Characteristic.odd_default(3)
    a, b = _point(rng, B), _point(rng, B)
    value, _, _ = lambda_pair(a, b, B, radius=7)
    expected = (
        theta(a + b, B, odd, radius=7).value
        * theta(a - b, B, odd, radius=7).value
    )

    assert value == pytest.approx(expected, abs=1e-12)
    assert lambda_pair(a, -b, B, radius=7)[0] == pytest.approx(
        value, abs=1e-12
    )
    assert abs(lambda_pair(a, a, B, radius=7)[0]) < 1e-13


def test_lambda_pair_gradients(rng, random_matrix):
    """Test both λ gradients against central differences."""
    h = 1e-5
    B = random_matrix(2)
    a, b = _point(rng, B), _point(rng, B)
    _, grad_a, grad_b = lambda_pair(a, b, B, radius=7)

    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd_a = (
            lambda_pair(a + e, b, B, radius=7)[0]
            - lambda_pair(a - e, b, B, radius=7)[0]
        ) / (2 * h)
        fd_b = (
            lambda_pair(a, b + e, B, radius=7)[0]
            - lambda_pair(a, b - e, B, radius=7)[0]
        ) / (2 * h)

        assert abs(fd_a - grad_a[j]) <= 1e-6 * max(1.0, abs(grad_a[j]))
        assert abs(fd_b - grad_b[j]) <= 1e-6 * max(1.0, abs(grad_b[j]))


def test_linear_dependence_delta():
    """Test the smallest singular value of [KX, KY, KZ]."""
    v = np.array([1.0, 2.0j, -1.0, 0.5])
    e = np.eye(8)

    assert linear_dependence_delta(v, v, v) < 1e-15
    assert linear_dependence_delta(v, v[::-1], np.ones(4)) > 0
    assert linear_dependence_delta(e[0], e[1], e[2]) == pytest.approx(1.0)
    assert linear_dependence_delta([1, 0], [0, 1], [1, 1]) == 0.0

    with pytest.raises(ValueError):
        linear_dependence_delta(e[0], e[1], np.ones(4))


def test_is_trivial(rng, random_matrix):
    """Test detection of coincident points up to sign and lattice."""
    B = random_matrix(3)
    X, Z = _point(rng, B), _point(rng, B)
    lattice = np.array([1, 0, -1]) + B.matrix @ np.array([0, 1, 0])

    assert is_trivial(X, X, Z, B)
    assert is_trivial(X, -X + lattice, Z, B)
    assert is_trivial(X, Z, Z + lattice, B)

    for _ in range(5):
        triple = _triple(rng, B)

        assert not is_trivial(triple.X, triple.Y, triple.Z, B)


def test_free_positions():
    """Test the free coordinate indices."""
    assert free_positions(3) == [2, 4, 5, 7, 8]
    assert len(free_positions(4)) == 8

    with pytest.raises(ValueError):
        free_positions(3, ((0, 0), (0, 0)))

    with pytest.raises(ValueError):
        free_positions(3, ((3, 0),))

    with pytest.raises(ValueError):
        free_positions(2, ((0, 2),))


def test_split_and_assemble(rng, random_matrix):
    """Test splitting a triple into pinned and free parts."""
    B = random_matrix(4)
    triple = _triple(rng, B)
    fixed, x = split_triple(triple)

    assert fixed.positions == DEFAULT_PINNED
    assert x.shape == (8,)
    assert fixed.X1 == triple.X[0]
    assert fixed.X2 == triple.X[1]
    assert fixed.Y1 == triple.Y[0]
    assert fixed.Z1 == triple.Z[0]
    assert np.array_equal(
        assemble_triple(x, fixed, 4).stacked(), triple.stacked()
    )

    with pytest.raises(ValueError):
        assemble_triple(x[:-1], fixed, 4)

    with pytest.raises(ValueError):
        FixedComponents(values=(0j,))

    with pytest.raises(ValueError):
        FixedComponents(values=(np.nan, 0j, 0j, 0j))


def test_custom_pinned_positions(rng, random_matrix):
    """Test pinning a different set of components."""
    B = random_matrix(3)
    pinned = ((0, 2), (1, 1), (1, 2), (2, 2))
    triple = _triple(rng, B)
    fixed, x = split_triple(triple, pinned)

    assert fixed.value_at((1, 1)) == triple.Y[1]
    assert np.array_equal(
        assemble_triple(x, fixed, 3).stacked(), triple.stacked()
    )


def test_triple_from_abel_images(rng):
    """Test the combination of four Abel images."""
    a1, a2, a3, a4 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    triple = triple_from_abel_images(a1, a2, a3, a4)

    assert np.allclose(triple.X + triple.Y, a4 - a2)
    assert np.allclose(triple.X + triple.Z, a3 - a2)
    assert np.allclose(triple.Y + triple.Z, a1 - a2)
    assert triple.g == 4


def test_fay_function_collapses_on_equal_points(rng, random_matrix):
    """Test c₁ = 0, c₂ = 1 and F = 0 when Y = X."""
    B = random_matrix(3)
    X, Z = _point(rng, B), _point(rng, B)
    fixed, x = split_triple(TrisecantTriple(X, X.copy(), Z))
    result = fay_function(x, fixed, B, radius=6, check_trivial=False)

    assert isinstance(result, FayEvaluation)
    assert abs(result.c1) < 1e-10
    assert result.c2 == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.abs(result.F) <= 1e-10)

    with pytest.raises(TrivialConfiguration):
        fay_function(x, fixed, B, radius=6)


def test_fay_jacobian_finite_differences(rng, random_matrix):
    """Test the Fay Jacobian in every free coordinate."""
    h = 1e-6
    B = random_matrix(3)
    fixed, x = split_triple(_triple(rng, B))
    result = fay_function(x, fixed, B, radius=6)

    assert result.jacobian.shape == (8, 5)
    assert result.kummer_vectors.shape == (8, 3)
    assert result.residual == pytest.approx(np.linalg.norm(result.F))

    for k in range(x.size):
        e = np.zeros(x.size, dtype=complex)
        e[k] = h
        fd = (
            fay_function(x + e, fixed, B, radius=6).F
            - fay_function(x - e, fixed, B, radius=6).F
        ) / (2 * h)
        col = result.jacobian[:, k]

        assert np.linalg.norm(fd - col) <= 1e-5 * max(1.0, np.linalg.norm(col))


def test_fay_wraps_points(rng, random_matrix):
    """Test that evaluation wraps every point and updates pinned values."""
    B = random_matrix(3)
    triple = _triple(rng, B)
    shift = np.array([2, -1, 0]) + B.matrix @ np.array([1, 0, -1])
    moved = TrisecantTriple(triple.X + shift, triple.Y, triple.Z - shift)
    fixed, x = split_triple(moved)
    result = fay_function(x, fixed, B, radius=6)

    assert np.allclose(result.triple.X, triple.X)
    assert np.allclose(result.triple.Z, triple.Z)
    assert result.fixed.X1 == pytest.approx(triple.X[0])
    assert result.fixed.Z1 == pytest.approx(triple.Z[0])


def test_fay_bring_abel_triple():
    """Test the Fay residual at the printed Bring Abel-map triple."""
    B = embedded("bring").matrix
    columns = embedded("bring_abelmap").columns
    triple = triple_from_abel_images(*columns)
    fixed, x = split_triple(triple)
    result = fay_function(x, fixed, B, radius=default_radius(B))

    assert result.residual <= 5e-3
    assert result.delta <= 5e-3


def test_fay_residual_off_locus(rng, rm_tau):
    """Test that random triples on a perturbed matrix are far from zero."""
    B, _ = siegel_reduce(diagonal_perturbation(rm_tau, 0.1))

    for _ in range(5):
        fixed, x = split_triple(_triple(rng, B))

        assert fay_function(x, fixed, B, radius=5).residual > 1e-5
