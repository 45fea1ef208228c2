"""Tests for schottky.theta module."""

import numpy as np
import pytest

from schottky.errors import InvalidDelta
from schottky.index import Index
from schottky.riemann import Characteristic, RiemannMatrix
from schottky.siegel import siegel_reduce
from schottky.theta import (
    ThetaEval,
    binary_addition_residual,
    binary_vectors,
    characteristics_of,
    default_radius,
    theta,
    theta_via_zero_char,
    truncation_radius,
    wrap_to_fundamental,
)


def _half_char(rng, g):
    """Return a random half-integer characteristic."""
    return Characteristic.from_doubled(
        rng.integers(0, 2, g), rng.integers(0, 2, g)
    )


def _real_char(rng, g):
    """Return a random characteristic with entries in [-1/2, 1/2]."""
    return Characteristic(rng.uniform(-0.5, 0.5, g), rng.uniform(-0.5, 0.5, g))


def _small_z(rng, g, scale=0.3):
    """Return a random complex vector with small imaginary part."""
    return rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-scale, scale, g)


def test_truncation_radius():
    """Test the hypercube half-width formula."""
    assert truncation_radius(np.sqrt(3) / 2, 1e-12) == 4
    assert truncation_radius(1.0, 1e-12) == 4
    assert truncation_radius(0.1, 1e-12) > truncation_radius(1.0, 1e-12)
    assert truncation_radius(1.0, 1e-16) >= truncation_radius(1.0, 1e-8)

    for bad in (0, 1, -1e-3, 2):
        with pytest.raises(InvalidDelta):
            truncation_radius(1.0, bad)

    with pytest.raises(ValueError):
        truncation_radius(0.0, 1e-12)


def test_default_radius():
    """Test that the default radius respects the lower bound."""
    B = RiemannMatrix(1j * np.eye(2))

    assert default_radius(B) == 5
    assert default_radius(B, min_radius=2) == 4
    assert default_radius(RiemannMatrix([[0.05j]])) > 5


def test_theta_genus_one():
    """Test θ₃(0, i) = π^{1/4}/Γ(3/4)."""
    result = theta(np.zeros(1), RiemannMatrix([[1j]]), radius=20)

    assert isinstance(result, ThetaEval)
    assert result.value == pytest.approx(1.0864348112133080, abs=1e-14)
    assert abs(result.gradient[0]) < 1e-14


def test_theta_product_structure():
    """Test that a diagonal matrix factors into genus-one thetas."""
    B = RiemannMatrix(np.diag([1j, 1.5j]))
    z = np.array([0.1 + 0.05j, -0.2])
    t = theta(z, B, radius=10).value
    t1 = theta(z[:1], RiemannMatrix([[1j]]), radius=10).value
    t2 = theta(z[1:], RiemannMatrix([[1.5j]]), radius=10).value

    assert t == pytest.approx(t1 * t2, abs=1e-13)


def test_odd_theta_vanishes_at_zero():
    """Test that odd theta functions vanish at the origin."""
    B = RiemannMatrix([[1j, 0.3], [0.3, 1.2j]])
    odd = Characteristic.odd_default(2)

    assert odd.parity == "odd"
    assert abs(theta(np.zeros(2), B, odd, radius=8).value) < 1e-13


def test_periodicity(rng, random_matrix):
    """Test quasi-periodicity under the lattice."""
    for g in (1, 2, 3):
        B = random_matrix(g)

        for _ in range(4):
            char = _real_char(rng, g)
            z = _small_z(rng, g)
            m = rng.integers(-1, 2, g)
            n = rng.integers(-1, 2, g)
            lhs = theta(z + m + B.matrix @ n, B, char, radius=9).value
            factor = np.exp(
                2j * np.pi * (char.p @ m - char.q @ n)
                - 1j * np.pi * (n @ B.matrix @ n)
                - 2j * np.pi * (n @ z)
            )
            rhs = factor * theta(z, B, char, radius=9).value

            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_parity(rng, random_matrix):
    """Test Θ[p,q](−z) = (−1)^{4⟨p,q⟩} Θ[p,q](z)."""
    for g in (1, 2, 3):
        B = random_matrix(g)

        for _ in range(4):
            char = _half_char(rng, g)
            z = _small_z(rng, g)
            sign = 1 if char.parity == "even" else -1
            lhs = theta(-z, B, char, radius=8).value
            rhs = sign * theta(z, B, char, radius=8).value

            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_binary_addition(rng, random_matrix):
    """Test the binary addition theorem over random cases."""
    cases = [2] * 20 + [3] * 20 + [4] * 10

    for g in cases:
        B = random_matrix(g, scale=0.2)
        z1, z2 = _small_z(rng, g, 0.2), _small_z(rng, g, 0.2)
        a, b, c, d = (rng.integers(0, 2, g) / 2 for _ in range(4))

        assert binary_addition_residual(z1, z2, B, a, b, c, d, 6) <= 1e-9


def test_gradient_finite_differences(rng, random_matrix):
    """Test the gradient against central differences."""
    h = 1e-5

    for g in (1, 2, 3):
        B = random_matrix(g)
        char = _real_char(rng, g)
        z = _small_z(rng, g)
        result = theta(z, B, char, radius=8)

        for j in range(g):
            e = np.zeros(g)
            e[j] = h
            fd = (
                theta(z + e, B, char, radius=8).value
                - theta(z - e, B, char, radius=8).value
            ) / (2 * h)

            assert abs(fd - result.gradient[j]) <= 1e-6 * max(
                1.0, abs(result.gradient[j])
            )


def test_theta_via_zero_char(rng, random_matrix):
    """Test evaluation through the zero-characteristic table."""
    index = Index()
    B = random_matrix(3)
    table = index.get(B, 8)

    for _ in range(5):
        char = _half_char(rng, 3)
        z = _small_z(rng, 3)
        direct = theta(z, B, char, radius=8, index=index)
        shared = theta_via_zero_char(z, B, char, table=table, index=index)

        assert shared.value == pytest.approx(direct.value, abs=1e-10)
        assert np.allclose(shared.gradient, direct.gradient, atol=1e-9)

    with pytest.raises(ValueError):
        theta_via_zero_char(
            np.zeros(3),
            B,
            table=index.get(B, 8, np.full(3, 0.5)),
            index=index,
        )


def test_streamed_sums_match(random_matrix, rng):
    """Test that a small term budget gives the same value."""
    B = random_matrix(3)
    z = _small_z(rng, 3)
    full = theta(z, B, radius=6, index=Index())
    streamed = theta(z, B, radius=6, index=Index(max_terms=100))

    assert streamed.value == pytest.approx(full.value, abs=1e-13)


def test_characteristic_errors():
    """Test mismatched characteristics."""
    B = RiemannMatrix(1j * np.eye(2))

    with pytest.raises(ValueError):
        theta(np.zeros(2), B, Characteristic.zero(3))

    with pytest.raises(TypeError):
        theta(np.zeros(2), B, ([0, 0], [0, 0]))

    with pytest.raises(ValueError):
        theta(np.zeros(3), B)


def test_characteristics_of(random_matrix, rng):
    """Test recovering (p, q) from z = p + B q."""
    B = random_matrix(3)
    p, q = rng.normal(size=3), rng.normal(size=3)
    p2, q2 = characteristics_of(p + B.matrix @ q, B)

    assert np.allclose(p, p2)
    assert np.allclose(q, q2)


def test_wrap_to_fundamental(random_matrix, rng):
    """Test wrapping into the fundamental domain."""
    B = random_matrix(3)
    z = B.matrix[:, 0].copy()
    wrapped, m, n = wrap_to_fundamental(z, B)

    assert n.tolist() == [1, 0, 0]
    assert m.tolist() == [0, 0, 0]
    assert np.allclose(wrapped, 0)

    for _ in range(5):
        z = 3 * rng.normal(size=3) + B.matrix @ (3 * rng.normal(size=3))
        wrapped, m, n = wrap_to_fundamental(z, B)
        p, q = characteristics_of(wrapped, B)

        assert np.allclose(z, wrapped + m + B.matrix @ n)
        assert np.all(np.abs(p) <= 0.5 + 1e-12)
        assert np.all(np.abs(q) <= 0.5 + 1e-12)


def test_wrap_half_rounds_toward_zero():
    """Test that exact halves are kept rather than flipped."""
    B = RiemannMatrix(1j * np.eye(2))
    _, m, n = wrap_to_fundamental(np.array([0.5, -0.5]), B)

    assert m.tolist() == [0, 0]
    assert n.tolist() == [0, 0]


def test_binary_vectors():
    """Test the ordering of {0,1}^g."""
    eps = binary_vectors(2)

    assert eps.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert binary_vectors(4).shape == (16, 4)


@pytest.mark.parametrize("g", [2, 3])
def test_truncation_bound(rng, random_matrix, g):
    """Test that one more hypercube shell changes Θ by less than δ."""
    delta = 1e-8
    B, report = siegel_reduce(random_matrix(g, scale=0.4).scaled(0.6))
    N = truncation_radius(report.output_ymin, delta)

    for z in (np.zeros(g), rng.uniform(-0.5, 0.5, g)):
        char = _half_char(rng, g)
        inner = theta(z, B, char, N).value
        outer = theta(z, B, char, N + 1).value

        assert abs(outer - inner) < delta
