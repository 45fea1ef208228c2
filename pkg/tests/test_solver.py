"""Tests for schottky.solver module."""

import math

import numpy as np
import pytest

import schottky.solver
from schottky.errors import DegenerateEll, TrivialConfiguration
from schottky.kummer import (
    TrisecantTriple,
    assemble_triple,
    is_trivial,
    split_triple,
)
from schottky.riemann import RiemannMatrix
from schottky.siegel import SymplecticTransform, apply_modular, siegel_reduce
from schottky.solver import (
    IterationRecord,
    IterationTrace,
    SolverConfig,
    StartResult,
    StopReason,
    SweepRow,
    Verdict,
    default_perturbation,
    initial_triple,
    newton_solve,
    residual_vs_precision_sweep,
    schottky_test,
)
from schottky.zoo import diagonal_perturbation, genus4_family


@pytest.fixture(scope="module")
def rm_verdict():
    """Return the verdict of the default sweep on Rm_τ, τ = 1 + i."""
    return schottky_test(genus4_family(1 + 1j), SolverConfig(threads=1))


def test_config_defaults():
    """Test the default configuration and its ℓ sweep."""
    cfg = SolverConfig()

    assert cfg.delta == 1e-10
    assert cfg.start_strategy == "half_period"
    assert cfg.ells() == pytest.approx([0.1, 0.2, 0.3, 0.4, 0.5])
    assert SolverConfig(ell0=0.25, d_ell=0.5, ell_max=0.5).ells() == [0.25]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"delta": 0},
        {"ell0": 0},
        {"ell0": 0.6, "ell_max": 0.5},
        {"ell_max": 1.0},
        {"d_ell": 0},
        {"n_max": 0},
        {"n_max": 2.5},
        {"start_strategy": "bogus"},
        {"seed": -1},
        {"starts_per_ell": 0},
        {"pinned": ((0, 0), (0, 1), (1, 0))},
        {"max_halvings": -1},
        {"growth_limit": 1.0},
        {"threads": 0},
    ],
)
def test_config_validation(kwargs):
    """Test rejected configurations."""
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_config_serialization():
    """Test the configuration document form."""
    cfg = SolverConfig(delta=1e-8, start_strategy="random", seed=3, threads=2)
    doc = cfg._serialize_to_dict()

    assert doc["pinned"] == [[0, 0], [0, 1], [1, 0], [2, 0]]
    assert SolverConfig._deserialize_from_dict(doc) == cfg


def test_initial_triple_half_period():
    """Test the half-period start X = (ℓ/2)(e + B e)."""
    B = genus4_family(1 + 1j)
    triple = initial_triple(B, 0.1)
    e2 = np.array([0, 1, 0, 0])

    assert np.allclose(triple.X, 0.05 * (e2 + B.matrix @ e2))
    assert np.allclose(triple.Z, 0.05 * (np.eye(4)[3] + B.matrix[:, 3]))

    for ell in (0, 1, -0.5):
        with pytest.raises(DegenerateEll):
            initial_triple(B, ell)

    with pytest.raises(ValueError):
        initial_triple(RiemannMatrix(1j * np.eye(2)), 0.1)

    with pytest.raises(ValueError):
        initial_triple(B, 0.1, strategy="bogus")


def test_initial_triple_random_is_reproducible(random_matrix):
    """Test that a fixed seed gives the same non-trivial triple."""
    B = random_matrix(3)

    for strategy in ("random", "near_coincident"):
        t1 = initial_triple(B, 0.3, strategy, seed=[7, 0, 0])
        t2 = initial_triple(B, 0.3, strategy, seed=[7, 0, 0])
        t3 = initial_triple(B, 0.3, strategy, seed=[7, 0, 1])

        assert np.array_equal(t1.stacked(), t2.stacked())
        assert not np.array_equal(t1.stacked(), t3.stacked())
        assert not is_trivial(t1.X, t1.Y, t1.Z, B)

    near = initial_triple(B, 0.3, "near_coincident", seed=1)

    assert np.linalg.norm(near.Y - near.X) == pytest.approx(3e-3)


def test_verdict_on_jacobian(rm_verdict):
    """Test that Rm_τ is found in the Jacobi locus."""
    assert rm_verdict.in_locus
    assert rm_verdict.best_delta < 1e-10
    assert rm_verdict.precision == 1e-10
    assert rm_verdict.reduction is not None
    assert rm_verdict.converged_fraction > 0
    assert len(rm_verdict.traces) == len(rm_verdict.starts)

    witness = rm_verdict.witness

    assert witness is not None

    B, _ = siegel_reduce(genus4_family(1 + 1j))

    assert not is_trivial(witness.X, witness.Y, witness.Z, B)

    last = rm_verdict.starts[-1]

    assert last.delta < 1e-10
    assert last.trace.iterations >= 1
    assert last.trace.stop_reason in (
        StopReason.STEP_SMALL,
        StopReason.RESIDUAL_SMALL,
    )


def test_newton_fixed_point(rm_verdict):
    """Test that a converged zero is a fixed point of the iteration."""
    B, _ = siegel_reduce(genus4_family(1 + 1j))
    cfg = SolverConfig(residual_stop=False)
    first = newton_solve(B, rm_verdict.witness, cfg)

    assert first.trace.stop_reason == StopReason.STEP_SMALL

    again = newton_solve(B, first.evaluation.triple, cfg)

    assert again.trace.iterations == 1
    assert again.trace.stop_reason == StopReason.STEP_SMALL
    assert again.trace.records[0].step < 1e-10
    assert again.delta < 1e-10
    assert again.best_residual <= again.initial_residual


def test_newton_trivial_start(random_matrix):
    """Test that a trivial start fails with an empty trace."""
    B = random_matrix(3)
    X = 0.1 + 0.2j * np.ones(3)

    with pytest.raises(TrivialConfiguration) as excinfo:
        newton_solve(B, TrisecantTriple(X, X.copy(), 0.3 * X))

    assert excinfo.value.trace.stop_reason == StopReason.FAILED
    assert excinfo.value.trace.iterations == 0


def test_failed_starts_do_not_abort(monkeypatch, random_matrix):
    """Test that failing evaluations become failed starts."""
    calls = {"n": 0}
    real = schottky.solver.fay_function

    def flaky(*args, **kwargs):
        calls["n"] += 1

        if calls["n"] % 2 == 0:
            raise TrivialConfiguration("forced")

        return real(*args, **kwargs)

    monkeypatch.setattr(schottky.solver, "fay_function", flaky)
    cfg = SolverConfig(
        ell_max=0.2, start_strategy="random", threads=1, max_halvings=0
    )
    verdict = schottky_test(random_matrix(3), cfg)

    assert not verdict.in_locus
    assert len(verdict.starts) == 2
    assert math.isinf(verdict.best_delta)

    for start in verdict.starts:
        assert start.error
        assert start.triple is None
        assert start.trace.stop_reason == StopReason.FAILED


def test_thread_count_does_not_change_verdict(rm_tau):
    """Test that the verdict is the same for one and several threads."""
    base = dict(ell_max=0.2, start_strategy="random", starts_per_ell=2)
    v1 = schottky_test(rm_tau, SolverConfig(threads=1, **base))
    v4 = schottky_test(rm_tau, SolverConfig(threads=4, **base))

    assert v1.in_locus == v4.in_locus
    assert v1.best_delta == v4.best_delta
    assert [s.index for s in v1.starts] == [s.index for s in v4.starts]
    assert [s.delta for s in v1.starts] == [s.delta for s in v4.starts]


def test_thread_count_from_environment(monkeypatch, rm_tau):
    """Test that SCHOTTKY_THREADS sets the pool size."""
    monkeypatch.setenv("SCHOTTKY_THREADS", "2")
    cfg = SolverConfig(ell_max=0.2)

    assert schottky_test(rm_tau, cfg).in_locus


def test_verdict_serialization(rm_verdict):
    """Test the verdict document form."""
    doc = rm_verdict._serialize_to_dict()
    restored = Verdict._deserialize_from_dict(doc)

    assert restored.in_locus
    assert restored.best_delta == rm_verdict.best_delta
    assert np.array_equal(
        restored.witness.stacked(), rm_verdict.witness.stacked()
    )
    assert restored.reduction == rm_verdict.reduction
    assert restored._serialize_to_dict() == doc


def test_start_result_serialization():
    """Test the document form of a failed start."""
    trace = IterationTrace(
        (IterationRecord(1, 0.5, 0.1, 0.2),), StopReason.FAILED
    )
    start = StartResult(
        ell=0.1,
        strategy="random",
        index=3,
        trace=trace,
        delta=math.inf,
        residual=0.5,
        error="forced",
    )
    doc = start._serialize_to_dict()

    assert StartResult._deserialize_from_dict(doc) == start
    assert trace.iterations == 1


def test_converged_fraction():
    """Test the fraction of converged starts."""
    trace = IterationTrace((), StopReason.MAX_ITER)
    starts = [
        StartResult(0.1, "half_period", k, trace, d, 1.0)
        for k, d in enumerate([1e-12, 1e-3, 1e-11, math.inf])
    ]
    verdict = Verdict(
        in_locus=True,
        precision=1e-10,
        best_delta=1e-12,
        best_residual=1.0,
        traces=[trace] * 4,
        starts=starts,
    )

    assert verdict.converged_fraction == 0.5
    assert Verdict(False, 1e-10, 1.0, 1.0, []).converged_fraction == 0.0


def test_default_perturbation():
    """Test M_jk = (j + k)/5."""
    assert np.allclose(default_perturbation(2), [[0.4, 0.6], [0.6, 0.8]])


def test_sweep_validation(rm_tau):
    """Test rejected perturbations."""
    with pytest.raises(ValueError):
        residual_vs_precision_sweep(rm_tau, np.ones((3, 3)), [0.1])

    with pytest.raises(ValueError):
        residual_vs_precision_sweep(rm_tau, np.triu(np.ones((4, 4))), [0.1])

    assert residual_vs_precision_sweep(rm_tau, s_list=[]) == []


@pytest.mark.slow
def test_verdict_off_locus(rm_tau):
    """Test that Rm_τ,s is rejected for s = 0.1 and s = 0.01."""
    for s in (0.1, 0.01):
        verdict = schottky_test(diagonal_perturbation(rm_tau, s))

        assert not verdict.in_locus
        assert verdict.witness is None
        assert verdict.best_delta > 1e-5
        assert verdict.best_residual > 1e-5
        assert verdict.converged_fraction == 0.0


@pytest.mark.slow
def test_verdict_invariant_under_symplectic_change(rm_tau):
    """Test that a symplectic change of basis keeps the verdict."""
    R = SymplecticTransform.translation(np.eye(4, dtype=int)) @ (
        SymplecticTransform.quasi_inversion(4, 2)
    )
    moved = apply_modular(rm_tau, R)

    assert schottky_test(moved).in_locus
    assert not schottky_test(diagonal_perturbation(moved, 0.1)).in_locus


@pytest.mark.slow
def test_sweep_rows(rm_tau):
    """Test the residual table on a short grid."""
    cfg = SolverConfig(ell_max=0.3)
    rows = residual_vs_precision_sweep(rm_tau, s_list=[0.0, 1e-2], cfg=cfg)

    assert [r.s for r in rows] == [0.0, 1e-2]
    assert all(isinstance(r, SweepRow) for r in rows)
    assert rows[0].best_residual <= 1e-12
    assert rows[1].best_residual > 1e-4
    assert rows[0].converged_fraction > 0


def test_newton_converges_quadratically(rm_verdict, rng):
    """Test that ‖F‖ falls quadratically near a zero."""
    B, _ = siegel_reduce(genus4_family(1 + 1j))
    fixed, x = split_triple(rm_verdict.witness)
    x = x + 1e-3 * (rng.normal(size=x.size) + 1j * rng.normal(size=x.size))
    cfg = SolverConfig(residual_stop=False)
    result = newton_solve(B, assemble_triple(x, fixed, B.g), cfg)

    residuals = [result.initial_residual]
    residuals += [r.residual for r in result.trace.records]
    ratios = [
        b / a**2
        for a, b in zip(residuals, residuals[1:])
        if a < 1e-2 and b > 1e-12
    ]

    assert ratios
    assert max(ratios) < 1e6
    assert result.delta < 1e-10


def test_small_residual_bounds_delta(rm_verdict):
    """Test that ‖F‖ ≤ δ gives Δ ≤ 10δ along every trace."""
    delta = rm_verdict.precision
    checked = 0

    for start in rm_verdict.starts:
        for record in start.trace.records:
            if record.residual <= delta:
                assert record.delta <= 10 * delta
                checked += 1

    assert checked > 0
