"""Newton solver and the Jacobi-locus decision procedure.

schottky_test decides, at precision δ, whether a Riemann matrix is a period
matrix of a curve.  After Siegel reduction it sweeps a start parameter ℓ,
runs a Newton least-squares iteration on the Fay function from each start
and stops at the first start whose Kummer vectors become linearly dependent
(smallest singular value Δ below δ).  If no start gets there the matrix is
reported outside the Jacobi locus at precision δ, together with the smallest
Δ seen.

Independent starts run in a thread pool.  Starts are processed in batches in
a fixed order and the first witness in that order wins, so the verdict does
not depend on the number of threads.

Usage:
    >>> verdict = schottky_test(genus4_family(1 + 1j))
    >>> verdict.in_locus
    True
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
import logging
import math
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import DampingExhausted, DegenerateEll, StartFailed
from .index import Index
from .kummer import (
    DEFAULT_PINNED,
    DEFAULT_TRIVIAL_TOL,
    FayEvaluation,
    Position,
    TrisecantTriple,
    fay_function,
    is_trivial,
    split_triple,
)
from .riemann import RiemannMatrix, as_riemann_matrix, validate_riemann_matrix
from .siegel import ReductionReport, siegel_reduce
from .theta import DEFAULT_MIN_RADIUS, DEFAULT_THETA_TOL, default_radius
from .utils import thread_count

logger = logging.getLogger(__name__)

START_STRATEGIES = ("half_period", "random", "near_coincident")
MAX_REDRAWS = 1000
NEAR_OFFSET = 1e-2
MIN_GENUS = 3


class StopReason(str, Enum):
    """Why a Newton iteration stopped."""

    STEP_SMALL = "step_small"
    RESIDUAL_SMALL = "residual_small"
    MAX_ITER = "max_iter"
    FAILED = "failed"


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the Newton iteration and the ℓ sweep.

    Attributes:
        delta: Precision δ of the verdict and of the stop criteria.
        ell0: First start parameter.
        d_ell: Start parameter increment.
        ell_max: Last start parameter.
        n_max: Newton iteration cap per start.
        start_strategy: One of half_period, random, near_coincident.
        seed: Non-negative seed of the random strategies.
        starts_per_ell: Starts per ℓ for the random strategies.
        residual_stop: Stop when ‖F‖ < δ.
        trivial_tol: Non-triviality tolerance.
        pinned: (vector, component) positions excluded from the unknowns.
        theta_tol: Truncation precision of the theta sums.
        min_radius: Smallest hypercube half-width.
        max_halvings: Step halvings before a start is declared failed.
        growth_limit: Largest accepted residual growth factor per step.
        threads: Worker threads; None reads SCHOTTKY_THREADS.
        reduce: Run Siegel reduction before the sweep.

    Usage:
        >>> SolverConfig(delta=1e-8, start_strategy="random", seed=3)
    """

    delta: float = 1e-10
    ell0: float = 0.1
    d_ell: float = 0.1
    ell_max: float = 0.5
    n_max: int = 100
    start_strategy: str = "half_period"
    seed: int = 0
    starts_per_ell: int = 1
    residual_stop: bool = True
    trivial_tol: float = DEFAULT_TRIVIAL_TOL
    pinned: Tuple[Position, ...] = DEFAULT_PINNED
    theta_tol: float = DEFAULT_THETA_TOL
    min_radius: int = DEFAULT_MIN_RADIUS
    max_halvings: int = 10
    growth_limit: float = 1e3
    threads: Optional[int] = None
    reduce: bool = True

    def __post_init__(self) -> None:
        """Validate the configuration.

        Raises:
            ValueError: A parameter is out of range.
        """
        if not self.delta > 0:
            raise ValueError("Precision delta must be positive.")

        if not 0 < self.ell0 <= self.ell_max < 1:
            raise ValueError(
                "Start parameters must satisfy 0 < ell0 <= ell_max < 1."
            )

        if not self.d_ell > 0:
            raise ValueError("Start parameter increment must be positive.")

        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("Iteration cap must be a positive integer.")

        if self.start_strategy not in START_STRATEGIES:
            raise ValueError(
                f"Start strategy must be one of {', '.join(START_STRATEGIES)}."
            )

        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("Seed must be a non-negative integer.")

        if self.starts_per_ell < 1:
            raise ValueError("Starts per ell must be positive.")

        if len(self.pinned) != 4:
            raise ValueError("Exactly four positions must be pinned.")

        if self.max_halvings < 0 or not self.growth_limit > 1:
            raise ValueError("Damping parameters are out of range.")

        if self.threads is not None and self.threads < 1:
            raise ValueError("Thread count must be positive.")

        object.__setattr__(
            self, "pinned", tuple(tuple(p) for p in self.pinned)
        )

    def ells(self) -> List[float]:
        """Return the swept start parameters ℓ0, ℓ0 + Δℓ, …, ≤ ℓ_max."""
        count = int(math.floor((self.ell_max - self.ell0) / self.d_ell + 1e-9))

        return [self.ell0 + k * self.d_ell for k in range(count + 1)]

    def _serialize_to_dict(self) -> Dict[str, Any]:
        """Serialize to a JSON-ready mapping."""
        doc = asdict(self)
        doc["pinned"] = [list(p) for p in self.pinned]

        return doc

    @classmethod
    def _deserialize_from_dict(cls, doc: Dict[str, Any]) -> "SolverConfig":
        """Deserialize from a mapping written by _serialize_to_dict."""
        doc = dict(doc)

        if "pinned" in doc:
            doc["pinned"] = tuple(tuple(p) for p in doc["pinned"])

        return cls(**doc)


@dataclass(frozen=True)
class IterationRecord:
    """One Newton step: iteration number, ‖F‖, ‖step‖ and Δ after it."""

    n: int
    residual: float
    step: float
    delta: float


@dataclass(frozen=True)
class IterationTrace:
    """Records of a Newton iteration and the reason it stopped."""

    records: Tuple[IterationRecord, ...]
    stop_reason: StopReason

    @property
    def iterations(self) -> int:
        """Return the number of steps taken."""
        return len(self.records)

    def _serialize_to_dict(self) -> Dict[str, Any]:
        """Serialize to a JSON-ready mapping."""
        return {
            "records": [asdict(r) for r in self.records],
            "stop_reason": self.stop_reason.value,
        }

    @classmethod
    def _deserialize_from_dict(cls, doc: Dict[str, Any]) -> "IterationTrace":
        """Deserialize from a mapping written by _serialize_to_dict."""
        return cls(
            records=tuple(IterationRecord(**r) for r in doc["records"]),
            stop_reason=StopReason(doc["stop_reason"]),
        )


@dataclass(frozen=True)
class NewtonResult:
    """Outcome of newton_solve.

    Attributes:
        trace: The iteration trace.
        x: Final free coordinates.
        delta: Final Δ.
        evaluation: Fay function at the final point.
        initial_residual: ‖F‖ at the start.
    """

    trace: IterationTrace
    x: np.ndarray
    delta: float
    evaluation: FayEvaluation
    initial_residual: float

    @property
    def best_residual(self) -> float:
        """Return the smallest ‖F‖ met along the iteration."""
        return min(
            [self.initial_residual] + [r.residual for r in self.trace.records]
        )


@dataclass(frozen=True)
class StartResult:
    """Outcome of one start of the sweep.

    Attributes:
        ell: Start parameter.
        strategy: Start strategy.
        index: Position of the start in the sweep order.
        trace: Iteration trace.
        delta: Final Δ, infinite for failed starts.
        residual: Smallest ‖F‖ met, infinite for failed starts.
        triple: Final wrapped triple, absent for failed starts.
        error: Failure message of a failed start.
    """

    ell: float
    strategy: str
    index: int
    trace: IterationTrace
    delta: float
    residual: float
    triple: Optional[TrisecantTriple] = None
    error: Optional[str] = None

    def _serialize_to_dict(self) -> Dict[str, Any]:
        """Serialize to a JSON-ready mapping."""
        return {
            "ell": self.ell,
            "strategy": self.strategy,
            "index": self.index,
            "trace": self.trace._serialize_to_dict(),
            "delta": _float_out(self.delta),
            "residual": _float_out(self.residual),
            "triple": _triple_out(self.triple),
            "error": self.error,
        }

    @classmethod
    def _deserialize_from_dict(cls, doc: Dict[str, Any]) -> "StartResult":
        """Deserialize from a mapping written by _serialize_to_dict."""
        return cls(
            ell=float(doc["ell"]),
            strategy=str(doc["strategy"]),
            index=int(doc["index"]),
            trace=IterationTrace._deserialize_from_dict(doc["trace"]),
            delta=_float_in(doc["delta"]),
            residual=_float_in(doc["residual"]),
            triple=_triple_in(doc.get("triple")),
            error=doc.get("error"),
        )


@dataclass(frozen=True)
class Verdict:
    """Jacobi-locus verdict at a precision.

    Attributes:
        in_locus: best_delta < precision.
        precision: The precision δ.
        best_delta: Smallest Δ over all starts.
        best_residual: Smallest ‖F‖ over all starts.
        traces: Iteration traces, one per start run.
        witness: Triple with Δ < δ, present exactly when in_locus.
        starts: Per-start results in sweep order.
        reduction: Report of the Siegel reduction, if run.
    """

    in_locus: bool
    precision: float
    best_delta: float
    best_residual: float
    traces: List[IterationTrace]
    witness: Optional[TrisecantTriple] = None
    starts: List[StartResult] = field(default_factory=list)
    reduction: Optional[ReductionReport] = None

    @property
    def converged_fraction(self) -> float:
        """Return the fraction of starts with Δ < precision."""
        if not self.starts:
            return 0.0

        hits = sum(1 for s in self.starts if s.delta < self.precision)

        return hits / len(self.starts)

    def _serialize_to_dict(self) -> Dict[str, Any]:
        """Serialize to a JSON-ready mapping."""
        return {
            "in_locus": self.in_locus,
            "precision": self.precision,
            "best_delta": _float_out(self.best_delta),
            "best_residual": _float_out(self.best_residual),
            "witness": _triple_out(self.witness),
            "starts": [s._serialize_to_dict() for s in self.starts],
            "reduction": (
                None
                if self.reduction is None
                else self.reduction._serialize_to_dict()
            ),
        }

    @classmethod
    def _deserialize_from_dict(cls, doc: Dict[str, Any]) -> "Verdict":
        """Deserialize from a mapping written by _serialize_to_dict."""
        starts = [StartResult._deserialize_from_dict(s) for s in doc["starts"]]
        reduction = doc.get("reduction")

        return cls(
            in_locus=bool(doc["in_locus"]),
            precision=float(doc["precision"]),
            best_delta=_float_in(doc["best_delta"]),
            best_residual=_float_in(doc["best_residual"]),
            traces=[s.trace for s in starts],
            witness=_triple_in(doc.get("witness")),
            starts=starts,
            reduction=(
                None
                if reduction is None
                else ReductionReport._deserialize_from_dict(reduction)
            ),
        )


@dataclass(frozen=True)
class SweepRow:
    """One row of the residual-versus-precision table."""

    s: float
    best_residual: float
    delta_min: float
    converged_fraction: float


def _float_out(v: float) -> Any:
    """Encode non-finite floats as strings for JSON."""
    return v if math.isfinite(v) else repr(v)


def _float_in(v: Any) -> float:
    """Decode floats written by _float_out."""
    return float(v)


def _triple_out(t: Optional[TrisecantTriple]) -> Any:
    """Encode a triple as real and imaginary parts."""
    if t is None:
        return None

    v = t.stacked()

    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def _triple_in(doc: Any) -> Optional[TrisecantTriple]:
    """Decode a triple written by _triple_out."""
    if doc is None:
        return None

    v = np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)

    return TrisecantTriple.from_stacked(v)


def _random_point(B: RiemannMatrix, rng: np.random.Generator) -> np.ndarray:
    """Return p + B q with characteristics uniform in [-1/2, 1/2]."""
    p = rng.uniform(-0.5, 0.5, B.g)
    q = rng.uniform(-0.5, 0.5, B.g)

    return p + B.matrix @ q


def initial_triple(
    B: Any,
    ell: float,
    strategy: str = "half_period",
    seed: Any = 0,
    tol: float = DEFAULT_TRIVIAL_TOL,
) -> TrisecantTriple:
    """Return a start triple for the Newton iteration.

    half_period: X = (ℓ/2)(e_{g−2} + B e_{g−2}), Y and Z likewise with
    e_{g−1} and e_g.  random: characteristics uniform in [-1/2, 1/2],
    redrawn until non-trivial.  near_coincident: X and Z random, Y = X plus
    an offset of size ℓ/100 along a random direction.

    Args:
        B: RiemannMatrix or raw matrix, genus at least 3.
        ell: Start parameter in (0, 1).
        strategy: One of half_period, random, near_coincident.
        seed: Seed or numpy Generator of the random strategies.
        tol: Non-triviality tolerance.

    Returns:
        A TrisecantTriple.

    Raises:
        DegenerateEll: ell is not in (0, 1).
        ValueError: The genus is below 3 or the strategy is unknown.
    """
    B = as_riemann_matrix(B)
    g = B.g

    if not 0 < ell < 1:
        raise DegenerateEll(
            "Start parameter must lie strictly between 0 and 1."
        )

    if g < MIN_GENUS:
        raise ValueError(f"Start triples need genus at least {MIN_GENUS}.")

    if strategy == "half_period":
        pts = []

        for j in (g - 3, g - 2, g - 1):
            e = np.zeros(g)
            e[j] = 1.0
            pts.append(0.5 * ell * (e + B.matrix @ e))

        return TrisecantTriple(*pts)

    if strategy not in START_STRATEGIES:
        raise ValueError(f"Unknown start strategy {strategy}.")

    rng = seed if isinstance(seed, np.random.Generator) else (
        np.random.default_rng(seed)
    )

    for _ in range(MAX_REDRAWS):
        X = _random_point(B, rng)
        Z = _random_point(B, rng)

        if strategy == "random":
            Y = _random_point(B, rng)
        else:
            w = _random_point(B, rng)
            Y = X + NEAR_OFFSET * ell * w / max(np.linalg.norm(w), 1e-300)

        if not is_trivial(X, Y, Z, B, tol):
            return TrisecantTriple(X, Y, Z)

    raise StartFailed("Could not draw a non-trivial start triple.")


def _lstsq(J: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Solve J s = F in the least-squares sense with gelsy."""
    return scipy.linalg.lstsq(J, F, lapack_driver="gelsy")[0]


def newton_solve(
    B: Any,
    triple0: TrisecantTriple,
    cfg: Optional[SolverConfig] = None,
    radius: Optional[int] = None,
    index: Optional[Index] = None,
) -> NewtonResult:
    """Drive the Fay function to zero from a start triple.

    Each step solves the full 2^g-row least-squares system J s = F and moves
    x ← x − s.  If ‖F‖ grows by more than the growth limit the step is halved,
    up to max_halvings times.  The iteration stops when ‖s‖ < δ, when
    ‖F‖ < δ (if enabled) or after n_max steps.

    Args:
        B: RiemannMatrix or raw matrix, not reduced here.
        triple0: Non-trivial start triple.
        cfg: Solver configuration.
        radius: Hypercube half-width; defaults from the configuration.
        index: Index supplying the lattice tables.

    Returns:
        A NewtonResult.

    Raises:
        TrivialConfiguration: The start is trivial.
        DenominatorUnderflow: The start hits a zero of λ(Y, Z).
        DampingExhausted: No damped step contained the residual growth.
    """
    cfg = SolverConfig() if cfg is None else cfg
    B = as_riemann_matrix(B)

    if radius is None:
        radius = default_radius(B, cfg.theta_tol, cfg.min_radius)

    fixed, x = split_triple(triple0, cfg.pinned)
    records: List[IterationRecord] = []

    def evaluate(x_new: np.ndarray, fixed_new: Any) -> FayEvaluation:
        return fay_function(
            x_new, fixed_new, B, radius, cfg.trivial_tol, index=index
        )

    try:
        ev = evaluate(x, fixed)
    except StartFailed as e:
        e.trace = IterationTrace((), StopReason.FAILED)
        raise

    initial_residual = ev.residual
    reason = StopReason.MAX_ITER

    for n in range(1, cfg.n_max + 1):
        step = _lstsq(ev.jacobian, ev.F)
        t = 1.0
        accepted: Optional[FayEvaluation] = None

        for _ in range(cfg.max_halvings + 1):
            try:
                cand = evaluate(ev.x - t * step, ev.fixed)
            except StartFailed:
                cand = None

            limit = cfg.growth_limit * max(ev.residual, 1e-300)

            if cand is not None and cand.residual <= limit:
                accepted = cand
                break

            t *= 0.5

        if accepted is None:
            raise DampingExhausted(
                "Step halving could not contain the residual growth.",
                trace=IterationTrace(tuple(records), StopReason.FAILED),
            )

        step_norm = float(t * np.linalg.norm(step))
        ev = accepted
        records.append(IterationRecord(n, ev.residual, step_norm, ev.delta))
        logger.debug(
            "newton step %d: |F|=%.3e |step|=%.3e delta=%.3e",
            n,
            ev.residual,
            step_norm,
            ev.delta,
        )

        if step_norm < cfg.delta:
            reason = StopReason.STEP_SMALL
            break

        if cfg.residual_stop and ev.residual < cfg.delta:
            reason = StopReason.RESIDUAL_SMALL
            break

    return NewtonResult(
        trace=IterationTrace(tuple(records), reason),
        x=ev.x,
        delta=ev.delta,
        evaluation=ev,
        initial_residual=initial_residual,
    )


def _start_plan(cfg: SolverConfig) -> Iterator[Tuple[int, float, List[int]]]:
    """Yield (position, ell, seed words) for every start in sweep order."""
    per_ell = 1 if cfg.start_strategy == "half_period" else cfg.starts_per_ell
    position = 0

    for k, ell in enumerate(cfg.ells()):
        for j in range(per_ell):
            yield position, ell, [cfg.seed, k, j]
            position += 1


def _run_start(
    B: RiemannMatrix,
    cfg: SolverConfig,
    radius: int,
    index: Optional[Index],
    plan: Tuple[int, float, List[int]],
) -> StartResult:
    """Run one start, turning a failure into a failed StartResult."""
    position, ell, seed = plan

    try:
        triple0 = initial_triple(
            B, ell, cfg.start_strategy, seed, cfg.trivial_tol
        )
        result = newton_solve(B, triple0, cfg, radius, index)
    except StartFailed as e:
        logger.info("start %d (ell=%.3g) failed: %s", position, ell, e)
        trace = e.trace or IterationTrace((), StopReason.FAILED)

        return StartResult(
            ell=ell,
            strategy=cfg.start_strategy,
            index=position,
            trace=trace,
            delta=math.inf,
            residual=min(
                [math.inf] + [r.residual for r in trace.records]
            ),
            error=str(e),
        )

    logger.info(
        "start %d (ell=%.3g): %s after %d steps, |F|=%.3e delta=%.3e",
        position,
        ell,
        result.trace.stop_reason.value,
        result.trace.iterations,
        result.evaluation.residual,
        result.delta,
    )

    return StartResult(
        ell=ell,
        strategy=cfg.start_strategy,
        index=position,
        trace=result.trace,
        delta=result.delta,
        residual=result.best_residual,
        triple=result.evaluation.triple,
    )


def schottky_test(
    B_raw: Any,
    cfg: Optional[SolverConfig] = None,
    index: Optional[Index] = None,
) -> Verdict:
    """Decide whether a Riemann matrix lies in the Jacobi locus at precision δ.

    Args:
        B_raw: RiemannMatrix or raw matrix.
        cfg: Solver configuration.
        index: Index supplying the lattice tables.

    Returns:
        A Verdict.

    Raises:
        InvalidMatrix: B_raw does not validate.
        ValueError: The genus is below 3.
    """
    cfg = SolverConfig() if cfg is None else cfg
    B = as_riemann_matrix(B_raw)

    if B.g < MIN_GENUS:
        raise ValueError(
            f"The Jacobi-locus test needs genus at least {MIN_GENUS}."
        )

    reduction: Optional[ReductionReport] = None

    if cfg.reduce:
        B, reduction = siegel_reduce(B)

    radius = default_radius(B, cfg.theta_tol, cfg.min_radius)
    plan = list(_start_plan(cfg))
    threads = cfg.threads if cfg.threads is not None else thread_count()
    batch = max(1, min(threads, len(plan)))
    results: List[StartResult] = []
    witness: Optional[StartResult] = None

    def run(p: Tuple[int, float, List[int]]) -> StartResult:
        return _run_start(B, cfg, radius, index, p)

    executor = ThreadPoolExecutor(max_workers=batch) if batch > 1 else None

    try:
        for lo in range(0, len(plan), batch):
            chunk = plan[lo : lo + batch]
            outs = list(executor.map(run, chunk)) if executor else [
                run(p) for p in chunk
            ]

            for out in outs:
                results.append(out)

                if out.triple is not None and out.delta < cfg.delta:
                    witness = out
                    break

            if witness is not None:
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    best_delta = min([math.inf] + [r.delta for r in results])
    best_residual = min([math.inf] + [r.residual for r in results])
    verdict = Verdict(
        in_locus=witness is not None,
        precision=cfg.delta,
        best_delta=best_delta,
        best_residual=best_residual,
        traces=[r.trace for r in results],
        witness=None if witness is None else witness.triple,
        starts=results,
        reduction=reduction,
    )
    logger.info(
        "verdict: in_locus=%s at precision %.1e, delta_min=%.3e, "
        "best residual=%.3e over %d starts",
        verdict.in_locus,
        cfg.delta,
        best_delta,
        best_residual,
        len(results),
    )

    return verdict


def default_perturbation(g: int) -> np.ndarray:
    """Return the symmetric matrix M_jk = (j + k)/5, 1-based indices."""
    idx = np.arange(1, g + 1, dtype=float)

    return (idx[:, None] + idx[None, :]) / 5


def residual_vs_precision_sweep(
    B_exact: Any,
    M: Optional[Any] = None,
    s_list: Sequence[float] = (),
    cfg: Optional[SolverConfig] = None,
    index: Optional[Index] = None,
) -> List[SweepRow]:
    """Tabulate the best residual on B_exact + s(M + iM) over s.

    The residual stop criterion is disabled so that every start iterates to
    its residual floor.

    Args:
        B_exact: RiemannMatrix or raw matrix.
        M: Real symmetric perturbation; defaults to M_jk = (j + k)/5.
        s_list: Perturbation sizes.
        cfg: Solver configuration.
        index: Index supplying the lattice tables.

    Returns:
        One SweepRow per s, in input order.
    """
    cfg = SolverConfig() if cfg is None else cfg
    cfg = replace(cfg, residual_stop=False)
    B = as_riemann_matrix(B_exact)
    M = default_perturbation(B.g) if M is None else np.asarray(M, dtype=float)

    if M.shape != (B.g, B.g) or not np.allclose(M, M.T, rtol=0, atol=0):
        raise ValueError("Perturbation must be a real symmetric g×g matrix.")

    rows = []

    for s in s_list:
        perturbed = validate_riemann_matrix(B.matrix + s * (M + 1j * M))
        verdict = schottky_test(perturbed, cfg, index)
        rows.append(
            SweepRow(
                s=float(s),
                best_residual=verdict.best_residual,
                delta_min=verdict.best_delta,
                converged_fraction=verdict.converged_fraction,
            )
        )
        logger.info(
            "sweep s=%.3e: best residual %.3e", s, verdict.best_residual
        )

    return rows
