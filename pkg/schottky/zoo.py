"""Test Riemann matrices.

Exact matrices are regenerated from closed formulas: the genus-4 family
Rm_τ = A⁻¹B of the curves y² = x(x+1)(x−t), and the period matrices of the
hyperelliptic curves y² = x(x^{2g+1} − 1).  Matrices only known numerically
(Bring's curve, the Fermat quintic, the Fricke-Macbeath curve) are embedded
with their 4 printed decimals and a stated accuracy of 5e-5.

Usage:
    >>> Rm = genus4_family(1 + 1j)
    >>> Rs = diagonal_perturbation(Rm, 0.01)
    >>> embedded("bring").matrix.g
    4
"""

from dataclasses import dataclass
import logging
import re
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .errors import NotSymmetric, SingularA, UnknownName
from .riemann import RiemannMatrix, as_riemann_matrix, validate_riemann_matrix

logger = logging.getLogger(__name__)

EXACT_FORMULA = "exact_formula"
PRINTED_PAPER = "printed_paper"
EXACT_ACCURACY = 1e-15
PRINTED_ACCURACY = 5e-5
MAX_CONDITION = 1e12

_ENTRY = re.compile(r"([-+]?\d+\.\d+)\s*([-+])\s*(\d+\.\d+)i")


@dataclass(frozen=True)
class MatrixRecord:
    """A named test matrix.

    Attributes:
        name: Identifier.
        genus: The genus.
        source: exact_formula or printed_paper.
        stated_accuracy: Entry accuracy of the matrix.
        matrix: The Riemann matrix, absent for column records.
        columns: Complex g-vectors, for Abel-map records.
    """

    name: str
    genus: int
    source: str
    stated_accuracy: float
    matrix: Optional[RiemannMatrix] = None
    columns: Optional[List[np.ndarray]] = None


def _parse_printed(text: str) -> np.ndarray:
    """Parse rows of a printed complex matrix such as "-0.5 + 0.8685i"."""
    rows = []

    for line in text.strip().splitlines():
        entries = [
            float(re_) + (1 if sign == "+" else -1) * float(im) * 1j
            for re_, sign, im in _ENTRY.findall(line)
        ]

        if entries:
            rows.append(entries)

    return np.array(rows, dtype=complex)


_BRING = """
  -0.5000 + 0.8685i  -0.0000 + 0.0649i  -0.5000 - 0.2678i   0.5000 - 0.2678i
   0.0000 + 0.0649i  -0.5000 + 0.8685i   0.5000 + 0.2678i  -0.5000 + 0.2678i
  -0.5000 - 0.2678i   0.5000 + 0.2678i  -0.0000 + 1.0714i   0.5000 - 0.2678i
   0.5000 - 0.2678i  -0.5000 + 0.2678i   0.5000 - 0.2678i  -0.5000 + 0.8685i
"""

_BRING_ABELMAP = """
  -0.7052 + 0.3692i   0.0545 + 0.0278i   0.0293 + 0.0775i  -0.0607 + 0.1180i
   0.1286 - 0.2662i   0.2747 + 0.2456i  -0.4068 + 0.4113i   0.0318 + 0.2067i
  -0.4351 + 0.2906i  -0.2108 + 0.0422i   0.0250 + 0.2906i   0.0823 - 0.2451i
   0.4519 - 0.6915i   0.0718 + 0.0915i  -0.0126 - 0.0140i   0.0487 + 0.0493i
"""

_FERMAT5 = """
  -0.3735 + 0.9276i  -0.3574 + 0.4580i  -0.4578 + 0.3092i  -0.2891 + 0.3705i   0.0905 + 0.4390i  -0.4417 - 0.1605i
  -0.3574 + 0.4580i   0.1365 + 1.0006i  -0.0161 + 0.4697i   0.1104 - 0.1415i  -0.4616 + 0.4201i  -0.3313 - 0.3020i
  -0.4578 + 0.3092i  -0.0161 + 0.4697i   0.3474 + 1.0079i  -0.2630 - 0.3894i   0.3635 + 0.5382i   0.2891 - 0.3705i
  -0.2891 + 0.3705i   0.1104 - 0.1415i  -0.2630 - 0.3894i  -0.3152 + 1.1305i  -0.3735 - 0.2479i  -0.1725 + 0.0496i
   0.0905 + 0.4390i  -0.4616 + 0.4201i   0.3635 + 0.5382i  -0.3735 - 0.2479i  -0.4839 + 1.0692i  -0.3796 - 0.0685i
  -0.4417 - 0.1605i  -0.3313 - 0.3020i   0.2891 - 0.3705i  -0.1725 + 0.0496i  -0.3796 - 0.0685i  -0.4095 + 0.8023i
"""  # noqa: E501

_FRICKE_MACBEATH = """
   0.3967 + 1.0211i   0.0615 - 0.1322i   0.0000 - 0.0000i   0.4609 + 0.2609i  -0.3553 + 0.5828i  -0.1838 - 0.3219i   0.3386 - 0.1933i
   0.0615 - 0.1322i   0.3967 + 1.0211i  -0.3553 + 0.5828i   0.3386 - 0.1933i  -0.4776 + 0.1287i  -0.2743 - 0.5669i   0.3386 - 0.1933i
   0.0000 - 0.0000i  -0.3553 + 0.5828i   0.2894 + 1.1656i   0.0905 + 0.2450i  -0.4776 + 0.1287i   0.3871 - 0.3736i  -0.1223 - 0.4541i
   0.4609 + 0.2609i   0.3386 - 0.1933i   0.0905 + 0.2450i   0.3967 + 1.0211i  -0.4776 + 0.1287i   0.0167 - 0.3895i   0.0615 - 0.1322i
  -0.3553 + 0.5828i  -0.4776 + 0.1287i  -0.4776 + 0.1287i  -0.4776 + 0.1287i   0.2894 + 1.1656i  -0.1671 - 0.7115i   0.0905 + 0.2450i
  -0.1838 - 0.3219i  -0.2743 - 0.5669i   0.3871 - 0.3736i   0.0167 - 0.3895i  -0.1671 - 0.7115i   0.4414 + 1.2784i  -0.3386 + 0.1933i
   0.3386 - 0.1933i   0.3386 - 0.1933i  -0.1223 - 0.4541i   0.0615 - 0.1322i   0.0905 + 0.2450i  -0.3386 + 0.1933i   0.3967 + 1.0211i
"""  # noqa: E501

_PRINTED: Dict[str, str] = {
    "bring": _BRING,
    "fermat5": _FERMAT5,
    "fricke_macbeath": _FRICKE_MACBEATH,
}

EMBEDDED_NAMES = ("bring", "bring_abelmap", "fermat5", "fricke_macbeath")
ZOO_NAMES = ("rm_tau", "hyperelliptic", "bring", "fermat5", "fricke_macbeath")


def _orient(B: np.ndarray, name: str) -> RiemannMatrix:
    """Validate B, conjugating it if its imaginary part is negative definite."""
    try:
        np.linalg.cholesky(-np.asarray(B).imag)
    except np.linalg.LinAlgError:
        return validate_riemann_matrix(B)

    logger.warning(
        "%s has negative definite imaginary part; conjugating.", name
    )

    return validate_riemann_matrix(np.conj(B))


def hyperelliptic_period_matrix(g: int) -> RiemannMatrix:
    """Return the period matrix of y² = x(x^{2g+1} − 1).

    With ζ = e^{2πi/(2g+1)}, τ₁ = (−1)^g ζ^{g²} and

        τ_{j+1} = τ₁/(1 + ζ^j)·(1 − Σ_{l=2..j} ζ^{g−j+l−1} τ_l τ_{j−l+2}),

    the entries are B_jk = 1 + (1/τ₁) Σ_{l=1..j} τ_l τ_{k−j+l} for j ≤ k.

    Args:
        g: Genus, at least 1.

    Returns:
        The RiemannMatrix.
    """
    if int(g) != g or g < 1:
        raise ValueError("Genus must be a positive integer.")

    g = int(g)
    zeta = np.exp(2j * np.pi / (2 * g + 1))
    tau = np.zeros(g + 1, dtype=complex)
    tau[1] = (-1) ** g * zeta ** (g * g)

    for j in range(1, g):
        acc = 1 + 0j

        for l in range(2, j + 1):
            acc -= zeta ** (g - j + l - 1) * tau[l] * tau[j - l + 2]

        tau[j + 1] = tau[1] / (1 + zeta**j) * acc

    B = np.zeros((g, g), dtype=complex)

    for j in range(1, g + 1):
        for k in range(j, g + 1):
            s = sum(tau[l] * tau[k - j + l] for l in range(1, j + 1))
            B[j - 1, k - 1] = 1 + s / tau[1]
            B[k - 1, j - 1] = B[j - 1, k - 1]

    return _orient(B, f"hyperelliptic g={g}")


def genus4_family(tau: complex) -> RiemannMatrix:
    """Return Rm_τ = A⁻¹B for the genus-4 family, ζ = e^{2πi/12}.

    Args:
        tau: Parameter with positive imaginary part.

    Returns:
        The genus-4 RiemannMatrix.

    Raises:
        SingularA: A is singular.
    """
    tau = complex(tau)

    if not tau.imag > 0:
        raise ValueError("Parameter tau must have positive imaginary part.")

    z = np.exp(2j * np.pi / 12)
    z2, z3 = z**2, z**3
    AB = np.array(
        [
            [tau, tau, 0, -tau - 1, 1, 1, 0, -1],
            [z2 - 1, 1, -z2 + 1, 1, 1, -z2, z2, -z2 + 1],
            [
                z3 - z,
                -z3,
                -2 * z3 + 2 * z2 + z - 1,
                z2 - z,
                1,
                z2 - 1,
                z3 - z2 - 2 * z + 2,
                z2,
            ],
            [
                -z3 + z,
                z3,
                2 * z3 + 2 * z2 - z - 1,
                z2 + z,
                1,
                z2 - 1,
                -z3 - z2 + 2 * z + 2,
                z2,
            ],
        ],
        dtype=complex,
    )
    A, Bblock = AB[:, :4], AB[:, 4:]

    if np.linalg.cond(A) > MAX_CONDITION:
        raise SingularA("Matrix A of the genus-4 family is singular.")

    Rm = np.linalg.solve(A, Bblock)

    if np.max(np.abs(Rm - Rm.T)) > 1e-9:
        raise NotSymmetric("Genus-4 family matrix must be symmetric.")

    return _orient((Rm + Rm.T) / 2, f"genus-4 family tau={tau}")


def default_weights(g: int) -> List[float]:
    """Return [2, 3, 5, 7] for genus 4 and [2, …, g + 1] otherwise."""
    if g == 4:
        return [2.0, 3.0, 5.0, 7.0]

    return [float(k) for k in range(2, g + 2)]


def diagonal_perturbation(
    B: Any, s: float, weights: Optional[Sequence[float]] = None
) -> RiemannMatrix:
    """Return B + s·diag(weights).

    Args:
        B: RiemannMatrix or raw matrix.
        s: Real perturbation size.
        weights: Length-g weights; defaults to default_weights(g).

    Returns:
        The perturbed RiemannMatrix.

    Raises:
        NotPositiveDefinite: The perturbation leaves the Siegel halfspace.
    """
    B = as_riemann_matrix(B)
    w = default_weights(B.g) if weights is None else list(weights)

    if len(w) != B.g:
        raise ValueError(f"Weights must have length {B.g}.")

    return validate_riemann_matrix(B.matrix + s * np.diag(w))


def symmetric_perturbation(B: Any, s: float) -> RiemannMatrix:
    """Return B + s(M + iM) with M_jk = (j + k)/5, 1-based.

    Raises:
        NotPositiveDefinite: The perturbation leaves the Siegel halfspace.
    """
    B = as_riemann_matrix(B)
    idx = np.arange(1, B.g + 1, dtype=float)
    M = (idx[:, None] + idx[None, :]) / 5

    return validate_riemann_matrix(B.matrix + s * (M + 1j * M))


def embedded(name: str) -> MatrixRecord:
    """Return an embedded printed matrix or the Bring Abel-map columns.

    Args:
        name: One of bring, bring_abelmap, fermat5, fricke_macbeath.

    Returns:
        A MatrixRecord with stated accuracy 5e-5.

    Raises:
        UnknownName: No matrix carries the name.
    """
    if name == "bring_abelmap":
        cols = _parse_printed(_BRING_ABELMAP)

        return MatrixRecord(
            name=name,
            genus=4,
            source=PRINTED_PAPER,
            stated_accuracy=PRINTED_ACCURACY,
            columns=[cols[:, j].copy() for j in range(cols.shape[1])],
        )

    if name not in _PRINTED:
        raise UnknownName(
            f"Unknown matrix {name!r}; choose from {', '.join(EMBEDDED_NAMES)}."
        )

    matrix = validate_riemann_matrix(_parse_printed(_PRINTED[name]))

    return MatrixRecord(
        name=name,
        genus=matrix.g,
        source=PRINTED_PAPER,
        stated_accuracy=PRINTED_ACCURACY,
        matrix=matrix,
    )


def from_zoo(
    name: str,
    tau: complex = 1 + 1j,
    genus: int = 4,
    perturb_diag: Optional[float] = None,
    perturb_sym: Optional[float] = None,
) -> MatrixRecord:
    """Build a zoo matrix by name, optionally perturbed.

    Args:
        name: rm_tau, hyperelliptic, or an embedded matrix name.
        tau: Parameter of rm_tau.
        genus: Genus of hyperelliptic.
        perturb_diag: Size s of a diagonal perturbation.
        perturb_sym: Size s of a symmetric perturbation.

    Returns:
        A MatrixRecord.

    Raises:
        UnknownName: No matrix carries the name.
    """
    if name == "rm_tau":
        record = MatrixRecord(
            name=f"rm_tau({tau})",
            genus=4,
            source=EXACT_FORMULA,
            stated_accuracy=EXACT_ACCURACY,
            matrix=genus4_family(tau),
        )
    elif name == "hyperelliptic":
        record = MatrixRecord(
            name=f"hyperelliptic({genus})",
            genus=genus,
            source=EXACT_FORMULA,
            stated_accuracy=EXACT_ACCURACY,
            matrix=hyperelliptic_period_matrix(genus),
        )
    elif name in _PRINTED:
        record = embedded(name)
    else:
        raise UnknownName(
            f"Unknown matrix {name!r}; choose from {', '.join(ZOO_NAMES)}."
        )

    matrix = record.matrix
    assert matrix is not None
    suffix = ""

    if perturb_diag:
        matrix = diagonal_perturbation(matrix, perturb_diag)
        suffix += f"+diag({perturb_diag})"

    if perturb_sym:
        matrix = symmetric_perturbation(matrix, perturb_sym)
        suffix += f"+sym({perturb_sym})"

    if not suffix:
        return record

    return MatrixRecord(
        name=record.name + suffix,
        genus=record.genus,
        source=record.source,
        stated_accuracy=record.stated_accuracy,
        matrix=matrix,
    )
