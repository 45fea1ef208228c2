"""Schottky is a numerical test for the Jacobi locus.

Given a Riemann matrix B in the Siegel upper half space, schottky decides
within a precision δ whether B is the period matrix of a compact Riemann
surface.  The matrix is first brought close to Siegel's fundamental domain,
then a Newton least-squares iteration looks for a non-trivial solution of
Fay's trisecant identity among the second-order theta functions of B.  In
genus 4 the Schottky-Igusa modular form provides an independent check.

Usage:
    >>> from schottky import schottky_test, genus4_family, SolverConfig
    >>> verdict = schottky_test(genus4_family(1 + 1j))
    >>> verdict.in_locus
    True
    >>> cfg = SolverConfig(delta=1e-8, start_strategy="random", seed=7)
    >>> schottky_test(diagonal_perturbation(genus4_family(1 + 1j), 0.1), cfg)
"""

from .igusa import schottky_igusa
from .kummer import TrisecantTriple, fay_function, kummer
from .riemann import Characteristic, RiemannMatrix, validate_riemann_matrix
from .siegel import SymplecticTransform, siegel_reduce
from .solver import (
    SolverConfig,
    Verdict,
    newton_solve,
    residual_vs_precision_sweep,
    schottky_test,
)
from .theta import theta
from .zoo import (
    diagonal_perturbation,
    embedded,
    genus4_family,
    hyperelliptic_period_matrix,
    symmetric_perturbation,
)

__all__ = [
    "Characteristic",
    "RiemannMatrix",
    "SolverConfig",
    "SymplecticTransform",
    "TrisecantTriple",
    "Verdict",
    "diagonal_perturbation",
    "embedded",
    "fay_function",
    "genus4_family",
    "hyperelliptic_period_matrix",
    "kummer",
    "newton_solve",
    "residual_vs_precision_sweep",
    "schottky_igusa",
    "schottky_test",
    "siegel_reduce",
    "symmetric_perturbation",
    "theta",
    "validate_riemann_matrix",
]
