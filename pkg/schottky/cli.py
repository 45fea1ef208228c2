"""Command-line interface of schottky.

Subcommands:

    check   decide whether a matrix lies in the Jacobi locus
    reduce  Siegel-reduce a matrix
    igusa   evaluate the genus-4 Schottky-Igusa form
    sweep   tabulate the best residual against perturbation size
    zoo     export a test matrix as a matrix file

Matrices come from a JSON matrix file or from --zoo.  check exits with 0 when
the matrix is in the Jacobi locus at the precision, 1 when it is not and 2 on
any input error.

Usage:
    $ schottky check --zoo rm_tau --tau 1+1i
    $ schottky check matrix.json --delta 1e-8 --json report.json
    $ schottky sweep --zoo rm_tau --s-grid 1e-15,1e-10,1e-5 --csv out.csv
"""

import argparse
import logging
import sys
import time
from typing import List, Optional, Sequence

import numpy as np

from .errors import SchottkyError
from .igusa import schottky_igusa
from .siegel import siegel_reduce
from .solver import (
    START_STRATEGIES,
    SolverConfig,
    residual_vs_precision_sweep,
    schottky_test,
)
from .storages import (
    CSVStorage,
    JSONStorage,
    read_matrix,
    write_matrix,
    write_report,
    write_sweep,
)
from .version import __version__
from .zoo import (
    ZOO_NAMES,
    MatrixRecord,
    diagonal_perturbation,
    from_zoo,
    symmetric_perturbation,
)

logger = logging.getLogger(__name__)

EXIT_IN_LOCUS = 0
EXIT_NOT_IN_LOCUS = 1
EXIT_ERROR = 2


def _parse_complex(text: str) -> complex:
    """Parse "1+1i" or "1+1j" into a complex number."""
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex value: {text!r}")


def _parse_grid(text: str) -> List[float]:
    """Parse a comma-separated list of floats."""
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid: {text!r}")

    if not values:
        raise argparse.ArgumentTypeError("grid must not be empty")

    return values


def _add_matrix_args(parser: argparse.ArgumentParser) -> None:
    """Add the matrix source arguments to a subcommand."""
    parser.add_argument("matrix", nargs="?", help="JSON matrix file")
    parser.add_argument("--zoo", choices=ZOO_NAMES, help="zoo matrix name")
    parser.add_argument(
        "--tau", type=_parse_complex, default=1 + 1j, help="rm_tau parameter"
    )
    parser.add_argument(
        "--genus", type=int, default=4, help="hyperelliptic genus"
    )
    parser.add_argument(
        "--perturb-diag", type=float, help="diagonal perturbation size"
    )
    parser.add_argument(
        "--perturb-sym", type=float, help="symmetric perturbation size"
    )

    return


def _add_solver_args(parser: argparse.ArgumentParser) -> None:
    """Add the solver configuration arguments to a subcommand."""
    parser.add_argument("--delta", type=float, default=1e-10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ell0", type=float, default=0.1)
    parser.add_argument("--dell", type=float, default=0.1)
    parser.add_argument("--ellmax", type=float, default=0.5)
    parser.add_argument("--nmax", type=int, default=100)
    parser.add_argument(
        "--strategy", choices=START_STRATEGIES, default="half_period"
    )
    parser.add_argument("--starts-per-ell", type=int, default=1)
    parser.add_argument(
        "--no-reduce", action="store_true", help="skip Siegel reduction"
    )

    return


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the schottky command."""
    parser = argparse.ArgumentParser(
        prog="schottky",
        description="Decide numerically whether a Riemann matrix is a "
        "period matrix of a curve.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="increase log verbosity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser(
        "check",
        help="run the Jacobi-locus test (genus at least 3)",
        description="Run the Jacobi-locus test. The matrix must have genus "
        "at least 3; smaller genera exit with 2.",
    )
    _add_matrix_args(check)
    _add_solver_args(check)
    check.add_argument("--json", help="write a report file")
    check.set_defaults(func=cmd_check)

    reduce_p = sub.add_parser("reduce", help="Siegel-reduce a matrix")
    _add_matrix_args(reduce_p)
    reduce_p.add_argument("--json", help="write the reduced matrix")
    reduce_p.set_defaults(func=cmd_reduce)

    igusa = sub.add_parser("igusa", help="evaluate the Schottky-Igusa form")
    _add_matrix_args(igusa)
    igusa.set_defaults(func=cmd_igusa)

    sweep = sub.add_parser(
        "sweep", help="residual against perturbation (genus at least 3)"
    )
    _add_matrix_args(sweep)
    _add_solver_args(sweep)
    sweep.add_argument(
        "--s-grid",
        type=_parse_grid,
        required=True,
        help="comma-separated perturbation sizes",
    )
    sweep.add_argument("--csv", help="write the table as CSV")
    sweep.set_defaults(func=cmd_sweep)

    zoo = sub.add_parser("zoo", help="export a zoo matrix")
    _add_matrix_args(zoo)
    zoo.add_argument("--json", required=True, help="output matrix file")
    zoo.set_defaults(func=cmd_zoo)

    return parser


def _load(args: argparse.Namespace) -> MatrixRecord:
    """Load the matrix named by the arguments."""
    if args.zoo is not None:
        return from_zoo(
            args.zoo,
            tau=args.tau,
            genus=args.genus,
            perturb_diag=args.perturb_diag,
            perturb_sym=args.perturb_sym,
        )

    if args.matrix is None:
        raise ValueError("Give a matrix file or --zoo.")

    record = read_matrix(JSONStorage(args.matrix, access_mode="r"))

    if args.perturb_diag or args.perturb_sym:
        matrix = record.matrix

        if args.perturb_diag:
            matrix = diagonal_perturbation(matrix, args.perturb_diag)

        if args.perturb_sym:
            matrix = symmetric_perturbation(matrix, args.perturb_sym)

        record = MatrixRecord(
            name=record.name,
            genus=record.genus,
            source=record.source,
            stated_accuracy=record.stated_accuracy,
            matrix=matrix,
        )

    return record


def _config(args: argparse.Namespace) -> SolverConfig:
    """Build a SolverConfig from the arguments."""
    return SolverConfig(
        delta=args.delta,
        ell0=args.ell0,
        d_ell=args.dell,
        ell_max=args.ellmax,
        n_max=args.nmax,
        start_strategy=args.strategy,
        seed=args.seed,
        starts_per_ell=args.starts_per_ell,
        reduce=not args.no_reduce,
    )


def cmd_check(args: argparse.Namespace) -> int:
    """Run the Jacobi-locus test and print the verdict."""
    record = _load(args)
    cfg = _config(args)
    start = time.perf_counter()
    verdict = schottky_test(record.matrix, cfg)
    wall_time = time.perf_counter() - start
    logger.info("check of %s took %.3f s", record.name, wall_time)
    iterations = sum(t.iterations for t in verdict.traces)

    print(f"matrix: {record.name} (g={record.genus})")
    print(
        "verdict: "
        + ("in_locus" if verdict.in_locus else "not_in_locus")
        + f" at precision {verdict.precision:.1e}"
    )
    print(f"delta_min: {verdict.best_delta:.3e}")
    print(f"best residual: {verdict.best_residual:.3e}")
    print(f"starts: {len(verdict.starts)}, iterations: {iterations}")

    if args.json:
        write_report(
            JSONStorage(args.json, access_mode="w"), verdict, cfg, wall_time
        )

    return EXIT_IN_LOCUS if verdict.in_locus else EXIT_NOT_IN_LOCUS


def cmd_reduce(args: argparse.Namespace) -> int:
    """Siegel-reduce a matrix and print the shortest vector lengths."""
    record = _load(args)
    reduced, report = siegel_reduce(record.matrix)

    print(f"y_min before: {report.input_ymin:.6f}")
    print(f"y_min after: {report.output_ymin:.6f}")
    print(f"iterations: {report.iterations}")

    with np.printoptions(precision=4, suppress=True, linewidth=120):
        print(reduced.matrix)

    if args.json:
        storage = JSONStorage(args.json, access_mode="w")
        doc = reduced._serialize_to_dict()
        doc["name"] = f"{record.name} (reduced)"
        doc["stated_accuracy"] = record.stated_accuracy
        doc["reduction"] = report._serialize_to_dict()
        storage.write(doc)

    return 0


def cmd_igusa(args: argparse.Namespace) -> int:
    """Print |Σ| of a genus-4 matrix."""
    record = _load(args)
    sigma = schottky_igusa(record.matrix)
    print(f"|Sigma|: {abs(sigma):.6e}")

    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    """Tabulate the best residual against perturbation size."""
    record = _load(args)
    rows = residual_vs_precision_sweep(
        record.matrix, s_list=args.s_grid, cfg=_config(args)
    )
    print("s,best_residual,delta_min,converged_fraction")

    for r in rows:
        print(
            f"{r.s!r},{r.best_residual!r},{r.delta_min!r},"
            f"{r.converged_fraction!r}"
        )

    if args.csv:
        write_sweep(CSVStorage(args.csv, access_mode="w"), rows)

    return 0


def cmd_zoo(args: argparse.Namespace) -> int:
    """Export a zoo matrix as a matrix file."""
    if args.zoo is None:
        raise ValueError("Give a zoo matrix name with --zoo.")

    record = _load(args)
    write_matrix(JSONStorage(args.json, access_mode="w"), record)
    print(f"wrote {record.name} to {args.json}")

    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the schottky command.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        The exit code.
    """
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        format="%(name)s:%(levelname)s:%(message)s",
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[
            min(args.verbose, 2)
        ],
    )

    try:
        return int(args.func(args))
    except (SchottkyError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
