"""``permqr`` command line: single runs, ensembles, sample matrices.

Exit codes: 0 ok, 1 input/config error, 2 numerical failure, 3 an
algorithm failed on every ensemble member.
"""

import argparse
import sys

import numpy as np

from . import fileio
from .ensemble import MatrixClass, draw, matrix_stream, run_ensemble
from .errors import PermQRError
from .iteration import Algorithm, run_iteration
from .linalg import jacobi_eigen

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_ENSEMBLE = 0, 1, 2, 3
ALGORITHM_CHOICES = ("qr", "qrh", "qrs", "do", "co", "bic", "identity", "cholesky")


def _emit(text, path):
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(msg):
    print(f"permqr: {msg}", file=sys.stderr)


def cmd_run(args):
    try:
        a = fileio.read_matrix(args.matrix)
    except (OSError, fileio.FormatError) as exc:
        _error(f"cannot read matrix: {exc}")
        return EXIT_INPUT
    if args.iters < 0:
        _error("--iters must be >= 0")
        return EXIT_INPUT
    alg = Algorithm.parse(args.alg)
    try:
        truth = jacobi_eigen(a)
    except PermQRError as exc:
        _error(f"ground truth: {type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    tag = None if args.seed is None else f"seed={args.seed}"
    try:
        trace = run_iteration(a, alg, args.iters, truth, tag=tag)
    except PermQRError as exc:
        _error(f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    _emit(fileio.format_trace(trace), args.out)
    if trace.failure is not None:
        _error(f"{alg.label} failed at {trace.failure}")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_ensemble(args):
    try:
        cfg, out = fileio.read_config(args.config)
    except (OSError, fileio.FormatError) as exc:
        _error(f"bad config: {exc}")
        return EXIT_INPUT
    try:
        report = run_ensemble(cfg)
    except PermQRError as exc:
        _error(f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    _emit(fileio.format_report(report), args.out or out)
    dead = [lab for lab in report.labels if np.all(np.isnan(report.means[lab]))]
    if dead:
        _error(f"no usable runs for: {', '.join(dead)} ({report.excluded} matrices excluded)")
        return EXIT_ENSEMBLE
    return EXIT_OK


def cmd_gen(args):
    if args.order < 1:
        _error("--order must be >= 1")
        return EXIT_INPUT
    try:
        a, _, _ = draw(MatrixClass.parse(args.matrix_class), args.order,
                       matrix_stream(args.seed, 0), args.threshold)
    except PermQRError as exc:
        _error(f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    _emit(fileio.format_matrix(a), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="permqr", description="QR iteration with permutations")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="iterate on one matrix and write per-step errors")
    run.add_argument("--matrix", required=True, help="matrix file")
    run.add_argument("--alg", required=True, type=str.lower, choices=ALGORITHM_CHOICES)
    run.add_argument("--iters", type=int, default=50)
    run.add_argument("--seed", type=int, default=None, help="recorded as provenance only")
    run.add_argument("--out", help="CSV path (default stdout)")
    run.set_defaults(func=cmd_run)

    ens = sub.add_parser("ensemble", help="averaged error curves over a random ensemble")
    ens.add_argument("--config", required=True)
    ens.add_argument("--out", help="CSV path; overrides 'out' in the config")
    ens.set_defaults(func=cmd_ensemble)

    gen = sub.add_parser("gen", help="write one random matrix (ensemble member 0 for the seed)")
    gen.add_argument("--class", dest="matrix_class", required=True, type=str.lower, choices=("sym", "pd"))
    gen.add_argument("--order", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--threshold", type=float, default=1e-6)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
