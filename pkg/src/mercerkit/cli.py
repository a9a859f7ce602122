"""Batch command-line front end.

Commands parse a kernel spec string and point/measure files, run one
analysis, and write a CSV or JSON report.  Exit codes follow a scripting
convention: 0 for success or an affirmative verdict, 1 for a negative
verdict, 2 for a violated mathematical precondition, 64 for usage errors,
74 for I/O failures.
"""
from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import __version__
from . import bases, csvio, measures, mercer, rkhs
from .errors import PreconditionError, UsageError
from .kernels import check_psd, cross_gram, gram, parse_kernel

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PRECONDITION = 2
EXIT_USAGE = 64
EXIT_IO = 74

# Report gates: identity gaps are eigensolver-grade, reconstruction and
# Dini tails carry the quadrature-level tolerance.
GAP_TOL = 1e-10
SUP_TOL = 1e-8


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad arguments through the exit-code convention."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # Accept values like -1:1 (range bounds) without mistaking them
        # for option flags; no option here starts with a digit.
        self._negative_number_matcher = re.compile(r"^-\d|^-\.\d")

    def error(self, message):
        raise UsageError(message)


def cmd_gram(args) -> int:
    pts = csvio.load_points(args.points)
    spec = parse_kernel(args.kernel, points=pts)
    gm = gram(spec, pts)
    if args.require_psd:
        res = check_psd(gm.entries)
        if not res.ok:
            print(f"error: Gram matrix is not PSD (min eigenvalue "
                  f"{res.min_eigenvalue:.3e})", file=sys.stderr)
            return EXIT_PRECONDITION
    csvio.save_matrix(args.out, gm.entries)
    return EXIT_OK


def cmd_mercer(args) -> int:
    mu = measures.load_measure(args.measure)
    spec = parse_kernel(args.kernel, points=mu.points)
    op = mercer.assemble(spec, mu)
    dec = mercer.spectrum(op)
    sup, dini = mercer.reconstruction_errors(dec, spec, mu.points)
    trace_gap = mercer.trace_check(dec, spec, mu)
    hs_gap = mercer.hs_check(dec, spec, mu)
    report = {
        "eigenvalues": dec.eigenvalues,
        "rank": dec.rank,
        "trace_gap": trace_gap,
        "hs_gap": hs_gap,
        "sup_errors": sup,
        "dini": dini,
    }
    csvio.save_json(args.out, report)
    if args.functions:
        csvio.save_matrix(args.functions, dec.functions)
    ok = (trace_gap <= GAP_TOL and hs_gap <= GAP_TOL
          and float(sup[-1]) <= SUP_TOL and float(dini[-1]) <= SUP_TOL)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _slice_values(spec_range: str, step: float) -> np.ndarray:
    parts = spec_range.split(":")
    if len(parts) != 2:
        raise UsageError(f"range must look like lo:hi, got {spec_range!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"range bounds must be numbers, got {spec_range!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and math.isfinite(step)):
        raise UsageError("range bounds and step must be finite")
    if step <= 0:
        raise UsageError(f"step must be positive, got {step}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if count < 1:
        raise UsageError(f"range {spec_range!r} contains no grid values")
    return lo + step * np.arange(count)


def cmd_mesh(args) -> int:
    spec = parse_kernel(args.kernel)
    values = _slice_values(args.range, args.step)
    pts = values.reshape(-1, 1)
    block = cross_gram(spec, pts, pts)
    lines = []
    for i, x in enumerate(values):
        for j, y in enumerate(values):
            lines.append(",".join((
                csvio.format_float(x),
                csvio.format_float(y),
                csvio.format_float(float(np.real(block[i, j]))),
            )))
    csvio.atomic_write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_membership(args) -> int:
    pts = csvio.load_points(args.points)
    values = csvio.load_column(args.values)
    spec = parse_kernel(args.kernel, points=pts)
    host = rkhs.build(spec, pts)
    res = rkhs.membership(host, values)
    csvio.save_json(args.out, {
        "member": res.member,
        "norm": res.norm,
        "certificate": res.certificate,
    })
    return EXIT_OK if res.member else EXIT_NEGATIVE


def cmd_inclusion(args) -> int:
    pts = csvio.load_points(args.points)
    spec_k = parse_kernel(args.kernel_k, points=pts)
    spec_l = parse_kernel(args.kernel_l, points=pts)
    host_k = rkhs.build(spec_k, pts)
    host_l = rkhs.build(spec_l, pts)
    res = rkhs.aronszajn_inclusion(host_k, host_l)
    csvio.save_json(args.out, {"included": res.included, "c": res.c})
    return EXIT_OK if res.included else EXIT_NEGATIVE


def cmd_basis(args) -> int:
    if args.family == "weyl":
        basis = bases.WeylBasis(args.n, args.d)
    else:
        if args.sigma is None:
            raise UsageError("gauss basis requires --sigma")
        basis = bases.GaussBasis(args.n, args.sigma, args.kmax)
    columns = None
    if args.points:
        pts = csvio.load_points(args.points)
        columns = np.stack([basis.evaluate_all(x) for x in pts], axis=1)
    lines = []
    for row, alpha in enumerate(basis.multiindices):
        cells = [str(a) for a in alpha.entries]
        if columns is not None:
            cells.extend(csvio.format_float(v) for v in columns[row])
        lines.append(",".join(cells))
    csvio.atomic_write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="mercerkit",
                     description="Kernel Gram, spectra, and basis reports.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gram", help="write the Gram matrix of a kernel on points")
    p.add_argument("--kernel", required=True, help="kernel spec, e.g. gauss:sigma=1")
    p.add_argument("--points", required=True, help="CSV of points, one per row")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--require-psd", action="store_true",
                   help="fail with exit 2 if the Gram matrix is not PSD")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("mercer", help="spectral report for a kernel on a measure")
    p.add_argument("--kernel", required=True)
    p.add_argument("--measure", required=True,
                   help="CSV rows: coordinates then a weight column")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--functions", default=None,
                   help="optional CSV path for eigenfunction samples")
    p.set_defaults(func=cmd_mercer)

    p = sub.add_parser("mesh", help="tabulate K(x,y) over a 1-D slice for plotting")
    p.add_argument("--kernel", required=True)
    p.add_argument("--range", required=True, help="slice bounds lo:hi")
    p.add_argument("--step", required=True, type=float)
    p.add_argument("--out", required=True, help="output CSV path (x,y,K rows)")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("membership", help="test sampled values for membership")
    p.add_argument("--kernel", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--values", required=True, help="single-column CSV of samples")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("inclusion", help="test H_K inside H_L on shared points")
    p.add_argument("--kernel-k", required=True)
    p.add_argument("--kernel-l", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inclusion)

    p = sub.add_parser("basis", help="tabulate an explicit orthonormal basis")
    p.add_argument("--family", required=True, choices=("weyl", "gauss"))
    p.add_argument("--n", required=True, type=int, help="ambient dimension")
    p.add_argument("--d", type=int, default=0, help="degree (weyl)")
    p.add_argument("--sigma", type=float, default=None, help="bandwidth (gauss)")
    p.add_argument("--kmax", type=int, default=bases.DEFAULT_KMAX,
                   help="truncation order (gauss)")
    p.add_argument("--points", default=None,
                   help="optional CSV of sample points to evaluate at")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_basis)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # Malformed numeric content in an input file.
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
