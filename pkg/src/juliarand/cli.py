"""Command-line front-end: dim, cover, density, sample.

Every command is deterministic for a fixed --seed, whatever --threads says.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report as rep
from ._util import format_float, parse_complex_pair
from .dynamics import QuadraticMap
from .ergodic import (
    BUILTIN_TEST_FUNCTIONS,
    ExperimentConfig,
    reference_integral,
    run_experiment,
    trial_seed,
)
from .errors import JuliaRandError
from .lattice import borel_centers, find_repelling_fixed_point, make_lattice
from .transfer import density, density_cache, estimate_dimension


class UsageError(Exception):
    """Bad argument combinations detected after parsing."""


def _complex_arg(text: str) -> complex:
    return parse_complex_pair(text)


def _h_arg(text: str) -> str | float:
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a float or 'auto', got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="juliarand",
        description=(
            "Pseudo-random points for invariant measures on Julia sets of "
            "z^2 + c: dimension estimation, ball covers, invariant-density "
            "evaluation, and least-squares point selection."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--c", type=_complex_arg, default=complex(0.125, 0.0),
                       metavar="RE,IM", help="map parameter c (default 0.125,0)")
        p.add_argument("--outdir", type=Path, default=Path("."),
                       help="directory for output files (default: .)")
        p.add_argument("--no-figures", action="store_true",
                       help="skip the PNG figures")

    p_dim = sub.add_parser("dim", help="estimate the Hausdorff dimension")
    add_common(p_dim)
    p_dim.add_argument("--h-lo", type=float, default=0.9,
                       help="bracket lower end (default 0.9)")
    p_dim.add_argument("--h-hi", type=float, default=1.1,
                       help="bracket upper end (default 1.1)")
    p_dim.add_argument("--tol-h", type=float, default=1e-4,
                       help="bisection width tolerance (default 1e-4)")
    p_dim.add_argument("--n-probe", type=int, default=18,
                       help="transfer level probed by the bisection (default 18)")
    p_dim.set_defaults(func=cmd_dim)

    p_cov = sub.add_parser("cover", help="enumerate ball centers, render the cover")
    add_common(p_cov)
    p_cov.add_argument("--m", type=int, default=8,
                       help="pullback depth: 2^m centers (default 8)")
    p_cov.add_argument("--resolution", type=int, default=800,
                       help="pixmap edge length in pixels (default 800)")
    p_cov.add_argument("--image-format", choices=["p1", "p6"], default="p1",
                       help="pixmap flavor: p1 ascii or p6 binary (default p1)")
    p_cov.set_defaults(func=cmd_cover)

    p_den = sub.add_parser("density", help="invariant-density value at a point")
    add_common(p_den)
    p_den.add_argument("--z", type=_complex_arg, required=True,
                       metavar="RE,IM", help="evaluation point")
    p_den.add_argument("--h", type=float, required=True,
                       help="conformal exponent")
    p_den.add_argument("--tol-density", type=float, default=1e-4,
                       help="stabilization tolerance (default 1e-4)")
    p_den.add_argument("--max-level", type=int, default=25,
                       help="level cap (default 25)")
    p_den.set_defaults(func=cmd_density)

    p_s = sub.add_parser("sample", help="full pipeline: select points, validate")
    add_common(p_s)
    p_s.add_argument("--m", type=int, default=8,
                     help="pullback depth: 2^m cover balls (default 8)")
    p_s.add_argument("--ell", type=int, default=100,
                     help="lattice rows (default 100)")
    p_s.add_argument("--N", type=int, default=32000,
                     help="backward-orbit depth (default 32000)")
    p_s.add_argument("--n", type=int, default=100,
                     help="Birkhoff sum length for selection (default 100)")
    p_s.add_argument("--alpha", type=int, default=30,
                     help="number of ensemble trials (default 30)")
    p_s.add_argument("--h", type=_h_arg, default=1.00735,
                     help="conformal exponent, or 'auto' (default 1.00735)")
    p_s.add_argument("--h-lo", type=float, default=0.9,
                     help="bracket lower end for --h auto (default 0.9)")
    p_s.add_argument("--h-hi", type=float, default=1.1,
                     help="bracket upper end for --h auto (default 1.1)")
    p_s.add_argument("--tol-h", type=float, default=1e-4,
                     help="bisection tolerance for --h auto (default 1e-4)")
    p_s.add_argument("--n-probe", type=int, default=18,
                     help="bisection probe level for --h auto (default 18)")
    p_s.add_argument("--seed", type=int, default=20090417,
                     help="master seed (default 20090417)")
    p_s.add_argument("--tol-density", type=float, default=1e-4,
                     help="density stabilization tolerance (default 1e-4)")
    p_s.add_argument("--threshold", type=float, default=None,
                     help="normalized-objective stop level; enables the "
                          "adaptive sum-lengthening selector")
    p_s.add_argument("--p-max", type=int, default=None,
                     help="sum-length cap for --threshold (default: N)")
    p_s.add_argument("--g", choices=sorted(BUILTIN_TEST_FUNCTIONS),
                     default="abs", help="observable to average (default abs)")
    p_s.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: all cores); results "
                          "do not depend on this")
    p_s.add_argument("--save-lattice", type=Path, default=None,
                     metavar="PATH", help="also dump the first trial's mesh "
                                          "as CSV (row, step, re, im)")
    p_s.set_defaults(func=cmd_sample)
    return parser


def cmd_dim(args: argparse.Namespace) -> int:
    if args.h_lo >= args.h_hi:
        raise UsageError(
            f"bracket is inverted: --h-lo {args.h_lo} >= --h-hi {args.h_hi}"
        )
    qmap = QuadraticMap(args.c)
    z0 = find_repelling_fixed_point(qmap)
    est = estimate_dimension(
        qmap, z0, args.h_lo, args.h_hi,
        tol_h=args.tol_h, n_probe=args.n_probe,
    )
    print(f"h = {format_float(est.h)}")
    print(f"bracket = [{format_float(est.bracket[0])}, "
          f"{format_float(est.bracket[1])}]")
    print(f"candidates ({len(est.candidates)}, ratio at level {est.n_probe}):")
    for cand in est.candidates:
        print(f"  h = {format_float(cand.h):<24} ratio = "
              f"{format_float(cand.ratio)}")
    args.outdir.mkdir(parents=True, exist_ok=True)
    csv_path = rep.write_dimension_csv(args.outdir / "dim.csv", est)
    print(f"wrote {csv_path}")
    if not args.no_figures:
        print(f"wrote {rep.fig_dimension(est, args.outdir / 'dim.png')}")
    return 0


def cmd_cover(args: argparse.Namespace) -> int:
    qmap = QuadraticMap(args.c)
    cover = borel_centers(qmap, args.m)
    print(f"{len(cover)} centers, radius {format_float(cover.radius)}, "
          f"fixed point {format_float(cover.z0.real)},"
          f"{format_float(cover.z0.imag)}")
    args.outdir.mkdir(parents=True, exist_ok=True)
    print(f"wrote {rep.write_cover_csv(args.outdir / 'cover.csv', cover)}")
    bitmap = rep.render_cover_bitmap(cover, args.resolution)
    ppm = args.outdir / "cover.ppm"
    if args.image_format == "p1":
        rep.write_ppm_p1(ppm, bitmap)
    else:
        rep.write_ppm_p6(ppm, bitmap)
    print(f"wrote {ppm}")
    if not args.no_figures:
        print(f"wrote {rep.fig_cover(cover, args.outdir / 'cover.png')}")
    return 0


def cmd_density(args: argparse.Namespace) -> int:
    qmap = QuadraticMap(args.c)
    res = density(
        qmap, args.z, args.h,
        tol=args.tol_density, max_level=args.max_level,
    )
    print(f"{'n':>4}  {'f_n':<24}  ratio")
    for n, val, ratio in res.levels:
        print(f"{n:>4}  {format_float(val):<24}  {format_float(ratio)}")
    print(f"f({format_float(args.z.real)},{format_float(args.z.imag)}) = "
          f"{format_float(res.value)}")
    if not args.no_figures:
        args.outdir.mkdir(parents=True, exist_ok=True)
        print(f"wrote {rep.fig_density(res, args.outdir / 'density.png')}")
    if not res.converged:
        print(
            f"density did not stabilize to {args.tol_density:g} within "
            f"{args.max_level} levels", file=sys.stderr,
        )
        return 1
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    qmap = QuadraticMap(args.c)
    g = BUILTIN_TEST_FUNCTIONS[args.g]
    if args.n > args.N:
        raise UsageError(f"--n {args.n} exceeds the orbit depth --N {args.N}")
    if args.h == "auto" and args.h_lo >= args.h_hi:
        raise UsageError(
            f"bracket is inverted: --h-lo {args.h_lo} >= --h-hi {args.h_hi}"
        )

    stage = "dimension"
    try:
        tol_h = None
        if args.h == "auto":
            z0 = find_repelling_fixed_point(qmap)
            est = estimate_dimension(
                qmap, z0, args.h_lo, args.h_hi,
                tol_h=args.tol_h, n_probe=args.n_probe,
            )
            h_used, h_mode, tol_h = est.h, "auto", args.tol_h
            print(f"h (auto) = {format_float(h_used)}")
        else:
            h_used, h_mode = float(args.h), "fixed"

        stage = "cover"
        cover = borel_centers(qmap, args.m)

        stage = "densities"
        cache = density_cache(
            cover, h_used, tol=args.tol_density, threads=args.threads
        )

        stage = "trials"
        config = ExperimentConfig(
            qmap=qmap, m_cover=args.m, ell=args.ell, depth=args.N,
            n_sum=args.n, h=h_used, g=g, tol_density=args.tol_density,
            threshold=args.threshold, p_max=args.p_max,
        )
        result = run_experiment(
            config, args.alpha, args.seed,
            cover=cover, densities=cache, threads=args.threads,
        )
        reference = reference_integral(cover, g)

        stage = "artifacts"
        args.outdir.mkdir(parents=True, exist_ok=True)
        doc = rep.sample_report_json(
            result, reference, h_mode=h_mode, tol_h=tol_h,
            points=[rep.trial_point_json(t) for t in result.per_trial],
        )
        print(f"wrote {rep.write_json(args.outdir / 'sample.json', doc)}")
        print(f"wrote {rep.write_sample_csv(args.outdir / 'sample.csv', result, reference)}")
        if not args.no_figures:
            print(f"wrote {rep.fig_sample(result, reference, args.outdir / 'sample.png')}")
        if args.save_lattice is not None:
            lat = make_lattice(
                cover, args.ell, args.N, trial_seed(args.seed, 0)
            )
            print(f"wrote {rep.write_lattice_csv(args.save_lattice, lat)}")
    except (JuliaRandError, OSError) as exc:
        print(f"sample: stage '{stage}' failed: {exc}", file=sys.stderr)
        return 1

    failed = [t for t in result.per_trial if t.error is not None]
    for t in failed:
        print(f"trial with seed {t.seed} failed: {t.error}", file=sys.stderr)
    print(f"reference = {format_float(reference)}")
    print(f"mu = {format_float(result.mu)}")
    print(f"sigma = {format_float(result.sigma)}")
    if len(failed) == len(result.per_trial):
        print("sample: every trial failed", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 2
    except (JuliaRandError, OSError) as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
