"""Command-line front end.

Exit codes: 0 success, 1 verification found a failing check, 2 usage or
validation error, 3 numeric error (overflow), 4 resource exhaustion.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import core, symmetrized
from .errors import InvalidGrid, NumericError, UnknownCheck, ValidationError
from .io import curve_csv, curve_json, format_float, format_order, load_distributions
from .verify import CHECK_NAMES, SuiteConfig, dumps_suite, run_suite

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC, EXIT_RESOURCE = 0, 1, 2, 3, 4

# measure name -> (needs s, evaluator)
MEASURES = {
    "ks": (True, core.ks),
    "u": (True, symmetrized.u),
    "v": (True, symmetrized.v),
    "u_star": (True, symmetrized.u_star),
    "v_star": (True, symmetrized.v_star),
    "i_alpha": (True, lambda p, q, s: core.alpha_family(p, q, s).i_alpha),
    "renyi": (True, lambda p, q, s: core.alpha_family(p, q, s).renyi),
    "tsallis": (True, lambda p, q, s: core.alpha_family(p, q, s).tsallis),
    "kl": (False, core.kl),
    "hellinger_sq": (False, core.hellinger_sq),
    "chi_sq": (False, core.chi_sq),
    "jeffreys": (False, symmetrized.jeffreys),
}
ALIASES = {"hellinger": "hellinger_sq", "chi2": "chi_sq"}


def _pair_indices(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I,J row indices, got {text!r}") from None
    if i < 0 or j < 0:
        raise argparse.ArgumentTypeError("row indices must be non-negative")
    return i, j


def _select_pair(args):
    dists = load_distributions(args.input, args.format, args.renormalize)
    i, j = args.pair
    if max(i, j) >= len(dists):
        raise ValidationError(f"--pair {i},{j} out of range: file has {len(dists)} rows")
    return dists[i], dists[j]


def _add_input(sp):
    sp.add_argument("--input", required=True, help="CSV (one row per line) or JSON (array of arrays)")
    sp.add_argument("--format", choices=("csv", "json"), help="default: from the file extension")
    sp.add_argument("--pair", type=_pair_indices, default=(0, 1), metavar="I,J",
                    help="0-based row indices of p and q (default 0,1)")
    sp.add_argument("--renormalize", action="store_true", help="divide each row by its sum")


def cmd_eval(args, out) -> int:
    p, q = _select_pair(args)
    names = [ALIASES.get(m, m) for m in args.measure]
    for name in names:
        if name not in MEASURES:
            raise ValidationError(f"unknown measure {name!r}; choose from {', '.join(MEASURES)}")
        if MEASURES[name][0] and not args.s:
            raise ValidationError(f"measure {name!r} needs at least one --s")
    for name in names:
        needs_s, fn = MEASURES[name]
        if not needs_s:
            print(f"{name} {format_float(fn(p, q))}", file=out)
            continue
        for s in args.s:
            print(f"{name} s={format_order(s)} {format_float(fn(p, q, s))}", file=out)
    return EXIT_OK


def curve_grid(s_min: float, s_max: float, s_step=None, s_count=None) -> np.ndarray:
    if not (math.isfinite(s_min) and math.isfinite(s_max)) or s_min >= s_max:
        raise InvalidGrid(f"need finite s-min < s-max, got {s_min!r}, {s_max!r}")
    if s_count is not None:
        if s_count < 2:
            raise InvalidGrid("--s-count must be at least 2")
        return np.linspace(s_min, s_max, int(s_count))
    if s_step is None or not s_step > 0 or not math.isfinite(s_step):
        raise InvalidGrid(f"--s-step must be positive, got {s_step!r}")
    n = math.floor((s_max - s_min) / s_step + 1e-9)
    if n > 10**7:
        raise InvalidGrid("grid has more than 1e7 points")
    return s_min + s_step * np.arange(n + 1)


def cmd_curve(args, out) -> int:
    grid = curve_grid(args.s_min, args.s_max, args.s_step, args.s_count)
    p, q = _select_pair(args)
    points = symmetrized.symmetrized_curve(p, q, grid)
    text = curve_json(points) if args.out_format == "json" else curve_csv(points)
    if args.out in (None, "-"):
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    checks = None
    if args.checks:
        checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    cfg = SuiteConfig(
        seed=args.seed, trials=args.trials, n_range=(args.n_min, args.n_max),
        abs_tol=args.abs_tol, rel_tol=args.rel_tol, checks=checks,
    )
    reports = run_suite(cfg)
    text = dumps_suite(cfg, reports) + "\n"
    if args.out in (None, "-"):
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _two_pass_sum(t: np.ndarray) -> float:
    # pairwise sum, then one correction pass over the centred terms
    s0 = float(np.sum(t))
    return s0 + float(np.sum(t - s0 / t.size))


def cmd_bench(args, out) -> int:
    if args.pairs < 1:
        raise ValidationError("--pairs must be at least 1")
    if args.n < 2:
        raise ValidationError("--n must be at least 2")
    if args.repeat < 1:
        raise ValidationError("--repeat must be at least 1")
    s = core.check_order(args.s)
    rng = np.random.default_rng(args.seed)
    pairs = [
        (core.make_distribution(rng.standard_exponential(args.n), renormalize=True),
         core.make_distribution(rng.standard_exponential(args.n), renormalize=True))
        for _ in range(args.pairs)
    ]
    t0 = time.perf_counter()
    points = []
    for _ in range(args.repeat):
        points = [symmetrized.symmetrized_point(p, q, s) for p, q in pairs]
    elapsed = time.perf_counter() - t0

    worst = 0.0
    for (p, q), pt in zip(pairs, points):
        k_pq = _two_pass_sum(core.ks_terms(p, q, s))
        k_qp = _two_pass_sum(core.ks_terms(q, p, s))
        for fast, slow in ((pt.u, k_pq + k_qp), (pt.v, k_pq * k_qp)):
            if fast != slow:
                worst = max(worst, abs(fast - slow) / max(abs(fast), abs(slow)))
    evals = args.pairs * args.repeat
    print(f"n={args.n} pairs={args.pairs} s={format_order(s)} repeat={args.repeat}", file=out)
    print(f"evaluations={evals} seconds={elapsed:.6f} evals_per_second={evals / elapsed:.6g}", file=out)
    print(f"max_rel_deviation={worst:.3e}", file=out)
    if args.pairs * args.repeat <= 4:
        for (p, q), pt in zip(pairs, points):
            print(f"u s={format_order(s)} {format_float(pt.u)}", file=out)
            print(f"v s={format_order(s)} {format_float(pt.v)}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdiv", description="s-divergences and their symmetrizations")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate measures for one pair")
    _add_input(ev)
    ev.add_argument("--measure", action="append", required=True,
                    help=f"one of {', '.join(MEASURES)} (repeatable)")
    ev.add_argument("--s", action="append", type=float, default=[], help="order s (repeatable)")
    ev.set_defaults(func=cmd_eval)

    cu = sub.add_parser("curve", help="tabulate K, U, V, U*, V* over an s-grid")
    _add_input(cu)
    cu.add_argument("--s-min", type=float, required=True)
    cu.add_argument("--s-max", type=float, required=True)
    g = cu.add_mutually_exclusive_group(required=True)
    g.add_argument("--s-step", type=float)
    g.add_argument("--s-count", type=int)
    cu.add_argument("--out", help="output path (default stdout)")
    cu.add_argument("--out-format", choices=("csv", "json"), default="csv")
    cu.set_defaults(func=cmd_curve)

    ve = sub.add_parser("verify", help="run the randomized property suite")
    ve.add_argument("--seed", type=int, default=1)
    ve.add_argument("--trials", type=int, default=1000)
    ve.add_argument("--n-min", type=int, default=2)
    ve.add_argument("--n-max", type=int, default=64)
    ve.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECK_NAMES)}")
    ve.add_argument("--abs-tol", type=float, default=1e-12)
    ve.add_argument("--rel-tol", type=float, default=1e-12)
    ve.add_argument("--out", help="write the JSON report here instead of stdout")
    ve.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="throughput of U and V on random pairs")
    be.add_argument("--n", type=int, default=1_000_000)
    be.add_argument("--pairs", type=int, default=8)
    be.add_argument("--s", type=float, default=2.0)
    be.add_argument("--repeat", type=int, default=1)
    be.add_argument("--seed", type=int, default=0)
    be.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ValidationError, UnknownCheck) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
