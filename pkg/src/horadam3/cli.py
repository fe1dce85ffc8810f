"""Command-line front end.

Exit codes: 0 success, 1 identity failure, 2 usage or grid-file error,
3 domain error (t = 0, non-positive discriminant, closed form out of tolerance).
Domain errors print one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .binet import TOL_BINET, binet_term, cubic_roots
from .errors import BinetPrecisionError, HoradamError
from .identities import SuitePlan, run_suite
from .matrix import MulCounter, fast_term
from .presets import PRESETS, default_grid, get_preset
from .sequence import SequenceSpec, TermCache, make_spec, term_range

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
SCHEMA_VERSION = 1
SEED_ENV = "HORADAM3_SEED"


class GridFileError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sequence")
    g.add_argument("--preset", choices=sorted(PRESETS))
    for name in ("r", "s", "t"):
        g.add_argument(f"-{name}", type=int)
    for name in ("a", "b", "c"):
        g.add_argument(f"-{name}", type=_rational, help="rational, e.g. 3 or -1/2")


def _spec_from_args(p: argparse.ArgumentParser, args) -> SequenceSpec:
    coeffs = (args.r, args.s, args.t)
    init = (args.a, args.b, args.c)
    if args.preset:
        if any(v is not None for v in coeffs + init):
            p.error("--preset cannot be combined with -r/-s/-t/-a/-b/-c")
        return get_preset(args.preset).spec
    if any(v is None for v in coeffs):
        p.error("give --preset or all of -r, -s, -t")
    if all(v is None for v in init):
        init = (0, 1, args.r)
    elif any(v is None for v in init):
        p.error("give all of -a, -b, -c or none (none means 0, 1, r)")
    return make_spec(*coeffs, *init)


def _fmt_float(x: float) -> str:
    return f"{x:#.10g}"


def _spec_json(spec: SequenceSpec) -> dict:
    return {"r": spec.r, "s": spec.s, "t": spec.t, "a": str(spec.a), "b": str(spec.b), "c": str(spec.c)}


def _naive(spec: SequenceSpec, n: int):
    H, h = TermCache(spec), TermCache(spec.tribonacci())
    return H[n], h[n], H.steps + h.steps


def cmd_term(p, args) -> int:
    spec = _spec_from_args(p, args)
    n = args.n
    if args.method == "naive":
        Hn, hn, _ = _naive(spec, n)
        value, exact = (Hn if args.which == "H" else hn), True
    elif args.method == "matrix":
        Hn, hn = fast_term(spec, n)
        value, exact = (Hn if args.which == "H" else hn), True
    else:
        target = spec if args.which == "H" else spec.tribonacci()
        try:
            value = binet_term(target, n)
        except OverflowError:
            raise BinetPrecisionError(f"float overflow evaluating the closed form at n={n}") from None
        Hn, hn = fast_term(spec, n)
        truth = Hn if args.which == "H" else hn
        err = abs(value - float(truth)) / max(1.0, abs(float(truth)))
        if not err <= TOL_BINET:
            raise BinetPrecisionError(f"closed form off by relative {err:.3g} at n={n} (tolerance {TOL_BINET:g})")
        exact = False
    if args.format == "json":
        out = {"schema_version": SCHEMA_VERSION, "kind": "term", "spec": _spec_json(spec), "n": n,
               "which": args.which, "method": args.method, "exact": exact,
               "value": str(value) if exact else value}
        print(json.dumps(out, sort_keys=True))
    else:
        print(str(value) if exact else f"{_fmt_float(value)} (approx)")
    return EXIT_OK


def cmd_range(p, args) -> int:
    spec = _spec_from_args(p, args)
    if args.lo > args.hi:
        p.error(f"--lo {args.lo} is greater than --hi {args.hi}")
    rows = term_range(spec, args.lo, args.hi)
    if args.format == "json":
        out = {"schema_version": SCHEMA_VERSION, "kind": "range", "spec": _spec_json(spec),
               "rows": [{"n": n, "H": str(H), "h": str(h)} for n, H, h in rows]}
        print(json.dumps(out, sort_keys=True))
    else:
        print("n,H,h")
        for n, H, h in rows:
            print(f"{n},{H},{h}")
    return EXIT_OK


def cmd_roots(p, args) -> int:
    spec = _spec_from_args(p, args)
    roots = cubic_roots(spec.r, spec.s, spec.t)
    res = roots.residuals()
    if args.format == "json":
        out = {"schema_version": SCHEMA_VERSION, "kind": "roots", "r": spec.r, "s": spec.s, "t": spec.t,
               "delta": str(roots.delta), "A": roots.big_a, "B": roots.big_b, "alpha": roots.alpha,
               "omega1": [roots.omega1.real, roots.omega1.imag],
               "omega2": [roots.omega2.real, roots.omega2.imag], "residuals": list(res)}
        print(json.dumps(out, sort_keys=True))
        return EXIT_OK
    print(f"delta   {roots.delta} (approx {_fmt_float(float(roots.delta))})")
    print(f"A       {_fmt_float(roots.big_a)}")
    print(f"B       {_fmt_float(roots.big_b)}")
    print(f"alpha   {_fmt_float(roots.alpha)}")
    for name, w in (("omega1", roots.omega1), ("omega2", roots.omega2)):
        print(f"{name}  {_fmt_float(w.real)} {'+' if w.imag >= 0 else '-'} {_fmt_float(abs(w.imag))}i")
    print("residual " + " ".join(f"{x:.2e}" for x in res))
    return EXIT_OK


def read_grid(path: str) -> List[SequenceSpec]:
    """Parse a grid file: one ``r s t a b c`` per line (commas allowed, ``#`` comments)."""
    specs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].replace(",", " ").strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 6:
                raise GridFileError(f"{path}:{lineno}: expected 6 fields r s t a b c, got {len(fields)}")
            try:
                r, s, t = (int(f) for f in fields[:3])
                a, b, c = (Fraction(f) for f in fields[3:])
                specs.append(make_spec(r, s, t, a, b, c))
            except (ValueError, ZeroDivisionError, HoradamError) as exc:
                raise GridFileError(f"{path}:{lineno}: {exc}") from None
    return specs


def cmd_verify(p, args) -> int:
    seed = args.seed
    if args.grid == "default":
        grid = default_grid(seed)
    else:
        try:
            grid = read_grid(args.grid)
        except (OSError, GridFileError) as exc:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
            return EXIT_USAGE
    plan = SuitePlan(n_max=args.n_max, seed=seed, exploratory=args.exploratory)
    report = run_suite(grid, plan=plan, keep="nonpassing" if args.failures_only else "all")
    width = max((len(k) for k in report.summary), default=8)
    print(f"{'identity':<{width}}  {'pass':>7} {'fail':>5} {'skip':>5} {'flagged':>7}  worst")
    for name, row in sorted(report.summary.items()):
        worst = row["worst_residual"]
        worst = "-" if worst is None else (str(worst) if isinstance(worst, Fraction) else f"{worst:.3g}")
        print(f"{name:<{width}}  {row['pass']:>7} {row['fail']:>5} {row['skip']:>5} {row['flagged']:>7}  {worst}")
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(report.to_json(indent=1))
            fh.write("\n")
    print("OK" if report.ok else f"FAIL ({len(report.failures)} failing verdicts)")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_bench(p, args) -> int:
    spec = _spec_from_args(p, args)
    n = args.n
    if n < 1:
        p.error("-n must be >= 1")
    best_naive = best_matrix = float("inf")
    for _ in range(args.reps):
        t0 = time.perf_counter()
        H_naive, h_naive, steps = _naive(spec, n)
        best_naive = min(best_naive, time.perf_counter() - t0)
        counter = MulCounter()
        t0 = time.perf_counter()
        H_fast, h_fast = fast_term(spec, n, counter)
        best_matrix = min(best_matrix, time.perf_counter() - t0)
        if (H_naive, h_naive) != (H_fast, h_fast):
            print(json.dumps({"error": "MethodMismatch", "message": f"naive and matrix disagree at n={n}"}),
                  file=sys.stderr)
            return EXIT_FAIL
    print(f"n = {n}, h[n] has {abs(h_fast.numerator).bit_length()} bits; naive and matrix values agree")
    print(f"{'method':<8} {'seconds':>10} {'mat_muls':>9} {'scalar_ops':>11}")
    print(f"{'naive':<8} {best_naive:>10.4f} {'-':>9} {5 * steps:>11}")
    print(f"{'matrix':<8} {best_matrix:>10.4f} {counter.count:>9} {45 * counter.count:>11}")
    return EXIT_OK


def cmd_presets(p, args) -> int:
    for name, preset in sorted(PRESETS.items()):
        flag = "" if preset.anchored else "  [convention]"
        print(f"{name:<12} {preset.spec.label():<18} {preset.description}{flag}")
    print("any (r,s,t) with (a,b,c) = (0,1,r) gives the generalized Tribonacci sequence")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="horadam3", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("term", help="one term H[n] (or h[n])")
    _add_spec_args(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--which", choices=("H", "h"), default="H")
    p.add_argument("--method", choices=("naive", "matrix", "binet"), default="matrix")
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_term)

    p = sub.add_parser("range", help="rows n, H[n], h[n] for lo <= n <= hi")
    _add_spec_args(p)
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("roots", help="Cardano data of the characteristic cubic")
    _add_spec_args(p)
    p.add_argument("--format", choices=("plain", "json"), default="plain")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--grid", default="default", help="'default' or a file of 'r s t a b c' lines")
    p.add_argument("--seed", type=int, default=int(os.environ.get(SEED_ENV, "0")))
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--json-out", metavar="PATH")
    p.add_argument("--failures-only", action="store_true", help="keep only non-passing verdicts in the report")
    p.add_argument("--exploratory", action="store_true", help="also probe indices outside the stated ranges")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="naive O(n) versus matrix O(log n) evaluation")
    _add_spec_args(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--reps", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("presets", help="list named sequences")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # exact terms routinely exceed the default 4300-digit str() limit
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    try:
        return args.func(parser, args)
    except HoradamError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
