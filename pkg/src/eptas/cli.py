"""Command line: solve, generate, bench, optimize-rounding."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .driver import LrtpConfig, bench_run, solve_or_fallback
from .instance import ClassSpec, ParseError, generate_class, lower_bound, parse_instance, write_instance
from .rounding import dump_scheme, emit_milp, load_scheme, optimize_scheme


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q} ({float(q):.6g})"


def read_classes(path: str | Path) -> list[ClassSpec]:
    """Class file: one 'family m n lo hi [count [seed]]' per line, '#' comments."""
    out = []
    for no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if not 5 <= len(line) <= 7:
            raise ValueError(f"{path}:{no}: expected 'family m n lo hi [count [seed]]'")
        try:
            nums = [int(v) for v in line[1:]]
        except ValueError:
            raise ValueError(f"{path}:{no}: non-integer field") from None
        out.append(ClassSpec(line[0], *nums))
    return out


def cmd_solve(args) -> int:
    try:
        inst = parse_instance(Path(args.input).read_text())
    except ParseError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 2
    scheme = load_scheme(Path(args.scheme).read_text()) if args.scheme else None
    cfg = LrtpConfig(eps=args.eps, eps_prime=args.eps_prime, scheme=scheme,
                     max_volume=args.max_volume, time_limit=args.time_limit)
    sched, fell_back = solve_or_fallback(inst, cfg)
    print(f"makespan {_fmt(sched.makespan)}")
    print(f"lower_bound {_fmt(lower_bound(inst))}")
    if fell_back:
        print("note: resource limit hit, schedule is the best baseline", file=sys.stderr)
    for i, jobs in enumerate(sched.machines()):
        print(f"machine {i}: " + " ".join(str(j) for j in jobs))
    return 0


def cmd_generate(args) -> int:
    spec = ClassSpec(args.family, args.m, args.n, args.lo, args.hi, args.count, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, inst in enumerate(generate_class(spec)):
        name = f"{spec.family}_m{spec.m}_n{spec.n}_{spec.lo}-{spec.hi}_{k:04d}.txt"
        (out / name).write_text(write_instance(inst) + "\n")
    print(f"wrote {spec.count} instances to {out}")
    return 0


def cmd_bench(args) -> int:
    classes = read_classes(args.classes)
    cfg = LrtpConfig(eps=args.eps, eps_prime=args.eps_prime)
    rows = bench_run(classes, cfg, out=args.out, workers=args.workers)
    for r in rows:
        print(f"{r.family} m={r.m} n={r.n} U=[{r.U[0]},{r.U[1]}] better={r.better} equal={r.equal} "
              f"avg_quot={r.avg_quot:.4f} avg_time={r.avg_time:.4f}s"
              + (f" failures={r.failures}" if r.failures else ""))
    return 0


def cmd_optimize(args) -> int:
    def progress(eps, ok):
        print(f"eps={float(eps):.12f} {'feasible' if ok else 'infeasible'}", file=sys.stderr)

    try:
        eps, scheme = optimize_scheme(args.d, args.l, args.eps_lo, args.eps_hi, args.tol,
                                      pin_bottom=not args.free_bottom,
                                      progress=progress if args.verbose else None)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"d={args.d} L={args.l} eps*={float(eps):.12f} ({eps})")
    print("sizes " + " ".join(f"{float(s):.9f}" for s in scheme.sizes))
    print("triples " + " ".join(f"{a}+{b}->{k}" for a, b, k in scheme.triples))
    if args.out:
        Path(args.out).write_text(dump_scheme(scheme))
    if args.emit_lp:
        Path(args.emit_lp).write_text(emit_milp(args.d, args.l, eps, pin_bottom=not args.free_bottom))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eptas", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="schedule one instance file")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--eps-prime", type=_fraction, default=Fraction(1, 10_000))
    p.add_argument("--scheme", help="rounding scheme file (default: standard grid)")
    p.add_argument("--max-volume", type=int, default=50_000_000)
    p.add_argument("--time-limit", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a class of random instances")
    p.add_argument("--family", required=True)
    for name in ("m", "n", "lo", "hi"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="run LRTP and the baselines on instance classes")
    p.add_argument("--classes", required=True)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--eps-prime", type=_fraction, default=Fraction(1, 10_000))
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, help="default: EPTAS_WORKERS or 1")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("optimize-rounding", help="search the smallest eps for d sizes")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--l", type=int, default=4)
    p.add_argument("--tol", type=_fraction, default=Fraction(15, 10**6))
    p.add_argument("--eps-lo", type=_fraction, default=Fraction(1, 100))
    p.add_argument("--eps-hi", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--free-bottom", action="store_true",
                   help="bound the smallest size by eps(1+eps) instead of fixing it to eps")
    p.add_argument("--out", help="write the scheme file here")
    p.add_argument("--emit-lp", help="write the MILP in LP format here")
    p.set_defaults(func=cmd_optimize)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
