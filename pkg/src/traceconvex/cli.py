"""Command-line interface.

Exit codes: 0 success, 1 mathematical negative (not convex, certificate
rejected, fuzz violation), 2 input error, 3 numerical or resource failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .calculus import hessian
from .certificate import certify
from .codec import codec_read, codec_write, to_document
from .errors import InputError, InternalError, NotConvex, NumericalError, ResourceError
from .ncpoly import EXACT, FLOAT, cyclic_canonical, word_key, word_str
from .unipoly import IntervalSpec, parse_number, parse_unipoly
from .verify import DEFAULT_EPS, midpoint_convexity_fuzz, trace_positivity_fuzz, verify_certificate

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _number(text: str):
    try:
        return parse_number(text)
    except (InputError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from exc


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError("value must be at least 1")
    return v


def _add_poly(sp, required=True):
    sp.add_argument("-p", "--poly", required=required, help='polynomial, e.g. "15*x^2 - 5*x^4 + x^6"')


def _add_domain(sp):
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--global", dest="glob", action="store_true", help="the whole real line (default)")
    g.add_argument("--interval", nargs=2, type=_number, metavar=("A", "B"), help="open interval (A, B)")
    g.add_argument("--ge", type=_number, metavar="B", help="ray (B, inf)")
    g.add_argument("--le", type=_number, metavar="A", help="ray (-inf, A)")


def _add_json(sp):
    sp.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="traceconvex", description="Trace-convexity certificates for univariate polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("certify", help="build a sum-of-squares certificate for the Hessian")
    _add_poly(sp)
    _add_domain(sp)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--mode", choices=(EXACT, FLOAT), help="force the coefficient mode")
    sp.add_argument("--seed", type=int, default=0, help="seed for the root finder start points")
    sp.add_argument("--out", help="write the certificate here (default: stdout)")
    _add_json(sp)

    sp = sub.add_parser("verify", help="check a certificate document against a polynomial")
    _add_poly(sp)
    _add_domain(sp)
    sp.add_argument("--cert", required=True, help="certificate file, or - for stdin")
    sp.add_argument("--tol", type=float, default=None, help="residual tolerance (default 0 exact, 1e-9 float)")
    _add_json(sp)

    sp = sub.add_parser("check", help="randomized matrix tests of trace convexity")
    _add_poly(sp)
    _add_domain(sp)
    sp.add_argument("--trials", type=_positive_int, default=200)
    sp.add_argument("--size", type=_positive_int, default=4, help="largest matrix size")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=DEFAULT_EPS, help="allowed negative slack")
    _add_json(sp)

    sp = sub.add_parser("hessian", help="print the noncommutative Hessian")
    _add_poly(sp)
    sp.add_argument("--cyclic", action="store_true", help="print the cyclic canonical form instead")
    sp.add_argument("--mode", choices=(EXACT, FLOAT))
    _add_json(sp)
    return parser


def _domain(args) -> IntervalSpec | None:
    if getattr(args, "interval", None):
        return IntervalSpec.interval(*args.interval)
    if getattr(args, "ge", None) is not None:
        return IntervalSpec.ray_right(args.ge)
    if getattr(args, "le", None) is not None:
        return IntervalSpec.ray_left(args.le)
    if getattr(args, "glob", False):
        return IntervalSpec.global_()
    return None


def _fmt(v) -> str:
    return str(v) if isinstance(v, Fraction) else f"{float(v):.17g}"


def _emit(args, payload: dict, text: str):
    print(json.dumps(payload) if args.json else text)


def run_certify(args) -> int:
    p = parse_unipoly(args.poly)
    interval = _domain(args) or IntervalSpec.global_()
    try:
        cert = certify(p, interval, tol=args.tol, seed=args.seed, mode=args.mode)
    except NotConvex as exc:
        _emit(args, {"status": "not_convex", "witness": _fmt(exc.witness), "value": _fmt(exc.value)},
              f"not convex on {interval}: p''({_fmt(exc.witness)}) = {_fmt(exc.value)} < 0")
        return EXIT_NEGATIVE
    counts = cert.counts()
    residual = cert.meta.get("residual", 0.0)
    summary = (f"convex on {interval}; {cert.mode} certificate with "
               + ", ".join(f"{n} {k}" for k, n in counts.items() if n)
               + f" term(s); residual {residual:.3e}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(codec_write(cert, pretty=True) + "\n")
        _emit(args, {"status": "convex", "counts": counts, "residual": residual, "out": args.out}, summary)
    elif args.json:
        print(json.dumps({"status": "convex", "counts": counts, "residual": residual,
                          "certificate": to_document(cert)}))
    else:
        print(summary, file=sys.stderr)
        print(codec_write(cert, pretty=True))
    return EXIT_OK


def run_verify(args) -> int:
    p = parse_unipoly(args.poly)
    try:
        text = sys.stdin.read() if args.cert == "-" else open(args.cert).read()
    except OSError as exc:
        raise InputError(f"cannot read certificate: {exc}") from exc
    cert = codec_read(text)
    report = verify_certificate(p, cert, args.tol)
    interval = _domain(args)
    if interval is not None and interval != cert.interval:
        report.structural_ok = False
        report.passed = False
        report.problems.append(f"certificate is for {cert.interval.kind} {cert.interval}, "
                               f"requested {interval.kind} {interval}")
    _emit(args, report.to_dict(), report.render_text())
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def run_check(args) -> int:
    p = parse_unipoly(args.poly)
    interval = _domain(args) or IntervalSpec.global_()
    tr = trace_positivity_fuzz(p, interval, args.size, args.trials, args.seed, args.tol)
    mid = midpoint_convexity_fuzz(p, interval, args.size, args.trials, args.seed, args.tol)
    ok = tr.passed and mid.passed
    if args.json:
        print(json.dumps({"passed": ok, "trace_positivity": tr.to_dict(), "midpoint": mid.to_dict()}))
    else:
        print(f"domain {interval}")
        print("trace positivity of the Hessian: " + tr.render_text())
        print("midpoint convexity: " + mid.render_text())
    return EXIT_OK if ok else EXIT_NEGATIVE


def run_hessian(args) -> int:
    p = parse_unipoly(args.poly)
    if args.mode:
        p = p.to_mode(args.mode)
    hp = hessian(p.to_ncpoly())
    if args.cyclic:
        hp = cyclic_canonical(hp)
    _emit(args, {"hessian": [[_fmt(c), w] for c, w in _word_pairs(hp)]}, str(hp))
    return EXIT_OK


def _word_pairs(p):
    return [(p.terms[w], word_str(w)) for w in sorted(p.terms, key=word_key)]


COMMANDS = {"certify": run_certify, "verify": run_verify, "check": run_check, "hessian": run_hessian}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ResourceError, InternalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
