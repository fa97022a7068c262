"""Command line front end.

    selmer-companions invariants 676B1
    selmer-companions reduction 1242K1 2
    selmer-companions trace-scan 1026N1 1026O1 -m 7 --bound 1000
    selmer-companions find-iso 1242L1 1242K1 --method a2 -p 2 -n 3 --prime 19681
    selmer-companions check-pair 1242L1 1242K1 -p 2 -k 2

Curves are registry labels or coefficient lists "a1,a2,a3,a4,a6" (or "A,B").
Every result is printed as JSON; integers and rationals are strings.
Exit codes: 0 proven / consistent / found, 2 refuted, 3 inconclusive,
1 usage or runtime error.
"""

import argparse
import json
import os
import sys

from . import __version__
from .companionship import (
    EXIT_CODES, check_pair, prove_isomorphism, trace_scan, _scan_json,
)
from .curves_rational import (
    DATA_ENV, conductor, curve, pot_mult_primes, reduction_type,
)
from .isofinder import explicit, families


def _emit(obj, args):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_invariants(args):
    E = curve(args.curve)
    b2, b4, b6, b8 = E.b_invariants
    _emit({
        "curve": E.to_json(),
        "b2": str(b2), "b4": str(b4), "b6": str(b6), "b8": str(b8),
        "c4": str(E.c4), "c6": str(E.c6),
        "discriminant": str(E.discriminant),
        "j": str(E.j),
    }, args)
    return 0


def cmd_reduction(args):
    E = curve(args.curve)
    data = reduction_type(E, args.prime)
    _emit({"curve": E.to_json(), **data.to_json()}, args)
    return 0


def cmd_pot_mult(args):
    E = curve(args.curve)
    _emit({"curve": E.to_json(),
           "pot_mult_primes": [str(p) for p in sorted(pot_mult_primes(E))]}, args)
    return 0


def cmd_conductor(args):
    E = curve(args.curve)
    _emit({"curve": E.to_json(), "conductor": str(conductor(E))}, args)
    return 0


def cmd_trace_scan(args):
    E1, E2 = curve(args.curve1), curve(args.curve2)
    rows, verdict, mismatch = trace_scan(E1, E2, args.m, args.bound)
    out = {"curves": [E1.to_json(), E2.to_json()], "m": str(args.m),
           **_scan_json(rows, verdict, mismatch, args.bound)}
    _emit(out, args)
    return 0 if mismatch is None else 2


def _level(args):
    if args.m:
        return args.m
    if args.p and args.n:
        return args.p ** args.n
    raise ValueError("give -m, or -p together with -n")


def cmd_find_iso(args):
    E1, E2 = curve(args.curve1), curve(args.curve2)
    m = _level(args)
    phi = explicit.load_phi_file(args.phi_file) if args.phi_file else None
    family = families.load_family(args.family_file) if args.family_file else None
    method = args.method
    if phi is not None:
        method = "a2"
    status, cert = prove_isomorphism(
        E1, E2, m, method=method, phi=phi, ell=args.prime, seed=args.seed,
        split_bound=args.split_bound, twist_bound=args.twist_bound, family=family)
    _emit({"curves": [E1.to_json(), E2.to_json()], "m": str(m),
           "result": status, "certificate": cert}, args)
    return EXIT_CODES[status["status"]]


def cmd_eliminate_twist(args):
    E1, E2 = curve(args.curve1), curve(args.curve2)
    basis = explicit.character_basis(E1, E2, args.p, args.n)
    witnesses, failure = explicit.eliminate_twist(E1, E2, args.p, args.n,
                                                  bound=args.bound, basis=basis)
    _emit({"curves": [E1.to_json(), E2.to_json()],
           "m": str(args.p ** args.n),
           "character_basis": [str(d) for d in basis],
           "witnesses": [w.to_json() for w in witnesses],
           "failure": failure}, args)
    return 0 if failure is None else 3


def cmd_check_pair(args):
    E1, E2 = curve(args.curve1), curve(args.curve2)
    phi = explicit.load_phi_file(args.phi_file) if args.phi_file else None
    family = families.load_family(args.family_file) if args.family_file else None
    report = check_pair(
        E1, E2, args.p, args.k, trace_bound=args.trace_bound, method=args.method,
        phi=phi, ell=args.prime, seed=args.seed, split_bound=args.split_bound,
        twist_bound=args.twist_bound, family=family)
    _emit(report.to_json(), args)
    return report.exit_code


def build_parser():
    ap = argparse.ArgumentParser(
        prog="selmer-companions",
        description="Check Selmer companion hypotheses for elliptic curves over Q.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--data-dir", help=f"data directory (default: bundled; env {DATA_ENV})")
    ap.add_argument("-o", "--output", help="write the JSON here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariants", help="b-, c-invariants, discriminant, j")
    s.add_argument("curve")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("reduction", help="Tate's algorithm at one prime")
    s.add_argument("curve")
    s.add_argument("prime", type=int)
    s.set_defaults(func=cmd_reduction)

    s = sub.add_parser("pot-mult-primes", help="primes in the denominator of j")
    s.add_argument("curve")
    s.set_defaults(func=cmd_pot_mult)

    s = sub.add_parser("conductor", help="conductor from local exponents")
    s.add_argument("curve")
    s.set_defaults(func=cmd_conductor)

    s = sub.add_parser("trace-scan", help="compare a_q mod m")
    s.add_argument("curve1")
    s.add_argument("curve2")
    s.add_argument("-m", type=int, required=True)
    s.add_argument("--bound", type=int, default=1000)
    s.set_defaults(func=cmd_trace_scan)

    def iso_options(s):
        s.add_argument("--prime", type=int, help="pin the split prime l")
        s.add_argument("--phi-file", help="JSON list of phi coefficients (certify only)")
        s.add_argument("--family-file", help="family JSON for the universal-family route")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--split-bound", type=int, default=200000)
        s.add_argument("--twist-bound", type=int, default=20000)

    s = sub.add_parser("find-iso", help="construct/certify E1[m] = E2[m]")
    s.add_argument("curve1")
    s.add_argument("curve2")
    s.add_argument("--method", choices=("a1", "a2", "auto"), default="auto",
                   help="a1: universal family, a2: explicit phi, auto: a1 for m <= 5")
    s.add_argument("-m", type=int)
    s.add_argument("-p", type=int)
    s.add_argument("-n", type=int)
    iso_options(s)
    s.set_defaults(func=cmd_find_iso)

    s = sub.add_parser("eliminate-twist", help="trace witnesses for each character")
    s.add_argument("curve1")
    s.add_argument("curve2")
    s.add_argument("-p", type=int, required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--bound", type=int, default=20000)
    s.set_defaults(func=cmd_eliminate_twist)

    s = sub.add_parser("check-pair", help="run the full pipeline")
    s.add_argument("curve1")
    s.add_argument("curve2")
    s.add_argument("-p", type=int, required=True)
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--trace-bound", type=int, default=1000)
    s.add_argument("--method", choices=("a1", "a2", "auto"), default="auto",
                   help="a1: universal family, a2: explicit phi, auto: a1 for m <= 5")
    iso_options(s)
    s.set_defaults(func=cmd_check_pair)
    return ap


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    saved = os.environ.get(DATA_ENV)
    if args.data_dir:
        os.environ[DATA_ENV] = args.data_dir
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, LookupError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        if saved is None:
            os.environ.pop(DATA_ENV, None)
        else:
            os.environ[DATA_ENV] = saved


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
