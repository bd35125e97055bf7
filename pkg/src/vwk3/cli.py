"""Command line interface.

Exit codes: 0 success/pass, 1 verification failed, 2 usage or parse error,
3 enumeration budget or convergence budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .chern import CohClass, SurfaceInvariants, integrality_check, twist, vd
from .k3lattice import (
    EnumerationBudgetExceeded,
    flux_sum_closed_form,
    gauss_sum,
    is_prime,
    k3_lattice,
    parse_vector,
)
from .partition import (
    PartitionRequest,
    z_su,
    z_su_expr,
    z_su_from_invariants,
    z_su_modr,
    z_su_modr_expr,
    z_w,
    z_w_expr,
)
from .qseries import hilb_coefficients
from .sduality import (
    DEFAULT_PREFACTOR_EXPONENT,
    DEFAULT_TAUS,
    ConvergenceError,
    verify_numeric,
    verify_symbolic,
)

SCHEMA = "vw/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class Config:
    order: Fraction | None = None  # expand; None means 10/r
    truncation: int = 150  # numeric verification
    budget: int = 10**7
    precision: int = 15
    fmt: str = "json"
    taus: tuple = field(default_factory=lambda: DEFAULT_TAUS)

    @classmethod
    def from_env(cls, env=None) -> "Config":
        env = os.environ if env is None else env
        cfg = cls()
        if env.get("VW_ORDER"):
            cfg.order = Fraction(env["VW_ORDER"])
        if env.get("VW_BUDGET"):
            cfg.budget = int(env["VW_BUDGET"])
        if env.get("VW_PRECISION"):
            cfg.precision = int(env["VW_PRECISION"])
        if cfg.budget < 1 or (cfg.order is not None and cfg.order <= 0):
            raise ValueError("VW_ORDER and VW_BUDGET must be positive")
        return cfg


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    try:
        r = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not is_prime(r):
        raise argparse.ArgumentTypeError(f"r={r} is not prime")
    return r


def _vector(text: str):
    try:
        return parse_vector(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number") from None


def _emit(payload: dict, text: str, cfg: Config):
    if cfg.fmt == "json":
        print(json.dumps({"schema": SCHEMA, **payload}, indent=2))
    else:
        print(text)


def _series_text(s) -> str:
    lines = [f"{'exponent':>10}  coefficient"]
    for e, c in s.items():
        lines.append(f"{str(e):>10}  {c}")
    lines.append(f"{'':>10}  + O(q^{s.trunc})")
    return "\n".join(lines)


# -- subcommands ---------------------------------------------------------------


def cmd_expand(args, cfg: Config) -> int:
    r = args.r
    order = args.order if args.order is not None else (cfg.order or Fraction(10, r))
    payload = {"request": {"group": args.group, "r": r, "order": str(order)}}
    if args.group == "su" and args.c1sq is not None:
        if args.c1 is not None:
            raise UsageError("give either --c1 or --c1sq, not both")
        series = z_su_from_invariants(r, args.c1sq, args.divisible, order)
        payload["request"].update(c1sq=args.c1sq, divisible=args.divisible)
        payload["series"] = series.to_json()
        _emit(payload, _series_text(series), cfg)
        return EXIT_OK
    if args.c1sq is not None or args.divisible:
        raise UsageError("--c1sq/--divisible are only accepted with --group su")
    if args.group == "zw":
        if args.w is None:
            raise UsageError("--group zw needs --w")
        series = z_w(r, args.w, order)
        payload["request"]["w"] = [int(x) for x in args.w]
        payload["series"] = series.to_json()
        payload["atoms"] = z_w_expr(r, args.w).to_json()
        _emit(payload, _series_text(series), cfg)
        return EXIT_OK
    if args.c1 is None:
        raise UsageError(f"--group {args.group} needs --c1")
    req = PartitionRequest(r=r, c1=args.c1, order=order)
    payload["request"].update(req.to_json())
    if args.group == "su":
        series = z_su(req)
        payload["atoms"] = z_su_expr(r, args.c1).to_json()
        text = _series_text(series)
    else:
        series = z_su_modr(req, route="closed")
        direct = z_su_modr(req, route="direct", budget=cfg.budget)
        agree = series == direct
        payload["routes_agree"] = agree
        payload["atoms"] = z_su_modr_expr(r, args.c1).to_json()
        text = _series_text(series) + f"\nroutes agree: {agree}"
    payload["series"] = series.to_json()
    _emit(payload, text, cfg)
    return EXIT_OK


def _cyc_payload(value) -> dict:
    z = value.embed()
    return {"exact": value.to_json(), "complex": [z.real, z.imag]}


def cmd_fluxsum(args, cfg: Config) -> int:
    L = k3_lattice()
    value = gauss_sum(L, args.r, args.j, args.c1, budget=cfg.budget)
    closed = flux_sum_closed_form(L, args.r, args.j, args.c1)
    payload = {
        "r": args.r,
        "j": args.j,
        "c1": [int(x) for x in args.c1],
        "value": _cyc_payload(value),
        "closed_form": _cyc_payload(closed),
        "matches_closed_form": value == closed,
    }
    z = value.embed()
    text = f"{value}\n~ {z.real:.12g} + {z.imag:.12g}i\nmatches closed form: {value == closed}"
    _emit(payload, text, cfg)
    return EXIT_OK


def cmd_gauss(args, cfg: Config) -> int:
    L = k3_lattice().sublattice(*args.blocks.split(","))
    c1 = parse_vector(args.c1, L) if args.c1 else L.zero()
    value = gauss_sum(L, args.r, args.j, c1, budget=cfg.budget)
    payload = {"r": args.r, "j": args.j, "blocks": args.blocks, "c1": [int(x) for x in c1],
               "value": _cyc_payload(value)}
    _emit(payload, str(value), cfg)
    return EXIT_OK


def cmd_verify(args, cfg: Config) -> int:
    p = args.prefactor_exponent
    if args.mode == "symbolic":
        report = verify_symbolic(args.r, args.c1, prefactor_exponent=p)
        text = f"symbolic S-duality r={args.r}: {'PASS' if report.passed else 'FAIL'}"
        if not report.passed:
            text += "".join(f"\n  {a}: diff {d}" for a, d in sorted(report.diffs.items()))
    else:
        taus = tuple(args.taus) if args.taus else cfg.taus
        report = verify_numeric(args.r, args.c1, taus=taus, tol=args.tol,
                                truncation=args.truncation or cfg.truncation,
                                precision=cfg.precision, prefactor_exponent=p)
        text = f"numeric S-duality r={args.r}: {'PASS' if report.passed else 'FAIL'}" + "".join(
            f"\n  tau={s['tau']}: rel. error {s['rel_error']:.3e} (tail {s['tail_bound']:.1e})"
            for s in report.samples
        )
    payload = report.to_json()
    payload.pop("schema", None)
    _emit(payload, text, cfg)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_vd(args, cfg: Config) -> int:
    S = SurfaceInvariants(args.chi, args.K2, args.euler)
    value = vd(args.r, args.c1sq, args.n, S)
    _emit({"vd": value}, str(value), cfg)
    return EXIT_OK


def cmd_integrality(args, cfg: Config) -> int:
    L = k3_lattice()
    xi = args.xi if args.xi is not None else L.zero()
    if args.roundtrip:
        if args.D is None or args.n is None:
            raise UsageError("--roundtrip needs --D and --n")
        base = CohClass.from_sdn(args.s, args.D, args.n, L)
        c = twist(base, -xi, args.r, L)
    else:
        deg2 = args.deg2 if args.deg2 is not None else L.zero()
        c = CohClass(args.s, tuple(int(x) for x in deg2), args.ch2 or Fraction(0))
    report = integrality_check(c, xi, args.r, L)
    _emit(report.to_json(), f"integral: {report.integral} (n = {report.n})", cfg)
    return EXIT_OK


def cmd_hilb(args, cfg: Config) -> int:
    coeffs = hilb_coefficients(args.order)
    payload = {"order": args.order, "euler_characteristics": [str(c) for c in coeffs]}
    _emit(payload, "\n".join(f"{n:>4}  {c}" for n, c in enumerate(coeffs)), cfg)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    vec_help = ('lattice vector: "zero", a JSON array of 22 integers, or block shorthand '
                'like "U1:(1,0)" / "2*U1:(1,0)+E8_1:(1,0,0,0,0,0,0,0)" '
                "(blocks U1 U2 U3 E8_1 E8_2)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS,
                        help="output format (default json)")
    p = argparse.ArgumentParser(prog="vwk3", parents=[common],
                                description="K3 Vafa-Witten partition functions at prime rank")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", parents=[common], help="q-expansion of Z^SU(r), Z^SU(r)/Z_r or Z_w")
    e.add_argument("--group", choices=["su", "su-mod", "zw"], required=True)
    e.add_argument("--r", type=_prime, required=True)
    e.add_argument("--c1", type=_vector, help=vec_help)
    e.add_argument("--w", type=_vector, help="class in H^2(S, mu_r) given by a lift; " + vec_help)
    e.add_argument("--c1sq", type=int, help="c1^2 (su only, instead of --c1)")
    e.add_argument("--divisible", action="store_true", help="r divides c1 (with --c1sq)")
    e.add_argument("--order", type=_fraction, help="q-exponent truncation (default 10/r or VW_ORDER)")
    e.set_defaults(func=cmd_expand)

    f = sub.add_parser("fluxsum", parents=[common], help="flux sum over H^2(K3, mu_r) with its closed form")
    f.add_argument("--r", type=_prime, required=True)
    f.add_argument("--j", type=int, required=True)
    f.add_argument("--c1", type=_vector, default=parse_vector("zero"), help=vec_help)
    f.set_defaults(func=cmd_fluxsum)

    g = sub.add_parser("gauss", parents=[common], help="Gauss sum over a sublattice of blocks")
    g.add_argument("--r", type=_prime, required=True)
    g.add_argument("--j", type=int, required=True)
    g.add_argument("--blocks", default="U1", help="comma separated block names, e.g. U1,E8_1")
    g.add_argument("--c1", default=None, help="vector in the sublattice (same syntax)")
    g.set_defaults(func=cmd_gauss)

    v = sub.add_parser("verify", parents=[common], help="check the K3 S-duality transformation")
    v.add_argument("--r", type=_prime, required=True)
    v.add_argument("--c1", type=_vector, required=True, help=vec_help)
    v.add_argument("--mode", choices=["symbolic", "numeric"], default="symbolic")
    v.add_argument("--taus", nargs="+", help='sample points, e.g. i "exp(i*pi/3)" 0.1+1.2i')
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--truncation", type=int, help="terms per Delta^-1 expansion (default 150)")
    v.add_argument("--prefactor-exponent", type=int, default=DEFAULT_PREFACTOR_EXPONENT,
                   help="power p in r^p tau^-12 (default %(default)s)")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("vd", parents=[common], help="virtual dimension 2rn - (r-1)c1^2 - (r^2-1)chi(O_S)")
    d.add_argument("--r", type=int, required=True)
    d.add_argument("--c1sq", type=int, required=True)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--chi", type=int, default=2)
    d.add_argument("--K2", type=int, default=0)
    d.add_argument("--euler", type=int, default=24)
    d.set_defaults(func=cmd_vd)

    i = sub.add_parser("integrality", parents=[common], help="twist a class by xi/r and test integrality")
    i.add_argument("--r", type=_prime, required=True)
    i.add_argument("--s", type=int, required=True)
    i.add_argument("--xi", type=_vector)
    i.add_argument("--deg2", type=_vector, help="integral degree-2 part of the untwisted class")
    i.add_argument("--ch2", type=_fraction)
    i.add_argument("--roundtrip", action="store_true",
                   help="build (s, D, D^2/2 - n), untwist by -xi, then re-check")
    i.add_argument("--D", type=_vector)
    i.add_argument("--n", type=int)
    i.set_defaults(func=cmd_integrality)

    h = sub.add_parser("hilb", parents=[common], help="Euler characteristics of Hilb^n(K3)")
    h.add_argument("--order", type=int, default=10)
    h.set_defaults(func=cmd_hilb)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = Config.from_env()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg.fmt = getattr(args, "format", cfg.fmt)
    try:
        return args.func(args, cfg)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EnumerationBudgetExceeded, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
