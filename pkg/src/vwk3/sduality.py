"""Delta-atom algebra, the S-transformation, and numeric evaluation on H.

Both K3 partition functions are finite linear combinations of the atoms

    ScaledUp(m)   = Delta(m tau)^(-1)
    Shifted(j, m) = Delta((tau + j) / m)^(-1)

so the transformation tau -> -1/tau can be carried out exactly: it permutes
the atoms and multiplies by explicit powers of tau and r.  A ModularExpr is
tau^weight times a CycNum-linear combination of atoms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .cycnum import CycNum
from .k3lattice import n_j
from .qseries import PuiseuxSeries, hilb_coefficients, hilb_series, scale_exponent, substitute

__all__ = [
    "ConvergenceError",
    "DeltaAtom",
    "ModularExpr",
    "NumericReport",
    "SymbolicReport",
    "atom_tail_bound",
    "eval_numeric",
    "parse_tau",
    "s_transform",
    "verify_numeric",
    "verify_symbolic",
    "DEFAULT_TAUS",
    "DEFAULT_PREFACTOR_EXPONENT",
]

# the power of r in Z^SU(r)(-1/tau) = r^p tau^-12 Z^SU(r)/Z_r(tau) as printed for K3
DEFAULT_PREFACTOR_EXPONENT = -11

# unit-circle points, so Im(-1/tau) = Im(tau); strings are resolved at working precision
DEFAULT_TAUS = ("i", "exp(i*pi/3)")

_EXP_TAU = re.compile(r"^exp\(\s*i\s*\*\s*pi(?:\s*\*\s*(-?\d+))?\s*/\s*(\d+)\s*\)$")


def parse_tau(tau):
    """mpc value of tau; accepts numbers, "i", "exp(i*pi*a/b)" or Python complex literals.

    Call inside the desired ``mpmath.workdps`` context.
    """
    if isinstance(tau, str):
        t = tau.strip().replace(" ", "")
        if t == "i":
            return mpmath.mpc(0, 1)
        mt = _EXP_TAU.match(t)
        if mt:
            a = int(mt.group(1) or 1)
            return mpmath.expjpi(mpmath.mpf(a) / int(mt.group(2)))
        return mpmath.mpc(complex(t.replace("i", "j")))
    return mpmath.mpc(tau)


class ConvergenceError(RuntimeError):
    """Truncated evaluation cannot certify the requested tolerance."""


@dataclass(frozen=True, order=True)
class DeltaAtom:
    kind: str  # "up" or "shift"
    m: int
    j: int = 0

    def __post_init__(self):
        if self.kind not in ("up", "shift"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.m < 1:
            raise ValueError("atom level must be positive")
        if self.kind == "up":
            object.__setattr__(self, "j", 0)
        else:
            object.__setattr__(self, "j", self.j % self.m)
            if self.m == 1:
                object.__setattr__(self, "kind", "up")

    @classmethod
    def scaled_up(cls, m: int) -> "DeltaAtom":
        return cls("up", m)

    @classmethod
    def shifted(cls, j: int, m: int) -> "DeltaAtom":
        return cls("shift", m, j)

    def argument(self, tau):
        """The point at which Delta is evaluated."""
        if self.kind == "up":
            return self.m * tau
        return (tau + self.j) / self.m

    def series(self, order) -> PuiseuxSeries:
        """q-expansion with every exponent below ``order`` known."""
        order = Fraction(order)
        if self.kind == "up":
            base = hilb_series(max(1, math.ceil(order / self.m)))
            return scale_exponent(base, self.m).truncate(order)
        base = hilb_series(max(1, math.ceil(order * self.m)))
        return substitute(base, self.m, self.j).truncate(order)

    def __str__(self):
        if self.kind == "up":
            return f"Delta({self.m}tau)^-1"
        return f"Delta((tau+{self.j})/{self.m})^-1"

    def to_json(self):
        return {"kind": self.kind, "m": self.m, "j": self.j}


def _as_cyc(c) -> CycNum:
    return c if isinstance(c, CycNum) else CycNum.from_rational(c)


@dataclass(frozen=True)
class ModularExpr:
    weight: int = 0
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for atom, c in self.terms.items():
            c = _as_cyc(c)
            if not c.is_zero():
                clean[atom] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def atom(cls, atom: DeltaAtom, coeff=1, weight: int = 0) -> "ModularExpr":
        return cls(weight, {atom: coeff})

    def __add__(self, other):
        if not isinstance(other, ModularExpr):
            return NotImplemented
        if other.weight != self.weight and self.terms and other.terms:
            raise ValueError("cannot add expressions with different tau weights")
        weight = self.weight if self.terms else other.weight
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms[a] + c if a in terms else c
        return ModularExpr(weight, terms)

    def __neg__(self):
        return ModularExpr(self.weight, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c, weight_shift: int = 0) -> "ModularExpr":
        """Multiply by c * tau^weight_shift."""
        c = _as_cyc(c)
        return ModularExpr(self.weight + weight_shift, {a: v * c for a, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ModularExpr):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.weight == other.weight and self.terms == other.terms

    def diff(self, other: "ModularExpr") -> dict:
        """Per-atom coefficient differences self - other (nonzero only)."""
        out = {}
        for a in set(self.terms) | set(other.terms):
            d = self.terms.get(a, CycNum.zero()) - other.terms.get(a, CycNum.zero())
            if not d.is_zero():
                out[a] = d
        return out

    def to_series(self, order) -> PuiseuxSeries:
        """q-expansion of the weight-0 expression."""
        if self.weight:
            raise ValueError("only weight-0 expressions have a q-expansion")
        total = PuiseuxSeries({}, 1, Fraction(order))
        for atom, c in sorted(self.terms.items()):
            total = total + atom.series(order).scale(c)
        return total

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "terms": [{"atom": a.to_json(), "coeff": c.to_json()} for a, c in sorted(self.terms.items())],
        }

    def __repr__(self):
        body = " + ".join(f"({c})*{a}" for a, c in sorted(self.terms.items())) or "0"
        return f"<ModularExpr tau^{self.weight} * [{body}]>"


def s_transform(e: ModularExpr, r: int) -> ModularExpr:
    """Substitute tau -> -1/tau in an expression built from level-r atoms.

    Delta(r tau)^-1        -> r^12 tau^-12 Delta(tau/r)^-1
    Delta(tau/r)^-1        -> r^-12 tau^-12 Delta(r tau)^-1
    Delta((tau+j)/r)^-1    -> tau^-12 Delta((tau+n_j)/r)^-1,  j n_j = -1 mod r

    A pre-existing factor tau^w becomes (-1)^w tau^-w.
    """
    out = {}
    for atom, c in e.terms.items():
        if atom.m != r:
            raise ValueError(f"unsupported atom {atom} for r={r}")
        if atom.kind == "up":
            new, f = DeltaAtom.shifted(0, r), Fraction(r) ** 12
        elif atom.j == 0:
            new, f = DeltaAtom.scaled_up(r), Fraction(1, r**12)
        else:
            new, f = DeltaAtom.shifted(n_j(r, atom.j), r), Fraction(1)
        c = c * f * (-1) ** (e.weight % 2)
        out[new] = out[new] + c if new in out else c
    return ModularExpr(-e.weight - 12, out)


# -- symbolic verification ---------------------------------------------------


@dataclass
class SymbolicReport:
    r: int
    c1: list
    passed: bool
    prefactor_exponent: int
    lhs: ModularExpr
    rhs: ModularExpr
    diffs: dict

    def ratios(self) -> dict:
        """rhs/lhs per atom, where both are nonzero."""
        return {
            a: self.rhs.terms[a] / self.lhs.terms[a]
            for a in self.lhs.terms
            if a in self.rhs.terms
        }

    def to_json(self) -> dict:
        return {
            "schema": "vw/1",
            "mode": "symbolic",
            "r": self.r,
            "c1": self.c1,
            "pass": self.passed,
            "details": {
                "prefactor": f"r^{self.prefactor_exponent} tau^-12",
                "lhs": self.lhs.to_json(),
                "rhs": self.rhs.to_json(),
                "diffs": [{"atom": a.to_json(), "diff": d.to_json()} for a, d in sorted(self.diffs.items())],
            },
        }


def verify_symbolic(r: int, c1, prefactor_exponent: int = DEFAULT_PREFACTOR_EXPONENT,
                    modr_expr: ModularExpr | None = None) -> SymbolicReport:
    """Compare S(Z^SU(r)_c1) with r^p tau^-12 Z^SU(r)/Z_r_c1 atom by atom, exactly.

    ``modr_expr`` overrides the right-hand side (used to test the differ).
    """
    from .partition import z_su_expr, z_su_modr_expr

    lhs = s_transform(z_su_expr(r, c1), r)
    base = modr_expr if modr_expr is not None else z_su_modr_expr(r, c1)
    rhs = base.scale(Fraction(r) ** prefactor_exponent, -12)
    diffs = lhs.diff(rhs) if lhs.weight == rhs.weight else {a: c for a, c in lhs.terms.items()}
    return SymbolicReport(
        r=r,
        c1=[int(x) for x in c1],
        passed=lhs == rhs,
        prefactor_exponent=prefactor_exponent,
        lhs=lhs,
        rhs=rhs,
        diffs=diffs,
    )


# -- numerics ----------------------------------------------------------------

_LOG_TAIL_FLOOR = -120.0  # natural log; crude bound beyond this point is ignored


def _log_crude(n: int, logx: float) -> float:
    # e(Hilb^n) <= exp(4 pi sqrt(n)): the 24-coloured partition bound exp(pi sqrt(2kn/3))
    return 4 * math.pi * math.sqrt(n) + (n - 1) * logx


def atom_tail_bound(x: float, n0: int) -> float:
    """Bound for sum_{n >= n0} e(Hilb^n) x^(n-1), 0 < x < 1.

    Exact coefficients are used up to the point where the crude bound
    exp(4 pi sqrt n) x^(n-1) has become geometric and below e^-120 relative
    to 1, after which the geometric remainder is added.
    """
    if not 0 < x < 1:
        raise ConvergenceError(f"|Q| = {x} is not inside the unit disc")
    logx = math.log(x)
    n = max(n0, 1)
    steps = 0
    while True:
        ratio = math.exp(_log_crude(n + 1, logx) - _log_crude(n, logx))
        if ratio < 0.9 and _log_crude(n, logx) < _LOG_TAIL_FLOOR:
            break
        n += 1
        steps += 1
        if steps > 20000:
            raise ConvergenceError("tail estimate does not settle; Im(tau) too small")
    stop = n
    coeffs = hilb_coefficients(stop) if stop > n0 else ()
    exact = 0.0
    for k in range(n0, stop):
        c = coeffs[k]
        if c:
            exact += math.exp(math.log(c) + (k - 1) * logx)
    crude = math.exp(_log_crude(stop, logx)) / (1 - ratio)
    # allowance for rounding in the float sum above
    return (exact + crude) * (1 + 1e-12)


def _atom_q_abs(atom: DeltaAtom, tau: complex) -> float:
    return math.exp(-2 * math.pi * atom.argument(tau).imag)


def _atom_tail(atom: DeltaAtom, tau: complex, order: Fraction) -> float:
    # terms e(Hilb^n) Q^(n-1) with exponent of q at or beyond ``order`` are missing
    if atom.kind == "up":
        n0 = math.ceil(order / atom.m) + 1
    else:
        n0 = math.ceil(order * atom.m) + 1
    return atom_tail_bound(_atom_q_abs(atom, tau), n0)


def _qpow(e: Fraction, tau):
    return mpmath.exp(2j * mpmath.pi * mpmath.mpf(e.numerator) / e.denominator * tau)


def _guard_digits(s: PuiseuxSeries, tau) -> int:
    # decimal digits lost to cancellation among the largest terms
    im = float(mpmath.im(tau))
    best = 0.0
    for e, c in s.items():
        mag = abs(c.embed())
        if mag == 0:
            continue
        best = max(best, math.log10(mag) - 2 * math.pi * float(e) * im / math.log(10))
    return max(0, math.ceil(best)) + 10


def _eval_series(s: PuiseuxSeries, tau, precision: int):
    """(value, largest |term|) of a series on the branch q^e = exp(2 pi i e tau)."""
    work = precision + _guard_digits(s, tau)
    with mpmath.workdps(work):
        tau = mpmath.mpc(tau)
        total = mpmath.mpc(0)
        biggest = mpmath.mpf(0)
        for exp_, c in s.items():
            term = c.embed(work) * _qpow(exp_, tau)
            total += term
            biggest = max(biggest, abs(term))
    with mpmath.workdps(precision + 10):
        return +total, +biggest


def eval_numeric(e, tau, truncation=None, precision: int = 15):
    """Evaluate a PuiseuxSeries or a ModularExpr at tau in the upper half plane.

    Series are summed term by term on the branch q^e = exp(2 pi i e tau).
    Atoms of a ModularExpr are expanded to q-order ``truncation`` (default
    30) and summed the same way.  ``precision`` is the number of decimal
    digits wanted; working precision is raised to absorb cancellation.
    Returns an ``mpmath.mpc``.
    """
    with mpmath.workdps(precision + 10):
        tau = parse_tau(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        if isinstance(e, ModularExpr):
            order = Fraction(truncation if truncation is not None else 30)
            total = mpmath.mpc(0)
            for atom, c in e.terms.items():
                val, _ = _eval_series(atom.series(order), tau, precision)
                total += c.embed(precision + 10) * val
            return total * tau ** e.weight
        if isinstance(e, PuiseuxSeries):
            return _eval_series(e, tau, precision)[0]
    raise TypeError(f"cannot evaluate {type(e).__name__}")


def delta_product(tau, precision: int = 15):
    """Delta(tau) from the product q prod (1 - q^n)^24, via mpmath's q-Pochhammer."""
    with mpmath.workdps(precision + 10):
        tau = mpmath.mpc(tau)
        q = mpmath.exp(2j * mpmath.pi * tau)
        return q * mpmath.qp(q) ** 24


def expr_tail_bound(e: ModularExpr, tau, order) -> float:
    """Bound on |e(tau) - e truncated at q-order ``order``|."""
    tau = complex(tau)
    total = 0.0
    for atom, c in e.terms.items():
        total += abs(c.embed()) * _atom_tail(atom, tau, Fraction(order))
    return total * abs(tau) ** e.weight


@dataclass
class NumericReport:
    r: int
    c1: list
    tol: float
    truncation: int
    prefactor_exponent: int
    samples: list  # dicts: tau, lhs, rhs, rel_error, tail_bound

    @property
    def passed(self) -> bool:
        return all(s["rel_error"] < self.tol for s in self.samples)

    def to_json(self) -> dict:
        return {
            "schema": "vw/1",
            "mode": "numeric",
            "r": self.r,
            "c1": self.c1,
            "pass": self.passed,
            "details": {
                "tol": self.tol,
                "truncation": self.truncation,
                "prefactor": f"r^{self.prefactor_exponent} tau^-12",
                "samples": [
                    {
                        "tau": [s["tau"].real, s["tau"].imag],
                        "lhs": [float(mpmath.re(s["lhs"])), float(mpmath.im(s["lhs"]))],
                        "rhs": [float(mpmath.re(s["rhs"])), float(mpmath.im(s["rhs"]))],
                        "rel_error": s["rel_error"],
                        "tail_bound": s["tail_bound"],
                    }
                    for s in self.samples
                ],
            },
        }


def verify_numeric(r: int, c1, taus=DEFAULT_TAUS, tol: float = 1e-6, truncation: int = 150,
                   precision: int = 15,
                   prefactor_exponent: int = DEFAULT_PREFACTOR_EXPONENT) -> NumericReport:
    """Evaluate Z^SU(r)_c1 at -1/tau and r^p tau^-12 Z^SU(r)/Z_r_c1 at tau.

    ``truncation`` counts terms of each Delta^-1 expansion in q^(1/r), so
    the series are cut at q-order truncation / r.  Raises ConvergenceError
    when the truncation tail bound is not below ``tol`` relative to the
    values compared.
    """
    from .partition import PartitionRequest, z_su, z_su_expr, z_su_modr, z_su_modr_expr

    order = Fraction(truncation, r)
    req = PartitionRequest(r=r, c1=c1, order=order)
    su, modr = z_su(req), z_su_modr(req)
    su_expr, modr_expr = z_su_expr(r, c1), z_su_modr_expr(r, c1)
    samples = []
    for tau_in in taus:
        with mpmath.workdps(precision + 10):
            tau = parse_tau(tau_in)
            if tau.imag <= 0:
                raise ValueError(f"tau={tau_in} is not in the upper half plane")
            tau_s = -1 / tau
            lhs, lhs_big = _eval_series(su, tau_s, precision)
            val, rhs_big = _eval_series(modr, tau, precision)
            factor = mpmath.mpf(r) ** prefactor_exponent * tau ** -12
            rhs = factor * val
            tail = (expr_tail_bound(su_expr, complex(tau_s), order)
                    + abs(complex(factor)) * expr_tail_bound(modr_expr, complex(tau), order))
            scale = float(min(abs(lhs), abs(rhs)))
            floor = 100 * float(max(lhs_big, abs(factor) * rhs_big)) * 10.0 ** (-precision)
            if scale <= floor:
                raise ConvergenceError(
                    f"value vanishes at tau={tau_in} to working precision; relative error undefined"
                )
            rel = float(abs(lhs - rhs) / abs(rhs))
        if tail / scale >= tol:
            raise ConvergenceError(
                f"tail bound {tail:.3g} at tau={tau_in} exceeds tol={tol} relative to |value|={scale:.3g}"
            )
        samples.append({"tau": complex(tau), "lhs": lhs, "rhs": rhs, "rel_error": rel,
                        "tail_bound": tail / scale})
    return NumericReport(
        r=r,
        c1=[int(x) for x in c1],
        tol=tol,
        truncation=truncation,
        prefactor_exponent=prefactor_exponent,
        samples=samples,
    )
