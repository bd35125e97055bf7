"""Truncated Puiseux series in q with cyclotomic coefficients.

A :class:`PuiseuxSeries` stores exponents as integer numerators over a
per-series denominator ``D`` and carries an explicit truncation order: every
coefficient at an exponent ``>= trunc`` is unknown.  ``trunc=None`` marks an
exact (finite) expression such as a monomial.

The branch of fractional powers is fixed by q^e := exp(2 pi i e tau), which
is what makes :func:`substitute` well defined: q^e maps to
exp(2 pi i j e / r) q^(e / r), matching Delta((tau + j) / r).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cycnum import CycNum, root_of_unity

__all__ = [
    "PuiseuxSeries",
    "delta",
    "delta_coefficients",
    "hilb_coefficients",
    "hilb_series",
    "invert",
    "rotate",
    "scale_exponent",
    "sector_extract",
    "substitute",
]


def _min_trunc(*ts):
    vals = [t for t in ts if t is not None]
    return min(vals) if vals else None


class PuiseuxSeries:
    __slots__ = ("_denom", "_terms", "_trunc")

    def __init__(self, terms=None, denom: int = 1, trunc=None):
        """``terms`` maps exponent numerators (ints) to coefficients.

        Coefficients may be CycNum, int or Fraction. Zero coefficients and
        terms at or beyond ``trunc`` are dropped.
        """
        if denom < 1:
            raise ValueError("exponent denominator must be positive")
        self._denom = denom
        self._trunc = None if trunc is None else Fraction(trunc)
        clean = {}
        for a, c in (terms or {}).items():
            if not isinstance(c, CycNum):
                c = CycNum.from_rational(c)
            if c.is_zero():
                continue
            if self._trunc is not None and Fraction(a, denom) >= self._trunc:
                continue
            clean[int(a)] = c
        self._terms = clean

    @classmethod
    def monomial(cls, exponent, coeff=1, trunc=None) -> "PuiseuxSeries":
        e = Fraction(exponent)
        return cls({e.numerator: coeff}, e.denominator, trunc)

    @classmethod
    def from_exponents(cls, terms: dict, trunc=None) -> "PuiseuxSeries":
        """Build from a {Fraction exponent: coeff} map."""
        fr = {Fraction(e): c for e, c in terms.items()}
        d = 1
        for e in fr:
            d = math.lcm(d, e.denominator)
        return cls({int(e * d): c for e, c in fr.items()}, d, trunc)

    # -- accessors ---------------------------------------------------------

    @property
    def denom(self) -> int:
        return self._denom

    @property
    def trunc(self) -> Fraction | None:
        return self._trunc

    def items(self):
        """(Fraction exponent, CycNum coeff) pairs in ascending exponent order."""
        d = self._denom
        for a in sorted(self._terms):
            yield Fraction(a, d), self._terms[a]

    def numerator_items(self):
        for a in sorted(self._terms):
            yield a, self._terms[a]

    def exponents(self) -> list[Fraction]:
        return [e for e, _ in self.items()]

    def coefficient(self, exponent) -> CycNum:
        e = Fraction(exponent)
        if self._trunc is not None and e >= self._trunc:
            raise ValueError(f"coefficient of q^{e} is beyond truncation order {self._trunc}")
        a = e * self._denom
        if a.denominator != 1:
            return CycNum.zero()
        return self._terms.get(int(a), CycNum.zero())

    def valuation(self) -> Fraction | None:
        """Lowest exponent with a nonzero coefficient; trunc for a truncated zero."""
        if self._terms:
            return Fraction(min(self._terms), self._denom)
        return self._trunc

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def truncate(self, trunc) -> "PuiseuxSeries":
        t = _min_trunc(self._trunc, Fraction(trunc))
        return PuiseuxSeries(self._terms, self._denom, t)

    def with_denom(self, denom: int) -> "PuiseuxSeries":
        if denom % self._denom:
            raise ValueError(f"denominator {denom} is not a multiple of {self._denom}")
        f = denom // self._denom
        return PuiseuxSeries({a * f: c for a, c in self._terms.items()}, denom, self._trunc)

    @staticmethod
    def _common(a, b):
        d = math.lcm(a._denom, b._denom)
        return a.with_denom(d), b.with_denom(d)

    @staticmethod
    def _coerce(other):
        if isinstance(other, PuiseuxSeries):
            return other
        if isinstance(other, (int, Fraction, CycNum)):
            return PuiseuxSeries({0: other})
        return NotImplemented

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(self, other)
        terms = dict(a._terms)
        for e, c in b._terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return PuiseuxSeries(terms, a._denom, _min_trunc(a._trunc, b._trunc))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries({e: -c for e, c in self._terms.items()}, self._denom, self._trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "PuiseuxSeries":
        """Multiply every coefficient by a scalar."""
        if not isinstance(c, CycNum):
            c = CycNum.from_rational(c)
        if c.is_zero():
            return PuiseuxSeries({}, self._denom, self._trunc)
        return PuiseuxSeries({e: v * c for e, v in self._terms.items()}, self._denom, self._trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        a, b = self._common(self, other)
        va, vb = a.valuation(), b.valuation()
        cands = []
        if a._trunc is not None and vb is not None:
            cands.append(a._trunc + vb)
        if b._trunc is not None and va is not None:
            cands.append(b._trunc + va)
        trunc = min(cands) if cands else None
        d = a._denom
        limit = None if trunc is None else trunc * d
        terms: dict[int, CycNum] = {}
        bt = sorted(b._terms.items())
        for ea, ca in a._terms.items():
            for eb, cb in bt:
                e = ea + eb
                if limit is not None and e >= limit:
                    break
                p = ca * cb
                terms[e] = terms[e] + p if e in terms else p
        return PuiseuxSeries(terms, d, trunc)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self._trunc == other._trunc and dict(self.items()) == dict(other.items())

    def __hash__(self):
        return hash((self._trunc, tuple(self.items())))

    def agrees_with(self, other: "PuiseuxSeries", upto=None) -> bool:
        """Equality of all coefficients below the shared truncation (and ``upto``)."""
        t = _min_trunc(self._trunc, other._trunc, None if upto is None else Fraction(upto))
        if t is None:
            return self == other
        return self.truncate(t) == other.truncate(t)

    # -- I/O ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "expDenom": self._denom,
            "truncOrder": None if self._trunc is None else str(self._trunc),
            "terms": [{"exp": str(e), "coeff": c.to_json()} for e, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PuiseuxSeries":
        d = int(data["expDenom"])
        t = data.get("truncOrder")
        terms = {}
        for item in data["terms"]:
            a = Fraction(item["exp"]) * d
            if a.denominator != 1:
                raise ValueError(f"exponent {item['exp']} not in (1/{d})Z")
            terms[int(a)] = CycNum.from_json(item["coeff"])
        return cls(terms, d, None if t is None else Fraction(t))

    def __repr__(self):
        body = " + ".join(f"({c})*q^{e}" for e, c in self.items()) or "0"
        tail = "" if self._trunc is None else f" + O(q^{self._trunc})"
        return f"<PuiseuxSeries {body}{tail}>"


# -- Delta and Goettsche's series --------------------------------------------


@lru_cache(maxsize=8)
def _eta24_coefficients(n: int) -> tuple[int, ...]:
    """Coefficients of prod_{k>=1} (1 - q^k)^24 up to q^n inclusive."""
    acc = np.zeros(n + 1, dtype=object)
    acc[0] = 1
    binom = [(-1) ** i * math.comb(24, i) for i in range(25)]
    for k in range(1, n + 1):
        # multiply by (1 - q^k)^24, sparse in steps of k; walk top-down in place
        new = acc.copy()
        for i in range(1, min(24, n // k) + 1):
            s = i * k
            new[s:] += binom[i] * acc[: n + 1 - s]
        acc = new
    return tuple(int(c) for c in acc)


def delta_coefficients(order: int) -> tuple[int, ...]:
    """tau(1), ..., tau(order): coefficients of Delta(q) = q prod (1 - q^n)^24."""
    return _eta24_coefficients(order - 1)


def delta(order: int) -> PuiseuxSeries:
    """Delta(q) known through q^order (truncation order ``order + 1``)."""
    if order < 1:
        raise ValueError("delta needs order >= 1")
    coeffs = delta_coefficients(order)
    return PuiseuxSeries({k + 1: c for k, c in enumerate(coeffs)}, 1, order + 1)


@lru_cache(maxsize=8)
def hilb_coefficients(order: int) -> tuple[int, ...]:
    """Euler characteristics e(Hilb^n(K3)) for n = 0..order.

    Computed by inverting the unit power series prod (1 - q^k)^24.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    eta = _eta24_coefficients(order)
    inv = [1] + [0] * order
    for m in range(1, order + 1):
        s = 0
        for k in range(1, m + 1):
            c = eta[k]
            if c:
                s += c * inv[m - k]
        inv[m] = -s
    return tuple(inv)


def hilb_series(order: int) -> PuiseuxSeries:
    """Delta(q)^(-1) = sum_n e(Hilb^n) q^(n-1) for n = 0..order; truncation ``order``."""
    coeffs = hilb_coefficients(order)
    return PuiseuxSeries({n - 1: c for n, c in enumerate(coeffs)}, 1, order)


def invert(s: PuiseuxSeries) -> PuiseuxSeries:
    """Multiplicative inverse of a series whose lowest coefficient is a unit."""
    if s.is_zero():
        raise ZeroDivisionError("cannot invert a series with no known nonzero term")
    d = s.denom
    items = list(s.numerator_items())
    v, lead = items[0]
    lead_inv = lead.inverse()
    if s.trunc is None and len(items) == 1:
        return PuiseuxSeries({-v: lead_inv}, d, None)
    if s.trunc is None:
        raise ValueError("inverse of an exact non-monomial needs a truncation order")
    # s = lead q^v (1 + u); result known below trunc - 2v
    trunc = s.trunc - 2 * Fraction(v, d)
    span = int(math.ceil((trunc + Fraction(v, d)) * d))  # steps above -v
    rest = {a - v: c * lead_inv for a, c in items[1:]}
    out = [None] * max(span, 0)
    for m in range(len(out)):
        if m == 0:
            out[0] = CycNum.one()
            continue
        acc = None
        for k, c in rest.items():
            if k > m:
                continue
            prev = out[m - k]
            if prev is None or prev.is_zero():
                continue
            t = c * prev
            acc = t if acc is None else acc + t
        out[m] = -acc if acc is not None else CycNum.zero()
    terms = {m - v: c * lead_inv for m, c in enumerate(out) if c is not None}
    return PuiseuxSeries(terms, d, trunc)


def substitute(s: PuiseuxSeries, r: int, j: int) -> PuiseuxSeries:
    """Replace q by exp(2 pi i j / r) q^(1/r) on the fixed branch.

    q^(a/D) goes to zeta_(rD)^(j a) q^(a/(rD)); the result has denominator rD.
    """
    if r < 1:
        raise ValueError("r must be positive")
    n = r * s.denom
    terms = {}
    for a, c in s.numerator_items():
        t = (j * a) % n
        terms[a] = c if t == 0 else c * root_of_unity(n, t)
    trunc = None if s.trunc is None else s.trunc / r
    return PuiseuxSeries(terms, n, trunc)


def scale_exponent(s: PuiseuxSeries, m: int) -> PuiseuxSeries:
    """q^e -> q^(m e)."""
    if m < 1:
        raise ValueError("scale factor must be positive")
    trunc = None if s.trunc is None else s.trunc * m
    return PuiseuxSeries({a * m: c for a, c in s.numerator_items()}, s.denom, trunc)


def rotate(s: PuiseuxSeries, r: int, j: int) -> PuiseuxSeries:
    """psi(x) -> psi(zeta_r^j x) for a series in integer exponents.

    Same as ``scale_exponent(substitute(s, r, j), r)`` without the detour
    through denominator r.
    """
    if s.denom != 1:
        raise ValueError("rotate needs integer exponents")
    terms = {}
    for a, c in s.numerator_items():
        t = (j * a) % r
        terms[a] = c if t == 0 else c * root_of_unity(r, t)
    return PuiseuxSeries(terms, 1, s.trunc)


def sector_extract(s: PuiseuxSeries, r: int, k: int, method: str = "filter") -> PuiseuxSeries:
    """Sum of the terms psi_n x^n with n = k mod r.

    ``method="filter"`` keeps coefficients directly; ``method="roots"`` uses
    the average (1/r) sum_j zeta_r^(-jk) psi(zeta_r^j x).
    """
    if s.denom != 1 or any(a < 0 for a, _ in s.numerator_items()):
        raise ValueError("sector extraction needs a power series in integer exponents >= 0")
    if r < 1:
        raise ValueError("r must be positive")
    if method == "filter":
        terms = {a: c for a, c in s.numerator_items() if (a - k) % r == 0}
        return PuiseuxSeries(terms, 1, s.trunc)
    if method == "roots":
        total = None
        for j in range(r):
            part = rotate(s, r, j).scale(root_of_unity(r, -j * k))
            total = part if total is None else total + part
        return total.scale(Fraction(1, r))
    raise ValueError(f"unknown method {method!r}")
