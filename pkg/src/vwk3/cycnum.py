"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element of Q(zeta_N) is stored as a residue modulo the N-th cyclotomic
polynomial Phi_N, i.e. as a coefficient vector of length phi(N) in the power
basis 1, x, ..., x^(phi(N)-1) where x stands for zeta_N = exp(2 pi i / N).
Internally the coefficients are kept as integer numerators over one common
positive denominator; the public ``coeffs`` view returns Fractions.

Operands of different orders are lifted to the lcm of their orders before
any arithmetic, so ``root_of_unity(4, 1) * root_of_unity(6, 1)`` just works.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath

__all__ = [
    "CycNum",
    "cyclotomic_polynomial",
    "euler_phi",
    "root_of_unity",
]


def euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _mobius(n: int) -> int:
    k = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            k += 1
        p += 1
    if n > 1:
        k += 1
    return -1 if k % 2 else 1


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # den is monic; coefficient lists are low degree first
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            out[i - dd] = c
            for k in range(dd + 1):
                num[i - dd + k] -= c * den[k]
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first.

    Obtained by dividing x^n - 1 by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds the reduction of x^k modulo Phi_n, for 0 <= k < n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x and reduce the overflow with the monic Phi_n
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _normalized_traces(n: int) -> tuple[Fraction, ...]:
    # Tr(zeta_n^k) / phi(n) = mu(n/g) / phi(n/g), g = gcd(n, k); field independent
    out = []
    for k in range(euler_phi(n)):
        m = n // math.gcd(n, k)
        out.append(Fraction(_mobius(m), euler_phi(m)))
    return tuple(out)


def _reduce(n: int, poly: list[int]) -> list[int]:
    """Reduce an integer polynomial of any degree modulo Phi_n."""
    deg = euler_phi(n)
    if len(poly) <= deg:
        return poly + [0] * (deg - len(poly))
    table = _power_table(n)
    out = poly[:deg]
    for k in range(deg, len(poly)):
        c = poly[k]
        if c:
            row = table[k % n]
            for i in range(deg):
                if row[i]:
                    out[i] += c * row[i]
    return out


class CycNum:
    """Immutable element of Q(zeta_N).

    ``CycNum(N, coeffs)`` accepts any iterable of rationals (ints, Fractions,
    or "p/q" strings) of arbitrary length and reduces it modulo Phi_N.
    """

    __slots__ = ("_order", "_nums", "_den")

    def __init__(self, order: int, coeffs=(), *, _raw=None):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        self._order = order
        if _raw is not None:
            nums, den = _raw
        else:
            fr = [Fraction(c) for c in coeffs]
            den = 1
            for f in fr:
                den = den * f.denominator // math.gcd(den, f.denominator)
            nums = _reduce(order, [f.numerator * (den // f.denominator) for f in fr])
        self._nums, self._den = self._normalize(nums, den)

    @staticmethod
    def _normalize(nums, den):
        g = den
        for c in nums:
            if c:
                g = math.gcd(g, c)
                if g == 1:
                    break
        if not any(nums):
            return tuple(0 for _ in nums), 1
        if den < 0:
            g = -g
        if g != 1:
            nums = [c // g for c in nums]
            den //= g
        return tuple(nums), den

    @classmethod
    def _from_ints(cls, order: int, nums, den: int = 1) -> "CycNum":
        return cls(order, _raw=(list(nums), den))

    @classmethod
    def from_rational(cls, value, order: int = 1) -> "CycNum":
        f = Fraction(value)
        nums = [0] * euler_phi(order)
        nums[0] = f.numerator
        return cls._from_ints(order, nums, f.denominator)

    @classmethod
    def from_exponent_counts(cls, order: int, counts) -> "CycNum":
        """Sum of counts[e] * zeta_order^e for e in range(len(counts))."""
        return cls._from_ints(order, _reduce(order, [int(c) for c in counts]))

    @classmethod
    def zero(cls, order: int = 1) -> "CycNum":
        return cls._from_ints(order, [0] * euler_phi(order))

    @classmethod
    def one(cls, order: int = 1) -> "CycNum":
        return cls.from_rational(1, order)

    # -- accessors ---------------------------------------------------------

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._nums)

    @property
    def denominator(self) -> int:
        return self._den

    def is_zero(self) -> bool:
        return not any(self._nums)

    def is_rational(self) -> bool:
        return not any(self._nums[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._nums[0], self._den)

    # -- order changes -----------------------------------------------------

    def lift(self, order: int) -> "CycNum":
        """Re-express in Q(zeta_order); requires self.order | order."""
        if order == self._order:
            return self
        if order % self._order:
            raise ValueError(f"cannot lift order {self._order} to {order}")
        step = order // self._order
        poly = [0] * ((len(self._nums) - 1) * step + 1)
        for i, c in enumerate(self._nums):
            poly[i * step] = c
        return CycNum._from_ints(order, _reduce(order, poly), self._den)

    @staticmethod
    def _common(a: "CycNum", b: "CycNum") -> tuple["CycNum", "CycNum"]:
        if a._order == b._order:
            return a, b
        n = math.lcm(a._order, b._order)
        return a.lift(n), b.lift(n)

    @classmethod
    def _coerce(cls, other, order: int = 1):
        if isinstance(other, CycNum):
            return other
        if isinstance(other, (int, Rational)):
            return cls.from_rational(other, order)
        return NotImplemented

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other, self._order)
        if other is NotImplemented:
            return other
        a, b = self._common(self, other)
        if a._den == b._den:
            nums = [x + y for x, y in zip(a._nums, b._nums)]
            return CycNum._from_ints(a._order, nums, a._den)
        nums = [x * b._den + y * a._den for x, y in zip(a._nums, b._nums)]
        return CycNum._from_ints(a._order, nums, a._den * b._den)

    __radd__ = __add__

    def __neg__(self):
        return CycNum._from_ints(self._order, [-c for c in self._nums], self._den)

    def __sub__(self, other):
        other = self._coerce(other, self._order)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other, self._order)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, CycNum):
            f = Fraction(other)
            nums = [c * f.numerator for c in self._nums]
            return CycNum._from_ints(self._order, nums, self._den * f.denominator)
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = self._common(self, other)
        if b.is_rational():
            return a * Fraction(b._nums[0], b._den)
        if a.is_rational():
            return b * Fraction(a._nums[0], a._den)
        an, bn = a._nums, b._nums
        prod = [0] * (len(an) + len(bn) - 1)
        for i, x in enumerate(an):
            if x:
                for k, y in enumerate(bn):
                    if y:
                        prod[i + k] += x * y
        return CycNum._from_ints(a._order, _reduce(a._order, prod), a._den * b._den)

    __rmul__ = __mul__

    def mul_root(self, k: int) -> "CycNum":
        """Multiply by zeta_N^k for N = self.order, by shifting and reducing."""
        n = self._order
        k %= n
        if k == 0 or self.is_zero():
            return self
        poly = [0] * k + list(self._nums)
        return CycNum._from_ints(n, _reduce(n, poly), self._den)

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via the extended Euclidean algorithm with Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        n = self._order
        if self.is_rational():
            return CycNum.from_rational(1 / Fraction(self._nums[0], self._den), n)
        # invariant: r_i = s_i * a  (mod Phi_N)
        r0 = [Fraction(c) for c in cyclotomic_polynomial(n)]
        r1 = _trim([Fraction(c, self._den) for c in self._nums])
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _trim(_poly_sub(s0, _poly_mul(q, s1)))
        c = r1[0]
        return CycNum(n, [x / c for x in s1])

    def __truediv__(self, other):
        other = self._coerce(other, self._order)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other, self._order)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = CycNum.one(self._order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "CycNum":
        n = self._order
        poly = [0] * n
        for i, c in enumerate(self._nums):
            poly[(-i) % n] += c
        return CycNum._from_ints(n, _reduce(n, poly), self._den)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other, self._order)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(self, other)
        return a._den == b._den and a._nums == b._nums

    def __hash__(self):
        # normalized trace is invariant under lifting, so equal values hash equal
        if self.is_rational():
            return hash(Fraction(self._nums[0], self._den))
        tr = _normalized_traces(self._order)
        return hash(sum(Fraction(c, self._den) * t for c, t in zip(self._nums, tr)))

    def __bool__(self):
        return not self.is_zero()

    # -- numerics and I/O --------------------------------------------------

    def embed(self, precision: int | None = None):
        """Complex value at zeta_N = exp(2 pi i / N).

        With ``precision=None`` a Python complex (double precision) is returned;
        otherwise an ``mpmath.mpc`` computed with that many decimal digits.
        """
        n = self._order
        if precision is None:
            z = 0j
            for k, c in enumerate(self._nums):
                if c:
                    z += c * cmath.exp(2j * math.pi * k / n)
            return z / self._den
        with mpmath.workdps(precision + 5):
            z = mpmath.mpc(0)
            for k, c in enumerate(self._nums):
                if c:
                    z += c * mpmath.expjpi(mpmath.mpf(2 * k) / n)
            # not rounded on return: the caller's context decides what to keep
            return z / self._den

    def to_json(self) -> dict:
        return {"order": self._order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CycNum":
        return cls(int(data["order"]), [Fraction(c) for c in data["coeffs"]])

    def __repr__(self):
        return f"CycNum({self._order}, [{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self):
        if self.is_rational():
            return str(self.rational_value())
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else (f"z{self._order}" if k == 1 else f"z{self._order}^{k}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def root_of_unity(n: int, k: int = 1) -> CycNum:
    """zeta_n^k in Q(zeta_n)."""
    if n < 1:
        raise ValueError("root of unity order must be positive")
    return CycNum._from_ints(n, list(_power_table(n)[k % n]))


# -- dense polynomial helpers over Q, used by inverse() ----------------------


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [Fraction(0)]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _poly_divmod(a, b):
    a = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * max(1, len(a) - db)
    lead = b[-1]
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / lead
        if c:
            q[i - db] = c
            for k in range(db + 1):
                a[i - db + k] -= c * b[k]
    return _trim(q), _trim(a[:db] if db else [Fraction(0)])
