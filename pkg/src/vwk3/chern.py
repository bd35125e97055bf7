"""Twisted Chern characters on H*(S, Q) and the numerics built on them.

A class in H*(S, Q) is stored as (rank, degree-2 part, degree-4 part).  For
a class written (s, D, D^2/2 - n) the number n is derived on demand, which
keeps the B-field twist linear in the stored data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .k3lattice import EvenLattice, k3_lattice

__all__ = [
    "CohClass",
    "IntegralityReport",
    "K3",
    "SurfaceInvariants",
    "congruence_check",
    "euler_pairing_defect",
    "integrality_check",
    "reparametrize",
    "twist",
    "vd",
]


@dataclass(frozen=True)
class SurfaceInvariants:
    chiO: int
    K2: int
    euler: int

    def is_k3(self) -> bool:
        return self == K3


K3 = SurfaceInvariants(chiO=2, K2=0, euler=24)


@lru_cache(maxsize=8)
def _sparse_gram(gram_bytes: bytes, n: int) -> tuple:
    g = np.frombuffer(gram_bytes, dtype=np.int64).reshape(n, n)
    return tuple((i, k, int(g[i, k])) for i, k in zip(*np.nonzero(g)))


def _integral(v) -> tuple[list[int], int]:
    """Integer numerators over a common denominator."""
    fr = [Fraction(x) for x in v]
    den = math.lcm(*(f.denominator for f in fr)) if fr else 1
    return [f.numerator * (den // f.denominator) for f in fr], den


def _pair(L: EvenLattice, a, b) -> Fraction:
    g = np.ascontiguousarray(L.gram, dtype=np.int64)
    na, da = _integral(a)
    nb, db = _integral(b)
    total = sum(c * na[i] * nb[k] for i, k, c in _sparse_gram(g.tobytes(), g.shape[0]))
    return Fraction(total, da * db)


@dataclass(frozen=True)
class CohClass:
    """(s, deg2, ch2) in H^0 + H^2 + H^4 with rational entries."""

    s: int
    deg2: tuple
    ch2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "deg2", tuple(Fraction(x) for x in self.deg2))
        object.__setattr__(self, "ch2", Fraction(self.ch2))

    @classmethod
    def from_sdn(cls, s: int, D, n, L: EvenLattice | None = None) -> "CohClass":
        """The class (s, D, D^2/2 - n)."""
        L = L or k3_lattice()
        D = tuple(Fraction(x) for x in D)
        return cls(s, D, _pair(L, D, D) / 2 - Fraction(n))

    def n(self, L: EvenLattice | None = None) -> Fraction:
        L = L or k3_lattice()
        return _pair(L, self.deg2, self.deg2) / 2 - self.ch2

    def deg2_square(self, L: EvenLattice | None = None) -> Fraction:
        return _pair(L or k3_lattice(), self.deg2, self.deg2)


def twist(c: CohClass, xi, r: int, L: EvenLattice | None = None) -> CohClass:
    """Multiply by exp(xi / r) = (1, xi/r, xi^2 / 2r^2)."""
    L = L or k3_lattice()
    xi = tuple(Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x) for x in xi)
    if len(xi) != len(c.deg2):
        raise ValueError("twist vector does not match the class dimension")
    deg2 = tuple(d + Fraction(c.s, r) * x for d, x in zip(c.deg2, xi))
    ch2 = c.ch2 + _pair(L, c.deg2, xi) / r + c.s * _pair(L, xi, xi) / (2 * r * r)
    return CohClass(c.s, deg2, ch2)


def vd(r: int, c1sq: int, n: int, S: SurfaceInvariants = K3) -> int:
    """Virtual dimension 2rn - (r-1) c1^2 - (r^2-1) chi(O_S)."""
    return 2 * r * n - (r - 1) * c1sq - (r * r - 1) * S.chiO


def euler_pairing_defect(c: CohClass, S: SurfaceInvariants = K3, L: EvenLattice | None = None) -> int:
    """chi(O_Y) - chi(E, E) = 2sn - (s-1) D^2 - (s^2-1) chi(O_S) for c = (s, D, D^2/2 - n)."""
    L = L or k3_lattice()
    if any(x.denominator != 1 for x in c.deg2):
        raise ValueError("degree-2 part is not integral")
    n = c.n(L)
    if n.denominator != 1:
        raise ValueError("n is not integral")
    D2 = int(c.deg2_square(L))
    s = c.s
    return 2 * s * int(n) - (s - 1) * D2 - (s * s - 1) * S.chiO


def congruence_check(s: int, wE, c2val: int, L: EvenLattice | None = None) -> bool:
    """c2val = -(s-1) w(E)^2 mod 2s, with w(E)^2 taken mod 2s through any lift."""
    L = L or k3_lattice()
    wsq = int(np.asarray(wE, dtype=np.int64) @ L.gram @ np.asarray(wE, dtype=np.int64))
    m = 2 * s
    return (c2val - (-(s - 1) * (wsq % m))) % m == 0


@dataclass(frozen=True)
class IntegralityReport:
    s: int
    D: tuple
    n: Fraction
    s_ok: bool
    D_ok: bool
    n_ok: bool

    @property
    def integral(self) -> bool:
        return self.s_ok and self.D_ok and self.n_ok

    def to_json(self) -> dict:
        D = [int(x) if x.denominator == 1 else str(x) for x in self.D]
        return {"s": self.s, "D": D, "n": str(self.n), "integral": self.integral}


def integrality_check(c: CohClass, xi, r: int, L: EvenLattice | None = None) -> IntegralityReport:
    """Twist by xi/r and report whether (s, D, D^2/2 - n) has D integral and n in Z."""
    L = L or k3_lattice()
    t = twist(c, xi, r, L)
    n = t.n(L)
    return IntegralityReport(
        s=t.s,
        D=t.deg2,
        n=n,
        s_ok=isinstance(t.s, int),
        D_ok=all(x.denominator == 1 for x in t.deg2),
        n_ok=n.denominator == 1,
    )


def reparametrize(xi, gamma, n: int, r: int, L: EvenLattice | None = None):
    """Change of lift xi -> xi + r gamma.

    Returns (xi', n') with n' = n + (r-1) gamma.xi + r(r-1) gamma^2 / 2, the
    value for which exp(xi'/r) ch_G(E) describes the same sheaf.
    """
    L = L or k3_lattice()
    xi = np.asarray(xi, dtype=np.int64)
    gamma = np.asarray(gamma, dtype=np.int64)
    gx = int(gamma @ L.gram @ xi)
    gg = int(gamma @ L.gram @ gamma)
    return xi + r * gamma, n + (r - 1) * gx + r * (r - 1) * gg // 2
