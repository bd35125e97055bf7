"""K3 partition functions at prime rank r.

Three generating functions, each as a truncated Puiseux series and (where it
makes sense) as a combination of Delta-atoms:

* Z^SU(r)_c1 in closed form;
* Z_w for a class w in H^2(S, mu_r), both in closed form and reassembled
  from Euler characteristics of Hilbert schemes;
* Z^SU(r)/Z_r_c1 = sum_w exp(2 pi i (w.c1)/r) Z_w, either by collapsing the
  w-sum with the flux sum identities or by summing over the joint
  distribution of (w.c1, w^2).

``order`` always means: every exponent of q below ``order`` is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chern import K3, SurfaceInvariants, vd
from .cycnum import CycNum, root_of_unity
from .k3lattice import (
    DEFAULT_BUDGET,
    delta_div,
    flux_sum_closed_form,
    is_prime,
    joint_distribution,
    k3_lattice,
    square,
    square_mod_2r,
)
from .qseries import PuiseuxSeries, hilb_coefficients, hilb_series, scale_exponent, substitute
from .sduality import DeltaAtom, ModularExpr

__all__ = [
    "PartitionRequest",
    "normalization_exponent",
    "z_su",
    "z_su_expr",
    "z_su_modr",
    "z_su_modr_expr",
    "z_w",
    "z_w_expr",
    "z_w_from_euler",
]


@dataclass(frozen=True)
class PartitionRequest:
    r: int
    c1: np.ndarray = field(compare=False)
    order: Fraction = Fraction(1)
    surface: SurfaceInvariants = K3

    def __post_init__(self):
        if not is_prime(self.r):
            raise ValueError(f"rank r={self.r} is not prime")
        object.__setattr__(self, "order", Fraction(self.order))
        if self.order <= 0:
            raise ValueError("order must be positive")
        object.__setattr__(self, "c1", k3_lattice().vector(self.c1))

    def to_json(self) -> dict:
        return {"r": self.r, "c1": [int(x) for x in self.c1], "order": str(self.order)}


def _require_k3(S: SurfaceInvariants):
    if not S.is_k3():
        raise ValueError("closed forms are only available for K3 surfaces")


def _require_prime(r: int):
    if not is_prime(r):
        raise ValueError(f"rank r={r} is not prime")


def normalization_exponent(r: int, S: SurfaceInvariants = K3) -> Fraction:
    """-chi(O_S)/(2r) + r K_S^2 / 24."""
    return Fraction(-S.chiO, 2 * r) + Fraction(r * S.K2, 24)


# -- building blocks ---------------------------------------------------------


def _scaled_up(r: int, order: Fraction) -> PuiseuxSeries:
    """Delta(q^r)^-1 to q-order ``order``."""
    return scale_exponent(hilb_series(max(1, math.ceil(order / r))), r).truncate(order)


def _shifted(r: int, j: int, order: Fraction) -> PuiseuxSeries:
    """Delta(exp(2 pi i j/r) q^(1/r))^-1 to q-order ``order``."""
    return substitute(hilb_series(max(1, math.ceil(order * r))), r, j).truncate(order)


def _phase(r: int, j: int, sq: int) -> CycNum:
    """exp(-pi i j sq / r) as zeta_2r^(-j sq)."""
    return root_of_unity(2 * r, -j * sq)


def _j_sum(r: int, sq: int, order: Fraction) -> PuiseuxSeries:
    """sum_j exp(-pi i j sq / r) Delta(zeta_r^j q^(1/r))^-1."""
    total = None
    for j in range(r):
        part = _shifted(r, j, order).scale(_phase(r, j, sq))
        total = part if total is None else total + part
    return total


# -- SU(r) --------------------------------------------------------------------


def z_su(req: PartitionRequest) -> PuiseuxSeries:
    """delta_{c1,0}/r^3 Delta(q^r)^-1 + 1/r^2 sum_j exp(-pi i j c1^2/r) Delta(zeta_r^j q^(1/r))^-1."""
    _require_k3(req.surface)
    L = k3_lattice()
    r, order = req.r, req.order
    sq = square_mod_2r(L, req.c1, r)
    out = _j_sum(r, sq, order).scale(Fraction(1, r * r))
    if delta_div(L, req.c1, L.zero(), r):
        out = out + _scaled_up(r, order).scale(Fraction(1, r**3))
    return out


def z_su_expr(r: int, c1) -> ModularExpr:
    _require_prime(r)
    L = k3_lattice()
    sq = square_mod_2r(L, c1, r)
    terms = {DeltaAtom.shifted(j, r): _phase(r, j, sq) * Fraction(1, r * r) for j in range(r)}
    if delta_div(L, c1, L.zero(), r):
        terms[DeltaAtom.scaled_up(r)] = Fraction(1, r**3)
    return ModularExpr(0, terms)


def z_su_from_invariants(r: int, c1sq: int, divisible: bool, order) -> PuiseuxSeries:
    """Z^SU(r) from (c1^2, whether r | c1) alone; the closed form sees nothing else."""
    _require_prime(r)
    if c1sq % 2:
        raise ValueError("c1^2 must be even on a K3 surface")
    order = Fraction(order)
    out = _j_sum(r, c1sq % (2 * r), order).scale(Fraction(1, r * r))
    if divisible:
        out = out + _scaled_up(r, order).scale(Fraction(1, r**3))
    return out


# -- Z_w ------------------------------------------------------------------------


def z_w(r: int, w, order) -> PuiseuxSeries:
    """delta_{w,0}/r^2 Delta(q^r)^-1 + 1/r sum_j exp(-pi i j w^2/r) Delta(zeta_r^j q^(1/r))^-1.

    w^2 is computed mod 2r from whatever integer lift ``w`` is.
    """
    _require_prime(r)
    L = k3_lattice()
    w = L.vector(w)
    order = Fraction(order)
    out = _j_sum(r, square_mod_2r(L, w, r), order).scale(Fraction(1, r))
    if delta_div(L, w, L.zero(), r):
        out = out + _scaled_up(r, order).scale(Fraction(1, r * r))
    return out


def z_w_expr(r: int, w) -> ModularExpr:
    L = k3_lattice()
    sq = square_mod_2r(L, w, r)
    terms = {DeltaAtom.shifted(j, r): _phase(r, j, sq) * Fraction(1, r) for j in range(r)}
    if delta_div(L, w, L.zero(), r):
        terms[DeltaAtom.scaled_up(r)] = Fraction(1, r * r)
    return ModularExpr(0, terms)


def z_w_from_euler(r: int, w, order, S: SurfaceInvariants = K3) -> PuiseuxSeries:
    """q^(-1/r) sum_n q^(vd/2r) e(Hilb^(vd/2)(S)) with vd = vd(r, xi, n), xi the lift ``w``.

    Valid for w != 0 mod r (non-trivial Brauer class), where the twisted
    moduli spaces deform to Hilbert schemes of vd/2 points.
    """
    _require_prime(r)
    _require_k3(S)
    L = k3_lattice()
    xi = L.vector(w)
    if delta_div(L, xi, L.zero(), r):
        raise ValueError("w = 0 mod r has trivial Brauer class; use z_w")
    order = Fraction(order)
    shift = normalization_exponent(r, S)
    xi2 = square(L, xi)
    # smallest n with vd >= 0, then step n upward while the exponent stays below order
    base = (r - 1) * xi2 + (r * r - 1) * S.chiO
    n = -((-base) // (2 * r))
    max_len = int(math.floor((order - shift) * r)) + 1
    coeffs = hilb_coefficients(max(max_len, 0))
    terms = {}
    while True:
        d = vd(r, xi2, n, S)
        if d % 2:
            raise ArithmeticError(f"odd virtual dimension {d}")
        exp = shift + Fraction(d, 2 * r)
        if exp >= order:
            break
        terms[exp] = coeffs[d // 2]
        n += 1
    return PuiseuxSeries.from_exponents(terms, trunc=order).with_denom(r)


# -- SU(r)/Z_r ------------------------------------------------------------------


def z_su_modr_expr(r: int, c1) -> ModularExpr:
    """Closed form from the flux sums: the w-sum collapses onto the atoms."""
    _require_prime(r)
    L = k3_lattice()
    terms = {DeltaAtom.scaled_up(r): Fraction(1, r * r)}
    for j in range(r):
        terms[DeltaAtom.shifted(j, r)] = flux_sum_closed_form(L, r, j, c1) * Fraction(1, r)
    return ModularExpr(0, terms)


def _z_su_modr_closed(req: PartitionRequest) -> PuiseuxSeries:
    L = k3_lattice()
    r, order = req.r, req.order
    out = _scaled_up(r, order).scale(Fraction(1, r * r))
    for j in range(r):
        flux = flux_sum_closed_form(L, r, j, req.c1)
        if not flux.is_zero():
            out = out + _shifted(r, j, order).scale(flux * Fraction(1, r))
    return out


def _z_su_modr_direct(req: PartitionRequest, budget: int) -> PuiseuxSeries:
    """sum over the joint distribution N(m, k) of zeta_r^m times the sector series.

    w = 0 contributes r Z^SU(r)_0; every other w with w^2 = k mod 2r
    contributes the same series 1/r sum_j zeta_2r^(-jk) Delta(...)^-1.
    """
    L = k3_lattice()
    r, order = req.r, req.order
    dist = joint_distribution(L, r, req.c1, budget=budget)
    counts = dict(dist.counts)
    counts[(0, 0)] -= 1  # the class w = 0 is handled on its own
    out = z_su(PartitionRequest(r=r, c1=L.zero(), order=order, surface=req.surface)).scale(r)
    by_k: dict[int, CycNum] = {}
    for (m, k), n in counts.items():
        if n:
            c = root_of_unity(r, m) * n
            by_k[k] = by_k[k] + c if k in by_k else c
    for k, weight in sorted(by_k.items()):
        if weight.is_zero():
            continue
        sector = _j_sum(r, k, order).scale(Fraction(1, r))
        out = out + sector.scale(weight)
    return out


def z_su_modr(req: PartitionRequest, route: str = "closed", budget: int = DEFAULT_BUDGET) -> PuiseuxSeries:
    """Z^SU(r)/Z_r_c1 as a series.

    ``route="closed"`` applies the flux sum identities; ``route="direct"``
    sums over the (w.c1, w^2) distribution without ever listing r^22 classes.
    """
    _require_k3(req.surface)
    if route == "closed":
        return _z_su_modr_closed(req)
    if route == "direct":
        return _z_su_modr_direct(req, budget)
    raise ValueError(f"unknown route {route!r}")
