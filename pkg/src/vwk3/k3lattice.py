"""The K3 lattice U^3 + E8(-1)^2 and finite sums over H^2(S, mu_r).

Lattice vectors are integer numpy arrays in the basis the Gram matrix is
written in. Everything summed over (Z/r)^22 is computed block by block:
both w.c1 and w^2 are additive across the orthogonal blocks, so a full sum
never touches r^22 vectors.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cycnum import CycNum

__all__ = [
    "Block",
    "EnumerationBudgetExceeded",
    "EvenLattice",
    "JointDistribution",
    "DEFAULT_BUDGET",
    "delta_div",
    "e8_gram",
    "flux_sum_closed_form",
    "gauss_sum",
    "inner",
    "is_prime",
    "joint_distribution",
    "k3_lattice",
    "n_j",
    "parse_vector",
    "square",
    "square_mod_2r",
]

DEFAULT_BUDGET = int(os.environ.get("VW_BUDGET", 10**7))

U_GRAM = ((0, 1), (1, 0))

# Dynkin diagram of E8: chain 1-2-3-4-5-6-7 with node 8 attached to node 5
_E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]


class EnumerationBudgetExceeded(RuntimeError):
    """A single block would need more residue vectors than the budget allows."""


def e8_gram() -> np.ndarray:
    """Cartan matrix of E8: positive definite, even, unimodular."""
    g = 2 * np.eye(8, dtype=np.int64)
    for a, b in _E8_EDGES:
        g[a, b] = g[b, a] = -1
    return g


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class Block:
    name: str
    offset: int
    gram: tuple

    @property
    def rank(self) -> int:
        return len(self.gram)

    def slice(self) -> slice:
        return slice(self.offset, self.offset + self.rank)


@dataclass(frozen=True)
class EvenLattice:
    gram: np.ndarray = field(repr=False)
    blocks: tuple[Block, ...]

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("Gram matrix must be square")
        if not np.array_equal(g, g.T):
            raise ValueError("Gram matrix must be symmetric")
        if np.any(np.diag(g) % 2):
            raise ValueError("lattice is not even")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        expect = np.zeros_like(g)
        for b in self.blocks:
            expect[b.slice(), b.slice()] = np.array(b.gram)
        if not np.array_equal(expect, g):
            raise ValueError("blocks do not reproduce the Gram matrix")

    @classmethod
    def from_blocks(cls, named_grams) -> "EvenLattice":
        blocks, off = [], 0
        for name, g in named_grams:
            g = np.asarray(g, dtype=np.int64)
            blocks.append(Block(name, off, tuple(tuple(int(x) for x in row) for row in g)))
            off += g.shape[0]
        gram = np.zeros((off, off), dtype=np.int64)
        for b in blocks:
            gram[b.slice(), b.slice()] = np.array(b.gram)
        return cls(gram, tuple(blocks))

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def sublattice(self, *names: str) -> "EvenLattice":
        return EvenLattice.from_blocks([(n, self.block(n).gram) for n in names])

    def zero(self) -> np.ndarray:
        return np.zeros(self.rank, dtype=np.int64)

    def vector(self, coords) -> np.ndarray:
        v = np.asarray(coords, dtype=np.int64)
        if v.shape != (self.rank,):
            raise ValueError(f"expected a vector of length {self.rank}, got shape {v.shape}")
        return v


@lru_cache(maxsize=None)
def k3_lattice() -> EvenLattice:
    """H^2(K3, Z) = U + U + U + E8(-1) + E8(-1), rank 22, signature (3, 19)."""
    e8m = -e8_gram()
    return EvenLattice.from_blocks(
        [("U1", U_GRAM), ("U2", U_GRAM), ("U3", U_GRAM), ("E8_1", e8m), ("E8_2", e8m)]
    )


def _check_dims(L: EvenLattice, *vs):
    for v in vs:
        if np.shape(v) != (L.rank,):
            raise ValueError(f"vector of shape {np.shape(v)} does not match lattice rank {L.rank}")


def inner(L: EvenLattice, v, w) -> int:
    _check_dims(L, v, w)
    return int(np.asarray(v, dtype=np.int64) @ L.gram @ np.asarray(w, dtype=np.int64))


def square(L: EvenLattice, v) -> int:
    return inner(L, v, v)


def square_mod_2r(L: EvenLattice, v, r: int) -> int:
    """v.v mod 2r. Depends only on v mod r since the lattice is even."""
    return square(L, v) % (2 * r)


def delta_div(L: EvenLattice, a, b, r: int) -> int:
    """1 if a - b lies in r H^2(S, Z), else 0."""
    _check_dims(L, a, b)
    diff = np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)
    return int(not np.any(diff % r))


def n_j(r: int, j: int) -> int:
    """The residue n in 1..r-1 with j n = -1 mod r."""
    if j % r == 0:
        raise ValueError("n_j is undefined for j = 0 mod r")
    if not 1 <= j <= r - 1:
        raise ValueError(f"j must lie in 1..{r - 1}")
    return (-pow(j, -1, r)) % r


# -- block enumeration -------------------------------------------------------

_CHUNK = 1 << 18


def _residue_chunks(rank: int, r: int):
    """Yield int64 arrays of shape (k, rank) covering (Z/r)^rank once."""
    tail = 0
    while tail < rank and r ** (tail + 1) <= _CHUNK:
        tail += 1
    tail_grid = (
        np.indices((r,) * tail).reshape(tail, -1).T.astype(np.int64)
        if tail
        else np.zeros((1, 0), dtype=np.int64)
    )
    for head in itertools.product(range(r), repeat=rank - tail):
        out = np.empty((tail_grid.shape[0], rank), dtype=np.int64)
        out[:, : rank - tail] = head
        out[:, rank - tail :] = tail_grid
        yield out


def _check_budget(block: Block, r: int, budget: int):
    size = r**block.rank
    if size > budget:
        raise EnumerationBudgetExceeded(
            f"block {block.name} needs {size} vectors at r={r}, budget is {budget}"
        )


@lru_cache(maxsize=64)
def _block_sum_exponents(gram: tuple, r: int, j: int, gc1: tuple) -> tuple[int, ...]:
    """Histogram over e in Z/2r of 2 (w.c1) - j w^2, w running over (Z/r)^rank."""
    g = np.array(gram, dtype=np.int64)
    lin = 2 * np.array(gc1, dtype=np.int64)
    hist = np.zeros(2 * r, dtype=np.int64)
    for chunk in _residue_chunks(len(gram), r):
        sq = np.einsum("ij,jk,ik->i", chunk, g, chunk)
        e = (chunk @ lin - j * sq) % (2 * r)
        hist += np.bincount(e, minlength=2 * r)
    return tuple(int(x) for x in hist)


def _block_c1(L: EvenLattice, block: Block, c1) -> tuple:
    # pairing with c1 only sees the block part since blocks are orthogonal
    gc1 = (np.array(block.gram, dtype=np.int64) @ np.asarray(c1, dtype=np.int64)[block.slice()])
    return tuple(int(x) for x in gc1)


def gauss_sum(L: EvenLattice, r: int, j: int, c1, budget: int = DEFAULT_BUDGET) -> CycNum:
    """sum over w in L/rL of exp(2 pi i (w.c1)/r) exp(-pi i j w^2 / r), in Q(zeta_2r).

    Each orthogonal block is brute-forced separately and the block values
    multiplied together.
    """
    _check_dims(L, c1)
    total = CycNum.one(2 * r)
    for block in L.blocks:
        _check_budget(block, r, budget)
        hist = _block_sum_exponents(block.gram, r, j % (2 * r), _block_c1(L, block, c1))
        total = total * CycNum.from_exponent_counts(2 * r, hist)
    return total


def flux_sum_closed_form(L: EvenLattice, r: int, j: int, c1) -> CycNum:
    """The two flux sum identities for a rank-22 even unimodular lattice.

    j = 0: r^22 delta_{c1,0};  j != 0: r^11 exp(-pi i n_j c1^2 / r).
    """
    _check_dims(L, c1)
    half = L.rank // 2
    if j % r == 0:
        return CycNum.from_rational(r**L.rank * delta_div(L, c1, L.zero(), r), 2 * r)
    nj = n_j(r, j % r)
    k = square_mod_2r(L, c1, r)
    return CycNum.from_rational(r**half, 2 * r).mul_root(-nj * k)


# -- joint distribution ------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    """Counts of w in (Z/r)^rank by (w.c1 mod r, w^2 mod 2r)."""

    r: int
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def gauss_sum(self, j: int) -> CycNum:
        """sum N(m, k) zeta_r^m zeta_2r^(-j k), recomputed from the tallies."""
        r = self.r
        hist = [0] * (2 * r)
        for (m, k), n in self.counts.items():
            hist[(2 * m - j * k) % (2 * r)] += n
        return CycNum.from_exponent_counts(2 * r, hist)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "counts": [{"m": m, "k": k, "count": n} for (m, k), n in sorted(self.counts.items())],
        }


@lru_cache(maxsize=64)
def _block_joint(gram: tuple, r: int, gc1: tuple) -> tuple[tuple[int, ...], ...]:
    g = np.array(gram, dtype=np.int64)
    lin = np.array(gc1, dtype=np.int64)
    hist = np.zeros(r * 2 * r, dtype=np.int64)
    for chunk in _residue_chunks(len(gram), r):
        m = (chunk @ lin) % r
        k = np.einsum("ij,jk,ik->i", chunk, g, chunk) % (2 * r)
        hist += np.bincount(m * (2 * r) + k, minlength=2 * r * r)
    table = hist.reshape(r, 2 * r)
    return tuple(tuple(int(x) for x in row) for row in table)


def joint_distribution(L: EvenLattice, r: int, c1, budget: int = DEFAULT_BUDGET) -> JointDistribution:
    """Tally (w.c1 mod r, w^2 mod 2r) over (Z/r)^rank by block convolution."""
    _check_dims(L, c1)
    acc = {(0, 0): 1}
    for block in L.blocks:
        _check_budget(block, r, budget)
        table = _block_joint(block.gram, r, _block_c1(L, block, c1))
        nxt: dict = {}
        for (m1, k1), a in acc.items():
            for m2, row in enumerate(table):
                for k2, b in enumerate(row):
                    if b:
                        key = ((m1 + m2) % r, (k1 + k2) % (2 * r))
                        nxt[key] = nxt.get(key, 0) + a * b
        acc = nxt
    return JointDistribution(r, {key: n for key, n in acc.items() if n})


# -- vector parsing ----------------------------------------------------------

_TERM = re.compile(r"^\s*(?:(-?\d+)\s*\*\s*)?([A-Za-z][A-Za-z0-9_]*)\s*:\s*\(([^)]*)\)\s*$")


def parse_vector(text: str, L: EvenLattice | None = None) -> np.ndarray:
    """Parse a lattice vector.

    Accepted forms: ``zero``; a JSON array with one integer per basis vector;
    block shorthand such as ``U1:(1,0)`` or ``3*U1:(1,0)+E8_1:(1,0,0,0,0,0,0,0)``
    where block names are U1, U2, U3, E8_1, E8_2 for the K3 lattice.
    """
    L = L or k3_lattice()
    s = text.strip()
    if s.lower() in ("zero", "0"):
        return L.zero()
    if s.startswith("["):
        data = json.loads(s)
        if not all(isinstance(x, int) for x in data):
            raise ValueError("lattice vector entries must be integers")
        return L.vector(data)
    v = L.zero()
    for part in s.split("+"):
        mt = _TERM.match(part)
        if not mt:
            raise ValueError(f"cannot parse lattice vector term {part!r}")
        mult = int(mt.group(1)) if mt.group(1) else 1
        try:
            block = L.block(mt.group(2))
        except KeyError:
            raise ValueError(f"unknown block {mt.group(2)!r}") from None
        coords = [int(x) for x in mt.group(3).split(",") if x.strip()]
        if len(coords) != block.rank:
            raise ValueError(f"block {block.name} needs {block.rank} coordinates")
        v[block.slice()] += mult * np.array(coords, dtype=np.int64)
    return v
