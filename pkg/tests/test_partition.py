import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import z_su_oracle

from vwk3.k3lattice import delta_div, k3_lattice, parse_vector, square
from vwk3.partition import (
    PartitionRequest,
    z_su,
    z_su_expr,
    z_su_from_invariants,
    z_su_modr,
    z_su_modr_expr,
    z_w,
    z_w_expr,
    z_w_from_euler,
)
from vwk3.qseries import PuiseuxSeries

GOLDEN = Path(__file__).parent / "golden"
L = k3_lattice()
vec = st.lists(st.integers(-4, 4), min_size=22, max_size=22).map(lambda xs: np.array(xs, dtype=np.int64))
primes = st.sampled_from([2, 3, 5])


def rational_terms(s):
    return {e: c.rational_value() for e, c in s.items()}


@pytest.mark.parametrize("r", [2, 3, 5])
@pytest.mark.parametrize("tag,c1", [("zero", "zero"), ("prim", "U1:(1,0)")])
def test_golden_z_su(r, tag, c1):
    frozen = json.loads((GOLDEN / f"z_su_r{r}_{tag}.json").read_text())
    got = z_su(PartitionRequest(r=r, c1=parse_vector(c1), order=Fraction(frozen["order"])))
    assert got == PuiseuxSeries.from_json(frozen["series"])


def test_z_su_r2_leading_terms():
    s = z_su(PartitionRequest(r=2, c1=L.zero(), order=3))
    assert rational_terms(s) == {-2: Fraction(1, 8), 0: 15, 1: 1600, 2: Fraction(176337, 2)}
    assert s.trunc == 3


@given(primes, vec)
def test_z_su_against_oracle(r, c1):
    order = Fraction(6, r)
    s = z_su(PartitionRequest(r=r, c1=c1, order=order))
    want = z_su_oracle(r, square(L, c1), bool(delta_div(L, c1, L.zero(), r)), order)
    assert rational_terms(s) == want


@given(primes, vec, vec)
def test_lift_independence(r, c1, gamma):
    a = PartitionRequest(r=r, c1=c1, order=Fraction(4, r))
    b = PartitionRequest(r=r, c1=c1 + r * gamma, order=Fraction(4, r))
    assert z_su(a) == z_su(b)
    assert z_su_modr(a) == z_su_modr(b)


@given(primes, vec)
def test_invariant_shorthand(r, c1):
    order = Fraction(5, r)
    full = z_su(PartitionRequest(r=r, c1=c1, order=order))
    short = z_su_from_invariants(r, square(L, c1), bool(delta_div(L, c1, L.zero(), r)), order)
    assert full == short


@given(primes, vec)
def test_z_w_matches_hilbert_scheme_assembly(r, w):
    if delta_div(L, w, L.zero(), r):
        return
    assert z_w(r, w, 3) == z_w_from_euler(r, w, 3)


@given(primes, vec, vec)
def test_z_w_from_euler_is_lift_independent(r, w, gamma):
    if delta_div(L, w, L.zero(), r):
        return
    assert z_w_from_euler(r, w, 2) == z_w_from_euler(r, w + r * gamma, 2)


@pytest.mark.parametrize("r", [2, 3, 5])
def test_trivial_class_is_r_times_su(r):
    assert z_w(r, L.zero(), 4) == z_su(PartitionRequest(r=r, c1=L.zero(), order=4)).scale(r)
    with pytest.raises(ValueError):
        z_w_from_euler(r, L.zero(), 4)


@pytest.mark.parametrize("r,c1", [(2, "zero"), (2, "U1:(1,1)"), (3, "U1:(1,0)"), (3, "U1:(1,2)")])
def test_routes_agree(r, c1):
    req = PartitionRequest(r=r, c1=parse_vector(c1), order=2)
    assert z_su_modr(req, "closed") == z_su_modr(req, "direct")


def test_exprs_expand_to_series():
    for r, c1 in [(2, "zero"), (3, "U1:(1,1)"), (5, "U1:(1,0)")]:
        v = parse_vector(c1)
        req = PartitionRequest(r=r, c1=v, order=2)
        assert z_su_expr(r, v).to_series(2) == z_su(req)
        assert z_su_modr_expr(r, v).to_series(2) == z_su_modr(req)
        assert z_w_expr(r, v).to_series(2) == z_w(r, v, 2)


@given(primes, vec)
def test_supports(r, c1):
    s = z_su(PartitionRequest(r=r, c1=c1, order=3))
    for e, _ in s.items():
        assert (e * r).denominator == 1
        assert e >= -r


def test_request_validation():
    with pytest.raises(ValueError):
        PartitionRequest(r=4, c1=L.zero())
    with pytest.raises(ValueError):
        PartitionRequest(r=3, c1=L.zero(), order=0)
    with pytest.raises(ValueError):
        z_su_from_invariants(3, 1, False, 2)
    with pytest.raises(ValueError):
        z_su_modr(PartitionRequest(r=3, c1=L.zero()), route="other")
