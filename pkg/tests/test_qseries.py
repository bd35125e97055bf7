import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import colored_partitions, delta_oracle

from vwk3.cycnum import CycNum, root_of_unity
from vwk3.qseries import (
    PuiseuxSeries,
    delta,
    delta_coefficients,
    hilb_coefficients,
    hilb_series,
    invert,
    rotate,
    scale_exponent,
    sector_extract,
    substitute,
)

GOLDEN = Path(__file__).parent / "golden"


def test_delta_first_terms():
    assert delta_coefficients(5) == (1, -24, 252, -1472, 4830)
    d = delta(5)
    assert d.coefficient(1) == 1 and d.coefficient(5) == 4830
    assert d.trunc == 6


def test_delta_against_pentagonal_oracle():
    assert list(delta_coefficients(40)) == delta_oracle(40)


def test_hilb_against_partition_oracle():
    assert list(hilb_coefficients(30)) == colored_partitions(30)


@pytest.mark.parametrize("name,fn", [("delta_50", delta_coefficients), ("hilb_50", hilb_coefficients)])
def test_golden_coefficients(name, fn):
    frozen = json.loads((GOLDEN / f"{name}.json").read_text())["coefficients"]
    assert list(fn(50)) == frozen


def test_hilb_times_delta_is_one():
    # trunc of a product: min(T_a + v_b, T_b + v_a) = min(8 + 1, 10 - 1)
    prod = hilb_series(8) * delta(9)
    assert prod.trunc == 9
    assert prod == PuiseuxSeries({0: 1}, trunc=9)


def test_hilb_series_shape():
    h = hilb_series(4)
    assert h.valuation() == -1 and h.trunc == 4
    assert [int(c.rational_value()) for _, c in h.items()] == [1, 24, 324, 3200, 25650]


def test_truncation_is_honest():
    h = hilb_series(3)
    with pytest.raises(ValueError):
        h.coefficient(3)
    assert h.coefficient(Fraction(1, 2)) == 0


def test_substitute_r2_signs():
    s = substitute(hilb_series(3), 2, 1)
    assert s.denom == 2 and s.trunc == Fraction(3, 2)
    vals = [c for _, c in s.items()]
    assert vals[:3] == [CycNum.from_rational(-1), 24, -324]


def test_scale_exponent():
    s = scale_exponent(hilb_series(2), 3)
    assert s.exponents() == [-3, 0, 3] and s.trunc == 6


def test_json_roundtrip():
    s = substitute(hilb_series(3), 3, 2)
    assert PuiseuxSeries.from_json(json.loads(json.dumps(s.to_json()))) == s


def test_sector_extract_rejects_fractional():
    with pytest.raises(ValueError):
        sector_extract(substitute(hilb_series(2), 2, 1), 2, 0)


coeff = st.integers(-50, 50)


@st.composite
def power_series(draw, max_len=25):
    n = draw(st.integers(1, max_len))
    return PuiseuxSeries(dict(enumerate(draw(st.lists(coeff, min_size=n, max_size=n)))), trunc=n)


@given(power_series(), st.integers(1, 7), st.data())
def test_sector_methods_agree(s, r, data):
    k = data.draw(st.integers(0, r - 1))
    assert sector_extract(s, r, k, "filter") == sector_extract(s, r, k, "roots")


@given(power_series(), st.integers(1, 6))
def test_sectors_partition_the_series(s, r):
    total = sector_extract(s, r, 0)
    for k in range(1, r):
        total = total + sector_extract(s, r, k)
    assert total == s


@given(power_series(), st.integers(1, 5), st.integers(0, 4))
def test_rotate_is_substitute_then_rescale(s, r, j):
    assert scale_exponent(substitute(s, r, j), r) == rotate(s, r, j).with_denom(r)


@given(power_series(12), power_series(12))
def test_product_commutes_and_truncates(a, b):
    p = a * b
    assert p == b * a
    if not (a.is_zero() or b.is_zero()):
        assert p.trunc == min(a.trunc + b.valuation(), b.trunc + a.valuation())


@given(power_series(12))
def test_invert(s):
    if s.coefficient(0).is_zero():
        return
    assert (s * invert(s)).agrees_with(PuiseuxSeries({0: 1}), upto=s.trunc)


@given(st.integers(2, 6), st.integers(0, 5))
def test_substitute_full_orbit_sum(r, k):
    # sum_j substitute(q^k, r, j) keeps q^(k/r) only when r | k
    m = PuiseuxSeries({k: 1}, trunc=k + 1)
    total = substitute(m, r, 0)
    for j in range(1, r):
        total = total + substitute(m, r, j)
    expect = r if k % r == 0 else 0
    assert total.coefficient(Fraction(k, r)) == expect


def test_roots_of_unity_coefficient_field():
    s = substitute(hilb_series(2), 5, 1)
    assert s.coefficient(Fraction(1, 5)) == root_of_unity(5) * 324
