from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vwk3.cycnum import root_of_unity
from vwk3.k3lattice import k3_lattice, parse_vector
from vwk3.sduality import (
    ConvergenceError,
    DeltaAtom,
    ModularExpr,
    atom_tail_bound,
    delta_product,
    eval_numeric,
    parse_tau,
    s_transform,
    verify_numeric,
    verify_symbolic,
)
from vwk3.qseries import hilb_coefficients

L = k3_lattice()
primes = st.sampled_from([2, 3, 5, 7])


def product_value(e: ModularExpr, tau):
    """Evaluate through the q-product for Delta, bypassing all series code."""
    with mpmath.workdps(30):
        tau = mpmath.mpc(tau)
        total = mpmath.mpc(0)
        for atom, c in e.terms.items():
            total += c.embed(30) / delta_product(atom.argument(tau), 30)
        return total * tau**e.weight


def test_atom_canonical_forms():
    assert DeltaAtom.shifted(0, 1) == DeltaAtom.scaled_up(1)
    assert DeltaAtom.shifted(7, 5) == DeltaAtom.shifted(2, 5)
    with pytest.raises(ValueError):
        DeltaAtom("other", 2)


def test_parse_tau():
    with mpmath.workdps(30):
        assert parse_tau("i") == mpmath.mpc(0, 1)
        assert abs(parse_tau("exp(i*pi/3)") - mpmath.expjpi(mpmath.mpf(1) / 3)) < 1e-28
        assert parse_tau("0.5+1.5i") == mpmath.mpc(0.5, 1.5)


def test_delta_transformation_law():
    tau = mpmath.mpc(0.3, 1.1)
    with mpmath.workdps(30):
        lhs = delta_product(-1 / tau, 30)
        rhs = tau**12 * delta_product(tau, 30)
        assert abs(lhs - rhs) < 1e-20 * abs(rhs)


def test_series_evaluation_agrees_with_product():
    tau = mpmath.mpc(0.1, 0.9)
    for atom in [DeltaAtom.scaled_up(3), DeltaAtom.shifted(0, 3), DeltaAtom.shifted(2, 5)]:
        e = ModularExpr.atom(atom)
        series_val = eval_numeric(e, tau, truncation=40, precision=20)
        assert abs(series_val - product_value(e, tau)) < 1e-15 * abs(series_val)


@st.composite
def level_r_expr(draw):
    r = draw(primes)
    atoms = [DeltaAtom.scaled_up(r)] + [DeltaAtom.shifted(j, r) for j in range(r)]
    terms = {a: root_of_unity(2 * r, draw(st.integers(0, 2 * r))) * draw(st.integers(-3, 3))
             for a in draw(st.lists(st.sampled_from(atoms), min_size=1, max_size=4, unique=True))}
    return r, ModularExpr(draw(st.integers(-14, 2)), terms)


taus = st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.9, 1.4))


@given(level_r_expr(), taus)
def test_s_transform_numerically(re, tau):
    r, e = re
    if not e.terms:
        return
    got = product_value(s_transform(e, r), tau)
    want = product_value(e, -1 / mpmath.mpc(tau))
    assert abs(got - want) <= 1e-12 * max(abs(want), mpmath.mpf(1e-30))


@given(level_r_expr())
def test_s_transform_is_an_involution(re):
    r, e = re
    assert s_transform(s_transform(e, r), r) == e


@pytest.mark.parametrize("r", [2, 3, 5, 7])
@pytest.mark.parametrize("c1", ["zero", "U1:(1,0)", "U1:(1,1)", "U1:(1,-1)+E8_1:(1,0,0,0,0,0,0,0)"])
def test_symbolic_identity_with_corrected_prefactor(r, c1):
    assert verify_symbolic(r, parse_vector(c1), prefactor_exponent=-12).passed


@pytest.mark.parametrize("r", [2, 3, 5])
def test_default_prefactor_is_off_by_r(r):
    rep = verify_symbolic(r, L.zero())
    assert not rep.passed
    assert set(rep.ratios().values()) == {r}
    assert rep.to_json()["pass"] is False


def test_symbolic_detects_wrong_rhs():
    from vwk3.partition import z_su_modr_expr

    bad = z_su_modr_expr(3, L.zero()) + ModularExpr.atom(DeltaAtom.shifted(1, 3), Fraction(1, 9))
    assert not verify_symbolic(3, L.zero(), prefactor_exponent=-12, modr_expr=bad).passed


def test_numeric_r2_at_i():
    rep = verify_numeric(2, L.zero(), taus=("i",), tol=1e-8, prefactor_exponent=-12)
    assert rep.passed and rep.samples[0]["rel_error"] < 1e-8


def test_numeric_default_prefactor_fails():
    rep = verify_numeric(3, L.zero(), taus=("i",), prefactor_exponent=-11)
    assert not rep.passed
    assert abs(rep.samples[0]["rel_error"] - (1 - 1 / 3)) < 1e-9


def test_numeric_refuses_vanishing_value():
    # r = 2, c1 = U1:(1,1) has c1^2 = 2; both sides vanish at exp(2 pi i / 3)
    with pytest.raises(ConvergenceError):
        verify_numeric(2, parse_vector("U1:(1,1)"), taus=("exp(i*pi/3)",), prefactor_exponent=-12)


def test_numeric_refuses_short_truncation():
    with pytest.raises(ConvergenceError):
        verify_numeric(2, L.zero(), taus=("i",), truncation=4, tol=1e-12, prefactor_exponent=-12)


@pytest.mark.parametrize("x,n0", [(0.2, 5), (0.0019, 10), (0.5, 30)])
def test_tail_bound_dominates_actual_tail(x, n0):
    h = hilb_coefficients(400)
    actual = sum(c * x ** (n - 1) for n, c in enumerate(h) if n >= n0)
    assert atom_tail_bound(x, n0) >= actual
