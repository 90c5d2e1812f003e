"""Stencil coefficients against an independent sympy solve, and error orders."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from zygmund import stencil as sm
from zygmund.corpus import make_function
from zygmund.errors import MissingStencilError, ParameterRangeError


def _sympy_coefficients(m, kind):
    a = sympy.symbols(f"a0:{m + 1}")
    target = sympy.Rational(1) if kind == "holder" else 1 / (sympy.Rational(1, 2 ** (m - 1)) - 2)
    eqs = [sum(a[j] * sympy.Integer(j) ** i for j in range(m + 1)) - (target if i == 1 else 0)
           for i in range(m + 1)]
    sol = sympy.solve(eqs, a, dict=True)[0]
    return tuple(Fraction(str(sol[s])) for s in a)


@pytest.mark.parametrize("kind", sm.KINDS)
@pytest.mark.parametrize("m", range(1, 7))
def test_coefficients_against_sympy(m, kind):
    assert sm.make_stencil(m, kind).coefficients == _sympy_coefficients(m, kind)


def test_small_orders_by_hand():
    assert sm.get_stencil(1, "zygmund").coefficients == (1, -1)
    assert sm.get_stencil(1, "holder").coefficients == (-1, 1)
    assert sm.get_stencil(2, "zygmund").coefficients == (1, Fraction(-4, 3), Fraction(1, 3))


@given(st.integers(1, sm.MAX_ORDER), st.sampled_from(sm.KINDS))
def test_moment_conditions_exact(m, kind):
    st_ = sm.get_stencil(m, kind)
    moments = st_.moments()
    target = 1 if kind == "holder" else 1 / (Fraction(1, 2 ** (m - 1)) - 2)
    assert moments[1] == target
    assert all(moments[i] == 0 for i in range(m + 1) if i != 1)


def test_bareiss_against_numpy():
    A = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    b = [Fraction(1), Fraction(2, 3), Fraction(-5)]
    x = sm.bareiss_solve(A, b)
    assert np.allclose(np.array(A, float) @ np.array([float(v) for v in x]), [float(v) for v in b])


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("kind", sm.KINDS)
@pytest.mark.parametrize("name", ["sin", "exp"])
def test_error_slopes(m, kind, name):
    f = make_function(name)
    slope = sm.error_slope(f, m, kind, x=0.3)
    assert slope >= m + 0.9


@given(st.integers(1, 8), st.sampled_from(sm.KINDS), st.data())
def test_exact_on_polynomials(m, kind, data):
    coeffs = data.draw(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=1, max_size=m + 1))
    p = make_function("poly:" + ",".join(str(c) for c in coeffs))
    x = data.draw(st.fractions(-2, 2, max_denominator=9))
    h = data.draw(st.fractions(1, 1, max_denominator=32) | st.fractions(-1, 1, max_denominator=32).filter(bool))
    assert sm.stencil_error(p, m, kind, x, h) == 0
    assert sm.taylor_remainder(p, m, x, h) == 0


def test_taylor_weights():
    for m in range(9):
        w = sm.TaylorCoeffs.of_order(m).weights
        assert w[m] == 1
        assert all(a > b for a, b in zip(w, w[1:]))
        assert all(v < 2 for v in w)


@pytest.mark.parametrize("m", range(0, 5))
def test_taylor_slope(m):
    assert sm.taylor_slope(make_function("sin"), m, x=0.4) >= m + 0.9


def test_taylor_remainder_by_hand():
    # m=0: f(x+2h) - 2 f(x+h) + f(x)
    f = make_function("poly:0,0,1")
    assert sm.taylor_remainder(f, 0, Fraction(1), Fraction(1)) == 9 - 8 + 1


@pytest.mark.parametrize("m", range(1, 6))
def test_certified_order(m):
    assert sm.get_stencil(m, "zygmund").certified_order >= m + 0.9
    assert sm.get_stencil(m, "holder").certified_order >= m + 0.9


def test_json_round_trip():
    s = sm.make_stencil(4, "zygmund")
    back = sm.Stencil.from_json(s.to_json())
    assert back == s
    d = s.to_dict()
    assert set(d) >= {"m", "kind", "coefficients", "certified_order"}
    assert all("/" in c for c in d["coefficients"])


def test_lookup_errors():
    with pytest.raises(MissingStencilError):
        sm.apply_Am(np.sin, 13, 0.0, 0.1)
    with pytest.raises(MissingStencilError):
        sm.apply_Am(np.sin, 2, 0.0, 0.1, stencil=sm.get_stencil(3))
    with pytest.raises(ParameterRangeError):
        sm.make_stencil(0)
    with pytest.raises(ParameterRangeError):
        sm.make_stencil(2, "taylor")


def _ceil_div(a, b):
    return -(-a // b)


@given(st.integers(1, 6), st.fractions(0, 1, max_denominator=50).filter(lambda b: b > 0),
       st.fractions(0, 1, max_denominator=50).filter(lambda a: a > 0))
def test_cusp_loss_ceiling_arithmetic(m, beta, alpha):
    got = sm.cusp_loss(m, beta, alpha)
    p = _ceil_div(2 * beta.denominator, beta.numerator)
    q = _ceil_div(beta.denominator, beta.numerator)
    assert (got.p, got.q, got.required_order) == (p, q, m * p)
    assert got.output_exponent == alpha * beta / (2 * q)


def test_cusp_loss_float_input():
    # 2 / (2/3) is 3.0000000000000004 in binary64
    assert sm.cusp_loss(1, 2 / 3, 1.0).p == 3
    with pytest.raises(ParameterRangeError):
        sm.cusp_loss(1, 0, 1)
