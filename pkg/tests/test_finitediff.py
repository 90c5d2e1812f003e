"""Finite differences against sympy interpolation and hand-checked values."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from zygmund import finitediff as fd
from zygmund.corpus import make_function
from zygmund.errors import (
    DomainError,
    DuplicateNodeError,
    MissingDerivativeError,
    UnsupportedOrderError,
    ZeroStepError,
)

small_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=12)
nonzero_steps = st.fractions(min_value=-2, max_value=2, max_denominator=16).filter(lambda h: h != 0)
coeff_lists = st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=9), min_size=1, max_size=9)


def _sympy_divided(coeffs, nodes):
    # m! times the leading coefficient of the interpolating polynomial
    t = sympy.Symbol("t")
    p = sum(sympy.Rational(c.numerator, c.denominator) * t**k for k, c in enumerate(coeffs))
    pts = [(sympy.Rational(n.numerator, n.denominator), p.subs(t, sympy.Rational(n.numerator, n.denominator)))
           for n in nodes]
    q = sympy.Poly(sympy.interpolate(pts, t), t)
    m = len(nodes) - 1
    lead = q.coeff_monomial(t**m) if q.degree() >= m else 0
    return Fraction(str(sympy.factorial(m) * lead))


def test_forward_difference_of_monomial():
    # Delta^m_h t^m = m! h^m, and Delta^{m+1}_h t^m = 0
    for m in range(9):
        h = Fraction(3, 7)
        f = lambda t, m=m: t**m
        assert fd.forward_difference(f, Fraction(2), h, m) == math.factorial(m) * h**m
        assert fd.forward_difference(f, Fraction(2), h, m + 1) == 0


def test_forward_difference_small_case():
    f = lambda t: t**3
    # (x+2h)^3 - 2(x+h)^3 + x^3 at x=1, h=1: 27 - 16 + 1
    assert fd.forward_difference(f, 1, 1, 2) == 12


@given(coeff_lists, small_fracs, nonzero_steps, st.integers(0, 8))
def test_recursion_matches_closed_form(coeffs, x, h, m):
    p = fd.horner(coeffs)
    assert fd.forward_difference_closed(p, x, h, m) == fd.forward_difference_recursive(p, x, h, m)


def test_auto_uses_recursion_for_tiny_steps():
    h = 2.0**-30
    got = fd.forward_difference(np.sin, 0.3, h, 3)
    assert got == fd.forward_difference_recursive(np.sin, 0.3, h, 3)
    got = fd.forward_difference(np.sin, 0.3, 0.1, 3)
    assert got == fd.forward_difference_closed(np.sin, 0.3, 0.1, 3)


@given(coeff_lists, st.lists(st.integers(-40, 40), min_size=1, max_size=7, unique=True))
def test_divided_difference_against_sympy(coeffs, ints):
    nodes = [Fraction(i, 5) for i in ints]
    got = fd.divided_difference(fd.horner(coeffs), nodes)
    assert got == _sympy_divided(coeffs, nodes)
    assert fd.divided_difference_recursive(fd.horner(coeffs), nodes) == got


@given(coeff_lists, st.lists(st.integers(-40, 40), min_size=2, max_size=7, unique=True), st.randoms())
def test_divided_difference_symmetric(coeffs, ints, rnd):
    nodes = [Fraction(i, 3) for i in ints]
    perm = nodes[:]
    rnd.shuffle(perm)
    p = fd.horner(coeffs)
    assert fd.divided_difference(p, nodes) == fd.divided_difference(p, perm)


@given(coeff_lists, small_fracs, nonzero_steps, st.integers(0, 8))
def test_equidistant_quotient_is_divided_difference(coeffs, x, h, m):
    p = fd.horner(coeffs)
    nodes = [x + i * h for i in range(m + 1)]
    assert fd.equidistant_quotient(p, x, h, m) == fd.divided_difference(p, nodes)


@given(st.lists(coeff_lists, min_size=1, max_size=3), small_fracs, nonzero_steps, st.integers(0, 6))
def test_leibniz_exact(factor_coeffs, x, h, m):
    factors = [fd.horner(c) for c in factor_coeffs]
    lhs, rhs, _ = fd.leibniz_sides(factors, x, h, m)
    assert lhs == rhs


@given(coeff_lists, coeff_lists, small_fracs, nonzero_steps, st.sampled_from([1, 2]))
def test_chain_rule_exact(fc, gc, x, h, order):
    lhs, rhs, _ = fd.chain_rule_sides(fd.horner(fc), fd.horner(gc), x, h, order)
    assert lhs == rhs


def test_chain_rule_by_hand():
    f = lambda t: t * t
    g = lambda t: t + 1
    # Delta^2_1 (t+1)^2 = 2
    lhs, rhs, _ = fd.chain_rule_sides(f, g, 0, 1, 2)
    assert lhs == rhs == 2


@given(st.floats(-1, 1), st.floats(0.01, 0.3), st.integers(0, 8))
def test_float_leibniz_relative_residual(x, h, m):
    assert fd.verify_leibniz([np.sin, np.exp, np.cos], x, h, m) <= fd.TOL_EXACT


@given(st.floats(-1, 1), st.floats(-0.3, 0.3).filter(lambda h: abs(h) > 1e-3), st.sampled_from([1, 2]))
def test_float_chain_rule(x, h, order):
    assert fd.verify_chain_rule(np.sin, np.exp, x, h, order) <= fd.TOL_EXACT


@given(st.floats(-2, 2), st.floats(-0.5, 0.5).filter(lambda h: abs(h) > 1e-4))
def test_integral_identity(x, h):
    assert fd.verify_integral_identity(np.sin, x, h, fprime=np.cos) <= fd.TOL_QUAD


def test_integral_identity_uses_derivative_oracle():
    f = make_function("exp")
    assert fd.verify_integral_identity(f, 0.2, 0.3) <= fd.TOL_QUAD
    with pytest.raises(MissingDerivativeError):
        fd.verify_integral_identity(np.sin, 0.2, 0.3)


def test_errors():
    with pytest.raises(UnsupportedOrderError):
        fd.verify_chain_rule(np.sin, np.cos, 0.0, 0.1, 3)
    with pytest.raises(DuplicateNodeError):
        fd.divided_difference(np.sin, [0.0, 0.5, 0.0])
    with pytest.raises(ZeroStepError):
        fd.equidistant_quotient(np.sin, 0.0, 0.0, 2)
    with pytest.raises(DomainError):
        fd.forward_difference(math.log, -1.0, 0.1, 2)
    with pytest.raises(ValueError):
        fd.forward_difference(np.sin, 0.0, 0.1, -1)


def test_identity_suite_exact(rng):
    rows = fd.identity_suite(rng, trials=25, max_order=8)
    assert all(v == 0 for v in fd.max_residual(rows).values())


def test_float_identity_suite(rng):
    rows = fd.float_identity_suite([np.sin, np.cos, np.exp], rng, trials=50, max_order=8)
    assert max(fd.max_residual(rows).values()) <= fd.TOL_EXACT
