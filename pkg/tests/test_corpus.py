"""Corpus functions against mpmath integrals and finite-difference probes."""

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from zygmund import bump
from zygmund.corpus import CORPUS, canonical, holder_key, make_function, parse_spec
from zygmund.errors import DomainError, MissingDerivativeError, ParameterRangeError, SpecParseError

mpmath.mp.dps = 30


@pytest.mark.parametrize("spec", CORPUS)
def test_canonical_round_trip(spec):
    once = canonical(spec)
    assert canonical(once) == once


@pytest.mark.parametrize("spec", [
    "weierstrass:depth=20", "power_abs:alpha=0.5", "antideriv:m=1(weierstrass:depth=20)",
    "tensor(power_abs:alpha=0.5, poly:1,0,2)", "tensor(tlog, 0)",
])
def test_documented_examples_parse(spec):
    make_function(spec)


@pytest.mark.parametrize("text, token, pos", [
    ("weierstrass:dept=20", "dept", 12),
    ("sinh", "sinh", 0),
    ("tensor(sin, cos", "<end>", 15),
    ("power_abs:alpha=", "<end>", 16),
    ("antideriv:m=1.5(sin)", "m", 10),
])
def test_parse_errors_report_token_and_position(text, token, pos):
    with pytest.raises(SpecParseError) as info:
        make_function(text)
    assert info.value.token == token
    assert info.value.position == pos
    assert str(pos) in str(info.value)


def test_parameter_ranges():
    with pytest.raises(ParameterRangeError):
        make_function("power_abs:alpha=1.5")
    with pytest.raises(ParameterRangeError):
        make_function("weierstrass:depth=0")
    with pytest.raises(ParameterRangeError):
        make_function("tensor(sin, sin, sin, sin)")


@pytest.mark.parametrize("spec", ["sin", "cos", "exp", "poly:1,-2,0,3", "bump:radius=1",
                                  "power_abs:alpha=1/2,p=2", "weierstrass:depth=6"])
def test_first_derivative_matches_central_difference(spec):
    f = make_function(spec)
    lo, hi = f.domain
    x = np.linspace(lo + 0.1, hi - 0.1, 17)
    x = x[np.abs(x) > 0.05]
    if f.max_order < 1:
        f = make_function(f"antideriv:m=1,method=closed({spec})")
    h = 1e-6
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert np.allclose(f.derivative(x, 1), fd, atol=1e-6, rtol=1e-6)


def test_weierstrass_values():
    f = make_function("weierstrass:depth=3")
    x = 0.7
    want = sum(2.0**-k * np.sin(2.0**k * x) for k in range(3))
    assert f(x) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("spec, fn", [
    ("tlog", lambda t: -t * mpmath.log(abs(t)) if t != 0 else 0),
    ("power_abs:alpha=1/2", lambda t: abs(t) ** mpmath.mpf("0.5")),
    ("sin", mpmath.sin),
])
def test_quadrature_antiderivative_against_mpmath(spec, fn):
    F = make_function(f"antideriv:m=1({spec})")
    lo, hi = F.domain
    xs = np.linspace(lo, hi, 7)
    for x in xs:
        want = float(mpmath.quad(fn, [0, x]) if x >= 0 else -mpmath.quad(fn, [x, 0]))
        assert F(np.array([x]))[0] == pytest.approx(want, abs=1e-13)


def test_second_antiderivative_cauchy_formula():
    F = make_function("antideriv:m=2(power_abs:alpha=1/2)")
    x = 0.6
    want = float(mpmath.quad(lambda t: (x - t) * mpmath.sqrt(abs(t)), [0, x]))
    assert F(np.array([x]))[0] == pytest.approx(want, abs=1e-13)


def test_closed_and_quadrature_antiderivatives_agree():
    x = np.linspace(0.0, 1.0, 257)
    a = make_function("antideriv:m=1(weierstrass:depth=12)")(x)
    b = make_function("antideriv:m=1,method=closed(weierstrass:depth=12)")(x)
    assert np.max(np.abs(a - b)) < 1e-12


def test_derivative_budget():
    with pytest.raises(MissingDerivativeError):
        make_function("weierstrass:depth=20").derivative(0.3, 1)
    with pytest.raises(MissingDerivativeError):
        make_function("power_abs:alpha=1/2,p=1").derivative(0.3, 2)


def test_tensor_partials():
    f = make_function("tensor(sin, poly:0,0,1)")
    pts = np.array([[0.3, 0.5], [-0.2, 0.1]])
    assert np.allclose(f(pts), np.sin(pts[:, 0]) + pts[:, 1] ** 2)
    assert np.allclose(f.partial(pts, (1, 0)), np.cos(pts[:, 0]))
    assert np.allclose(f.partial(pts, (0, 2)), 2.0)
    assert np.allclose(f.partial(pts, (1, 1)), 0.0)
    with pytest.raises(DomainError):
        f.derivative(pts, 1)


def test_labels():
    w = make_function("weierstrass:depth=20").label
    assert w.verdicts(0, (0.5,)) == {"zygmund": True, "lipschitz": False, holder_key(0.5): True}
    p = make_function("power_abs:alpha=1/4").label
    assert p.holder(0, 0.25) and not p.holder(0, 0.35)
    a = make_function("antideriv:m=1(weierstrass:depth=20)").label
    assert a.verdicts(1)["zygmund"] and not a.verdicts(1)["lipschitz"]
    assert a.verdicts(0)["lipschitz"]


@given(st.floats(-0.999, 0.999), st.integers(0, 6))
def test_bump_derivative_against_difference(u, k):
    h = 1e-6
    fd = (bump.phi(np.array([u + h]), k) - bump.phi(np.array([u - h]), k)) / (2 * h)
    exact = bump.phi(np.array([u]), k + 1)
    assert np.allclose(exact, fd, rtol=1e-4, atol=1e-4 * max(1.0, float(np.abs(exact).max())))


def test_transition_profile():
    u = np.linspace(-1.5, 1.5, 301)
    w = bump.transition(u)
    assert np.all(np.diff(w) >= -1e-15)
    assert w[0] == 0 and w[-1] == 1
    assert bump.transition(np.array([0.0]))[0] == pytest.approx(0.5, abs=1e-15)
    norm = float(mpmath.quad(lambda t: mpmath.exp(-1 / (1 - t * t)), [-1, 1]))
    assert bump.NORMALIZER == pytest.approx(norm, rel=1e-13)
    # W(u) + W(-u) = 1
    assert np.allclose(bump.transition(u) + bump.transition(-u), 1.0, atol=1e-15)


def test_poly_exact_on_fractions():
    p = make_function("poly:1,-2,0,3")
    assert p(Fraction(1, 2)) == 1 - 1 + Fraction(3, 8)
    assert parse_spec("poly:1,-2,0,3").positional == [1, -2, 0, 3]
