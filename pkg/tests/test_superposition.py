"""Faa di Bruno samples, translation curves and the Lipschitz dichotomy."""

import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from zygmund import finitediff
from zygmund.corpus import make_function
from zygmund.errors import BudgetError, ParameterRangeError
from zygmund.seminorm import lambda_norm
from zygmund.superposition import (
    CutoffIdentity,
    SuperpositionExperiment,
    classify_superposition,
    compositions,
    faa_di_bruno_terms,
    lipschitz_ratio_test,
    mixed_statistic,
    superpose,
    translation_curve_norm,
)


@pytest.mark.parametrize("j", range(1, 8))
def test_faa_di_bruno_coefficients_sum_to_stirling(j):
    # sum over gamma in Gamma(i, j) of j!/(i! gamma!) is the Stirling number S(j, i)
    for i in range(1, j + 1):
        total = sum(c for ii, _, c in faa_di_bruno_terms(j) if ii == i)
        assert total == sympy.functions.combinatorial.numbers.stirling(j, i)


def test_compositions_are_positive_parts():
    got = sorted(compositions(4, 2))
    assert got == [(1, 3), (2, 2), (3, 1)]


def test_identity_outer_function():
    g = make_function("sin")
    S = superpose(make_function("poly:0,1"), g, (-1.0, 1.0), 2.0**-6, order=3)
    x = S.axis()
    assert np.allclose(S.values, np.sin(x), atol=1e-15)
    for k in range(1, 4):
        assert np.allclose(S.derivative((k,)), g.derivative(x, k), atol=1e-15)


def test_square_of_sine():
    S = superpose(make_function("poly:0,0,1"), make_function("sin"), (-1.0, 1.0), 2.0**-6, order=2)
    assert np.allclose(S.derivative((2,)), 2 * np.cos(2 * S.axis()), atol=1e-14)


def _mp_central(fn, x, j, h):
    # centered j-th difference quotient in 50-digit arithmetic
    with mpmath.workdps(50):
        h = mpmath.mpf(h)
        total = sum((-1) ** i * math.comb(j, i) * fn(x + (j / 2 - i) * h) for i in range(j + 1))
        return float(total / h**j)


@pytest.mark.parametrize("outer, inner, fo, fi", [
    ("exp", "poly:0,1,-1,2", mpmath.exp, lambda t: t - t**2 + 2 * t**3),
    ("sin", "exp", mpmath.sin, mpmath.exp),
    ("cos", "sin", mpmath.cos, mpmath.sin),
])
@pytest.mark.parametrize("j", range(1, 5))
def test_faa_di_bruno_against_difference_probes(outer, inner, fo, fi, j):
    S = superpose(make_function(outer), make_function(inner), (-0.5, 0.5), 2.0**-3, order=j)
    x = S.axis()
    probe = [_mp_central(lambda t: fo(fi(t)), mpmath.mpf(float(v)), j, 1e-4) for v in x]
    assert np.allclose(S.derivative((j,)), probe, atol=1e-6, rtol=1e-6)


def test_budget_error():
    with pytest.raises(BudgetError):
        superpose(make_function("power_abs:alpha=1/2,p=1"), CutoffIdentity(), order=2)


def test_cutoff_identity():
    g = CutoffIdentity(1.0)
    x = np.linspace(-1, 1, 101)
    assert np.array_equal(g(x), x)
    assert np.all(g(np.linspace(2.0, 2.5, 11)) == 0)
    assert np.allclose(g.derivative(x, 1), 1.0)
    y = np.linspace(-1.9, 1.9, 77)
    h = 1e-6
    assert np.allclose(g.derivative(y, 2), (g.derivative(y + h, 1) - g.derivative(y - h, 1)) / (2 * h),
                       atol=1e-5)


def test_translation_curve_at_zero():
    f, g = make_function("sin"), CutoffIdentity()
    F = superpose(f, g, order=1)
    assert translation_curve_norm(f, g, 1, 0.0) == lambda_norm(F, 2)
    with pytest.raises(ParameterRangeError):
        translation_curve_norm(f, g, 1, 1.5)


def test_translation_curve_refinement():
    f, g = make_function("sin"), CutoffIdentity()
    a = translation_curve_norm(f, g, 1, 0.25, spacing=2.0**-10)
    b = translation_curve_norm(f, g, 1, 0.25, spacing=2.0**-11)
    assert abs(a - b) <= 0.02 * abs(b)


def test_translation_curve_finite_for_cusp_power():
    f = make_function("power_abs:alpha=1/2,p=2")
    assert math.isfinite(translation_curve_norm(f, CutoffIdentity(), 1, 0.5))


@given(st.integers(1, 3), st.sampled_from([2.0**-k for k in range(3, 9)]), st.floats(-0.5, 0.5))
def test_mixed_statistic_on_diagonal_is_equidistant_quotient(k, t, x0):
    # Delta^k_t Delta^2_t f^(m) = Delta^{k+2}_t f^(m), so the statistic is t * delta^{k+2}_eq
    f, m = make_function("exp"), 1
    interval = (x0, x0 + (k + 2) * t)
    got = mixed_statistic(f, m, k, t, t, interval, spacing=t)
    fm = lambda u: f.derivative(u, m)
    want = abs(t * finitediff.equidistant_quotient(fm, x0, t, k + 2))
    # both routes cancel 2^(k+2) terms of size about e^x, so compare at rounding level
    scale = 2.0 ** (k + 2) * math.exp(x0 + (k + 2) * t) / t ** (k + 1)
    assert abs(got - want) <= 64 * np.finfo(float).eps * scale


def test_mixed_statistic_annihilates_low_degree():
    f = make_function("poly:1,2,3")  # f' has degree 1 = k
    assert mixed_statistic(f, 1, 1, 2.0**-4, 2.0**-4, (-1.0, 1.0), 2.0**-8) < 1e-9


def test_experiment_scale_validation():
    with pytest.raises(ParameterRangeError):
        SuperpositionExperiment(make_function("sin"), t_scales=(0.3,))
    with pytest.raises(ParameterRangeError):
        SuperpositionExperiment(make_function("sin"), t_scales=(2.0**-13,))


def test_sine_ratios_bounded():
    rep = lipschitz_ratio_test(SuperpositionExperiment(make_function("sin")))
    assert rep.ratio_fit["growth"] <= 0.1
    assert rep.lipschitz_compatible


def test_cusp_power_mixed_growth():
    rep = lipschitz_ratio_test(SuperpositionExperiment(make_function("power_abs:alpha=1/2,p=2")))
    assert rep.mixed_fit["growth"] == pytest.approx(0.5, abs=0.1)
    assert not rep.lipschitz_compatible


@pytest.mark.parametrize("spec, predicted", [
    ("exp", True),
    ("power_abs:alpha=1/2,p=2", False),
    ("antideriv:m=2,method=closed(weierstrass:depth=20)", True),
])
def test_classify_superposition(spec, predicted):
    res = classify_superposition(make_function(spec), 1, 1)
    assert res["predicted"] is predicted
    assert res["agree"]
