"""Grid seminorms against brute-force loops, growth fits and the classifier."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zygmund.corpus import make_function
from zygmund.errors import InsufficientScalesError, ParameterRangeError
from zygmund.seminorm import (
    GROWTH_TOL,
    ModulusSpec,
    SampledFn,
    classify,
    estimate_exponent,
    fit_growth,
    holder_seminorm,
    lambda_norm,
    lip_norm,
    sup_norm,
    zygmund_seminorm,
)


def _brute_zygmund(values, dx, r_min=4):
    # all grid pairs with x +- h inside, h = r dx for r >= r_min
    n = len(values)
    best = (-1.0, None, None)
    for r in range(r_min, (n - 1) // 2 + 1):
        for i in range(r, n - r):
            s = abs(values[i + r] - 2 * values[i] + values[i - r]) / (r * dx)
            if s > best[0]:
                best = (s, i, r)
    return best


def _brute_holder(values, dx, alpha, r_min=4):
    n = len(values)
    best = -1.0
    for r in range(r_min, n):
        for i in range(0, n - r):
            best = max(best, abs(values[i + r] - values[i]) / (r * dx) ** alpha)
    return best


@given(st.lists(st.floats(-10, 10), min_size=12, max_size=60))
def test_zygmund_all_scales_matches_brute_force(vals):
    dx = 1.0 / (len(vals) - 1)
    S = SampledFn((0.0, 1.0), dx, np.array(vals))
    got = zygmund_seminorm(S, h_mode="all")
    want, i, r = _brute_zygmund(np.array(vals), dx)
    assert got.value == pytest.approx(want, rel=1e-12, abs=1e-300)


@given(st.lists(st.floats(-10, 10), min_size=12, max_size=40), st.sampled_from([0.25, 0.5, 1.0]))
def test_holder_all_scales_matches_brute_force(vals, alpha):
    dx = 1.0 / (len(vals) - 1)
    S = SampledFn((0.0, 1.0), dx, np.array(vals))
    got = holder_seminorm(S, alpha, h_mode="all")
    assert got.value == pytest.approx(_brute_holder(np.array(vals), dx, alpha), rel=1e-12, abs=1e-300)


def test_witness_ties_prefer_smallest_x_then_smallest_h():
    # every admissible pair of a triangle wave has the same Zygmund quotient at the kinks
    vals = np.zeros(33)
    vals[16] = 1.0
    S = SampledFn((0.0, 1.0), 1 / 32, vals)
    got = zygmund_seminorm(S, h_mode="all")
    assert got.witness_x == (0.5,)
    assert got.witness_h == (4 / 32,)


def test_quadratic_seminorm_closed_form():
    # |Delta^2_h x^2| / h = 2h, maximal at the largest admissible h
    S = SampledFn.sample(make_function("poly:0,0,1"), (0.0, 1.0), n=1025)
    got = zygmund_seminorm(S)
    assert got.value == pytest.approx(2 * got.witness_h[0], rel=1e-12)
    assert got.witness_h[0] == 0.5


def test_holder_half_power_is_one():
    S = SampledFn.sample(make_function("power_abs:alpha=1/2"), (-1.0, 1.0), n=4097)
    assert holder_seminorm(S, 0.5).value == pytest.approx(1.0, abs=1e-12)


def test_lambda_norm_of_sine():
    # sup|sin| on [-1,1] plus sup |2 sin x (1 - cos h)| / h over dyadic h = 1/2^k,
    # and the recursive definition for s = 2
    S = SampledFn.sample(make_function("sin"), (-1.0, 1.0), n=4097, order=1)
    hs = [2.0**-k for k in range(1, 11)]
    zyg = max(2 * math.sin(1 - h) * (1 - math.cos(h)) / h for h in hs)
    assert lambda_norm(S, 1.0) == pytest.approx(math.sin(1) + zyg, rel=1e-9)
    c = SampledFn.sample(make_function("cos"), (-1.0, 1.0), n=4097)
    assert lambda_norm(S, 2.0) == pytest.approx(lambda_norm(S, 1.0) + lambda_norm(c, 1.0), rel=1e-12)
    assert lip_norm(S, 1) == pytest.approx(math.sin(1) + 1.0, rel=1e-3)
    assert sup_norm(S) == pytest.approx(math.sin(1), rel=1e-15)


def test_seminorm_grid_refinement():
    W = make_function("weierstrass:depth=20")
    vals = [zygmund_seminorm(SampledFn.sample(W, (0.0, 1.0), n=2**k + 1)).value for k in (12, 13, 14)]
    assert max(vals) - min(vals) < 0.05 * max(vals)


def test_sampled_fn_invariants():
    with pytest.raises(ValueError):
        SampledFn((0.0, 1.0), 0.25, np.zeros(4))
    with pytest.raises(ParameterRangeError):
        SampledFn((0.0, 1.0), 0.0, np.zeros(4))
    S = SampledFn((0.0, 1.0), 0.25, np.zeros(5))
    assert S.shape == (5,)
    with pytest.raises(ParameterRangeError):
        ModulusSpec("power", 1.5)


def test_growth_fit_cases():
    hs = np.array([2.0**-k for k in range(3, 13)])
    assert fit_growth(hs, 3.0 + 0 * hs).bounded
    assert fit_growth(hs, hs**-0.5).reason == "power divergence"
    log = fit_growth(hs, 1.0 + np.log(1 / hs))
    assert not log.bounded and log.reason == "logarithmic divergence"
    assert fit_growth([], []).bounded


@given(st.floats(0.5, 20.0), st.lists(st.floats(-0.02, 0.02), min_size=10, max_size=10))
def test_noisy_constant_is_bounded(level, noise):
    hs = np.array([2.0**-k for k in range(3, 13)])
    stats = level * (1 + np.array(noise))
    assert fit_growth(hs, stats).bounded


@given(st.floats(GROWTH_TOL + 0.05, 2.0))
def test_power_growth_is_unbounded(g):
    hs = np.array([2.0**-k for k in range(3, 13)])
    assert not fit_growth(hs, hs**-g).bounded


def test_estimate_exponent_half_power():
    S = SampledFn.sample(make_function("power_abs:alpha=1/2"), (-1.0, 1.0), n=65537)
    rep = estimate_exponent(S, 1)
    assert rep.exponent == pytest.approx(0.5, abs=0.05)


def test_estimate_saturates_on_smooth():
    S = SampledFn.sample(make_function("sin"), (-1.0, 1.0), n=65537)
    rep = estimate_exponent(S, 2)
    assert "saturated" in rep.flags


@pytest.mark.parametrize("spec, m", [("power_abs:alpha=1/2", 0), ("poly:1,-2,0,3", 0),
                                     ("tlog", 0), ("power_abs:alpha=1/2,p=1", 1)])
def test_classify_small_corpus(spec, m):
    f = make_function(spec)
    alphas = f.label.probe_alphas
    rep = classify(SampledFn.sample(f, f.domain, n=65537, order=m), m, alphas=alphas)
    assert rep.verdicts == f.label.verdicts(m, alphas)


def test_tlog_reports_logarithmic_divergence():
    f = make_function("tlog")
    rep = classify(SampledFn.sample(f, f.domain, n=65537), 0)
    assert rep.criteria["lipschitz"].fit.reason == "logarithmic divergence"


def test_verdicts_follow_from_recorded_table():
    f = make_function("weierstrass:depth=20")
    rep = classify(SampledFn.sample(f, f.domain, n=16385), 0)
    for name, crit in rep.criteria.items():
        kept = [r for r in crit.rows if r.kept]
        refit = fit_growth([r.h for r in kept], [r.statistic for r in kept])
        assert refit.bounded == crit.bounded
        if name in rep.verdicts:
            assert rep.verdicts[name] == crit.bounded
        hs = [r.h for r in crit.rows]
        assert all(a > b for a, b in zip(hs, hs[1:]))
        # dyadic multiples of 4 dx
        assert all(math.log2(h / (4 * rep.spacing)).is_integer() for h in hs)


def test_report_csv_columns():
    f = make_function("sin")
    rep = classify(SampledFn.sample(f, f.domain, n=4097), 0)
    header = rep.to_csv().splitlines()[0].split(",")
    assert header[1:] == ["h", "statistic", "witness_x"]


def test_classify_needs_enough_scales():
    with pytest.raises(InsufficientScalesError):
        classify(SampledFn.sample(make_function("sin"), (-1.0, 1.0), n=65), 0)


def test_two_dimensional_seminorm():
    f = make_function("tensor(poly:0,0,1, const:0)")
    S = SampledFn.sample(f, ((0.0, 1.0), (0.0, 1.0)), n=65)
    # x^2 along the first axis: quotient 2|h_x|^2/|h|, largest for h along e_1
    got = zygmund_seminorm(S)
    assert got.value == pytest.approx(2 * abs(got.witness_h[0]) ** 2 / np.linalg.norm(got.witness_h))
    assert got.witness_h[1] == 0.0
