import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special
from scipy import stats as sps

from gamedyn.stats import paired_ttest, reg_inc_beta, significance_label, slope_ttest, t_cdf


def _t_density(x, df):
    c = math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2)) / math.sqrt(df * math.pi)
    return c * (1 + x * x / df) ** (-(df + 1) / 2)


def test_reg_inc_beta_boundaries_and_closed_forms():
    assert reg_inc_beta(0.0, 2, 3) == 0.0
    assert reg_inc_beta(1.0, 2, 3) == 1.0
    for x in (0.1, 0.37, 0.9):
        assert reg_inc_beta(x, 1, 1) == pytest.approx(x, abs=1e-14)
    # Beta(2,2) cdf is 3x^2 - 2x^3
    assert reg_inc_beta(0.5, 2, 2) == pytest.approx(0.5, abs=1e-14)
    assert reg_inc_beta(0.3, 2, 2) == pytest.approx(3 * 0.09 - 2 * 0.027, abs=1e-13)


def test_reg_inc_beta_domain():
    with pytest.raises(ValueError):
        reg_inc_beta(1.2, 1, 1)
    with pytest.raises(ValueError):
        reg_inc_beta(0.5, 0, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0).filter(lambda x: 1.0 - (1.0 - x) == x), st.floats(0.05, 500.0), st.floats(0.05, 500.0))
def test_reg_inc_beta_matches_scipy_and_symmetry(x, a, b):
    v = reg_inc_beta(x, a, b)
    assert v == pytest.approx(special.betainc(a, b, x), abs=1e-12)
    assert v + reg_inc_beta(1 - x, b, a) == pytest.approx(1.0, abs=1e-12)


def test_t_cdf_closed_forms():
    assert t_cdf(0.0, 7) == 0.5
    assert t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-12)
    for t in (-30.0, -2.5, 0.3, 4.0, 100.0):
        assert t_cdf(t, 1) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-10)
    assert t_cdf(math.inf, 3) == 1.0
    assert t_cdf(-math.inf, 3) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-100.0, 100.0), st.integers(1, 10_000))
def test_t_cdf_symmetry_and_accuracy(t, df):
    assert t_cdf(t, df) + t_cdf(-t, df) == pytest.approx(1.0, abs=1e-12)
    assert t_cdf(t, df) == pytest.approx(sps.t.cdf(t, df), abs=1e-10)


def test_t_cdf_monotone():
    for df in (1, 2, 9, 119, 5000):
        grid = np.linspace(-50, 50, 2001)
        vals = [t_cdf(t, df) for t in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_ttest_symmetric_samples():
    r = paired_ttest([1, -1] * 5)
    assert r.t_statistic == 0.0
    assert r.p_two_sided == 1.0


def test_ttest_worked_example():
    x = np.array([1.0] * 5 + [0.0] * 5)
    x = 0.5 + (x - x.mean()) * 0.5 / x.std(ddof=1)  # mean 0.5, sd 0.5
    r = paired_ttest(x)
    assert r.degrees_of_freedom == 9
    assert r.t_statistic == pytest.approx(math.sqrt(10), abs=1e-4)
    tail, _ = integrate.quad(_t_density, r.t_statistic, math.inf, args=(9,), epsabs=1e-14)
    assert r.p_two_sided == pytest.approx(2 * tail, abs=1e-9)
    assert r.p_two_sided == pytest.approx(0.0115, abs=1e-3)


def test_ttest_zero_variance_rule():
    assert paired_ttest([0.0] * 6).p_two_sided == 1.0
    r = paired_ttest([0.3] * 6)
    assert r.p_two_sided == 0.0 and r.t_statistic == math.inf


def test_ttest_needs_two_samples():
    with pytest.raises(ValueError):
        paired_ttest([1.0])


def test_ttest_scale_invariance():
    x = np.array([0.2, -0.1, 0.5, 0.3, 0.0, 0.7])
    a, b = paired_ttest(x), paired_ttest(37.5 * x)
    assert a.t_statistic == pytest.approx(b.t_statistic, rel=1e-12)
    assert a.p_two_sided == pytest.approx(b.p_two_sided, rel=1e-12)


def test_ttest_against_bruteforce_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 300))
        x = rng.normal(rng.normal(0, 0.3), rng.uniform(0.1, 2.0), n)
        ref = sps.ttest_1samp(x, 0.0)
        got = paired_ttest(x)
        assert got.t_statistic == pytest.approx(ref.statistic, rel=1e-9)
        assert got.p_two_sided == pytest.approx(ref.pvalue, abs=1e-6)


def test_significance_labels():
    assert significance_label(0.007) == "strongly significant"
    assert significance_label(0.027) == "significant"
    assert significance_label(0.2) == "not significant"


def test_slope_ttest_matches_linregress():
    rng = np.random.default_rng(5)
    x = rng.normal(size=120)
    y = 0.8 * x + rng.normal(scale=0.5, size=120)
    ref = sps.linregress(x, y)
    got = slope_ttest(x, y)
    assert got.slope == pytest.approx(ref.slope, rel=1e-12)
    assert got.p_two_sided == pytest.approx(ref.pvalue, abs=1e-12)
