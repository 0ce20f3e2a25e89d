"""Paired t-test and the special functions behind it.

Everything here is pure Python/NumPy; no SciPy dependency so the kernel can
be checked against independent implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 20000


def _beta_cf(x: float, a: float, b: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})")


def reg_inc_beta(x: float, a: float, b: float, xc: float | None = None) -> float:
    """Regularized incomplete beta function I_x(a, b).

    ``xc`` may carry ``1 - x`` computed without cancellation by the caller.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"reg_inc_beta needs a > 0 and b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"reg_inc_beta needs 0 <= x <= 1, got x={x}")
    if xc is None:
        xc = 1.0 - x
    if x == 0.0 or xc == 0.0:
        return 0.0 if x == 0.0 else 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(xc)
    )
    # The fraction converges quickly only below the mean; use symmetry above it.
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(x, a, b) / a
    return 1.0 - math.exp(log_front) * _beta_cf(xc, b, a) / b


def t_cdf(t: float, df: float) -> float:
    """Cumulative distribution function of Student's t."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5
    # tail = P(T > |t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2
    tail = 0.5 * _t_tail_beta(t, df)
    return 1.0 - tail if t > 0 else tail


def _t_tail_beta(t: float, df: float) -> float:
    t2 = t * t
    return reg_inc_beta(df / (df + t2), 0.5 * df, 0.5, xc=t2 / (df + t2))


def t_sf_two_sided(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    return _t_tail_beta(t, df)


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: int
    p_two_sided: float
    mean: float
    std_error: float


def paired_ttest(samples) -> TTestResult:
    """One-sample t-test of paired differences against zero.

    Zero-variance samples get ``p = 1`` when the mean is zero and ``p = 0``
    otherwise (the limit of the statistic).
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ValueError(f"paired_ttest needs at least 2 samples, got {n}")
    mean = float(x.mean())
    sd = float(x.std(ddof=1))
    df = n - 1
    scale = float(np.abs(x).max())
    if sd == 0.0 or sd <= 1e-14 * scale:
        if mean == 0.0 or abs(mean) <= 1e-14 * scale:
            return TTestResult(0.0, df, 1.0, mean, 0.0)
        return TTestResult(math.copysign(math.inf, mean), df, 0.0, mean, 0.0)
    se = sd / math.sqrt(n)
    t = mean / se
    p = min(1.0, max(0.0, t_sf_two_sided(t, df)))
    return TTestResult(t, df, p, mean, se)


@dataclass(frozen=True)
class SlopeTest:
    slope: float
    intercept: float
    t_statistic: float
    degrees_of_freedom: int
    p_two_sided: float


def slope_ttest(x, y) -> SlopeTest:
    """Least-squares slope of ``y`` on ``x`` with a two-sided t-test of slope = 0.

    Meant for comparing two eigencycle spectra entry by entry.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape or x.size < 3:
        raise ValueError("slope_ttest needs two equal-length vectors of at least 3 points")
    n = x.size
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("slope_ttest: x has zero variance")
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    df = n - 2
    s2 = float((resid ** 2).sum() / df)
    if s2 == 0.0:
        t = math.copysign(math.inf, slope) if slope != 0 else 0.0
        p = 0.0 if slope != 0 else 1.0
    else:
        t = slope / math.sqrt(s2 / sxx)
        p = t_sf_two_sided(t, df)
    return SlopeTest(slope, intercept, t, df, p)


def significance_label(p: float) -> str:
    if p < 0.010:
        return "strongly significant"
    if p < 0.05:
        return "significant"
    return "not significant"
