"""Driver screening: correlation and simple linear regression.

Each candidate driver (dwelling completions, net migration, ...) is
screened against mean dwelling value with a Pearson correlation and an
ordinary least-squares slope test.  The slope p-value comes from the
two-sided t test with n-2 degrees of freedom, evaluated through the
regularized incomplete beta function so that desk-scale checks need no
statistical tables.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .errors import DataError


@dataclass(frozen=True)
class RegressionResult:
    """Simple OLS fit of y on x with a slope significance test.

    Attributes:
        slope: Least-squares slope.
        intercept: Least-squares intercept.
        slope_stderr: Standard error of the slope.
        t_stat: slope / slope_stderr (signed; +-inf for an exact fit).
        p_value: Two-sided p-value for slope == 0.
        r_squared: Coefficient of determination in [0, 1].
        n: Number of observations.
    """

    slope: float
    intercept: float
    slope_stderr: float
    t_stat: float
    p_value: float
    r_squared: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation of two equal-length samples.

    Raises DataError for mismatched lengths, fewer than two points, or a
    degenerate (zero-variance) sample.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise DataError("pearson requires two equal-length 1-d samples")
    if xa.size < 2:
        raise DataError("pearson requires at least 2 points")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DataError("degenerate sample: zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def ols_slope_test(x: Sequence[float], y: Sequence[float]) -> RegressionResult:
    """Least-squares line of y on x with a two-sided slope test.

    Args:
        x: Predictor values, at least 3, with nonzero variance.
        y: Response values, same length as x.

    Returns:
        RegressionResult with slope, intercept, t statistic and p-value
        against the t distribution with n-2 degrees of freedom.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise DataError("ols_slope_test requires two equal-length 1-d samples")
    n = xa.size
    if n < 3:
        raise DataError("ols_slope_test requires at least 3 points")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DataError("degenerate sample: constant x")
    sxy = float(dx @ dy)
    syy = float(dy @ dy)

    slope = sxy / sxx
    intercept = float(ya.mean()) - slope * float(xa.mean())
    sse = max(syy - slope * sxy, 0.0)  # guard tiny negative roundoff
    df = n - 2

    if syy == 0.0:
        # y constant: the zero-slope line fits exactly, nothing to test.
        return RegressionResult(slope, intercept, 0.0, 0.0, 1.0, 0.0, n)

    r_squared = min(1.0, max(0.0, 1.0 - sse / syy))
    stderr = math.sqrt(sse / df / sxx)
    if stderr == 0.0:
        t_stat = math.copysign(math.inf, slope) if slope != 0.0 else 0.0
        p_value = 0.0 if slope != 0.0 else 1.0
    else:
        t_stat = slope / stderr
        p_value = _t_two_sided_p(t_stat, df)
    return RegressionResult(slope, intercept, stderr, t_stat, p_value, r_squared, n)


def _t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the regularized incomplete beta identity."""
    if t == 0.0:
        return 1.0
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))
