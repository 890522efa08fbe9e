"""Summary statistics used by the study report."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .errors import InsufficientData, ZeroVariance

# relative size below which a sum of squares is treated as exactly zero
_SS_ZERO = 1e-20


def network_rmse(residuals):
    """Root of the mean squared residual over one network's probes."""
    r = np.asarray(residuals, dtype=np.float64)
    if r.size == 0:
        raise InsufficientData("no residuals")
    return math.sqrt(float(np.mean(r * r)))


def _paired(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d and the same length")
    if x.size < 3:
        raise InsufficientData("need at least 3 points, got %d" % x.size)
    return x, y


def pearson(x, y):
    x, y = _paired(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("correlation undefined for a constant vector")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def ols_fit(x, y):
    """Least-squares ``(slope, intercept)`` of ``y`` on ``x``."""
    x, y = _paired(x, y)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ZeroVariance("regression undefined for constant x")
    slope = float(dx @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


@dataclass(frozen=True)
class AnovaResult:
    """One-way repeated-measures ANOVA over the columns of a matrix.

    ``sentinel`` is ``None`` for an ordinary result, ``"not_significant"``
    when there is no variance to test (``F`` is nan), and ``"infinite"``
    when conditions differ but the error term is zero (``F`` is inf).
    """

    f: float
    df1: int
    df2: int
    p_value: float
    ss_conditions: float
    ss_subjects: float
    ss_error: float
    sentinel: str = None

    def __iter__(self):
        return iter((self.f, self.df1, self.df2))


def rm_anova_f(matrix):
    """Repeated-measures F with rows as subjects and columns as conditions."""
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("expected a 2-d subjects x conditions matrix")
    n, k = x.shape
    if n < 2 or k < 2:
        raise InsufficientData("need >= 2 subjects and >= 2 conditions, got %dx%d" % (n, k))
    grand = x.mean()
    rows = x.mean(axis=1, keepdims=True)
    cols = x.mean(axis=0, keepdims=True)
    ss_cond = float(n * np.sum((cols - grand) ** 2))
    ss_subj = float(k * np.sum((rows - grand) ** 2))
    resid = x - rows - cols + grand
    ss_err = float(np.sum(resid * resid))
    df1 = k - 1
    df2 = (k - 1) * (n - 1)

    scale = float(np.sum(x * x)) + np.finfo(float).tiny
    cond_zero = ss_cond <= _SS_ZERO * scale
    err_zero = ss_err <= _SS_ZERO * scale
    if err_zero and cond_zero:
        return AnovaResult(math.nan, df1, df2, 1.0, ss_cond, ss_subj, ss_err, "not_significant")
    if err_zero:
        return AnovaResult(math.inf, df1, df2, 0.0, ss_cond, ss_subj, ss_err, "infinite")
    f = (ss_cond / df1) / (ss_err / df2)
    return AnovaResult(f, df1, df2, float(_sps.f.sf(f, df1, df2)), ss_cond, ss_subj, ss_err)
