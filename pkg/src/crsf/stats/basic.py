"""Distribution distances, binomial intervals and exponential fits."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps
from statsmodels.stats.proportion import proportion_confint


@dataclass
class EstimatorResult:
    estimate: float
    se: float
    replicas: int
    seed: int
    exhausted: int = 0

    @classmethod
    def from_samples(cls, x, seed: int, exhausted: int = 0) -> "EstimatorResult":
        x = np.asarray(x, dtype=float)
        n = len(x)
        se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
        return cls(float(x.mean()) if n else math.nan, se, n, seed, exhausted)


def wilson_interval(k, n, level: float = 0.95):
    """Wilson score interval, vectorised; NaN where n = 0."""
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    safe = np.where(n > 0, n, 1)
    lo, hi = proportion_confint(k, safe, alpha=1 - level, method="wilson")
    # rounding can leave the bounds a hair inside the estimate at k = 0 or n
    phat = k / safe
    lo = np.clip(np.minimum(lo, phat), 0.0, 1.0)
    hi = np.clip(np.maximum(hi, phat), 0.0, 1.0)
    lo = np.where(n > 0, lo, np.nan)
    hi = np.where(n > 0, hi, np.nan)
    return lo, hi


def _counts(sample) -> Counter:
    if isinstance(sample, Counter):
        return sample
    if isinstance(sample, dict):
        return Counter(sample)
    arr = np.asarray(sample)
    if arr.ndim == 1 and arr.dtype.kind in "iub":
        u, c = np.unique(arr, return_counts=True)
        return Counter(dict(zip(u.tolist(), c.tolist())))
    return Counter(map(_hashable, sample))


def _hashable(x):
    if isinstance(x, np.ndarray):
        return tuple(x.tolist())
    return x


def empirical(sample) -> dict:
    c = _counts(sample)
    n = sum(c.values())
    if n == 0:
        raise ValueError("empty sample")
    return {k: v / n for k, v in c.items()}


def tv_distance(a, b) -> float:
    """Half the L1 distance.  Arguments are samples, count maps or
    probability maps (a dict whose values sum to 1)."""
    pa = a if _is_prob(a) else empirical(a)
    pb = b if _is_prob(b) else empirical(b)
    keys = set(pa) | set(pb)
    return 0.5 * sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in keys)


def _is_prob(x) -> bool:
    return (isinstance(x, dict) and not isinstance(x, Counter) and x
            and all(isinstance(v, float) for v in x.values())
            and abs(sum(x.values()) - 1.0) < 1e-9)


def tv_se(a, b) -> float:
    """Rough standard error of an empirical TV distance (sum of per-cell
    binomial errors, halved)."""
    ca, cb = _counts(a), _counts(b)
    na, nb = sum(ca.values()), sum(cb.values())
    s = 0.0
    for k in set(ca) | set(cb):
        p, q = ca.get(k, 0) / na, cb.get(k, 0) / nb
        s += math.sqrt(p * (1 - p) / na + q * (1 - q) / nb)
    return 0.5 * s


def chi2_two_sample(a, b) -> float:
    """p-value of the chi-squared homogeneity test on the 2 x K table."""
    ca, cb = _counts(a), _counts(b)
    if not ca or not cb:
        raise ValueError("empty sample")
    keys = sorted(set(ca) | set(cb), key=repr)
    table = np.array([[ca.get(k, 0) for k in keys], [cb.get(k, 0) for k in keys]])
    if table.shape[1] < 2:
        return 1.0
    return float(sps.chi2_contingency(table, correction=False)[1])


# -- exponential fits ---------------------------------------------------------------

@dataclass
class DecayFit:
    rate: float
    intercept: float
    r2: float
    n_min: float
    n_max: float
    points: int
    at_boundary: bool = False

    @property
    def ok(self) -> bool:
        return 0 < self.rate < 1 and not self.at_boundary


def fit_exponential(y, x=None, lower=None, n_min=None, n_max=None, min_points: int = 4) -> DecayFit:
    """Least squares of log y on x over the usable range.

    ``y`` is a value sequence or anything with ``n``/``p``/``lo`` fields
    (a TailCurve).  Points with y <= 0, or whose lower confidence bound is
    <= 0, are dropped.  A flat series gives rate 1 with ``at_boundary``.
    """
    if hasattr(y, "p"):
        x = y.n if x is None else x
        lower = y.lo if lower is None else lower
        y = y.p
    y = np.asarray(y, dtype=float)
    x = np.arange(len(y), dtype=float) if x is None else np.asarray(x, dtype=float)
    keep = y > 0
    if lower is not None:
        keep &= np.asarray(lower, dtype=float) > 0
    if n_min is not None:
        keep &= x >= n_min
    if n_max is not None:
        keep &= x <= n_max
    if keep.sum() < min_points:
        raise ValueError(f"only {int(keep.sum())} usable points (need {min_points}); "
                         "shrink the range or add replicas")
    xs, ly = x[keep], np.log(y[keep])
    if np.ptp(ly) == 0:
        return DecayFit(1.0, float(ly[0]), 1.0, float(xs.min()), float(xs.max()),
                        int(keep.sum()), True)
    res = sps.linregress(xs, ly)
    rate = math.exp(res.slope)
    return DecayFit(rate, float(res.intercept), float(res.rvalue ** 2), float(xs.min()),
                    float(xs.max()), int(keep.sum()), rate >= 1.0)
