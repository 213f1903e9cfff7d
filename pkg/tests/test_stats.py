import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crsf.graph import LatticeView, box_graph
from crsf.models import CycleWeightModel as M
from crsf.sampler import SamplerParams
from crsf.stats import (EstimatorResult, box_boundary, chi2_two_sample, component_size_distribution,
                        correlation_series, empirical, estimate_connection,
                        estimate_edge_correlation, fit_exponential, ordering_pvalues,
                        rooting_tail, tv_distance, tv_se, wilson_interval)

LAT = LatticeView()
dists = st.dictionaries(st.integers(0, 5), st.integers(1, 50), min_size=1)


@given(dists, dists, dists)
def test_tv_is_a_metric(a, b, c):
    ab, ba = tv_distance(Counter(a), Counter(b)), tv_distance(Counter(b), Counter(a))
    assert ab == pytest.approx(ba)
    assert 0 <= ab <= 1 + 1e-12
    assert tv_distance(Counter(a), Counter(a)) == 0
    assert tv_distance(Counter(a), Counter(c)) <= ab + tv_distance(Counter(b), Counter(c)) + 1e-12


def test_tv_accepts_samples_and_probabilities():
    assert tv_distance([0, 0, 1, 1], {0: 0.5, 1: 0.5}) == 0
    assert tv_distance(np.array([0, 0, 0, 1]), [1, 1]) == pytest.approx(0.75)
    assert empirical(["a", "b", "b", "b"]) == {"a": 0.25, "b": 0.75}
    assert tv_se([0, 1] * 50, [0, 1] * 50) > 0
    with pytest.raises(ValueError):
        empirical([])


@given(st.integers(0, 100), st.integers(1, 100))
def test_wilson_contains_estimate(k, n):
    k = min(k, n)
    lo, hi = wilson_interval(k, n)
    assert 0 <= lo <= k / n <= hi <= 1


def test_wilson_empty_is_nan():
    lo, hi = wilson_interval([0, 3], [0, 10])
    assert np.isnan(lo[0]) and not np.isnan(lo[1])


def test_chi2_two_sample():
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 4, 5000), rng.integers(0, 4, 5000)
    assert chi2_two_sample(a, b) > 0.001
    assert chi2_two_sample(a, np.zeros(5000, int)) < 1e-6
    assert chi2_two_sample([1, 1], [1]) == 1.0


@given(st.floats(0.05, 0.95), st.floats(0.1, 10.0))
def test_fit_recovers_exact_exponentials(r, c):
    x = np.arange(1, 9)
    fit = fit_exponential(c * r ** x, x)
    assert fit.rate == pytest.approx(r, rel=1e-9)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.ok


def test_fit_edge_cases():
    flat = fit_exponential([0.5] * 6)
    assert flat.rate == 1 and flat.at_boundary and not flat.ok
    growing = fit_exponential([1, 2, 4, 8])
    assert growing.rate == pytest.approx(2.0) and not growing.ok
    with pytest.raises(ValueError, match="usable points"):
        fit_exponential([1, 0, 0, 0, 0])
    fit = fit_exponential([1.0, 0.5, 0.25, 0.1, 0.0], lower=[1, 0.4, 0.2, 0.0, 0.0], min_points=3)
    assert fit.points == 3


def test_estimator_result():
    r = EstimatorResult.from_samples([0, 1, 1, 1], seed=3)
    assert r.estimate == 0.75 and r.replicas == 4 and r.se > 0


def test_rooting_tail_shape():
    curve = rooting_tail(LAT, M.plaquette(0.5), n_max=4, params=SamplerParams(1, replicas=5000))
    assert curve.p[0] == 1.0
    assert (np.diff(curve.p) <= 0).all()
    assert (curve.lo <= curve.p).all() and (curve.p <= curve.hi).all()
    assert len(list(curve.rows())) == 5
    fit = fit_exponential(curve, n_min=1)
    assert fit.rate < 1


def test_connection_probabilities():
    near = estimate_connection(LAT, M.plaquette(0.5), (0, 0), (1, 0), SamplerParams(1, replicas=3000))
    far = estimate_connection(LAT, M.plaquette(0.5), (0, 0), (6, 0), SamplerParams(2, replicas=3000))
    assert near.estimate > far.estimate
    assert estimate_connection(LAT, M.plaquette(0.5), (0, 0), (0, 0)).estimate == 1.0


def test_coupled_and_plain_covariance_agree():
    e1, e2 = ((0, 0), (1, 0)), ((0, 2), (1, 2))
    p = SamplerParams(9, replicas=40_000)
    c = estimate_edge_correlation(LAT, M.plaquette(0.5), e1, e2, p)
    u = estimate_edge_correlation(LAT, M.plaquette(0.5), e1, e2, p, coupled=False)
    assert c.p1 == u.p1 and c.p2 == u.p2
    assert abs(c.cov - u.cov) < 3 * math.hypot(c.se, u.se)
    assert c.se < u.se
    with pytest.raises(ValueError):
        estimate_edge_correlation(LAT, M.plaquette(0.5), e1, ((1, 0), (2, 0)), p)


def test_same_edge_variance():
    e = ((0, 0), (1, 0))
    r = estimate_edge_correlation(LAT, M.plaquette(0.5), e, e, SamplerParams(1, replicas=5000))
    assert r.cov == pytest.approx(r.p1 * (1 - r.p1))


def test_correlation_series_seeds_differ():
    ser = correlation_series(LAT, M.plaquette(0.5), [2, 3], SamplerParams(1, replicas=2000))
    assert [m for m, _ in ser] == [2, 3]


def test_component_sizes():
    p = SamplerParams(2, replicas=300)
    a = component_size_distribution(LAT, M.plaquette(0.5), params=p)
    b = component_size_distribution(LAT, M.plaquette(0.5), params=p, check=False)
    assert np.array_equal(a.sizes, b.sizes)
    assert a.one_cycle_failures == 0 and a.exhausted == 0
    assert a.sizes.min() >= 4
    s, surv = a.survival()
    assert surv[0] == 1.0 and (np.diff(surv) <= 0).all()


def test_box_boundary_is_outer_ring():
    g = box_graph((-2, -2), (2, 2), self_loops=True)
    assert box_boundary(g) == frozenset(v for v in g.vertices if max(map(abs, v)) == 2)


def test_ordering_pvalues_shape():
    ps = ordering_pvalues(LAT, M.plaquette(0.5), [(0, 0), (1, 0)], [(1, 0), (0, 0)],
                          SamplerParams(1, replicas=2000), reps=3)
    assert len(ps) == 3 and all(0 <= p <= 1 for p in ps)
    with pytest.raises(ValueError):
        ordering_pvalues(LAT, M.plaquette(0.5), [(0, 0)], [(1, 0)], SamplerParams(), 1)
