"""Monte Carlo estimators for rooting tails, connections, correlations,
component sizes and boundary-condition convergence."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..exhaustion import ExhaustionSpec
from ..graph import LatticeView, Multigraph, box_graph, lattice_edge, linf
from ..models import CycleWeightModel
from ..sampler.core import SamplerParams, sample_finite_batch
from ..sampler.lattice import (explore_batch, explore_component, one_cycle_check,
                               rooting_batch, sample_window_batch, window_edges)
from .basic import EstimatorResult, chi2_two_sample, tv_distance, tv_se, wilson_interval


# -- rooting tail -------------------------------------------------------------------

@dataclass
class TailCurve:
    """Empirical P(T_n < T_r) for n = 0..n_max with Wilson intervals."""

    n: np.ndarray
    p: np.ndarray
    count: int
    lo: np.ndarray
    hi: np.ndarray
    exhausted: int = 0

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(self.p * (1 - self.p) / max(self.count, 1))

    def rows(self):
        for i in range(len(self.n)):
            yield int(self.n[i]), float(self.p[i]), float(self.lo[i]), float(self.hi[i])


def rooting_tail(lattice: LatticeView, model: CycleWeightModel, start=(0, 0), n_max: int = 8,
                 params: SamplerParams = SamplerParams(), ex: ExhaustionSpec = ExhaustionSpec()) -> TailCurve:
    """P(T_n < T_r): the walk from ``start`` reaches the boundary of B_n
    before keeping a loop.  Walks stop once they reach ball n_max, so they
    stay short.  The lattice is translation invariant, so walks run from
    the origin."""
    ns = np.arange(n_max + 1)
    if n_max == 0:
        one = np.ones(1)
        return TailCurve(ns, one, params.replicas, one, one)
    s = ex.step
    troot, maxd, _, exh = rooting_batch(lattice, model, params, stop_dist=s * n_max)
    ok = exh == 0
    reached = np.array([(maxd[ok] >= s * n).sum() for n in ns])
    cnt = int(ok.sum())
    lo, hi = wilson_interval(reached, np.full(len(ns), cnt))
    return TailCurve(ns, reached / max(cnt, 1), cnt, lo, hi, int((~ok).sum()))


# -- connections -------------------------------------------------------------------

def estimate_connection(lattice: LatticeView, model: CycleWeightModel, x, y,
                        params: SamplerParams = SamplerParams(), size_cap: int = 10 ** 6) -> EstimatorResult:
    """P(x <-> y) from component explorations stopped once y is settled."""
    x, y = tuple(x), tuple(y)
    if x == y:
        return EstimatorResult(1.0, 0.0, params.replicas, params.seed)
    _, _, status, connected, _ = explore_batch(lattice, model, x, params, target=y,
                                               size_cap=size_cap)
    good = (status == 0) | (status == 3)
    res = EstimatorResult.from_samples(connected[good] == 1, params.seed, int((~good).sum()))
    return res


# -- edge correlations ----------------------------------------------------------------

@dataclass
class CorrelationResult:
    p1: float
    p2: float
    p12: float
    cov: float
    se: float
    replicas: int
    exhausted: int = 0


def _edge(e):
    e = tuple(tuple(v) for v in e)
    if len(e) == 3:  # already an edge id
        return e, e[1], e[2]
    u, v = e
    return lattice_edge(u, v), u, v


def estimate_edge_correlation(lattice: LatticeView, model: CycleWeightModel, e1, e2,
                              params: SamplerParams = SamplerParams(),
                              coupled: bool = True) -> CorrelationResult:
    """Joint and marginal edge probabilities from window runs on the
    endpoints (x1, y1, x2, y2).

    With ``coupled`` the walks from x2, y2 are replayed on their own
    streams with nothing settled.  The replayed indicator I2' has the law
    of e2 and is independent of I1, so cov = E[I1 (I2 - I2')], whose
    summand vanishes unless those walks met the first two.  This keeps the
    standard error proportional to the (small) coupling failure rate.
    """
    id1, x1, y1 = _edge(e1)
    id2, x2, y2 = _edge(e2)
    same = id1 == id2
    window = [x1, y1] if same else [x1, y1, x2, y2]
    if not same and len(set(window)) != 4:
        raise ValueError("edge endpoints must be pairwise distinct")
    b = sample_window_batch(lattice, model, window, params)
    ok = b.ok
    if coupled and not same:
        alone = sample_window_batch(lattice, model, [x2, y2], params, rank_offset=2)
        ok = ok & alone.ok
    ind = _indicators(b, [id1, id2], ok)
    a, c = ind[:, 0].astype(float), ind[:, 1].astype(float)
    n = len(a)
    p1, p2, p12 = a.mean(), c.mean(), (a * c).mean()
    if coupled and not same:
        c_alone = _indicators(alone, [id2], ok)[:, 0].astype(float)
        z = a * (c - c_alone)
        cov = z.mean()
    else:
        cov = p12 - p1 * p2
        z = (a - p1) * (c - p2)
    se = float(z.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return CorrelationResult(float(p1), float(p2), float(p12), float(cov), se, n,
                             int((~ok).sum()))


def _indicators(batch, edges, ok):
    full = np.zeros((len(ok), len(edges)), dtype=bool)
    full[batch.ok] = batch.edge_indicators(edges)
    return full[ok]


def correlation_series(lattice: LatticeView, model: CycleWeightModel, ms,
                       params: SamplerParams = SamplerParams(),
                       coupled: bool = True) -> list[tuple[int, CorrelationResult]]:
    """Covariances of the horizontal edge at the origin and its translate
    at height m (graph distance m between the edges)."""
    out = []
    for i, m in enumerate(ms):
        p = SamplerParams(params.seed + i, params.step_cap, params.replicas, params.workers)
        out.append((int(m), estimate_edge_correlation(
            lattice, model, ((0, 0), (1, 0)), ((0, int(m)), (1, int(m))), p, coupled)))
    return out


# -- component sizes ---------------------------------------------------------------

@dataclass
class ComponentStats:
    sizes: np.ndarray
    cycle_lengths: np.ndarray
    histogram: dict
    exhausted: int
    one_cycle_failures: int
    replicas: int

    def survival(self):
        """(s, P(|cc| >= s)) over the observed sizes."""
        s = np.sort(self.sizes)
        grid = np.arange(1, s.max() + 1) if len(s) else np.zeros(0, int)
        surv = 1.0 - np.searchsorted(s, grid, side="left") / max(len(s), 1)
        return grid, surv


def component_size_distribution(lattice: LatticeView, model: CycleWeightModel, x=(0, 0),
                                params: SamplerParams = SamplerParams(), size_cap: int = 10 ** 5,
                                check: bool = True) -> ComponentStats:
    """Law of |cc(x)| with a per-sample one-cycle check (explicit runs)
    or from the vectorised kernel when ``check`` is False."""
    if check:
        sizes, clens, fails, exh = [], [], 0, 0
        for r in range(params.replicas):
            rep = explore_component(lattice, model, x, params, replica=r, size_cap=size_cap)
            if not rep.complete:
                exh += 1
                continue
            if not one_cycle_check(rep, model, lattice):
                fails += 1
            sizes.append(rep.size)
            clens.append(len(rep.cycle) if rep.cycle else 0)
        sizes, clens = np.array(sizes, dtype=np.int64), np.array(clens, dtype=np.int64)
    else:
        sz, cl, st, _, _ = explore_batch(lattice, model, x, params, size_cap=size_cap)
        ok = st == 0
        sizes, clens, fails, exh = sz[ok], cl[ok], 0, int((~ok).sum())
    hist = dict(sorted(Counter(sizes.tolist()).items()))
    return ComponentStats(sizes, clens, hist, exh, fails, params.replicas)


# -- boundary conditions -----------------------------------------------------------------

@dataclass
class ConvergenceRow:
    half_width: int
    tv_free_wired: float
    tv_free_inf: float
    tv_wired_inf: float
    se: float
    extra: dict = field(default_factory=dict)


def box_boundary(g: Multigraph) -> frozenset:
    """Vertices of a box adjacent to the complement in Z^2 (degree < 4
    ignoring self-loops)."""
    return frozenset(v for v in g.vertices if sum(1 for u in g.neighbors(v) if u != v) < 4)


def _finite_window_keys(g, model, W, window, params):
    order = list(window) + [v for v in g.vertices if v not in set(window)]
    b = sample_finite_batch(g, model, W, order, params, prefix=len(window))
    edges = window_edges(window)
    bits = np.zeros(int(b.ok.sum()), dtype=np.int64)
    for j, e in enumerate(edges):
        bits |= b.edge_indicator(e).astype(np.int64) << j
    return bits


def compare_boundary_conditions(half_widths, model: CycleWeightModel, window,
                                params: SamplerParams = SamplerParams(),
                                lattice: LatticeView = LatticeView()) -> list[ConvergenceRow]:
    """TV distances between the window-edge laws of the free and wired box
    samplers on [-n, n]^2 and of the infinite-volume window sampler."""
    window = [tuple(v) for v in window]
    if not window:
        return [ConvergenceRow(n, 0.0, 0.0, 0.0, 0.0) for n in half_widths]
    inf_keys = sample_window_batch(lattice, model, window, params).keys()
    rows = []
    for i, n in enumerate(half_widths):
        g = box_graph((-n, -n), (n, n), self_loops=lattice.self_loops)
        if any(linf(v) > n for v in window):
            raise ValueError(f"window not inside box of half-width {n}")
        pf = SamplerParams(params.seed + 1 + 2 * i, params.step_cap, params.replicas, params.workers)
        pw = SamplerParams(params.seed + 2 + 2 * i, params.step_cap, params.replicas, params.workers)
        free = _finite_window_keys(g, model, (), window, pf)
        wired = _finite_window_keys(g, model, box_boundary(g) - set(window), window, pw)
        rows.append(ConvergenceRow(
            int(n), tv_distance(free, wired), tv_distance(free, inf_keys),
            tv_distance(wired, inf_keys), max(tv_se(free, inf_keys), tv_se(wired, inf_keys))))
    return rows


def ordering_pvalues(lattice: LatticeView, model: CycleWeightModel, window, order_b,
                     params: SamplerParams, reps: int) -> list[float]:
    """Chi-squared p-values comparing window laws under two orderings of
    the same window vertices, over ``reps`` independent seeds."""
    window = [tuple(v) for v in window]
    order_b = [tuple(v) for v in order_b]
    if sorted(window) != sorted(order_b):
        raise ValueError("orderings must cover the same window")
    edges = window_edges(window)
    out = []
    for r in range(reps):
        pa = SamplerParams(params.seed + 2 * r, params.step_cap, params.replicas, params.workers)
        pb = SamplerParams(params.seed + 2 * r + 1, params.step_cap, params.replicas, params.workers)
        ka = _keys(sample_window_batch(lattice, model, window, pa), edges)
        kb = _keys(sample_window_batch(lattice, model, order_b, pb), edges)
        out.append(chi2_two_sample(ka, kb))
    return out


def _keys(batch, edges):
    ind = batch.edge_indicators(edges)
    w = np.left_shift(np.int64(1), np.arange(len(edges), dtype=np.int64))
    return (ind.astype(np.int64) * w).sum(axis=1)
