import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graphs
from crsf.errors import SamplerConfigError, StepCapExceeded
from crsf.exact import (ConditioningSpec, boltzmann, class_on, conditional_distribution,
                        enumerate_crsf, enumerate_ecrsf)
from crsf.exhaustion import OrderingSpec
from crsf.graph import (LatticeView, box_graph, c4_chord, enumerate_cycle_classes, grid_graph,
                        theta_graph)
from crsf.models import CycleWeightModel as M
from crsf.sampler import (SamplerParams, config_from_edges, explore_batch, explore_component,
                          has_positive_cycle, model_weight, naive_lerw, one_cycle_check,
                          p_lerw, rooting_batch, sample_conditioned, sample_conditioned_batch,
                          sample_finite_batch, sample_finite_free, sample_finite_wired,
                          sample_window_batch, sample_window_infinite, termination_problem,
                          window_edges)
from crsf.stats import chi2_two_sample, tv_distance

LAT = LatticeView()


# -- single walks and the replay oracle ---------------------------------------------

def _replay(g, model, start, boundary, params, replica):
    path, rec = p_lerw(g, model, start, boundary, params, replica=replica)
    tr = rec.trace
    bset = set(boundary)
    res = naive_lerw(tr.steps, tr.edges, tr.draws, model_weight(model, g), lambda v: v in bset)
    return path, rec, res


def _same(path, rec, res):
    return (path.vertices == res.vertices and path.edges == res.edges
            and rec.T_r == res.T_r and rec.T_W == res.T_W
            and tuple(rec.trace.closures) == res.closures
            and (path.cycle_start == res.cycle_start or not rec.rooted))


@given(small_graphs(max_n=5, max_extra=4), st.integers(0, 10 ** 6), st.data())
def test_replay_matches_on_random_graphs(g, seed, data):
    model = data.draw(st.sampled_from([M.length_decay(0.4), M.vertex_rooting(0.5),
                                       M.table({(0, 1): 0.6, (0, 1, 2): 0.3})]))
    W = data.draw(st.sets(st.sampled_from(g.vertices[1:]), max_size=1)) if g.n > 1 else set()
    if termination_problem(g, model, W):
        W = {g.vertices[-1]}
    p = SamplerParams(seed=seed)
    for r in range(5):
        assert _same(*_replay(g, model, g.vertices[0], W, p, r))


def test_replay_matches_on_lattice():
    p = SamplerParams(seed=5)
    for r in range(200):
        assert _same(*_replay(LAT, M.plaquette(0.5), (0, 0), [(2, 0), (0, 3)], p, r))


def test_backtrack_is_erased_on_theta():
    """Two parallel edges make a genuine 2-cycle; walking back along the
    same edge does not.  From vertex 0 the first return uses the same edge
    with probability 1/3, so T_r = 2 with probability 2/3 under weight 1."""
    g = theta_graph()
    model = M.length_decay(0.0)
    n, hits = 3000, 0
    for r in range(n):
        _, rec = p_lerw(g, model, 0, params=SamplerParams(seed=1), replica=r, record=False)
        assert rec.rooted and len(rec.cycle) == 2
        assert rec.cycle.edges[0] != rec.cycle.edges[1]
        hits += rec.T_r == 2
    assert abs(hits / n - 2 / 3) < 4 * math.sqrt(2 / 9 / n)


def test_walk_absorbed_by_boundary():
    g = grid_graph(2, 2)
    path, rec = p_lerw(g, M.zero(), 0, boundary=[3], params=SamplerParams(seed=2))
    assert not rec.rooted and path.vertices[-1] == 3
    assert rec.hitting_time([3]) == rec.T_W
    assert math.isinf(rec.T_r)


def test_step_cap():
    g = grid_graph(3, 3)
    b = sample_finite_batch(g, M.zero(), {8}, params=SamplerParams(seed=0, replicas=20, step_cap=2))
    assert b.exhausted.sum() > 0
    with pytest.raises(StepCapExceeded):
        for r in range(20):
            sample_finite_wired(g, {8}, M.zero(), params=SamplerParams(seed=0, step_cap=2), replica=r)


# -- termination and configuration checks --------------------------------------------

def test_termination_condition():
    g = grid_graph(2, 3)
    assert termination_problem(g, M.zero()) is not None
    assert termination_problem(g, M.zero(), {0}) is None
    assert termination_problem(g, M.plaquette(0.5)) is None
    assert termination_problem(g, M.table({(0, 1): 2.0})) is not None
    assert not has_positive_cycle(g, M.zero())
    with pytest.raises(SamplerConfigError, match="cannot terminate"):
        sample_finite_batch(g, M.zero())


@given(small_graphs(max_n=5, max_extra=3), st.integers(0, 1000))
def test_samples_are_valid_configurations(g, seed):
    model = M.length_decay(0.5)
    cfg = sample_finite_free(g, model, params=SamplerParams(seed=seed))
    assert len(cfg.edges) == g.n and len(cfg.cycles) == len(cfg.components)
    cfg = sample_finite_wired(g, {g.vertices[0]}, model, params=SamplerParams(seed=seed))
    assert len(cfg.edges) == g.n - 1


def test_config_from_edges_rejects_garbage():
    with pytest.raises(AssertionError):
        config_from_edges(c4_chord(), [0, 1])


# -- determinism and chunking --------------------------------------------------------

def test_determinism_and_chunk_independence():
    g = grid_graph(2, 3)
    m = M.plaquette(0.5)
    a = sample_finite_batch(g, m, params=SamplerParams(seed=3, replicas=400, workers=1))
    b = sample_finite_batch(g, m, params=SamplerParams(seed=3, replicas=400, workers=3))
    c = sample_finite_batch(g, m, params=SamplerParams(seed=3, replicas=100), replica_start=300)
    assert np.array_equal(a.succ, b.succ)
    assert np.array_equal(a.succ[300:], c.succ)
    d = sample_finite_batch(g, m, params=SamplerParams(seed=4, replicas=400))
    assert not np.array_equal(a.succ, d.succ)


def test_window_determinism_across_workers():
    a = sample_window_batch(LAT, M.plaquette(0.5), [(0, 0), (1, 0)], SamplerParams(2, replicas=300))
    b = sample_window_batch(LAT, M.plaquette(0.5), [(0, 0), (1, 0)],
                            SamplerParams(2, replicas=300, workers=2))
    assert np.array_equal(a.dirs, b.dirs)


def test_window_single_run_matches_batch():
    p = SamplerParams(seed=8, replicas=30)
    b = sample_window_batch(LAT, M.plaquette(0.5), [(0, 0), (1, 0), (1, 1)], p)
    ind = b.edge_indicators()
    edges = window_edges(b.window)
    for r in range(30):
        s = sample_window_infinite(LAT, M.plaquette(0.5), [(0, 0), (1, 0), (1, 1)], p, r)
        assert [s.edges[e] for e in edges] == list(ind[r])


# -- laws on small graphs (fast versions of the acceptance checks) ---------------------

def _tv(g, model, W=(), n=40_000, seed=0, ordering=None):
    b = sample_finite_batch(g, model, W, ordering, SamplerParams(seed=seed, replicas=n))
    table = enumerate_ecrsf(g, W) if W else enumerate_crsf(g)
    exact = boltzmann(table, model).as_dict()
    emp = {}
    for es in b.edge_sets():
        emp[es] = emp.get(es, 0) + 1
    return tv_distance(emp, exact)


@pytest.mark.parametrize("g,model,W", [
    (theta_graph(), M.table({}, {((0, 1), (0, 1)): 0.9, ((0, 1), (1, 2)): 0.2}), ()),
    (c4_chord(), M.table({(0, 1, 2): 0.25, (0, 2, 3): 0.75, (0, 1, 2, 3): 0.5}), ()),
    (grid_graph(2, 3), M.plaquette(0.6), ()),
    (grid_graph(2, 3), M.plaquette(0.6), (5,)),
    (grid_graph(2, 2, self_loops=True), M.vertex_rooting({0: 0.3, 3: 0.9}), ()),
])
def test_sampler_matches_exact_law(g, model, W):
    assert _tv(g, model, W) < 0.025


def test_ordering_does_not_change_the_law():
    g = grid_graph(2, 3)
    m = M.plaquette(0.6)
    a = sample_finite_batch(g, m, params=SamplerParams(seed=1, replicas=20_000)).masks()
    b = sample_finite_batch(g, m, ordering=OrderingSpec((5, 2, 4)),
                            params=SamplerParams(seed=2, replicas=20_000)).masks()
    assert chi2_two_sample(a, b) > 1e-4


def test_conditioned_sampler():
    g = c4_chord()
    m = M.table({(0, 1, 2): 2.5, (0, 2, 3): 0.5, (0, 1, 2, 3): 0.3})
    heavy = class_on(enumerate_cycle_classes(g, 4), {0, 1, 2})
    b = sample_conditioned_batch(g, (), {heavy}, m, params=SamplerParams(seed=4, replicas=20_000))
    spec = ConditioningSpec.build({heavy}, m)
    law = conditional_distribution(enumerate_crsf(g), m, spec)
    cedges = frozenset(heavy.edges)
    emp = {}
    for es in b.edge_sets():
        assert cedges <= es
        emp[es - cedges] = emp.get(es - cedges, 0) + 1
    assert tv_distance(emp, {k: float(v) for k, v in law.items()}) < 0.02
    cfg = sample_conditioned(g, (), {heavy}, m, params=SamplerParams(seed=4))
    assert heavy in cfg.cycles
    light = class_on(enumerate_cycle_classes(g, 4), {0, 2, 3})
    with pytest.raises(SamplerConfigError, match="not a positive"):
        sample_conditioned_batch(g, (), {light}, m)


def test_unbounded_model_is_rejected():
    with pytest.raises(SamplerConfigError):
        sample_finite_batch(grid_graph(2, 2), M.table({(0, 1, 3, 2): 1.5}))
    with pytest.raises(SamplerConfigError):
        sample_window_batch(LAT, M.plaquette(1.5), [(0, 0)])


# -- infinite volume --------------------------------------------------------------------

def test_explore_component_invariants():
    p = SamplerParams(seed=3)
    for r in range(100):
        rep = explore_component(LAT, M.plaquette(0.5), (0, 0), p, replica=r)
        assert rep.complete
        assert one_cycle_check(rep, M.plaquette(0.5), LAT)
        assert (0, 0) in rep.vertices
        assert len(rep.cycle) == 4


def test_explore_batch_matches_single_runs():
    p = SamplerParams(seed=3, replicas=50)
    sizes, clens, status, _, _ = explore_batch(LAT, M.plaquette(0.5), (0, 0), p)
    for r in range(50):
        rep = explore_component(LAT, M.plaquette(0.5), (0, 0), p, replica=r)
        assert rep.size == sizes[r] and len(rep.cycle) == clens[r]


def test_explore_target_and_size_cap():
    p = SamplerParams(seed=3, replicas=200)
    _, _, status, conn, _ = explore_batch(LAT, M.plaquette(0.5), (0, 0), p, target=(1, 0))
    assert set(np.unique(conn)) <= {0, 1}
    assert (status == 3).any() or (status == 0).any()
    rep = explore_component(LAT, M.plaquette(0.2), (0, 0), p, size_cap=3)
    assert rep.status in ("size cap", "complete")


def test_explore_with_self_loops_q_one_is_isolated_or_tree():
    rep = explore_component(LatticeView(self_loops=True), M.vertex_rooting(1.0), (0, 0),
                            SamplerParams(seed=1))
    assert rep.cycle.is_self_loop()


def test_rooting_batch_stop_distance():
    troot, maxd, clen, exh = rooting_batch(LAT, M.plaquette(0.5), SamplerParams(1, replicas=500),
                                           stop_dist=6)
    assert (maxd <= 6).all()
    assert ((troot >= 0) | (maxd == 6)).all()
    assert (clen[troot >= 0] == 4).all()


def test_window_on_box_converges_to_infinite_volume():
    """The wired 9x9 box and the infinite-volume sampler give close window
    laws (a fast version of the acceptance check)."""
    from crsf.stats import compare_boundary_conditions
    rows = compare_boundary_conditions([4], M.plaquette(0.5), [(0, 0), (1, 0)],
                                       SamplerParams(seed=5, replicas=20_000))
    assert rows[0].tv_wired_inf < 0.03
