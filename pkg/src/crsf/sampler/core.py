"""p-LERW walks and the Wilson-type samplers on finite graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._backend import kernels
from ..errors import SamplerConfigError, StepCapExceeded
from ..exact.configs import CRSFConfig, ECRSFConfig, _build, _components
from ..exact.measure import ConditioningSpec
from ..exhaustion import OrderingSpec, ball
from ..graph import (CycleCapExceeded, LatticeView, Multigraph, OrientedCycle,
                     enumerate_cycle_classes, lattice_edge)
from ..models import CycleWeightModel, ModelError, encode_finite, encode_lattice
from ..parallel import chunk_ranges, default_workers, run_chunks

DEFAULT_STEP_CAP = 10 ** 8
DIRS = ((1, 0), (0, 1), (-1, 0), (0, -1), (0, 0))


@dataclass(frozen=True)
class SamplerParams:
    seed: int = 0
    step_cap: int = DEFAULT_STEP_CAP
    replicas: int = 1
    workers: int | None = None

    def __post_init__(self):
        if self.step_cap <= 0:
            raise ValueError("step_cap must be positive")
        if self.replicas < 0:
            raise ValueError("replicas must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def n_workers(self) -> int:
        return self.workers if self.workers else default_workers()


@dataclass
class WalkTrace:
    """X_0..X_T, the edge of each step, and the draw Y_n at every loop closure."""

    steps: list
    edges: list
    draws: dict

    @property
    def closures(self) -> list:
        return sorted(self.draws)


@dataclass
class RootingRecord:
    T_r: float
    T_W: float
    T_f: int
    cycle: OrientedCycle | None
    draw: float | None
    weight: float | None
    trace: WalkTrace | None = field(default=None, repr=False)

    @property
    def rooted(self) -> bool:
        return self.cycle is not None

    def hitting_time(self, vertices) -> float:
        """First n <= T_f with X_n in ``vertices``; inf if never (needs a trace)."""
        if self.trace is None:
            raise ValueError("walk was run without recording")
        vs = set(vertices)
        for n, v in enumerate(self.trace.steps):
            if v in vs:
                return n
        return math.inf

    def ball_hitting_time(self, ex, x, m: int) -> float:
        """T_{m,x}: hitting time of the boundary of B_m^x."""
        return self.hitting_time(ball(ex, x, m)[1])


@dataclass
class LoopErasedPath:
    """Loop-erased path; when rooted the last edge closes the kept cycle
    back onto ``vertices[cycle_start]``."""

    vertices: tuple
    edges: tuple
    cycle_start: int = -1


def _check_bounded(model: CycleWeightModel):
    if not model.bounded:
        raise SamplerConfigError(
            "model has weights above 1; sample via w_minus / sample_conditioned instead")


def p_lerw(g, model: CycleWeightModel, start, boundary=(), params: SamplerParams = SamplerParams(),
           replica: int = 0, rank: int = 0, record: bool = True):
    """Run one p-LERW from ``start`` with absorbing ``boundary``.

    The random stream is the one keyed by ``(params.seed, replica, rank)``;
    the samplers use the same keys, so a walk can be replayed in isolation.
    Returns ``(LoopErasedPath, RootingRecord)``.
    """
    _check_bounded(model)
    key = kernels.stream_key(params.seed, replica, rank)
    if isinstance(g, LatticeView):
        return _lattice_p_lerw(g, model, tuple(start), boundary, key, params.step_cap, record)
    km = encode_finite(model, g)
    absorbing = np.zeros(g.n, dtype=np.uint8)
    for w in boundary:
        absorbing[g.index[w]] = 1
    out = kernels.finite_walk(g.adj_start, g.adj_target, g.adj_edge, km.len_w, km.kappa,
                              km.selfloop_w, km.callback, g.index[start], absorbing, key,
                              params.step_cap, record)
    V = g.vertices
    E = [e[0] for e in g.edges]
    verts = tuple(V[i] for i in out["path"])
    edges = tuple(E[k] for k in out["edges"])
    trace = None
    if record:
        xs, es, ys = out["trace"]
        trace = WalkTrace([V[i] for i in xs], [E[k] for k in es], dict(ys))
    return _finish(out, verts, edges, trace)


def _finish(out, verts, edges, trace):
    t = int(out["time"])
    if out["end"] == 0:
        cs = int(out["cycle_start"])
        cyc = OrientedCycle.make(verts[cs:], edges[cs:])
        rec = RootingRecord(t, math.inf, t, cyc, float(out["y"]), float(out["weight"]), trace)
        return LoopErasedPath(verts, edges, cs), rec
    if out["end"] == 1:
        rec = RootingRecord(math.inf, t, t, None, None, None, trace)
        return LoopErasedPath(verts, edges), rec
    # stop distance reached: neither event observed
    rec = RootingRecord(math.inf, math.inf, t, None, None, None, trace)
    return LoopErasedPath(verts, edges), rec


def _lattice_edges(verts, dirs):
    out = []
    for v, d in zip(verts, dirs):
        if d == 4:
            out.append(("loop", v))
        else:
            w = (v[0] + DIRS[d][0], v[1] + DIRS[d][1])
            out.append(lattice_edge(v, w))
    return out


def _lattice_p_lerw(lat: LatticeView, model, start, boundary, key, step_cap, record,
                    stop_dist: int = 0):
    len_w, kappa, q = encode_lattice(model, lat)
    settled = {tuple(w): 0 for w in boundary}
    out = kernels.lattice_walk(len_w, kappa, q, lat.self_loops, start, settled, key,
                               step_cap, stop_dist, record)
    verts = tuple(out["path"])
    edges = tuple(_lattice_edges(verts, out["dirs"]))
    trace = None
    if record:
        xs, ds, ys = out["trace"]
        trace = WalkTrace(list(xs), _lattice_edges(xs[:-1], ds), dict(ys))
    return _finish(out, verts, edges, trace)


# -- termination ------------------------------------------------------------------

def has_positive_cycle(g: Multigraph, model: CycleWeightModel, W=()) -> bool:
    """Whether G minus W carries a cycle of positive weight."""
    W = set(W)
    keep = [v for v in g.vertices if v not in W]
    if not keep:
        return False
    sub = Multigraph(keep, g.subgraph_edges(set(keep)), coords=g.coords, check_connected=False)
    f, p = model.family, model.params
    if type(model) is CycleWeightModel:
        if f == "zero":
            return False
        if f == "vertex_rooting":
            return any(u == v and model.weight(OrientedCycle((u,), (e,)), g) > 0
                       for e, u, v in sub.edges)
        if f == "length_decay":
            return _has_cycle(sub)
        if f == "explicit_table":
            lens = [len(k) for k, w in p["table"].items() if w > 0]
            lens += [len(k[0]) for k, w in p["edge_table"].items() if w > 0]
            if not lens:
                return False
            return _search(sub, model, g, max(lens))
        if f == "plaquette":
            return p["alpha"] > 0 and _search(sub, model, g, 4)
    return _search(sub, model, g, sub.n)


def _has_cycle(g: Multigraph) -> bool:
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, u, v in g.edges:
        a, b = find(u), find(v)
        if a == b:
            return True
        parent[a] = b
    return False


def _search(sub, model, g, max_len) -> bool:
    try:
        classes = enumerate_cycle_classes(sub, max(1, max_len), cap=200_000)
    except CycleCapExceeded:
        return True  # too many cycles to certify either way; the step cap guards the run
    return any(model.weight(c, g) > 0 for cls in classes for c in cls.orientations())


def termination_problem(g: Multigraph, model: CycleWeightModel, W=()) -> str | None:
    """None when the sampler terminates a.s.; otherwise the reason it cannot."""
    if not model.bounded:
        return "model has weights above 1: the sampler needs w_minus / conditioned mode"
    if W:
        return None
    if not has_positive_cycle(g, model, W):
        return "sampler cannot terminate: no positive-weight cycle and W is empty"
    return None


# -- finite samplers --------------------------------------------------------------

@dataclass
class FiniteBatch:
    """Replica outputs of the finite sampler.

    ``succ[r, i]`` is the internal index of vertex i's successor edge (-1 on
    W and on vertices outside the processed prefix); ``fixed`` are edges
    added to every sample (the conditioned cycles).
    """

    graph: Multigraph
    succ: np.ndarray
    steps: np.ndarray
    exhausted: np.ndarray
    fixed: frozenset = frozenset()

    def __len__(self):
        return len(self.succ)

    @property
    def ok(self) -> np.ndarray:
        return self.exhausted == 0

    def masks(self) -> np.ndarray:
        """Edge-set bitmask per completed replica (graphs with <= 63 edges)."""
        g = self.graph
        if g.m > 63:
            raise ValueError("bitmasks need at most 63 edges")
        s = self.succ[self.ok]
        bits = np.where(s >= 0, np.left_shift(np.int64(1), np.maximum(s, 0)), 0)
        out = np.bitwise_or.reduce(bits, axis=1) if s.shape[1] else np.zeros(len(s), np.int64)
        fixed = 0
        for e in self.fixed:
            fixed |= 1 << g.edge_index[e]
        return out | np.int64(fixed)

    def edge_sets(self):
        E = [e[0] for e in self.graph.edges]
        for row in self.succ[self.ok]:
            yield frozenset(E[k] for k in row if k >= 0) | self.fixed

    def edge_indicator(self, eid) -> np.ndarray:
        if eid in self.fixed:
            return np.ones(int(self.ok.sum()), dtype=bool)
        k = self.graph.edge_index[eid]
        return (self.succ[self.ok] == k).any(axis=1)


def mask_to_edges(g: Multigraph, mask: int) -> frozenset:
    return frozenset(g.edges[k][0] for k in range(g.m) if (int(mask) >> k) & 1)


def _finite_chunk(g, model, W, order_idx, prefix, seed, start, count, step_cap):
    km = encode_finite(model, g)
    boundary = np.zeros(g.n, dtype=np.uint8)
    for w in W:
        boundary[g.index[w]] = 1
    return kernels.finite_batch(g.adj_start, g.adj_target, g.adj_edge, km.len_w, km.kappa,
                                km.selfloop_w, km.callback, order_idx, boundary, prefix,
                                seed, start, count, step_cap)


def sample_finite_batch(g: Multigraph, model: CycleWeightModel, W=(), ordering=None,
                        params: SamplerParams = SamplerParams(), prefix: int | None = None,
                        replica_start: int = 0) -> FiniteBatch:
    """``params.replicas`` independent runs of the free (W empty) or wired sampler.

    With ``prefix`` only the first ``prefix`` vertices of the ordering are
    processed, which settles exactly those vertices' successors.
    """
    W = frozenset(W)
    problem = termination_problem(g, model, W)
    if problem:
        raise SamplerConfigError(problem)
    order = _resolve(g, ordering)
    order_idx = np.array([g.index[v] for v in order], dtype=np.int64)
    prefix = len(order) if prefix is None else int(prefix)
    chunks = chunk_ranges(replica_start, params.replicas, params.n_workers)
    args = [(g, model, W, order_idx, prefix, params.seed, s, c, params.step_cap)
            for s, c in chunks if c > 0]
    parts = run_chunks(_finite_chunk, args, params.n_workers)
    if not parts:
        return FiniteBatch(g, np.zeros((0, g.n), np.int64), np.zeros(0, np.int64),
                           np.zeros(0, np.uint8))
    succ = np.concatenate([p[0] for p in parts])
    steps = np.concatenate([p[1] for p in parts])
    exh = np.concatenate([p[2] for p in parts])
    return FiniteBatch(g, succ, steps, exh)


def _resolve(g, ordering) -> list:
    if ordering is None:
        return list(g.vertices)
    if isinstance(ordering, OrderingSpec):
        return ordering.resolve(g)
    return OrderingSpec(tuple(ordering)).resolve(g)


def _single(g, model, W, ordering, params, replica):
    p = SamplerParams(params.seed, params.step_cap, 1, 1)
    b = sample_finite_batch(g, model, W, ordering, p, replica_start=replica)
    if b.exhausted[0]:
        raise StepCapExceeded(params.step_cap, "in finite sampler")
    return b


def config_from_edges(g: Multigraph, edges, W=()):
    """Wrap an edge set as a CRSFConfig (W empty) or ECRSFConfig, checking
    the component structure."""
    W = frozenset(W)
    eidx = sorted(g.edge_index[e] for e in edges)
    verts, comp_edges = _components(g, eidx)
    widx = {g.index[w] for w in W}
    for r, vs in verts.items():
        nw = sum(1 for i in vs if i in widx)
        ne = len(comp_edges[r])
        if not ((nw == 0 and ne == len(vs)) or (nw == 1 and ne == len(vs) - 1)):
            raise AssertionError("sample is not a valid cycle-rooted forest")
    es, comps, cycles = _build(g, eidx, verts, comp_edges)
    if W:
        return ECRSFConfig(es, W, comps, cycles)
    return CRSFConfig(es, comps, cycles)


def sample_finite_free(g: Multigraph, model: CycleWeightModel, ordering=None,
                       params: SamplerParams = SamplerParams(), replica: int = 0) -> CRSFConfig:
    b = _single(g, model, (), ordering, params, replica)
    return config_from_edges(g, next(b.edge_sets()))


def sample_finite_wired(g: Multigraph, W, model: CycleWeightModel, ordering=None,
                        params: SamplerParams = SamplerParams(), replica: int = 0) -> ECRSFConfig:
    W = frozenset(W)
    b = _single(g, model, W, ordering, params, replica)
    return config_from_edges(g, next(b.edge_sets()), W)


def _conditioning(g, W, C, model):
    C = frozenset(C)
    for c in C:
        if not model.is_positive_class(c, g):
            raise SamplerConfigError(f"cycle {c.rep} is not a positive (heavy) cycle")
        c.rep.check_in(g)
    try:
        return ConditioningSpec.build(C, model, W)
    except ValueError as exc:
        raise SamplerConfigError(f"unrealizable conditioning set: {exc}") from None


def sample_conditioned_batch(g: Multigraph, W, C, model: CycleWeightModel, ordering=None,
                             params: SamplerParams = SamplerParams()) -> FiniteBatch:
    """Samples of F given that its heavy cycles are exactly ``C``: the wired
    light sampler on W u A, plus the edges of C."""
    W = frozenset(W)
    spec = _conditioning(g, W, C, model)
    b = sample_finite_batch(g, spec.model_minus, W | spec.A, ordering, params)
    b.fixed = frozenset(e for c in spec.C for e in c.edges)
    return b


def sample_conditioned(g: Multigraph, W, C, model: CycleWeightModel, ordering=None,
                       params: SamplerParams = SamplerParams(), replica: int = 0) -> ECRSFConfig:
    W = frozenset(W)
    spec = _conditioning(g, W, C, model)
    b = _single(g, spec.model_minus, W | spec.A, ordering, params, replica)
    rest = next(b.edge_sets())
    return config_from_edges(g, rest | frozenset(e for c in spec.C for e in c.edges), W)


__all__ = [
    "SamplerParams", "WalkTrace", "RootingRecord", "LoopErasedPath", "p_lerw",
    "has_positive_cycle", "termination_problem", "FiniteBatch", "mask_to_edges",
    "sample_finite_batch", "config_from_edges", "sample_finite_free", "sample_finite_wired",
    "sample_conditioned", "sample_conditioned_batch", "ModelError",
]
