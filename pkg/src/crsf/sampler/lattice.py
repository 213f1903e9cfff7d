"""Infinite-volume sampling on Z^2: window sampler and component explorer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._backend import kernels
from ..errors import StepCapExceeded
from ..graph import LatticeView, Multigraph, OrientedCycle, find_cycle, lattice_edge
from ..models import CycleWeightModel, encode_lattice
from ..parallel import chunk_ranges, run_chunks
from .core import DIRS, SamplerParams, _check_bounded

STATUS = {0: "complete", 1: "size cap", 2: "step cap", 3: "target settled"}


def _step(v, d):
    return (v[0] + DIRS[d][0], v[1] + DIRS[d][1])


def succ_edge(v, d):
    return ("loop", v) if d == 4 else lattice_edge(v, _step(v, d))


@dataclass
class WindowSample:
    """Final successors of the window vertices and the window edge states."""

    successors: dict
    edges: dict
    steps: int


def _window(window):
    win = [tuple(int(c) for c in v) for v in window]
    if len(set(win)) != len(win):
        raise ValueError("window vertices must be distinct")
    return win


def window_edges(window) -> list:
    """Lattice edges with both endpoints in the window, in a fixed order."""
    ws = set(window)
    out = []
    for v in window:
        for d in range(4):
            u = _step(v, d)
            e = lattice_edge(v, u)
            if u in ws and e not in out:
                out.append(e)
    return out


def sample_window_infinite(lattice: LatticeView, model: CycleWeightModel, window,
                           params: SamplerParams = SamplerParams(), replica: int = 0) -> WindowSample:
    """One run of the infinite-volume algorithm restricted to ``window``.

    Window vertices are processed first in the given order, each by a
    p-LERW absorbed by the previously settled vertices; later vertices of
    any ordering never change these successors, so the output is final.
    """
    _check_bounded(model)
    win = _window(window)
    len_w, kappa, q = encode_lattice(model, lattice)
    settled: dict = {}
    used = 0
    for rank, v in enumerate(win):
        if v in settled:
            continue
        key = kernels.stream_key(params.seed, replica, rank)
        out = kernels.lattice_walk(len_w, kappa, q, lattice.self_loops, v, settled, key,
                                   params.step_cap - used, 0, False)
        used += out["time"]
        for u, d in zip(out["path"], out["dirs"]):
            assert u not in settled, "settled successor would be overwritten"
            settled[u] = d
    succ = {v: (_step(v, settled[v]), succ_edge(v, settled[v])) for v in win}
    edges = {}
    for e in window_edges(win):
        _, a, b = e
        edges[e] = succ[a][0] == b or succ[b][0] == a
    return WindowSample(succ, edges, used)


def _window_chunk(lattice, model, win, seed, start, count, step_cap, rank_offset):
    len_w, kappa, q = encode_lattice(model, lattice)
    return kernels.lattice_window_batch(len_w, kappa, q, lattice.self_loops, win, seed,
                                        start, count, step_cap, rank_offset)


@dataclass
class WindowBatch:
    window: list
    dirs: np.ndarray  # int8 [replicas, k]; -1 rows are cap-exhausted
    steps: np.ndarray
    exhausted: np.ndarray

    @property
    def ok(self) -> np.ndarray:
        return self.exhausted == 0

    def edge_indicators(self, edges=None) -> np.ndarray:
        """bool [completed replicas, len(edges)]: edge {u, v} present iff the
        successor of u is v or the successor of v is u."""
        edges = window_edges(self.window) if edges is None else edges
        pos = {v: i for i, v in enumerate(self.window)}
        d = self.dirs[self.ok]
        out = np.zeros((len(d), len(edges)), dtype=bool)
        for j, (_, a, b) in enumerate(edges):
            ia, ib = pos[a], pos[b]
            da = _dir_between(a, b)
            db = _dir_between(b, a)
            out[:, j] = (d[:, ia] == da) | (d[:, ib] == db)
        return out

    def keys(self) -> np.ndarray:
        """One integer per completed replica encoding all window edge states."""
        ind = self.edge_indicators()
        w = np.left_shift(np.int64(1), np.arange(ind.shape[1], dtype=np.int64))
        return (ind.astype(np.int64) * w).sum(axis=1)


def _dir_between(a, b) -> int:
    return DIRS.index((b[0] - a[0], b[1] - a[1]))


def sample_window_batch(lattice: LatticeView, model: CycleWeightModel, window,
                        params: SamplerParams = SamplerParams(), replica_start: int = 0,
                        rank_offset: int = 0) -> WindowBatch:
    """Replicated window runs.  Window vertex j uses the stream of rank
    ``rank_offset + j``, so a sub-window can be replayed on the streams it
    would get inside a larger window."""
    _check_bounded(model)
    win = _window(window)
    if not win:
        z = np.zeros(params.replicas, dtype=np.int64)
        return WindowBatch([], np.zeros((params.replicas, 0), np.int8), z, z.astype(np.uint8))
    chunks = chunk_ranges(replica_start, params.replicas, params.n_workers)
    args = [(lattice, model, win, params.seed, s, c, params.step_cap, rank_offset)
            for s, c in chunks if c > 0]
    parts = run_chunks(_window_chunk, args, params.n_workers)
    return WindowBatch(win, np.concatenate([p[0] for p in parts]),
                       np.concatenate([p[1] for p in parts]),
                       np.concatenate([p[2] for p in parts]))


# -- component exploration ----------------------------------------------------------

@dataclass
class ComponentReport:
    origin: tuple
    vertices: list
    successors: dict
    cycle: OrientedCycle | None
    status: str
    steps: int
    connected: int = -1  # to the target, when one was given

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def complete(self) -> bool:
        return self.status == "complete"


def explore_component(lattice: LatticeView, model: CycleWeightModel, x,
                      params: SamplerParams = SamplerParams(), replica: int = 0,
                      target=None, size_cap: int = 10 ** 6) -> ComponentReport:
    """Grow the component of ``x`` adaptively.

    x's walk is settled first; then every unsettled neighbor of the current
    component runs a p-LERW absorbed by all settled vertices and joins the
    component iff its path ends on it.  With ``target`` the run stops as
    soon as the target is settled.
    """
    _check_bounded(model)
    len_w, kappa, q = encode_lattice(model, lattice)
    x = tuple(x)
    tgt = None if target is None else tuple(target)
    out = kernels.lattice_explore(len_w, kappa, q, lattice.self_loops, x, tgt, params.seed,
                                  replica, params.step_cap, size_cap)
    verts = [tuple(v) for v in out["component"]]
    succ = {v: (_step(v, d), succ_edge(v, d)) for v, d in zip(verts, out["succ"])}
    cyc = None
    if out["cycle"]:
        cv = [tuple(v) for v in out["cycle"]]
        cyc = OrientedCycle.make(cv, [succ[v][1] for v in cv])
    return ComponentReport(x, verts, succ, cyc, STATUS[out["status"]], int(out["steps"]),
                           int(out["connected"]))


def one_cycle_check(report: ComponentReport, model: CycleWeightModel, lattice: LatticeView) -> bool:
    """A complete component is closed under successors and carries exactly
    one cycle, of positive weight, equal to the root walk's kept cycle."""
    if not report.complete:
        return True
    vs = set(report.vertices)
    if any(w not in vs for w, _ in report.successors.values()):
        return False
    edges = {e for _, e in report.successors.values()}
    if len(edges) != len(vs):
        return False
    sub = Multigraph(report.vertices, [(e, v, w) for v, (w, e) in report.successors.items()],
                     check_connected=False)
    c = find_cycle(sub, edges)
    if c is None or report.cycle is None:
        return False
    if set(c.edges) != set(report.cycle.edges):
        return False
    return model.weight(report.cycle, lattice) > 0


def _explore_chunk(lattice, model, x, target, seed, start, count, step_cap, size_cap):
    len_w, kappa, q = encode_lattice(model, lattice)
    return kernels.lattice_explore_batch(len_w, kappa, q, lattice.self_loops, x, target, seed,
                                         start, count, step_cap, size_cap)


def explore_batch(lattice: LatticeView, model: CycleWeightModel, x, params: SamplerParams,
                  target=None, size_cap: int = 10 ** 6, replica_start: int = 0):
    """Vectorised exploration: (sizes, cycle lengths, status, connected, steps)."""
    _check_bounded(model)
    x = tuple(int(c) for c in x)
    tgt = None if target is None else tuple(int(c) for c in target)
    chunks = chunk_ranges(replica_start, params.replicas, params.n_workers)
    args = [(lattice, model, x, tgt, params.seed, s, c, params.step_cap, size_cap)
            for s, c in chunks if c > 0]
    parts = run_chunks(_explore_chunk, args, params.n_workers)
    if not parts:
        return tuple(np.zeros(0, np.int64) for _ in range(5))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(5))


def rooting_batch(lattice: LatticeView, model: CycleWeightModel, params: SamplerParams,
                  stop_dist: int, replica_start: int = 0):
    """Boundary-free walks from the origin: (T_r or -1, max l-inf distance,
    kept cycle length, exhausted).  A walk stops once it reaches
    ``stop_dist``."""
    _check_bounded(model)
    chunks = chunk_ranges(replica_start, params.replicas, params.n_workers)
    args = [(lattice, model, params.seed, s, c, params.step_cap, stop_dist)
            for s, c in chunks if c > 0]
    parts = run_chunks(_rooting_chunk, args, params.n_workers)
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(4))


def _rooting_chunk(lattice, model, seed, start, count, step_cap, stop_dist):
    len_w, kappa, q = encode_lattice(model, lattice)
    return kernels.lattice_rooting_batch(len_w, kappa, q, lattice.self_loops, seed, start,
                                         count, step_cap, stop_dist)


__all__ = ["WindowSample", "WindowBatch", "ComponentReport", "window_edges",
           "sample_window_infinite", "sample_window_batch", "explore_component",
           "one_cycle_check", "explore_batch", "rooting_batch", "succ_edge", "StepCapExceeded"]
