"""Exhaustions, vertex orderings and the assumption checker."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import (LatticeView, Multigraph, OrientedCycle, box_graph,
                    enumerate_cycle_classes, linf, spiral)
from .models import CycleWeightModel


@dataclass(frozen=True)
class ExhaustionSpec:
    """Increasing balls B_n^x.

    On the lattice, ``B_n^x = {y : |y - x|_inf <= step * n}``.  On a finite
    graph, ``sets[n - 1]`` is B_n (the same sequence for every x).
    """

    step: int = 3
    sets: tuple | None = None
    graph: Multigraph | None = field(default=None, compare=False)

    @classmethod
    def explicit(cls, g: Multigraph, sets) -> "ExhaustionSpec":
        sets = tuple(frozenset(s) for s in sets)
        for a, b in zip(sets, sets[1:]):
            if not a <= b:
                raise ValueError("exhaustion sets must be increasing")
        return cls(step=0, sets=sets, graph=g)

    @property
    def is_lattice(self) -> bool:
        return self.sets is None

    @property
    def depth(self) -> float:
        return math.inf if self.sets is None else len(self.sets)


def ball(ex: ExhaustionSpec, x, n: int) -> tuple[frozenset, frozenset]:
    """(B_n^x, boundary of B_n^x); the boundary holds the members adjacent
    to the complement.  On the lattice ``n = 0`` gives ``{x}``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if ex.is_lattice:
        r = ex.step * n
        cx, cy = x
        B = frozenset((cx + i, cy + j) for i in range(-r, r + 1) for j in range(-r, r + 1))
        bd = frozenset(v for v in B if linf(v, x) == r)
        return B, bd
    if n < 1 or n > len(ex.sets):
        raise ValueError(f"explicit exhaustion has indices 1..{len(ex.sets)}")
    B = ex.sets[n - 1]
    g = ex.graph
    bd = frozenset(v for v in B if any(u not in B for u in g.neighbors(v)))
    return B, bd


# -- orderings ------------------------------------------------------------------

@dataclass(frozen=True)
class OrderingSpec:
    """Rank -> vertex bijection.

    ``rule='given'`` uses ``order`` first and then the remaining vertices
    in graph order; ``rule='spiral'`` enumerates lattice coordinates ring
    by ring around ``center`` (after ``order``, if any).
    """

    order: tuple = ()
    rule: str = "given"
    center: tuple = (0, 0)

    def __post_init__(self):
        if self.rule not in ("given", "spiral"):
            raise ValueError(f"unknown ordering rule {self.rule!r}")
        if len(set(self.order)) != len(self.order):
            raise ValueError("ordering is not injective")

    def resolve(self, g: Multigraph) -> list:
        missing = [v for v in self.order if v not in g.index]
        if missing:
            raise ValueError(f"ordering names unknown vertices {missing[:5]}")
        head = list(self.order)
        seen = set(head)
        if self.rule == "given":
            rest = [v for v in g.vertices if v not in seen]
        else:
            if g.coords is None:
                raise ValueError("spiral ordering needs vertex coordinates")
            by_coord = {c: v for v, c in g.coords.items()}
            rest = []
            need = g.n - len(seen)
            for c in spiral(tuple(self.center)):
                v = by_coord.get(c)
                if v is not None and v not in seen:
                    rest.append(v)
                    if len(rest) == need:
                        break
        return head + rest


# -- assumption checker ---------------------------------------------------------

@dataclass
class AssumptionProfile:
    alpha: float
    beta: float
    delta: float
    M: float
    M_prime: float
    C: float
    d: int
    loop_family: str
    witnesses: dict = field(default_factory=dict, repr=False)


@dataclass
class AssumptionViolation:
    n: int
    vertex: object
    annulus_size: int
    reason: str

    def __str__(self):
        return f"no witness loop for boundary vertex {self.vertex!r} at n={self.n}: {self.reason}"


def delta_of(alpha: float, beta: float) -> float:
    return 1.0 - alpha * beta


def _witness(local: Multigraph, deg, model, model_graph, v, allowed: set, max_len: int):
    """Best (weight * probability) loop in ``allowed`` reachable from ``v``
    through ``allowed``.  Returns (w, prob, cycle, path) or None."""
    inner = Multigraph([u for u in local.vertices if u in allowed],
                       local.subgraph_edges(allowed), check_connected=False)
    if inner.n == 0:
        return None
    # BFS from v through allowed vertices
    dist = {v: 0}
    parent = {v: None}
    q = deque([v])
    while q:
        a = q.popleft()
        for b, _ in local.half_edges(a):
            if b in allowed and b not in dist:
                dist[b] = dist[a] + 1
                parent[b] = a
                q.append(b)
    best = None
    for cls in enumerate_cycle_classes(inner, max_len):
        for c in cls.orientations():
            w = model.weight(c, model_graph)
            if w <= 0:
                continue
            reach = [u for u in c.vertices if u in dist]
            if not reach:
                continue
            u = min(reach, key=lambda t: (dist[t], repr(t)))
            path = [u]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            path.reverse()
            prob = 1.0
            for a in path[:-1]:
                prob /= deg(a)
            k = c.vertices.index(u)
            for i in range(len(c)):
                a = c.vertices[(k + i) % len(c)]
                prob *= (2.0 if c.is_self_loop() else 1.0) / deg(a)
            if best is None or w * prob > best[0] * best[1]:
                best = (w, prob, c, tuple(path))
    return best


def check_assumptions(g, model: CycleWeightModel, ex: ExhaustionSpec, probe_depth: int = 4,
                      x=None, max_len: int = 4):
    """Certify the loop assumption on the annuli B_{n+1} minus (B_n u its
    boundary) for n = 1..probe_depth.

    Returns an ``AssumptionProfile`` (alpha, beta taken as the worst
    witness weight and walk probability) or the first
    ``AssumptionViolation``.
    """
    if not model.bounded:
        raise ValueError("assumption check needs a model bounded by one")
    lattice = isinstance(g, LatticeView)
    if lattice:
        x = (0, 0) if x is None else tuple(x)
        deg = lambda v: g.degree(v)  # noqa: E731
        model_graph = g
    else:
        if ex.is_lattice:
            raise ValueError("finite graphs need an explicit exhaustion")
        x = g.vertices[0] if x is None else x
        deg = g.degree
        model_graph = g
        probe_depth = min(probe_depth, len(ex.sets) - 1)
    alpha, beta = math.inf, math.inf
    witnesses = {}
    for n in range(1, probe_depth + 1):
        Bn, dn = ball(ex, x, n)
        Bn1, dn1 = ball(ex, x, n + 1)
        annulus = set(Bn1) - set(Bn) - set(dn1)
        for v in sorted(dn, key=repr):
            if lattice:
                r = max_len
                local = box_graph((v[0] - r, v[1] - r), (v[0] + r, v[1] + r), g.self_loops)
            else:
                local = g
            wit = _witness(local, deg, model, model_graph, v, annulus, max_len)
            if wit is None:
                return AssumptionViolation(n, v, len(annulus), "no positive-weight loop reachable in the annulus")
            w, p, c, path = wit
            witnesses[(n, v)] = (c, path)
            alpha = min(alpha, w)
            beta = min(beta, p)
    if not witnesses:
        return AssumptionViolation(1, x, 0, "nothing to probe")
    M, Mp, C, d = _geometry(g, ex, x, probe_depth + 1)
    fam = model.family if type(model) is CycleWeightModel else "scaled"
    return AssumptionProfile(alpha, beta, delta_of(alpha, beta), M, Mp, C, d,
                             f"{fam} loops of length <= {max_len}", witnesses)


def _geometry(g, ex, x, depth):
    ns = np.arange(1, depth + 1)
    dists, sizes = [], []
    for n in ns:
        B, bd = ball(ex, x, int(n))
        sizes.append(len(bd))
        if ex.is_lattice:
            dists.append(min(linf(v, x) for v in bd) if bd else 0)
        else:
            dists.append(_graph_dist(g, x, bd))
    ratio = np.array(dists, float) / ns
    sizes = np.array(sizes, float)
    pos = sizes > 0
    if pos.sum() >= 2:
        slope = np.polyfit(np.log(ns[pos]), np.log(sizes[pos]), 1)[0]
        d = max(0, int(round(slope)))
    else:
        d = 0
    C = float(np.max(sizes / ns ** d))
    return float(ratio.max()), float(ratio.min()), C, d


def _graph_dist(g: Multigraph, x, targets) -> int:
    if not targets:
        return 0
    dist = {x: 0}
    q = deque([x])
    while q:
        a = q.popleft()
        if a in targets:
            return dist[a]
        for b in g.neighbors(a):
            if b not in dist:
                dist[b] = dist[a] + 1
                q.append(b)
    return 0
