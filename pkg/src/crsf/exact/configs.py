"""Configuration types and exhaustive enumeration of CRSFs / ECRSFs."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from ..graph import CycleClass, Multigraph, find_cycle

DEFAULT_EDGE_CAP = 24


class EnumerationRefused(RuntimeError):
    pass


@dataclass(frozen=True)
class CRSFConfig:
    """Spanning edge set whose components each carry exactly one cycle."""

    edges: frozenset
    components: tuple = field(compare=False)
    cycles: tuple = field(compare=False)  # CycleClass per cyclic component

    def successor_map(self, g: Multigraph, orientation: dict | None = None) -> dict:
        """Orient every tree edge toward its component's cycle.  Cycles
        follow ``orientation`` (class -> OrientedCycle) or the class rep."""
        return _successors(g, self.edges, self.cycles, orientation, ())


@dataclass(frozen=True)
class ECRSFConfig:
    """Wired configuration: unicycles avoiding W, or trees with one W vertex."""

    edges: frozenset
    boundary: frozenset
    components: tuple = field(compare=False)
    cycles: tuple = field(compare=False)

    def successor_map(self, g: Multigraph, orientation: dict | None = None) -> dict:
        return _successors(g, self.edges, self.cycles, orientation, self.boundary)


def _successors(g, edges, cycles, orientation, roots):
    succ = {}
    for cls in cycles:
        c = orientation.get(cls, cls.rep) if orientation else cls.rep
        for i, v in enumerate(c.vertices):
            succ[v] = (c.vertices[(i + 1) % len(c)], c.edges[i])
    inc: dict = {}
    for e in edges:
        u, v = g.endpoints(e)
        inc.setdefault(u, []).append((v, e))
        inc.setdefault(v, []).append((u, e))
    frontier = list(succ) + [w for w in roots]
    done = set(frontier)
    while frontier:
        v = frontier.pop()
        for u, e in inc.get(v, ()):
            if u not in done:
                succ[u] = (v, e)
                done.add(u)
                frontier.append(u)
    return succ


@dataclass
class EnsembleTable:
    """All configurations of U(G) (``flavor='free'``) or U_W(G)."""

    graph: Multigraph
    configs: list
    flavor: str
    boundary: frozenset = frozenset()

    def __len__(self):
        return len(self.configs)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i


def _check_cap(g: Multigraph, cap: int):
    if g.m > cap:
        raise EnumerationRefused(
            f"{g.m} edges exceeds the enumeration cap {cap} (about 2^{g.m} = {2 ** g.m:.3g} subsets)")


def _components(g: Multigraph, eidx):
    """(root -> vertex indices, root -> edge indices) for a subset of edges."""
    uf = _UnionFind(g.n)
    ends = [(g.index[g.edges[k][1]], g.index[g.edges[k][2]]) for k in eidx]
    for a, b in ends:
        ra, rb = uf.find(a), uf.find(b)
        if ra != rb:
            uf.parent[ra] = rb
    verts: dict = {}
    for i in range(g.n):
        verts.setdefault(uf.find(i), []).append(i)
    edges: dict = {r: [] for r in verts}
    for k, (a, _) in zip(eidx, ends):
        edges[uf.find(a)].append(k)
    return verts, edges


def _build(g, eidx, verts, edges):
    comps, cycles = [], []
    for r, vs in verts.items():
        comps.append(frozenset(g.vertices[i] for i in vs))
        if len(edges[r]) == len(vs):
            c = find_cycle(g, [g.edges[k][0] for k in edges[r]])
            cycles.append(CycleClass(c))
    comps.sort(key=lambda s: sorted(map(repr, s)))
    cycles.sort(key=lambda c: repr(c.rep))
    return frozenset(g.edges[k][0] for k in eidx), tuple(comps), tuple(cycles)


def enumerate_crsf(g: Multigraph, cap: int = DEFAULT_EDGE_CAP) -> EnsembleTable:
    """Every CRSF of ``g``: edge subsets of size |V| with #edges == #vertices
    in each component."""
    _check_cap(g, cap)
    out = []
    for eidx in combinations(range(g.m), g.n):
        verts, edges = _components(g, eidx)
        if all(len(edges[r]) == len(vs) for r, vs in verts.items()):
            es, comps, cycles = _build(g, eidx, verts, edges)
            assert len(cycles) == len(comps)
            out.append(CRSFConfig(es, comps, cycles))
    return EnsembleTable(g, out, "free")


def enumerate_ecrsf(g: Multigraph, W, cap: int = DEFAULT_EDGE_CAP) -> EnsembleTable:
    """Every ECRSF of ``g`` with respect to ``W``.

    Each W vertex sits in its own tree component, so there are exactly
    |V| - |W| edges; only subsets of that size are examined.
    """
    _check_cap(g, cap)
    W = frozenset(W)
    unknown = W - set(g.vertices)
    if unknown:
        raise ValueError(f"boundary vertices not in graph: {sorted(map(repr, unknown))}")
    widx = {g.index[w] for w in W}
    out = []
    for eidx in combinations(range(g.m), g.n - len(W)):
        verts, edges = _components(g, eidx)
        ok = True
        for r, vs in verts.items():
            nw = sum(1 for i in vs if i in widx)
            ne = len(edges[r])
            if nw == 0 and ne == len(vs):
                continue
            if nw == 1 and ne == len(vs) - 1:
                continue
            ok = False
            break
        if ok:
            es, comps, cycles = _build(g, eidx, verts, edges)
            out.append(ECRSFConfig(es, W, comps, cycles))
    return EnsembleTable(g, out, "wired", W)


def spanning_tree_count(g: Multigraph) -> int:
    """Number of spanning trees by deletion-contraction (no matrix-tree).

    Works on a list of (u, v) edges; self-loops are dropped since no tree
    uses them.
    """
    edges = tuple((g.index[u], g.index[v]) for _, u, v in g.edges if u != v)
    return _dc(frozenset(range(g.n)), edges)


def _dc(verts, edges) -> int:
    if len(verts) == 1:
        return 1
    if not edges or not _connected(verts, edges):
        return 0
    (a, b), rest = edges[0], edges[1:]
    # contract b into a, dropping the loops this creates
    merged = []
    for u, v in rest:
        u = a if u == b else u
        v = a if v == b else v
        if u != v:
            merged.append((u, v))
    return _dc(verts, rest) + _dc(verts - {b}, tuple(merged))


def _connected(verts, edges) -> bool:
    adj: dict = {v: [] for v in verts}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)
