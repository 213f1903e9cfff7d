"""Finite multigraphs, the square lattice, and oriented simple cycles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np

Vertex = Hashable
Coord = tuple[int, int]

# lattice step directions: +x, +y, -x, -y; code 4 is the self-loop
DIRECTIONS: tuple[Coord, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))
SELF_LOOP = 4


class GraphError(ValueError):
    pass


class Multigraph:
    """Finite connected multigraph; self-loops and parallel edges allowed.

    Vertices are opaque hashable ids (integers in files).  Edges carry
    their own ids.  A self-loop contributes two half-edges to its vertex,
    so the simple random walk traverses it with probability 2/deg.

    Parameters
    ----------
    vertices : iterable of vertex ids
    edges : iterable of ``(edge_id, u, v)``
    coords : optional mapping vertex -> (x, y), used by the plaquette family
    """

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[tuple],
                 coords: dict | None = None, check_connected: bool = True):
        self.vertices: list = list(vertices)
        self.index: dict = {}
        for i, v in enumerate(self.vertices):
            if v in self.index:
                raise GraphError(f"duplicate vertex id {v!r}")
            self.index[v] = i
        self.edges: list[tuple] = []
        self.edge_index: dict = {}
        for eid, u, v in edges:
            if eid in self.edge_index:
                raise GraphError(f"duplicate edge id {eid!r}")
            if u not in self.index or v not in self.index:
                raise GraphError(f"edge {eid!r} references unknown vertex")
            self.edge_index[eid] = len(self.edges)
            self.edges.append((eid, u, v))
        self.coords = dict(coords) if coords else None

        n = len(self.vertices)
        # CSR half-edge arrays over internal indices
        half: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for k, (_, u, v) in enumerate(self.edges):
            iu, iv = self.index[u], self.index[v]
            half[iu].append((iv, k))
            half[iv].append((iu, k))
        self.adj_start = np.zeros(n + 1, dtype=np.int64)
        self.adj_start[1:] = np.cumsum([len(h) for h in half])
        self.adj_target = np.array([t for h in half for t, _ in h], dtype=np.int64)
        self.adj_edge = np.array([k for h in half for _, k in h], dtype=np.int64)
        if check_connected and n and not self._connected():
            raise GraphError("graph is not connected")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: Vertex) -> int:
        i = self.index[v]
        return int(self.adj_start[i + 1] - self.adj_start[i])

    def half_edges(self, v: Vertex) -> Iterator[tuple[Vertex, object]]:
        """Yield ``(neighbor, edge_id)`` for every half-edge at ``v``."""
        i = self.index[v]
        for h in range(self.adj_start[i], self.adj_start[i + 1]):
            yield self.vertices[self.adj_target[h]], self.edges[self.adj_edge[h]][0]

    def neighbors(self, v: Vertex) -> set:
        return {u for u, _ in self.half_edges(v)}

    def endpoints(self, eid) -> tuple:
        _, u, v = self.edges[self.edge_index[eid]]
        return u, v

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for h in range(self.adj_start[i], self.adj_start[i + 1]):
                j = int(self.adj_target[h])
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def is_lattice_embedded(self) -> bool:
        """True when coords exist, there are no parallel edges, and every
        non-loop edge joins unit-distance lattice points (so every simple
        4-cycle is an elementary square)."""
        if self.coords is None:
            return False
        seen = set()
        for _, u, v in self.edges:
            if u == v:
                continue
            key = frozenset((u, v))
            if key in seen:
                return False
            seen.add(key)
            (x1, y1), (x2, y2) = self.coords[u], self.coords[v]
            if abs(x1 - x2) + abs(y1 - y2) != 1:
                return False
        return True

    def subgraph_edges(self, keep: set) -> list[tuple]:
        return [e for e in self.edges if e[1] in keep and e[2] in keep]

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class LatticeView:
    """The square lattice Z^2, optionally with one self-loop at every vertex.

    With self-loops the degree is 6 (a self-loop occupies two half-edges).
    """

    kind: str = "z2"
    self_loops: bool = False

    def __post_init__(self):
        if self.kind != "z2":
            raise GraphError(f"unsupported lattice {self.kind!r}")

    def degree(self, v: Coord) -> int:
        return 6 if self.self_loops else 4

    def neighbors(self, v: Coord) -> list[Coord]:
        x, y = v
        return [(x + dx, y + dy) for dx, dy in DIRECTIONS]

    def half_edges(self, v: Coord):
        x, y = v
        for dx, dy in DIRECTIONS:
            w = (x + dx, y + dy)
            yield w, lattice_edge(v, w)
        if self.self_loops:
            yield v, ("loop", v)
            yield v, ("loop", v)

    def box(self, lo: Coord, hi: Coord) -> Multigraph:
        """Finite induced box ``[lo, hi]`` (inclusive) as a Multigraph whose
        vertex ids are the coordinate pairs."""
        return box_graph(lo, hi, self_loops=self.self_loops)


def lattice_edge(u: Coord, v: Coord) -> tuple:
    return ("e",) + (tuple(sorted((u, v))))


def linf(u: Coord, v: Coord = (0, 0)) -> int:
    return max(abs(u[0] - v[0]), abs(u[1] - v[1]))


# -- builders -----------------------------------------------------------------

def box_graph(lo: Coord, hi: Coord, self_loops: bool = False) -> Multigraph:
    verts = [(x, y) for y in range(lo[1], hi[1] + 1) for x in range(lo[0], hi[0] + 1)]
    vs = set(verts)
    edges = []
    for v in verts:
        x, y = v
        for w in ((x + 1, y), (x, y + 1)):
            if w in vs:
                edges.append((lattice_edge(v, w), v, w))
        if self_loops:
            edges.append((("loop", v), v, v))
    return Multigraph(verts, edges, coords={v: v for v in verts})


def grid_graph(rows: int, cols: int, self_loops: bool = False) -> Multigraph:
    """rows x cols grid with integer ids ``r*cols + c`` and coords ``(c, r)``."""
    verts = list(range(rows * cols))
    coords = {r * cols + c: (c, r) for r in range(rows) for c in range(cols)}
    edges = []
    k = 0
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((k, v, v + 1)); k += 1
            if r + 1 < rows:
                edges.append((k, v, v + cols)); k += 1
    if self_loops:
        for v in verts:
            edges.append((k, v, v)); k += 1
    return Multigraph(verts, edges, coords=coords)


def cycle_graph(n: int) -> Multigraph:
    return Multigraph(range(n), [(i, i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Multigraph:
    return Multigraph(range(n), [(i, i, i + 1) for i in range(n - 1)])


def theta_graph(k: int = 3) -> Multigraph:
    """Two vertices joined by ``k`` parallel edges."""
    return Multigraph([0, 1], [(i, 0, 1) for i in range(k)])


def complete_graph(n: int) -> Multigraph:
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((len(edges), i, j))
    return Multigraph(range(n), edges)


def c4_chord() -> Multigraph:
    """4-cycle 0-1-2-3 plus the chord 0-2."""
    return Multigraph(range(4), [(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0), (4, 0, 2)])


def theta_pendant() -> Multigraph:
    """Theta graph on {0, 1} with a pendant vertex 2 hanging off 1."""
    return Multigraph([0, 1, 2], [(0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 1, 2)])


# -- cycles -------------------------------------------------------------------

@dataclass(frozen=True)
class OrientedCycle:
    """Simple cycle ``v0 -e0-> v1 -e1-> ... -e_{k-1}-> v0``.

    Stored in canonical rotation (minimal vertex first).  Vertices must be
    mutually comparable for canonicalization; edges distinguish parallel
    edges, so two 2-cycles on the same vertex pair are distinct objects.
    """

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) or not self.vertices:
            raise GraphError("cycle needs as many edges as vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("cycle is not simple")
        if len(self.edges) == 2 and self.edges[0] == self.edges[1]:
            raise GraphError("backtrack along one edge is not a cycle")

    @classmethod
    def make(cls, vertices: Sequence, edges: Sequence) -> "OrientedCycle":
        vertices, edges = tuple(vertices), tuple(edges)
        r = _argmin(vertices)
        return cls(vertices[r:] + vertices[:r], edges[r:] + edges[:r])

    def __len__(self) -> int:
        return len(self.vertices)

    def reverse(self) -> "OrientedCycle":
        k = len(self.vertices)
        verts = (self.vertices[0],) + tuple(reversed(self.vertices[1:]))
        # edge into v0 becomes the first edge out of v0
        edges = tuple(self.edges[(k - 1 - i) % k] for i in range(k))
        return OrientedCycle.make(verts, edges)

    def is_self_loop(self) -> bool:
        return len(self.vertices) == 1

    def check_in(self, g: Multigraph) -> None:
        k = len(self.vertices)
        for i, e in enumerate(self.edges):
            u, v = g.endpoints(e)
            a, b = self.vertices[i], self.vertices[(i + 1) % k]
            if {u, v} != {a, b} or (u == v) != (a == b):
                raise GraphError(f"edge {e!r} does not join {a!r} and {b!r}")


def _argmin(seq: Sequence) -> int:
    best = 0
    for i in range(1, len(seq)):
        if seq[i] < seq[best]:
            best = i
    return best


@dataclass(frozen=True)
class CycleClass:
    """Unordered pair {gamma, gamma^-1}; ``rep`` is the canonical member."""

    rep: OrientedCycle
    partner: OrientedCycle = field(init=False)

    def __post_init__(self):
        rev = self.rep.reverse()
        a, b = sorted([self.rep, rev], key=_cycle_sort_key)
        object.__setattr__(self, "rep", a)
        object.__setattr__(self, "partner", b)

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.rep.vertices)

    @property
    def edges(self) -> frozenset:
        return frozenset(self.rep.edges)

    def orientations(self) -> tuple[OrientedCycle, OrientedCycle]:
        return self.rep, self.partner


def _cycle_sort_key(c: OrientedCycle):
    return (repr(c.vertices), repr(c.edges))


class CycleCapExceeded(RuntimeError):
    pass


def enumerate_cycle_classes(g: Multigraph, max_len: int, cap: int = 100_000) -> list[CycleClass]:
    """Every simple cycle class of length <= max_len, once each.

    Cycles are grown from their minimal-index vertex through higher-index
    vertices only, and each oriented cycle is kept together with its
    reversal, so classes are deduplicated by their canonical member.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    found: dict = {}
    order = {v: i for i, v in enumerate(g.vertices)}

    def add(verts, edges):
        cls = CycleClass(OrientedCycle.make(verts, edges))
        if cls.rep not in found:
            if len(found) >= cap:
                raise CycleCapExceeded(f"more than {cap} cycle classes")
            found[cls.rep] = cls

    for s in g.vertices:
        so = order[s]
        # self-loops at s
        for w, e in g.half_edges(s):
            if w == s:
                add((s,), (e,))
        stack = [(s, (s,), ())]
        while stack:
            v, verts, edges = stack.pop()
            for w, e in g.half_edges(v):
                if w == v:
                    continue
                if w == s and len(verts) >= 2:
                    if len(verts) == 2 and edges[0] == e:
                        continue
                    add(verts, edges + (e,))
                elif order[w] > so and w not in verts and len(verts) < max_len:
                    stack.append((w, verts + (w,), edges + (e,)))
    return sorted(found.values(), key=lambda c: (len(c.rep), _cycle_sort_key(c.rep)))


def find_cycle(g: Multigraph, edge_ids: Iterable, component: Iterable | None = None) -> OrientedCycle | None:
    """The unique cycle of a unicyclic edge set, by repeated leaf stripping.

    Returns None when the edge set is a forest.
    """
    edge_ids = list(edge_ids)
    inc: dict = {}
    for e in edge_ids:
        u, v = g.endpoints(e)
        inc.setdefault(u, []).append(e)
        inc.setdefault(v, []).append(e)
    alive = set(edge_ids)
    deg = {v: sum(2 if g.endpoints(e)[0] == g.endpoints(e)[1] else 1 for e in es)
           for v, es in inc.items()}
    leaves = [v for v, d in deg.items() if d == 1]
    while leaves:
        v = leaves.pop()
        for e in inc[v]:
            if e in alive:
                alive.discard(e)
                a, b = g.endpoints(e)
                w = b if a == v else a
                deg[v] -= 1
                deg[w] -= 1
                if deg[w] == 1:
                    leaves.append(w)
                break
    if not alive:
        return None
    # walk around the remaining core
    start_e = next(iter(sorted(alive, key=repr)))
    a, b = g.endpoints(start_e)
    if a == b:
        return OrientedCycle.make((a,), (start_e,))
    verts, edges = [a], [start_e]
    cur, prev_e = b, start_e
    while cur != a:
        verts.append(cur)
        nxt = next(e for e in inc[cur] if e in alive and e != prev_e)
        x, y = g.endpoints(nxt)
        edges.append(nxt)
        cur = y if x == cur else x
        prev_e = nxt
    return OrientedCycle.make(verts, edges)


def spiral(center: Coord = (0, 0)) -> Iterator[Coord]:
    """Enumerate Z^2 ring by ring around ``center`` (ring 0 is the center)."""
    cx, cy = center
    yield center
    r = 1
    while True:
        x, y = cx + r, cy - r + 1
        for _ in range(2 * r - 1):
            yield (x, y); y += 1
        for _ in range(2 * r):
            yield (x, y); x -= 1
        for _ in range(2 * r):
            yield (x, y); y -= 1
        for _ in range(2 * r + 1):
            yield (x, y); x += 1
        r += 1
