"""Independent reference computations used by the tests.

Nothing here calls the enumeration or sampling code of the package:

* ``brute_crsf`` scans all 2^m edge subsets and recognises cycle-rooted
  forests by leaf stripping;
* ``matrix_tree`` counts spanning trees with a reduced Laplacian
  determinant;
* ``RootedForestOracle`` gives exact edge and isolation probabilities for
  the vertex-rooting model with constant q.  That model is the rooted
  spanning forest measure with root weight 2q, which is determinantal with
  Green function (L + 2q I)^{-1}.
"""

from __future__ import annotations

import itertools

import numpy as np


def _strip(vertices, edges):
    """Remove degree-1 vertices repeatedly; returns the indices of the
    surviving (cycle) edges and the final degrees."""
    inc = {v: [] for v in vertices}
    for k, (e, u, v) in enumerate(edges):
        inc[u].append(k)
        inc[v].append(k)  # a self-loop counts twice
    alive = set(range(len(edges)))
    deg = {v: len(inc[v]) for v in vertices}
    stack = [v for v in vertices if deg[v] == 1]
    while stack:
        v = stack.pop()
        if deg[v] != 1:
            continue
        k = next(k for k in inc[v] if k in alive)
        alive.discard(k)
        deg[v] = 0
        _, a, b = edges[k]
        u = b if a == v else a
        deg[u] -= 1
        if deg[u] == 1:
            stack.append(u)
    return alive, deg


def _components(vertices, edges):
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, u, v in edges:
        parent[find(u)] = find(v)
    comps = {}
    for v in vertices:
        comps.setdefault(find(v), []).append(v)
    return list(comps.values()), find


def brute_crsf(g, W=()):
    """All spanning subgraphs whose components each carry exactly one cycle
    (W empty) or, with W, either one cycle and no W vertex or no cycle and
    exactly one W vertex.  Returns {edge frozenset: frozenset of cycle edge
    sets}."""
    W = set(W)
    out = {}
    verts = list(g.vertices)
    for r in range(len(g.edges) + 1):
        for sub in itertools.combinations(g.edges, r):
            comps, find = _components(verts, sub)
            ok = True
            for comp in comps:
                cs = set(comp)
                ne = sum(1 for _, u, v in sub if u in cs)
                nw = len(cs & W)
                if nw == 0 and ne == len(comp):
                    continue
                if nw == 1 and ne == len(comp) - 1:
                    continue
                ok = False
                break
            if not ok:
                continue
            alive, _ = _strip(verts, list(sub))
            cyc_edges = [sub[k] for k in alive]
            # group the surviving edges into cycles by component
            groups = {}
            for e, u, v in cyc_edges:
                groups.setdefault(find(u), set()).add(e)
            out[frozenset(e for e, _, _ in sub)] = frozenset(frozenset(s) for s in groups.values())
    return out


def laplacian(g, index=None):
    """Graph Laplacian ignoring self-loops (they do not change tree counts)."""
    index = index or {v: i for i, v in enumerate(g.vertices)}
    L = np.zeros((len(index), len(index)))
    for _, u, v in g.edges:
        if u == v:
            continue
        i, j = index[u], index[v]
        L[i, i] += 1
        L[j, j] += 1
        L[i, j] -= 1
        L[j, i] -= 1
    return L


def matrix_tree(g) -> int:
    L = laplacian(g)
    return int(round(np.linalg.det(L[1:, 1:])))


class RootedForestOracle:
    """Determinantal formulas for the vertex-rooting model with constant q.

    On a finite graph the Green function is (L + 2q I)^{-1}.  On Z^2 the
    box [-R, R]^2 is used with the full lattice degree on the diagonal
    (walks leaving the box are killed); the killing rate 2q/(4 + 2q) makes
    the error exponentially small in R.
    """

    def __init__(self, q: float, graph=None, R: int = 16):
        self.q = float(q)
        if graph is None:
            self.index = {(x, y): i for i, (x, y) in enumerate(
                (x, y) for y in range(-R, R + 1) for x in range(-R, R + 1))}
            n = len(self.index)
            A = np.zeros((n, n))
            for (x, y), i in self.index.items():
                A[i, i] = 4.0 + 2 * self.q
                for d in ((1, 0), (0, 1), (-1, 0), (0, -1)):
                    j = self.index.get((x + d[0], y + d[1]))
                    if j is not None:
                        A[i, j] = -1.0
        else:
            self.index = {v: i for i, v in enumerate(graph.vertices)}
            A = laplacian(graph, self.index) + 2 * self.q * np.eye(len(self.index))
        self.G = np.linalg.inv(A)

    def _Y(self, edges):
        G, ix = self.G, self.index
        k = len(edges)
        Y = np.zeros((k, k))
        for a, (u, v) in enumerate(edges):
            for b, (x, y) in enumerate(edges):
                Y[a, b] = G[ix[u], ix[x]] - G[ix[u], ix[y]] - G[ix[v], ix[x]] + G[ix[v], ix[y]]
        return Y

    def edge_prob(self, u, v) -> float:
        return float(self._Y([(u, v)])[0, 0])

    def all_absent(self, edges) -> float:
        Y = self._Y(list(edges))
        return float(np.linalg.det(np.eye(len(edges)) - Y))

    def all_present(self, edges) -> float:
        return float(np.linalg.det(self._Y(list(edges))))

    def isolated(self, x, neighbors) -> float:
        """P(|cc(x)| = 1): no non-loop edge at x."""
        return self.all_absent([(x, y) for y in neighbors])
