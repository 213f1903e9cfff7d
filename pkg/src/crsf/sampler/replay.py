"""Reference loop erasure: a literal replay of the recursive construction.

The walk (X_n) is copied into Z; at each loop-closing time the closed loop
is read off Z, kept if its draw is below its weight, and otherwise erased
by freezing Z on the whole stretch.  Quadratic and slow; it exists only to
check the optimized kernels on recorded traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..graph import GraphError, OrientedCycle


@dataclass
class ReplayResult:
    vertices: tuple
    edges: tuple
    T_r: float
    T_W: float
    closures: tuple
    cycle_start: int = -1


def naive_lerw(steps, edges, draws, weight, absorbing=lambda v: False) -> ReplayResult:
    """Replay a recorded trajectory.

    ``steps`` is X_0..X_T, ``edges[n - 1]`` the edge of step n, ``draws``
    maps a time n to Y_n and ``weight(vertices, edges)`` gives the keep
    probability of a closed loop.  A missing draw at a closure time raises
    KeyError, which signals a disagreement with the recorder.
    """
    T = len(steps) - 1
    T_W = next((k for k in range(T + 1) if absorbing(steps[k])), None)
    horizon = T if T_W is None else T_W
    Z = list(steps[:horizon + 1])
    Ed = [None] + list(edges[:horizon])  # Ed[n]: edge into Z[n], None when frozen
    closures = []
    prev = 0
    while True:
        nk = None
        for j in range(prev + 1, horizon + 1):
            if Ed[j] is not None and Z[j] in Z[:j]:
                nk = j
                break
            if T_W is not None and j == T_W:
                break
        if nk is None:
            break
        closures.append(nk)
        n1 = Z.index(Z[nk])
        loop_v = [Z[n1]] + [Z[n] for n in range(n1 + 1, nk) if Ed[n] is not None]
        loop_e = [Ed[n] for n in range(n1 + 1, nk + 1) if Ed[n] is not None]
        y = draws[nk]
        if y < weight(loop_v, loop_e):
            path = _path(Z, Ed, nk)
            cs = path[0].index(Z[nk])
            return ReplayResult(path[0], path[1], nk, math.inf, tuple(closures), cs)
        for n in range(n1 + 1, nk + 1):
            Z[n] = Z[nk]
            Ed[n] = None
        prev = nk
    path = _path(Z, Ed, horizon)
    return ReplayResult(path[0], path[1], math.inf,
                        math.inf if T_W is None else T_W, tuple(closures))


def _path(Z, Ed, end):
    vs = [Z[0]]
    es = []
    for n in range(1, end + 1):
        if Ed[n] is not None:
            es.append(Ed[n])
            if n < end or not _closes(Z, n):
                vs.append(Z[n])
    return tuple(vs), tuple(es)


def _closes(Z, n):
    return Z[n] in Z[:n]


def model_weight(model, graph):
    """Keep probability of a closed loop from ``model``: a backtrack along
    one edge is not a simple cycle and weighs 0."""
    def w(verts, edges):
        try:
            c = OrientedCycle.make(verts, edges)
        except GraphError:
            return 0.0
        return model.weight(c, graph)
    return w
