"""Pure-Python kernels.

Line-for-line twin of ``_kernels.pyx``: the same random stream, the same
draw order and the same loop bookkeeping, so both backends return
identical samples for identical seeds.
"""

import math

import numpy as np

from .errors import StepCapExceeded

MASK = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
TO_UNIT = 1.0 / 9007199254740992.0

END_ROOT = 0
END_BOUNDARY = 1

BACKEND = "python"


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def stream_key(seed, replica, rank):
    k = mix64((seed & MASK) ^ 0x6A09E667F3BCC909)
    k = mix64(k ^ (replica & MASK))
    return mix64((k + ((rank + 1) * GAMMA)) & MASK)


class Stream:
    """Counter-based splitmix64 stream."""

    __slots__ = ("state",)

    def __init__(self, key):
        self.state = key & MASK

    def next(self):
        self.state = (self.state + GAMMA) & MASK
        return mix64(self.state)

    def below(self, d):
        return self.next() % d

    def uniform(self):
        return (self.next() >> 11) * TO_UNIT


def _len_weight(L, len_w, kappa):
    if L < len(len_w):
        return len_w[L]
    if kappa == kappa:
        return math.exp(-kappa * L)
    return 0.0


# -- finite graphs ------------------------------------------------------------

def _lists(*arrays):
    return [[int(v) for v in a] for a in arrays]


def _finite_walk(adj_start, adj_target, adj_edge, len_w, kappa, selfloop_w, callback,
                 start, absorbing, stream, budget, rec):
    if absorbing[start]:
        return [start], [], END_BOUNDARY, 0, -1, math.nan, math.nan
    pos = {start: 0}
    pv = [start]
    pe = []
    cur = start
    t = 0
    while True:
        if t >= budget:
            raise StepCapExceeded(budget)
        a = adj_start[cur]
        d = adj_start[cur + 1] - a
        if d == 0:
            raise ValueError("walk reached an isolated vertex")
        h = a + stream.below(d)
        u = adj_target[h]
        e = adj_edge[h]
        t += 1
        if rec is not None:
            rec[0].append(u)
            rec[1].append(e)
        if absorbing[u]:
            pv.append(u)
            pe.append(e)
            return pv, pe, END_BOUNDARY, t, -1, math.nan, math.nan
        i = pos.get(u, -1)
        if i < 0:
            pos[u] = len(pv)
            pv.append(u)
            pe.append(e)
            cur = u
            continue
        L = len(pv) - i
        if L == 2 and pe[i] == e:
            w = 0.0
        elif callback is not None:
            w = callback(pv[i:], pe[i:] + [e])
        elif L == 1:
            w = selfloop_w[u]
        else:
            w = _len_weight(L, len_w, kappa)
        y = stream.uniform()
        if rec is not None:
            rec[2][t] = y
        if y < w:
            pe.append(e)
            return pv, pe, END_ROOT, t, i, y, w
        for v in pv[i + 1:]:
            del pos[v]
        del pv[i + 1:]
        del pe[i:]
        cur = u


def finite_walk(adj_start, adj_target, adj_edge, len_w, kappa, selfloop_w, callback,
                start, absorbing, key, step_cap, record=False):
    """One p-LERW on a finite graph; ``absorbing`` is a uint8 mask."""
    rec = ([int(start)], [], {}) if record else None
    adj_start, adj_target, adj_edge = _lists(adj_start, adj_target, adj_edge)
    pv, pe, end, t, cs, y, w = _finite_walk(
        adj_start, adj_target, adj_edge, len_w, kappa, selfloop_w, callback,
        int(start), absorbing, Stream(key), step_cap, rec)
    out = {"path": pv, "edges": pe, "end": end, "time": t, "cycle_start": cs,
           "y": y, "weight": w, "steps": t}
    if record:
        out["trace"] = rec
    return out


def finite_batch(adj_start, adj_target, adj_edge, len_w, kappa, selfloop_w, callback,
                 ordering, boundary, prefix, seed, replica_start, count, step_cap):
    """Wilson-type sampler, ``count`` replicas.

    Returns ``(succ_edge[count, n], steps[count], exhausted[count])``;
    ``succ_edge`` is -1 on boundary and unprocessed vertices.
    """
    n = len(adj_start) - 1
    adj_start, adj_target, adj_edge = _lists(adj_start, adj_target, adj_edge)
    succ = np.full((count, n), -1, dtype=np.int64)
    steps = np.zeros(count, dtype=np.int64)
    exhausted = np.zeros(count, dtype=np.uint8)
    for r in range(count):
        absorbing = bytearray(boundary)
        used = 0
        row = succ[r]
        for rank in range(prefix):
            v = int(ordering[rank])
            if absorbing[v]:
                continue
            stream = Stream(stream_key(seed, replica_start + r, rank))
            try:
                pv, pe, end, t, cs, y, w = _finite_walk(
                    adj_start, adj_target, adj_edge, len_w, kappa, selfloop_w, callback,
                    v, absorbing, stream, step_cap - used, None)
            except StepCapExceeded:
                exhausted[r] = 1
                used = step_cap
                break
            used += t
            for j in range(len(pe)):
                row[pv[j]] = pe[j]
                absorbing[pv[j]] = 1
        steps[r] = used
    return succ, steps, exhausted


# -- square lattice -----------------------------------------------------------
# direction codes: 0 +x, 1 +y, 2 -x, 3 -y, 4 self-loop

_DX = (1, 0, -1, 0, 0)
_DY = (0, 1, 0, -1, 0)


def _lattice_walk(len_w, kappa, q, self_loops, sx, sy, settled, stream, budget,
                  stop_dist, rec):
    """Returns (pv, pd, end, t, cycle_start, y, w, maxdist).

    ``pd[j]`` is the direction code from pv[j] to its successor.  ``end`` is
    END_ROOT, END_BOUNDARY, or 2 when ``stop_dist`` was reached first.
    """
    start = (sx, sy)
    if start in settled:
        return [start], [], END_BOUNDARY, 0, -1, math.nan, math.nan, 0
    deg = 6 if self_loops else 4
    pos = {start: 0}
    pv = [start]
    pd = []
    cx, cy = sx, sy
    t = 0
    maxd = 0
    while True:
        if t >= budget:
            raise StepCapExceeded(budget)
        r = stream.below(deg)
        if r > 4:
            r = 4
        u = (cx + _DX[r], cy + _DY[r])
        t += 1
        if rec is not None:
            rec[0].append(u)
            rec[1].append(r)
        dist = max(abs(u[0] - sx), abs(u[1] - sy))
        if dist > maxd:
            maxd = dist
        if u in settled:
            pv.append(u)
            pd.append(r)
            return pv, pd, END_BOUNDARY, t, -1, math.nan, math.nan, maxd
        i = pos.get(u, -1)
        if i < 0:
            if stop_dist > 0 and dist >= stop_dist:
                return pv, pd, 2, t, -1, math.nan, math.nan, maxd
            pos[u] = len(pv)
            pv.append(u)
            pd.append(r)
            cx, cy = u
            continue
        L = len(pv) - i
        if L == 1:
            w = q
        elif L == 2:
            w = 0.0
        else:
            w = _len_weight(L, len_w, kappa)
        y = stream.uniform()
        if rec is not None:
            rec[2][t] = y
        if y < w:
            pd.append(r)
            return pv, pd, END_ROOT, t, i, y, w, maxd
        for v in pv[i + 1:]:
            del pos[v]
        del pv[i + 1:]
        del pd[i:]
        cx, cy = u


def lattice_walk(len_w, kappa, q, self_loops, start, settled, key, step_cap,
                 stop_dist=0, record=False):
    """One p-LERW on Z^2.  ``settled`` maps coordinates to direction codes
    and acts as the absorbing set."""
    rec = ([tuple(start)], [], {}) if record else None
    pv, pd, end, t, cs, y, w, maxd = _lattice_walk(
        len_w, kappa, q, bool(self_loops), int(start[0]), int(start[1]), settled,
        Stream(key), step_cap, stop_dist, rec)
    out = {"path": pv, "dirs": pd, "end": end, "time": t, "cycle_start": cs,
           "y": y, "weight": w, "maxdist": maxd, "steps": t}
    if record:
        out["trace"] = rec
    return out


def lattice_window_batch(len_w, kappa, q, self_loops, window, seed, replica_start,
                         count, step_cap, rank_offset=0):
    k = len(window)
    out = np.full((count, k), -1, dtype=np.int8)
    steps = np.zeros(count, dtype=np.int64)
    exhausted = np.zeros(count, dtype=np.uint8)
    win = [(int(x), int(y)) for x, y in window]
    for r in range(count):
        settled = {}
        used = 0
        for rank in range(k):
            sx, sy = win[rank]
            if (sx, sy) in settled:
                continue
            stream = Stream(stream_key(seed, replica_start + r, rank + rank_offset))
            try:
                pv, pd, end, t, cs, y, w, maxd = _lattice_walk(
                    len_w, kappa, q, self_loops, sx, sy, settled, stream,
                    step_cap - used, 0, None)
            except StepCapExceeded:
                exhausted[r] = 1
                used = step_cap
                break
            used += t
            for j in range(len(pd)):
                settled[pv[j]] = pd[j]
        if not exhausted[r]:
            for j in range(k):
                out[r, j] = settled[win[j]]
        steps[r] = used
    return out, steps, exhausted


def lattice_rooting_batch(len_w, kappa, q, self_loops, seed, replica_start, count,
                          step_cap, stop_dist):
    """Walks from the origin with no boundary.  Returns (T_r or -1 when the
    walk reached ``stop_dist`` first, max l-inf distance, kept cycle
    length, exhausted)."""
    troot = np.full(count, -1, dtype=np.int64)
    maxdist = np.zeros(count, dtype=np.int64)
    clen = np.zeros(count, dtype=np.int64)
    exhausted = np.zeros(count, dtype=np.uint8)
    empty = {}
    for r in range(count):
        stream = Stream(stream_key(seed, replica_start + r, 0))
        try:
            pv, pd, end, t, cs, y, w, maxd = _lattice_walk(
                len_w, kappa, q, self_loops, 0, 0, empty, stream, step_cap, stop_dist, None)
        except StepCapExceeded:
            exhausted[r] = 1
            continue
        maxdist[r] = maxd
        if end == END_ROOT:
            troot[r] = t
            clen[r] = len(pv) - cs
    return troot, maxdist, clen, exhausted


def _lattice_explore(len_w, kappa, q, self_loops, x, target, seed, replica, step_cap,
                     size_cap):
    """Adaptive exploration of the component of ``x``.

    Status: 0 complete, 1 size cap, 2 step cap, 3 stopped at settled target.
    """
    settled = {}
    comp = {}
    used = 0
    rank = 0
    x = (int(x[0]), int(x[1]))
    stream = Stream(stream_key(seed, replica, rank))
    try:
        pv, pd, end, t, cs, y, w, maxd = _lattice_walk(
            len_w, kappa, q, self_loops, x[0], x[1], settled, stream, step_cap, 0, None)
    except StepCapExceeded:
        return [], [], [], 2, -1, step_cap
    used += t
    cycle = pv[cs:]
    queue = []
    for j in range(len(pd)):
        settled[pv[j]] = pd[j]
        comp[pv[j]] = 1
        queue.append(pv[j])
    head = 0
    nbr_queue = []
    nhead = 0
    status = 0
    connected = -1
    while True:
        if target is not None and target in settled:
            status = 3
            connected = 1 if target in comp else 0
            break
        if len(comp) > size_cap:
            status = 1
            break
        # expand frontier of newly added component vertices
        while head < len(queue):
            v = queue[head]
            head += 1
            for r in range(4):
                u = (v[0] + _DX[r], v[1] + _DY[r])
                if u not in settled:
                    nbr_queue.append(u)
        if nhead >= len(nbr_queue):
            break
        y0 = nbr_queue[nhead]
        nhead += 1
        if y0 in settled:
            continue
        rank += 1
        stream = Stream(stream_key(seed, replica, rank))
        try:
            pv, pd, end, t, cs, yy, w, maxd = _lattice_walk(
                len_w, kappa, q, self_loops, y0[0], y0[1], settled, stream,
                step_cap - used, 0, None)
        except StepCapExceeded:
            status = 2
            used = step_cap
            break
        used += t
        attach = end == END_BOUNDARY and pv[-1] in comp
        for j in range(len(pd)):
            settled[pv[j]] = pd[j]
            if attach:
                comp[pv[j]] = 1
                queue.append(pv[j])
    if target is not None and status == 0:
        connected = 1 if target in comp else 0
    return list(comp), cycle, [settled[v] for v in comp], status, connected, used


def lattice_explore(len_w, kappa, q, self_loops, x, target, seed, replica, step_cap,
                    size_cap):
    comp, cycle, succ, status, connected, used = _lattice_explore(
        len_w, kappa, q, bool(self_loops), x, target, seed, replica, step_cap, size_cap)
    return {"component": comp, "cycle": cycle, "succ": succ, "status": status,
            "connected": connected, "steps": used}


def lattice_explore_batch(len_w, kappa, q, self_loops, x, target, seed, replica_start,
                          count, step_cap, size_cap):
    sizes = np.zeros(count, dtype=np.int64)
    clen = np.zeros(count, dtype=np.int64)
    status = np.zeros(count, dtype=np.int8)
    connected = np.full(count, -1, dtype=np.int8)
    steps = np.zeros(count, dtype=np.int64)
    tgt = None if target is None else (int(target[0]), int(target[1]))
    for r in range(count):
        comp, cycle, _, st, cn, used = _lattice_explore(
            len_w, kappa, q, bool(self_loops), x, tgt, seed, replica_start + r,
            step_cap, size_cap)
        sizes[r] = len(comp)
        clen[r] = len(cycle)
        status[r] = st
        connected[r] = cn
        steps[r] = used
    return sizes, clen, status, connected, steps
