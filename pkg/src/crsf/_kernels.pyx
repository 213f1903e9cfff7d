# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled p-LERW kernels; see _fallback.py for the reference twin."""

from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.math cimport exp, isnan, NAN
from libc.stdlib cimport malloc, free
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref

import numpy as np

from .errors import StepCapExceeded

BACKEND = "cython"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef double TO_UNIT = 1.0 / 9007199254740992.0

END_ROOT = 0
END_BOUNDARY = 1

cdef int C_ROOT = 0
cdef int C_BOUNDARY = 1
cdef int C_STOP = 2

cdef int DX[5]
cdef int DY[5]
DX[:] = [1, 0, -1, 0, 0]
DY[:] = [0, 1, 0, -1, 0]


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cpdef uint64_t stream_key(uint64_t seed, uint64_t replica, uint64_t rank):
    cdef uint64_t k = mix64(seed ^ <uint64_t>0x6A09E667F3BCC909ULL)
    k = mix64(k ^ replica)
    return mix64(k + (rank + 1) * GAMMA)


cdef struct Stream:
    uint64_t state


cdef inline uint64_t s_next(Stream* s) noexcept nogil:
    s.state += GAMMA
    return mix64(s.state)


cdef inline double s_uniform(Stream* s) noexcept nogil:
    return <double>(s_next(s) >> 11) * TO_UNIT


cdef inline double len_weight(int64_t L, const double[:] len_w, double kappa) noexcept nogil:
    if L < len_w.shape[0]:
        return len_w[L]
    if not isnan(kappa):
        return exp(-kappa * L)
    return 0.0


cdef struct WalkOut:
    int64_t plen      # vertices on the loop-erased path
    int64_t elen      # successor edges recorded
    int end
    int64_t t
    int64_t cs
    double y
    double w
    int64_t maxd


# -- finite graphs ------------------------------------------------------------

cdef int finite_walk_c(const int64_t[:] adj_start, const int64_t[:] adj_target,
                       const int64_t[:] adj_edge, const double[:] len_w, double kappa,
                       const double[:] selfloop_w, object callback,
                       int64_t start, uint8_t* absorbing, Stream* st, int64_t budget,
                       int64_t* pv, int64_t* pe, int64_t* pos, WalkOut* out,
                       object rec) except -1:
    """Return 0 on a finished walk, 1 when the budget ran out.  ``pos`` must
    be all -1 on entry; the caller resets the entries of pv[:plen]."""
    cdef int64_t plen = 1, elen = 0, cur = start, t = 0, a, d, h, u, e, i, L, j
    cdef double w, y
    out.cs = -1
    out.y = NAN
    out.w = NAN
    if absorbing[start]:
        pv[0] = start
        out.plen = 1; out.elen = 0; out.end = C_BOUNDARY; out.t = 0
        return 0
    pv[0] = start
    pos[start] = 0
    while True:
        if t >= budget:
            out.plen = plen; out.elen = elen; out.t = t
            return 1
        a = adj_start[cur]
        d = adj_start[cur + 1] - a
        if d == 0:
            raise ValueError("walk reached an isolated vertex")
        h = a + <int64_t>(s_next(st) % <uint64_t>d)
        u = adj_target[h]
        e = adj_edge[h]
        t += 1
        if rec is not None:
            rec[0].append(u)
            rec[1].append(e)
        if absorbing[u]:
            pv[plen] = u; plen += 1
            pe[elen] = e; elen += 1
            out.plen = plen; out.elen = elen; out.end = C_BOUNDARY; out.t = t
            return 0
        i = pos[u]
        if i < 0:
            pos[u] = plen
            pv[plen] = u; plen += 1
            pe[elen] = e; elen += 1
            cur = u
            continue
        L = plen - i
        if L == 2 and pe[i] == e:
            w = 0.0
        elif callback is not None:
            w = callback([pv[j] for j in range(i, plen)],
                         [pe[j] for j in range(i, elen)] + [e])
        elif L == 1:
            w = selfloop_w[u]
        else:
            w = len_weight(L, len_w, kappa)
        y = s_uniform(st)
        if rec is not None:
            rec[2][t] = y
        if y < w:
            pe[elen] = e; elen += 1
            out.plen = plen; out.elen = elen; out.end = C_ROOT; out.t = t
            out.cs = i; out.y = y; out.w = w
            return 0
        for j in range(i + 1, plen):
            pos[pv[j]] = -1
        plen = i + 1
        elen = i
        cur = u


def finite_walk(const int64_t[:] adj_start, const int64_t[:] adj_target,
                const int64_t[:] adj_edge, const double[:] len_w, double kappa,
                const double[:] selfloop_w, object callback, int64_t start,
                const uint8_t[:] absorbing, uint64_t key, int64_t step_cap, bint record=False):
    cdef int64_t n = adj_start.shape[0] - 1
    cdef int64_t* pv = <int64_t*>malloc((n + 2) * sizeof(int64_t))
    cdef int64_t* pe = <int64_t*>malloc((n + 2) * sizeof(int64_t))
    cdef int64_t* pos = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef uint8_t* absb = <uint8_t*>malloc((n + 1) * sizeof(uint8_t))
    cdef Stream st
    cdef WalkOut out
    cdef int rc
    cdef int64_t j
    st.state = key
    for j in range(n):
        pos[j] = -1
        absb[j] = absorbing[j]
    rec = ([start], [], {}) if record else None
    try:
        rc = finite_walk_c(adj_start, adj_target, adj_edge, len_w, kappa, selfloop_w,
                           callback, start, absb, &st, step_cap, pv, pe, pos, &out, rec)
        if rc == 1:
            raise StepCapExceeded(step_cap)
        res = {"path": [pv[j] for j in range(out.plen)],
               "edges": [pe[j] for j in range(out.elen)],
               "end": out.end, "time": out.t, "cycle_start": out.cs,
               "y": out.y, "weight": out.w, "steps": out.t}
    finally:
        free(pv); free(pe); free(pos); free(absb)
    if record:
        res["trace"] = rec
    return res


def finite_batch(const int64_t[:] adj_start, const int64_t[:] adj_target,
                 const int64_t[:] adj_edge, const double[:] len_w, double kappa,
                 const double[:] selfloop_w, object callback, const int64_t[:] ordering,
                 const uint8_t[:] boundary, int64_t prefix, uint64_t seed,
                 uint64_t replica_start, int64_t count, int64_t step_cap):
    cdef int64_t n = adj_start.shape[0] - 1
    succ_arr = np.full((count, n), -1, dtype=np.int64)
    steps_arr = np.zeros(count, dtype=np.int64)
    exh_arr = np.zeros(count, dtype=np.uint8)
    cdef int64_t[:, :] succ = succ_arr
    cdef int64_t[:] steps = steps_arr
    cdef uint8_t[:] exhausted = exh_arr
    cdef int64_t* pv = <int64_t*>malloc((n + 2) * sizeof(int64_t))
    cdef int64_t* pe = <int64_t*>malloc((n + 2) * sizeof(int64_t))
    cdef int64_t* pos = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef uint8_t* absb = <uint8_t*>malloc((n + 1) * sizeof(uint8_t))
    cdef Stream st
    cdef WalkOut out
    cdef int64_t r, rank, v, j, used
    cdef int rc
    try:
        for j in range(n):
            pos[j] = -1
        for r in range(count):
            for j in range(n):
                absb[j] = boundary[j]
            used = 0
            for rank in range(prefix):
                v = ordering[rank]
                if absb[v]:
                    continue
                st.state = stream_key(seed, replica_start + <uint64_t>r, <uint64_t>rank)
                rc = finite_walk_c(adj_start, adj_target, adj_edge, len_w, kappa,
                                   selfloop_w, callback, v, absb, &st, step_cap - used,
                                   pv, pe, pos, &out, None)
                for j in range(out.plen):
                    pos[pv[j]] = -1
                if rc == 1:
                    exhausted[r] = 1
                    used = step_cap
                    break
                used += out.t
                for j in range(out.elen):
                    succ[r, pv[j]] = pe[j]
                    absb[pv[j]] = 1
            steps[r] = used
    finally:
        free(pv); free(pe); free(pos); free(absb)
    return succ_arr, steps_arr, exh_arr


# -- square lattice -----------------------------------------------------------

cdef int64_t OFF = 1073741824LL  # coordinates must stay within +-2^30
cdef int64_t LOW = 4294967295LL


cdef inline int64_t ckey(int64_t x, int64_t y) noexcept nogil:
    return ((x + OFF) << 32) | (y + OFF)


cdef inline int64_t kx(int64_t k) noexcept nogil:
    return (k >> 32) - OFF


cdef inline int64_t ky(int64_t k) noexcept nogil:
    return (k & LOW) - OFF


cdef int lattice_walk_c(const double[:] len_w, double kappa, double q, bint self_loops,
                        int64_t sx, int64_t sy, unordered_map[int64_t, int]* settled,
                        Stream* st, int64_t budget, int64_t stop_dist,
                        vector[int64_t]* pv, vector[int]* pd,
                        unordered_map[int64_t, int64_t]* pos, WalkOut* out,
                        object rec) except -1:
    """0 finished, 1 budget exhausted.  ``pos`` is cleared on exit."""
    cdef int64_t start = ckey(sx, sy), cx = sx, cy = sy, t = 0, maxd = 0
    cdef int64_t ux, uy, u, dist, i, L, j, adx, ady
    cdef uint64_t deg = 6 if self_loops else 4
    cdef int r
    cdef double w, y
    cdef unordered_map[int64_t, int64_t].iterator it
    pv.clear()
    pd.clear()
    pos.clear()
    out.cs = -1
    out.y = NAN
    out.w = NAN
    out.maxd = 0
    pv.push_back(start)
    if settled.count(start):
        out.end = C_BOUNDARY; out.t = 0
        return 0
    pos[0][start] = 0
    while True:
        if t >= budget:
            out.t = t; out.maxd = maxd
            pos.clear()
            return 1
        r = <int>(s_next(st) % deg)
        if r > 4:
            r = 4
        ux = cx + DX[r]
        uy = cy + DY[r]
        u = ckey(ux, uy)
        t += 1
        if rec is not None:
            rec[0].append((ux, uy))
            rec[1].append(r)
        adx = ux - sx if ux >= sx else sx - ux
        ady = uy - sy if uy >= sy else sy - uy
        dist = adx if adx > ady else ady
        if dist > maxd:
            maxd = dist
        if settled.count(u):
            pv.push_back(u)
            pd.push_back(r)
            out.end = C_BOUNDARY; out.t = t; out.maxd = maxd
            pos.clear()
            return 0
        it = pos.find(u)
        if it == pos.end():
            if stop_dist > 0 and dist >= stop_dist:
                out.end = C_STOP; out.t = t; out.maxd = maxd
                pos.clear()
                return 0
            pos[0][u] = <int64_t>pv.size()
            pv.push_back(u)
            pd.push_back(r)
            cx = ux
            cy = uy
            continue
        i = deref(it).second
        L = <int64_t>pv.size() - i
        if L == 1:
            w = q
        elif L == 2:
            w = 0.0
        else:
            w = len_weight(L, len_w, kappa)
        y = s_uniform(st)
        if rec is not None:
            rec[2][t] = y
        if y < w:
            pd.push_back(r)
            out.end = C_ROOT; out.t = t; out.cs = i; out.y = y; out.w = w; out.maxd = maxd
            pos.clear()
            return 0
        for j in range(i + 1, <int64_t>pv.size()):
            pos.erase(pv[0][j])
        pv.resize(i + 1)
        pd.resize(i)
        cx = ux
        cy = uy


cdef class _Settled:
    cdef unordered_map[int64_t, int] m


def lattice_walk(const double[:] len_w, double kappa, double q, bint self_loops,
                 start, settled, uint64_t key, int64_t step_cap, int64_t stop_dist=0,
                 bint record=False):
    cdef unordered_map[int64_t, int] sm
    cdef vector[int64_t] pv
    cdef vector[int] pd
    cdef unordered_map[int64_t, int64_t] pos
    cdef Stream st
    cdef WalkOut out
    cdef size_t j
    for (x, y), d in settled.items():
        sm[ckey(x, y)] = d
    st.state = key
    rec = ([tuple(start)], [], {}) if record else None
    rc = lattice_walk_c(len_w, kappa, q, self_loops, start[0], start[1], &sm, &st,
                        step_cap, stop_dist, &pv, &pd, &pos, &out, rec)
    if rc == 1:
        raise StepCapExceeded(step_cap)
    res = {"path": [(kx(pv[j]), ky(pv[j])) for j in range(pv.size())],
           "dirs": [pd[j] for j in range(pd.size())],
           "end": out.end, "time": out.t, "cycle_start": out.cs, "y": out.y,
           "weight": out.w, "maxdist": out.maxd, "steps": out.t}
    if record:
        res["trace"] = rec
    return res


def lattice_window_batch(const double[:] len_w, double kappa, double q, bint self_loops,
                         window, uint64_t seed, uint64_t replica_start, int64_t count,
                         int64_t step_cap, int64_t rank_offset=0):
    cdef int64_t k = len(window)
    out_arr = np.full((count, k), -1, dtype=np.int8)
    steps_arr = np.zeros(count, dtype=np.int64)
    exh_arr = np.zeros(count, dtype=np.uint8)
    cdef signed char[:, :] outv = out_arr
    cdef int64_t[:] steps = steps_arr
    cdef uint8_t[:] exhausted = exh_arr
    cdef vector[int64_t] wk
    cdef unordered_map[int64_t, int] settled
    cdef vector[int64_t] pv
    cdef vector[int] pd
    cdef unordered_map[int64_t, int64_t] pos
    cdef Stream st
    cdef WalkOut out
    cdef int64_t r, rank, used, j
    cdef int rc
    for x, y in window:
        wk.push_back(ckey(x, y))
    for r in range(count):
        settled.clear()
        used = 0
        for rank in range(k):
            if settled.count(wk[rank]):
                continue
            st.state = stream_key(seed, replica_start + <uint64_t>r, <uint64_t>(rank + rank_offset))
            rc = lattice_walk_c(len_w, kappa, q, self_loops, kx(wk[rank]), ky(wk[rank]),
                                &settled, &st, step_cap - used, 0, &pv, &pd, &pos, &out, None)
            if rc == 1:
                exhausted[r] = 1
                used = step_cap
                break
            used += out.t
            for j in range(<int64_t>pd.size()):
                settled[pv[j]] = pd[j]
        if not exhausted[r]:
            for j in range(k):
                outv[r, j] = settled[wk[j]]
        steps[r] = used
    return out_arr, steps_arr, exh_arr


def lattice_rooting_batch(const double[:] len_w, double kappa, double q, bint self_loops,
                          uint64_t seed, uint64_t replica_start, int64_t count,
                          int64_t step_cap, int64_t stop_dist):
    troot_arr = np.full(count, -1, dtype=np.int64)
    maxd_arr = np.zeros(count, dtype=np.int64)
    clen_arr = np.zeros(count, dtype=np.int64)
    exh_arr = np.zeros(count, dtype=np.uint8)
    cdef int64_t[:] troot = troot_arr
    cdef int64_t[:] maxdist = maxd_arr
    cdef int64_t[:] clen = clen_arr
    cdef uint8_t[:] exhausted = exh_arr
    cdef unordered_map[int64_t, int] empty
    cdef vector[int64_t] pv
    cdef vector[int] pd
    cdef unordered_map[int64_t, int64_t] pos
    cdef Stream st
    cdef WalkOut out
    cdef int64_t r
    cdef int rc
    for r in range(count):
        st.state = stream_key(seed, replica_start + <uint64_t>r, 0)
        rc = lattice_walk_c(len_w, kappa, q, self_loops, 0, 0, &empty, &st, step_cap,
                            stop_dist, &pv, &pd, &pos, &out, None)
        if rc == 1:
            exhausted[r] = 1
            continue
        maxdist[r] = out.maxd
        if out.end == C_ROOT:
            troot[r] = out.t
            clen[r] = <int64_t>pv.size() - out.cs
    return troot_arr, maxd_arr, clen_arr, exh_arr


cdef object _explore_c(const double[:] len_w, double kappa, double q, bint self_loops,
                       int64_t x0, int64_t y0, bint has_target, int64_t tx, int64_t ty,
                       uint64_t seed, uint64_t replica, int64_t step_cap, int64_t size_cap,
                       bint want_sets):
    cdef unordered_map[int64_t, int] settled
    cdef unordered_map[int64_t, int] comp
    cdef vector[int64_t] queue
    cdef vector[int64_t] nbr
    cdef vector[int64_t] pv
    cdef vector[int] pd
    cdef vector[int64_t] cycle
    cdef unordered_map[int64_t, int64_t] pos
    cdef Stream st
    cdef WalkOut out
    cdef int64_t used = 0, rank = 0, j, head = 0, nhead = 0, v, u, target = 0
    cdef int rc, status = 0, connected = -1, r
    cdef bint attach
    if has_target:
        target = ckey(tx, ty)
    st.state = stream_key(seed, replica, 0)
    rc = lattice_walk_c(len_w, kappa, q, self_loops, x0, y0, &settled, &st, step_cap, 0,
                        &pv, &pd, &pos, &out, None)
    if rc == 1:
        return [], [], [], 2, -1, step_cap, 0, 0
    used += out.t
    for j in range(out.cs, <int64_t>pv.size()):
        cycle.push_back(pv[j])
    for j in range(<int64_t>pd.size()):
        settled[pv[j]] = pd[j]
        comp[pv[j]] = 1
        queue.push_back(pv[j])
    while True:
        if has_target and settled.count(target):
            status = 3
            connected = 1 if comp.count(target) else 0
            break
        if <int64_t>comp.size() > size_cap:
            status = 1
            break
        while head < <int64_t>queue.size():
            v = queue[head]
            head += 1
            for r in range(4):
                u = ckey(kx(v) + DX[r], ky(v) + DY[r])
                if not settled.count(u):
                    nbr.push_back(u)
        if nhead >= <int64_t>nbr.size():
            break
        u = nbr[nhead]
        nhead += 1
        if settled.count(u):
            continue
        rank += 1
        st.state = stream_key(seed, replica, <uint64_t>rank)
        rc = lattice_walk_c(len_w, kappa, q, self_loops, kx(u), ky(u), &settled, &st,
                            step_cap - used, 0, &pv, &pd, &pos, &out, None)
        if rc == 1:
            status = 2
            used = step_cap
            break
        used += out.t
        attach = out.end == C_BOUNDARY and comp.count(pv[pv.size() - 1]) > 0
        for j in range(<int64_t>pd.size()):
            settled[pv[j]] = pd[j]
            if attach:
                comp[pv[j]] = 1
                queue.push_back(pv[j])
    if has_target and status == 0:
        connected = 1 if comp.count(target) else 0
    if want_sets:
        # report in insertion order (queue holds every component vertex once)
        comp_list = [(kx(queue[j]), ky(queue[j])) for j in range(<int64_t>queue.size())]
        cyc = [(kx(cycle[j]), ky(cycle[j])) for j in range(<int64_t>cycle.size())]
        succ = [settled[queue[j]] for j in range(<int64_t>queue.size())]
    else:
        comp_list = None
        cyc = None
        succ = None
    return comp_list, cyc, succ, status, connected, used, <int64_t>comp.size(), <int64_t>cycle.size()


def lattice_explore(const double[:] len_w, double kappa, double q, bint self_loops,
                    x, target, uint64_t seed, uint64_t replica, int64_t step_cap,
                    int64_t size_cap):
    has_t = target is not None
    tx, ty = (target if has_t else (0, 0))
    comp, cycle, succ, status, connected, used, _, _ = _explore_c(
        len_w, kappa, q, self_loops, x[0], x[1], has_t, tx, ty, seed, replica,
        step_cap, size_cap, True)
    return {"component": comp, "cycle": cycle, "succ": succ, "status": status,
            "connected": connected, "steps": used}


def lattice_explore_batch(const double[:] len_w, double kappa, double q, bint self_loops,
                          x, target, uint64_t seed, uint64_t replica_start, int64_t count,
                          int64_t step_cap, int64_t size_cap):
    sizes = np.zeros(count, dtype=np.int64)
    clen = np.zeros(count, dtype=np.int64)
    status = np.zeros(count, dtype=np.int8)
    connected = np.full(count, -1, dtype=np.int8)
    steps = np.zeros(count, dtype=np.int64)
    has_t = target is not None
    tx, ty = (target if has_t else (0, 0))
    cdef int64_t r
    for r in range(count):
        _, _, _, st, cn, used, sz, cl = _explore_c(
            len_w, kappa, q, self_loops, x[0], x[1], has_t, tx, ty, seed,
            replica_start + <uint64_t>r, step_cap, size_cap, False)
        sizes[r] = sz
        clen[r] = cl
        status[r] = st
        connected[r] = cn
        steps[r] = used
    return sizes, clen, status, connected, steps
