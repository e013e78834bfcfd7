# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search kernels.

Move-for-move mirror of ``py.py`` (the reference backend); scan orders,
tie-breaks and integer arithmetic are identical, so both backends produce
the same solutions.  See py.py for the semantics contract.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt

BACKEND = "cython"

cdef long long INF = <long long>1 << 62


cdef inline long long _d(bint use_mat, const int[:, ::1] dmat,
                         const double[::1] xs, const double[::1] ys,
                         Py_ssize_t n, Py_ssize_t i, Py_ssize_t j) nogil:
    cdef double dx, dy
    if i > n:
        i = 0
    if j > n:
        j = 0
    if use_mat:
        return <long long>dmat[i, j]
    dx = xs[i] - xs[j]
    dy = ys[i] - ys[j]
    return <long long>floor(sqrt(dx * dx + dy * dy) + 0.5)


cdef class _Ctx:
    cdef bint use_mat
    cdef const int[:, ::1] dmat
    cdef const double[::1] xs
    cdef const double[::1] ys
    cdef int[::1] succ
    cdef int[::1] pred
    cdef int[::1] route_of
    cdef long long[::1] load
    cdef long long[::1] rcost
    cdef int[::1] size
    cdef const long long[::1] demands
    cdef long long cap
    cdef Py_ssize_t n
    cdef Py_ssize_t n_slots


cdef _Ctx _ctx(state):
    cdef _Ctx ctx = _Ctx()
    dmat = state.dmat
    ctx.use_mat = dmat is not None
    if ctx.use_mat:
        ctx.dmat = dmat
    else:
        ctx.dmat = np.zeros((1, 1), dtype=np.int32)
    ctx.xs = state.xs
    ctx.ys = state.ys
    ctx.succ = state.succ
    ctx.pred = state.pred
    ctx.route_of = state.route_of
    ctx.load = state.load
    ctx.rcost = state.rcost
    ctx.size = state.size
    ctx.demands = state.demands
    ctx.cap = state.capacity
    ctx.n = state.n
    ctx.n_slots = state.n_slots
    return ctx


def two_opt(state):
    cdef _Ctx c = _ctx(state)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] scratch = np.empty(c.n + 2, dtype=np.int32)
    cdef int[::1] seq = scratch
    cdef long long total_delta = 0, route_delta, delta, d_a_ti
    cdef Py_ssize_t r, v, node, size, i, j, lo, hi
    cdef Py_ssize_t a, ti, tj, b, prev
    cdef int tmp
    cdef bint improved
    for r in range(c.n_slots):
        size = c.size[r]
        if size < 2:
            continue
        v = c.n + 1 + r
        node = c.succ[v]
        i = 0
        while node <= c.n:
            seq[i] = <int>node
            i += 1
            node = c.succ[node]
        route_delta = 0
        improved = True
        while improved:
            improved = False
            for i in range(size - 1):
                a = seq[i - 1] if i > 0 else 0
                ti = seq[i]
                d_a_ti = _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, ti)
                for j in range(i + 1, size):
                    tj = seq[j]
                    b = seq[j + 1] if j < size - 1 else 0
                    delta = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, tj)
                             + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, ti, b)
                             - d_a_ti
                             - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, tj, b))
                    if delta < 0:
                        lo = i
                        hi = j
                        while lo < hi:
                            tmp = seq[lo]
                            seq[lo] = seq[hi]
                            seq[hi] = tmp
                            lo += 1
                            hi -= 1
                        route_delta += delta
                        improved = True
                        break
                if improved:
                    break
        if route_delta != 0:
            prev = v
            for i in range(size):
                c.succ[prev] = seq[i]
                c.pred[seq[i]] = <int>prev
                prev = seq[i]
            c.succ[prev] = <int>v
            c.pred[v] = <int>prev
            c.rcost[r] += route_delta
            total_delta += route_delta
    state.total = state.total + total_delta
    return int(total_delta)


def relocate(state, cnp.ndarray neighbors_arr):
    cdef _Ctx c = _ctx(state)
    cdef const int[:, ::1] neighbors = neighbors_arr
    cdef Py_ssize_t k = neighbors.shape[1]
    cdef long long total_delta = 0, qc, gain, add, delta
    cdef Py_ssize_t r1, r2, cc, nxt, t, u, side
    cdef Py_ssize_t a1, b1, a2, b2
    cdef bint applied
    for r1 in range(c.n_slots):
        if c.size[r1] == 0:
            continue
        cc = c.succ[c.n + 1 + r1]
        while cc <= c.n:
            nxt = c.succ[cc]
            qc = c.demands[cc]
            a1 = c.pred[cc]
            b1 = c.succ[cc]
            gain = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a1, cc)
                    + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cc, b1)
                    - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a1, b1))
            for t in range(k):
                u = neighbors[cc, t]
                if u < 0:
                    break
                r2 = c.route_of[u]
                if r2 == r1 or r2 < 0:
                    continue
                if c.load[r2] + qc > c.cap:
                    continue
                applied = False
                for side in range(2):
                    if side == 0:
                        a2 = u
                        b2 = c.succ[u]
                    else:
                        a2 = c.pred[u]
                        b2 = u
                    add = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a2, cc)
                           + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cc, b2)
                           - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a2, b2))
                    delta = add - gain
                    if delta < 0:
                        c.succ[a1] = <int>b1
                        c.pred[b1] = <int>a1
                        c.size[r1] -= 1
                        c.load[r1] -= qc
                        c.rcost[r1] -= gain
                        c.succ[a2] = <int>cc
                        c.pred[cc] = <int>a2
                        c.succ[cc] = <int>b2
                        c.pred[b2] = <int>cc
                        c.route_of[cc] = <int>r2
                        c.size[r2] += 1
                        c.load[r2] += qc
                        c.rcost[r2] += add
                        total_delta += delta
                        applied = True
                        break
                if applied:
                    break
            cc = nxt
    state.total = state.total + total_delta
    return int(total_delta)


def swap(state, cnp.ndarray neighbors_arr):
    cdef _Ctx c = _ctx(state)
    cdef const int[:, ::1] neighbors = neighbors_arr
    cdef Py_ssize_t k = neighbors.shape[1]
    cdef long long total_delta = 0, qc, qu, d1, d2
    cdef Py_ssize_t r1, r2, cc, nxt, t, u
    cdef Py_ssize_t pc, nc, pu, nu
    for r1 in range(c.n_slots):
        if c.size[r1] == 0:
            continue
        cc = c.succ[c.n + 1 + r1]
        while cc <= c.n:
            nxt = c.succ[cc]
            qc = c.demands[cc]
            pc = c.pred[cc]
            nc = c.succ[cc]
            for t in range(k):
                u = neighbors[cc, t]
                if u < 0:
                    break
                r2 = c.route_of[u]
                if r2 == r1 or r2 < 0:
                    continue
                qu = c.demands[u]
                if c.load[r1] - qc + qu > c.cap or c.load[r2] - qu + qc > c.cap:
                    continue
                pu = c.pred[u]
                nu = c.succ[u]
                d1 = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, pc, u)
                      + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, u, nc)
                      - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, pc, cc)
                      - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cc, nc))
                d2 = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, pu, cc)
                      + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cc, nu)
                      - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, pu, u)
                      - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, u, nu))
                if d1 + d2 < 0:
                    c.succ[pc] = <int>u
                    c.pred[u] = <int>pc
                    c.succ[u] = <int>nc
                    c.pred[nc] = <int>u
                    c.succ[pu] = <int>cc
                    c.pred[cc] = <int>pu
                    c.succ[cc] = <int>nu
                    c.pred[nu] = <int>cc
                    c.route_of[cc] = <int>r2
                    c.route_of[u] = <int>r1
                    c.load[r1] += qu - qc
                    c.load[r2] += qc - qu
                    c.rcost[r1] += d1
                    c.rcost[r2] += d2
                    total_delta += d1 + d2
                    break
            cc = nxt
    state.total = state.total + total_delta
    return int(total_delta)


cdef long long _best_position(_Ctx c, Py_ssize_t cust, Py_ssize_t* after) nogil:
    cdef long long qc = c.demands[cust]
    cdef long long best = INF, add, d0c
    cdef Py_ssize_t best_after = -1
    cdef Py_ssize_t r, a, b
    for r in range(c.n_slots):
        if c.size[r] == 0:
            continue
        if c.load[r] + qc > c.cap:
            continue
        a = c.n + 1 + r
        while True:
            b = c.succ[a]
            add = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, cust)
                   + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cust, b)
                   - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, b))
            if add < best:
                best = add
                best_after = a
            if b > c.n:
                break
            a = b
    d0c = _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, 0, cust)
    if 2 * d0c < best:
        best = 2 * d0c
        best_after = -1
    after[0] = best_after
    return best


cdef Py_ssize_t _new_route_slot(_Ctx c):
    cdef Py_ssize_t r, v
    for r in range(c.n_slots):
        if c.size[r] == 0:
            return r
    r = c.n_slots
    c.n_slots += 1
    v = c.n + 1 + r
    c.succ[v] = <int>v
    c.pred[v] = <int>v
    c.route_of[v] = <int>r
    c.load[r] = 0
    c.rcost[r] = 0
    c.size[r] = 0
    return r


cdef long long _insert_after(_Ctx c, Py_ssize_t cust, Py_ssize_t a):
    cdef Py_ssize_t r = c.route_of[a]
    cdef Py_ssize_t b = c.succ[a]
    cdef long long delta = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, cust)
                            + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cust, b)
                            - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, b))
    c.succ[a] = <int>cust
    c.pred[cust] = <int>a
    c.succ[cust] = <int>b
    c.pred[b] = <int>cust
    c.route_of[cust] = <int>r
    c.size[r] += 1
    c.load[r] += c.demands[cust]
    c.rcost[r] += delta
    return delta


cdef void _compact_slots(_Ctx c):
    cdef Py_ssize_t w = 0, r, v_old, v_new, first, last, node
    for r in range(c.n_slots):
        if c.size[r] == 0:
            continue
        if w != r:
            v_old = c.n + 1 + r
            v_new = c.n + 1 + w
            first = c.succ[v_old]
            last = c.pred[v_old]
            c.succ[v_new] = <int>first
            c.pred[v_new] = <int>last
            c.pred[first] = <int>v_new
            c.succ[last] = <int>v_new
            c.route_of[v_new] = <int>w
            node = first
            while node <= c.n:
                c.route_of[node] = <int>w
                node = c.succ[node]
            c.load[w] = c.load[r]
            c.rcost[w] = c.rcost[r]
            c.size[w] = c.size[r]
        w += 1
    for r in range(w, c.n_slots):
        c.load[r] = 0
        c.rcost[r] = 0
        c.size[r] = 0
    c.n_slots = w


def greedy_insert(state, order):
    cdef _Ctx c = _ctx(state)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order_arr = np.ascontiguousarray(order, dtype=np.int64)
    cdef long long total_delta = 0
    cdef Py_ssize_t i, cust, after, r
    for i in range(order_arr.shape[0]):
        cust = order_arr[i]
        _best_position(c, cust, &after)
        if after < 0:
            r = _new_route_slot(c)
            after = c.n + 1 + r
        total_delta += _insert_after(c, cust, after)
    _compact_slots(c)
    state.n_slots = c.n_slots
    state.total = state.total + total_delta
    return int(total_delta)


def regret2_insert(state, absent):
    cdef _Ctx c = _ctx(state)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rem = np.ascontiguousarray(absent, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used = np.zeros(rem.shape[0], dtype=np.uint8)
    cdef long long total_delta = 0, qc, best, second, add, regret, pick_regret
    cdef Py_ssize_t n_left = rem.shape[0]
    cdef Py_ssize_t i, cust, r, a, b, pick_i, pick_after, best_after
    cdef long long n_pos
    while n_left > 0:
        pick_i = -1
        pick_regret = -1
        pick_after = -1
        for i in range(rem.shape[0]):
            if used[i]:
                continue
            cust = rem[i]
            qc = c.demands[cust]
            best = INF
            second = INF
            best_after = -1
            n_pos = 0
            for r in range(c.n_slots):
                if c.size[r] == 0:
                    continue
                if c.load[r] + qc > c.cap:
                    continue
                a = c.n + 1 + r
                while True:
                    b = c.succ[a]
                    add = (_d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, cust)
                           + _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, cust, b)
                           - _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, a, b))
                    n_pos += 1
                    if add < best:
                        second = best
                        best = add
                        best_after = a
                    elif add < second:
                        second = add
                    if b > c.n:
                        break
                    a = b
            add = 2 * _d(c.use_mat, c.dmat, c.xs, c.ys, c.n, 0, cust)
            n_pos += 1
            if add < best:
                second = best
                best = add
                best_after = -1
            elif add < second:
                second = add
            regret = INF if n_pos == 1 else second - best
            if regret > pick_regret:
                pick_i = i
                pick_regret = regret
                pick_after = best_after
        if pick_after < 0:
            r = _new_route_slot(c)
            pick_after = c.n + 1 + r
        total_delta += _insert_after(c, rem[pick_i], pick_after)
        used[pick_i] = 1
        n_left -= 1
    _compact_slots(c)
    state.n_slots = c.n_slots
    state.total = state.total + total_delta
    return int(total_delta)
