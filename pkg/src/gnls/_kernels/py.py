"""Pure-Python search kernels.

Reference implementation of the hot loops; the compiled backend in
``_cy.pyx`` mirrors these semantics move for move, so both backends produce
identical solutions for identical inputs.  Scan orders and tie-breaks are
part of the contract:

* two_opt: per route, first-improvement segment reversal, restarting the
  scan from the beginning after every applied move, until no reversal
  improves.
* relocate: routes in slot order, customers in route order (cursor caches
  its successor before trying moves); for each customer its neighbor list is
  scanned in rank order, trying "insert after u" then "insert before u";
  the first strictly improving feasible move is applied.
* swap: same scan order, exchanging the two customers; strictly improving
  feasible exchanges only.
* greedy insertion: for each absent customer (caller-provided order), scan
  all non-empty route slots in order and every gap left to right, then the
  fresh-singleton option; minimum delta wins, earlier position wins ties,
  the fresh singleton only wins when strictly better.
* regret-2 insertion: repeatedly insert the remaining customer with the
  largest (second-best minus best) delta; a customer with a single feasible
  position has infinite regret; ties prefer the smaller customer index.

All cost arithmetic is exact integer math.
"""

from __future__ import annotations

import math

BACKEND = "python"

_INF = 1 << 62


def _dist_fn(state):
    n = state.n
    dmat = state.dmat
    if dmat is not None:
        def d(i, j):
            if i > n:
                i = 0
            if j > n:
                j = 0
            return int(dmat[i, j])
    else:
        xs = state.xs
        ys = state.ys
        def d(i, j):
            if i > n:
                i = 0
            if j > n:
                j = 0
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            return int(math.floor(math.sqrt(dx * dx + dy * dy) + 0.5))
    return d


def two_opt(state) -> int:
    d = _dist_fn(state)
    succ = state.succ
    pred = state.pred
    n = state.n
    total_delta = 0
    for r in range(state.n_slots):
        size = int(state.size[r])
        if size < 2:
            continue
        v = n + 1 + r
        seq = []
        c = int(succ[v])
        while c <= n:
            seq.append(c)
            c = int(succ[c])
        route_delta = 0
        improved = True
        while improved:
            improved = False
            for i in range(size - 1):
                a = seq[i - 1] if i > 0 else 0
                ti = seq[i]
                d_a_ti = d(a, ti)
                for j in range(i + 1, size):
                    tj = seq[j]
                    b = seq[j + 1] if j < size - 1 else 0
                    delta = d(a, tj) + d(ti, b) - d_a_ti - d(tj, b)
                    if delta < 0:
                        seq[i:j + 1] = reversed(seq[i:j + 1])
                        route_delta += delta
                        improved = True
                        break
                if improved:
                    break
        if route_delta != 0:
            prev = v
            for c in seq:
                succ[prev] = c
                pred[c] = prev
                prev = c
            succ[prev] = v
            pred[v] = prev
            state.rcost[r] += route_delta
            total_delta += route_delta
    state.total += total_delta
    return total_delta


def relocate(state, neighbors) -> int:
    d = _dist_fn(state)
    succ = state.succ
    pred = state.pred
    route_of = state.route_of
    load = state.load
    rcost = state.rcost
    size = state.size
    demands = state.demands
    cap = state.capacity
    n = state.n
    k = neighbors.shape[1]
    total_delta = 0
    for r1 in range(state.n_slots):
        if size[r1] == 0:
            continue
        c = int(succ[n + 1 + r1])
        while c <= n:
            nxt = int(succ[c])
            qc = int(demands[c])
            a1 = int(pred[c])
            b1 = int(succ[c])
            gain = d(a1, c) + d(c, b1) - d(a1, b1)
            for t in range(k):
                u = int(neighbors[c, t])
                if u < 0:
                    break
                r2 = int(route_of[u])
                if r2 == r1 or r2 < 0:
                    continue
                if load[r2] + qc > cap:
                    continue
                applied = False
                for side in (0, 1):
                    if side == 0:
                        a2, b2 = u, int(succ[u])
                    else:
                        a2, b2 = int(pred[u]), u
                    add = d(a2, c) + d(c, b2) - d(a2, b2)
                    delta = add - gain
                    if delta < 0:
                        succ[a1] = b1
                        pred[b1] = a1
                        size[r1] -= 1
                        load[r1] -= qc
                        rcost[r1] -= gain
                        succ[a2] = c
                        pred[c] = a2
                        succ[c] = b2
                        pred[b2] = c
                        route_of[c] = r2
                        size[r2] += 1
                        load[r2] += qc
                        rcost[r2] += add
                        total_delta += delta
                        applied = True
                        break
                if applied:
                    break
            c = nxt
    state.total += total_delta
    return total_delta


def swap(state, neighbors) -> int:
    d = _dist_fn(state)
    succ = state.succ
    pred = state.pred
    route_of = state.route_of
    load = state.load
    rcost = state.rcost
    demands = state.demands
    cap = state.capacity
    n = state.n
    k = neighbors.shape[1]
    total_delta = 0
    for r1 in range(state.n_slots):
        if state.size[r1] == 0:
            continue
        c = int(succ[n + 1 + r1])
        while c <= n:
            nxt = int(succ[c])
            qc = int(demands[c])
            pc = int(pred[c])
            nc = int(succ[c])
            for t in range(k):
                u = int(neighbors[c, t])
                if u < 0:
                    break
                r2 = int(route_of[u])
                if r2 == r1 or r2 < 0:
                    continue
                qu = int(demands[u])
                if load[r1] - qc + qu > cap or load[r2] - qu + qc > cap:
                    continue
                pu = int(pred[u])
                nu = int(succ[u])
                d1 = d(pc, u) + d(u, nc) - d(pc, c) - d(c, nc)
                d2 = d(pu, c) + d(c, nu) - d(pu, u) - d(u, nu)
                if d1 + d2 < 0:
                    succ[pc] = u
                    pred[u] = pc
                    succ[u] = nc
                    pred[nc] = u
                    succ[pu] = c
                    pred[c] = pu
                    succ[c] = nu
                    pred[nu] = c
                    route_of[c] = r2
                    route_of[u] = r1
                    load[r1] += qu - qc
                    load[r2] += qc - qu
                    rcost[r1] += d1
                    rcost[r2] += d2
                    total_delta += d1 + d2
                    break
            c = nxt
    state.total += total_delta
    return total_delta


def _best_position(state, d, c):
    """(delta, after_node) of the cheapest feasible insertion for c.

    Scans non-empty slots in order, gaps left to right; the fresh-singleton
    option is considered last and wins only on strict improvement.  Returns
    after_node == -1 for the fresh-singleton option.
    """
    succ = state.succ
    n = state.n
    qc = int(state.demands[c])
    cap = state.capacity
    best = _INF
    best_after = -1
    for r in range(state.n_slots):
        if state.size[r] == 0:
            continue
        if state.load[r] + qc > cap:
            continue
        a = n + 1 + r
        while True:
            b = int(succ[a])
            add = d(a, c) + d(c, b) - d(a, b)
            if add < best:
                best = add
                best_after = a
            if b > n:
                break
            a = b
    d0c = d(0, c)
    if 2 * d0c < best:
        best = 2 * d0c
        best_after = -1
    return best, best_after


def greedy_insert(state, order) -> int:
    d = _dist_fn(state)
    total_delta = 0
    for c in order:
        c = int(c)
        _, after = _best_position(state, d, c)
        if after < 0:
            r = state.new_route_slot()
            after = state.n + 1 + r
        total_delta += state.insert_after(c, after)
    state.compact_slots()
    return total_delta


def regret2_insert(state, absent) -> int:
    d = _dist_fn(state)
    succ = state.succ
    n = state.n
    cap = state.capacity
    remaining = [int(c) for c in absent]
    total_delta = 0
    while remaining:
        pick = -1
        pick_regret = -1
        pick_after = -1
        for c in remaining:
            qc = int(state.demands[c])
            best = second = _INF
            best_after = -1
            n_pos = 0
            for r in range(state.n_slots):
                if state.size[r] == 0:
                    continue
                if state.load[r] + qc > cap:
                    continue
                a = n + 1 + r
                while True:
                    b = int(succ[a])
                    add = d(a, c) + d(c, b) - d(a, b)
                    n_pos += 1
                    if add < best:
                        second = best
                        best = add
                        best_after = a
                    elif add < second:
                        second = add
                    if b > n:
                        break
                    a = b
            add = 2 * d(0, c)
            n_pos += 1
            if add < best:
                second = best
                best = add
                best_after = -1
            elif add < second:
                second = add
            regret = _INF if n_pos == 1 else second - best
            if regret > pick_regret:
                pick = c
                pick_regret = regret
                pick_after = best_after
        if pick_after < 0:
            r = state.new_route_slot()
            pick_after = n + 1 + r
        total_delta += state.insert_after(pick, pick_after)
        remaining.remove(pick)
    state.compact_slots()
    return total_delta
