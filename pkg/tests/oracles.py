"""Independent reference computations used to pin expected test values.

Everything here is deliberately brute force and separate from the package's
optimized code paths: exhaustive enumeration, Held-Karp dynamic programs and
scalar-loop re-implementations.
"""

from __future__ import annotations

import itertools
import math

INF = 1 << 60


def brute_force_optimum(inst) -> int:
    """Exact CVRP optimum by Held-Karp route costs + set-partition DP (N <= ~12)."""
    n = inst.n
    full = 1 << n
    d = inst.dist
    dem = inst.demands
    cap = inst.capacity

    dp = [[INF] * (n + 1) for _ in range(full)]
    route_cost = [INF] * full
    for mask in range(1, full):
        load = sum(int(dem[i + 1]) for i in range(n) if mask >> i & 1)
        if load > cap:
            continue
        for last in range(1, n + 1):
            bit = 1 << (last - 1)
            if not mask & bit:
                continue
            prev = mask ^ bit
            if prev == 0:
                dp[mask][last] = d(0, last)
                continue
            best = INF
            for p in range(1, n + 1):
                if prev >> (p - 1) & 1 and dp[prev][p] < INF:
                    v = dp[prev][p] + d(p, last)
                    if v < best:
                        best = v
            dp[mask][last] = best
        route_cost[mask] = min(dp[mask][last] + d(last, 0)
                               for last in range(1, n + 1) if mask >> (last - 1) & 1)

    part = [INF] * full
    part[0] = 0
    for mask in range(1, full):
        sub = mask
        while sub:
            if route_cost[sub] < INF and part[mask ^ sub] < INF:
                v = part[mask ^ sub] + route_cost[sub]
                if v < part[mask]:
                    part[mask] = v
            sub = (sub - 1) & mask
    return part[full - 1]


def count_optimal_partitions(inst) -> int:
    """Number of distinct route-set partitions achieving the optimum (tiny n)."""
    n = inst.n
    opt = brute_force_optimum(inst)
    count = 0
    customers = list(range(1, n + 1))

    def route_best(subset):
        best = INF
        for perm in itertools.permutations(subset):
            c = inst.dist(0, perm[0])
            for a, b in zip(perm, perm[1:]):
                c += inst.dist(a, b)
            c += inst.dist(perm[-1], 0)
            best = min(best, c)
        return best

    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for k in range(len(rest) + 1):
            for combo in itertools.combinations(rest, k):
                block = [first, *combo]
                remaining = [x for x in rest if x not in combo]
                for tail in partitions(remaining):
                    yield [block, *tail]

    for part in partitions(customers):
        total = 0
        ok = True
        for block in part:
            if sum(int(inst.demands[c]) for c in block) > inst.capacity:
                ok = False
                break
            total += route_best(block)
            if total > opt:
                ok = False
                break
        if ok and total == opt:
            count += 1
    return count


def route_cost(inst, seq) -> int:
    if not seq:
        return 0
    c = inst.dist(0, seq[0])
    for a, b in zip(seq, seq[1:]):
        c += inst.dist(a, b)
    return c + inst.dist(seq[-1], 0)


def two_opt_reachable_costs(inst, seq) -> set[int]:
    """Costs of all 2-opt local optima reachable via improving reversals."""
    seen = {}
    fixpoints = set()

    def explore(route):
        key = tuple(route)
        if key in seen:
            return
        seen[key] = True
        cost = route_cost(inst, route)
        found = False
        for i in range(len(route) - 1):
            for j in range(i + 1, len(route)):
                cand = route[:i] + route[i:j + 1][::-1] + route[j + 1:]
                if route_cost(inst, cand) < cost:
                    found = True
                    explore(cand)
        if not found:
            fixpoints.add(cost)

    explore(list(seq))
    return fixpoints


def has_improving_reversal(inst, seq) -> bool:
    cost = route_cost(inst, seq)
    for i in range(len(seq) - 1):
        for j in range(i + 1, len(seq)):
            cand = seq[:i] + seq[i:j + 1][::-1] + seq[j + 1:]
            if route_cost(inst, cand) < cost:
                return True
    return False


def best_insertion_delta(inst, sol, customer) -> int:
    """Cheapest feasible insertion delta over all positions and a new route."""
    best = 2 * inst.dist(0, customer)
    q = int(inst.demands[customer])
    for route in sol.routes:
        if route.load + q > inst.capacity:
            continue
        stops = [0, *route.seq, 0]
        for pos in range(len(stops) - 1):
            a, b = stops[pos], stops[pos + 1]
            delta = inst.dist(a, customer) + inst.dist(customer, b) - inst.dist(a, b)
            best = min(best, delta)
    return best


def best_insertion_order_cost(inst, sol, absent) -> int:
    """Cheapest final cost over all insertion orders, greedy-best per step."""
    best = INF
    for order in itertools.permutations(absent):
        seqs = [list(r.seq) for r in sol.routes]
        total = sol.total_cost
        feasible = True
        for c in order:
            q = int(inst.demands[c])
            cand = (2 * inst.dist(0, c), len(seqs), 0)
            for ri, seq in enumerate(seqs):
                if sum(int(inst.demands[x]) for x in seq) + q > inst.capacity:
                    continue
                stops = [0, *seq, 0]
                for pos in range(len(stops) - 1):
                    a, b = stops[pos], stops[pos + 1]
                    delta = inst.dist(a, c) + inst.dist(c, b) - inst.dist(a, b)
                    if delta < cand[0]:
                        cand = (delta, ri, pos)
            delta, ri, pos = cand
            if ri == len(seqs):
                seqs.append([c])
            else:
                seqs[ri].insert(pos, c)
            total += delta
        if feasible:
            best = min(best, total)
    return best


# -- scalar-loop selector forward ---------------------------------------------

def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def naive_forward(model, g) -> list[float]:
    """Straight-line per-edge probabilities with plain Python loops.

    Mirrors the documented math only; no vectorization, no shared code with
    the package's forward pass.
    """
    bn_eps = 1e-5
    h = model.hidden
    h2 = h // 2
    n_v = g.n_nodes
    n_e = g.n_edges
    src = [int(v) for v in g.edge_src]
    dst = [int(v) for v in g.edge_dst]

    x = [[sum(float(model.node_w[a][f]) * float(g.node_features[i][f]) for f in range(3))
          + float(model.node_b[a]) for a in range(h)] for i in range(n_v)]
    e = []
    for idx in range(n_e):
        row = [float(model.dist_w[a][0]) * float(g.edge_distance[idx]) + float(model.dist_b[a])
               for a in range(h2)]
        row += [float(model.kind_w[int(g.edge_kind[idx])][a]) for a in range(h2)]
        e.append(row)

    out_edges = [[] for _ in range(n_v)]
    for idx in range(n_e):
        out_edges[src[idx]].append(idx)

    def matvec(w, b, vec):
        return [sum(float(w[r][cc]) * vec[cc] for cc in range(len(vec))) + float(b[r])
                for r in range(len(b))]

    def bn(stats, vec):
        return [(vec[a] - float(stats.mean[a])) / math.sqrt(float(stats.var[a]) + bn_eps)
                * float(stats.gamma[a]) + float(stats.beta[a]) for a in range(len(vec))]

    for layer in model.layers:
        sig = [[_sigmoid(v) for v in row] for row in e]
        new_x = []
        for i in range(n_v):
            denom = [model.eta_eps] * h
            for idx in out_edges[i]:
                for a in range(h):
                    denom[a] += sig[idx][a]
            agg = [0.0] * h
            for idx in out_edges[i]:
                w2xj = matvec(layer.w2, layer.b2, x[dst[idx]])
                for a in range(h):
                    agg[a] += sig[idx][a] / denom[a] * w2xj[a]
            pre = matvec(layer.w1, layer.b1, x[i])
            pre = [pre[a] + agg[a] for a in range(h)]
            act = bn(layer.bn_node, pre)
            new_x.append([x[i][a] + max(act[a], 0.0) for a in range(h)])
        new_e = []
        for idx in range(n_e):
            pre = matvec(layer.w3, layer.b3, e[idx])
            u4 = matvec(layer.w4, layer.b4, x[src[idx]])
            u5 = matvec(layer.w5, layer.b5, x[dst[idx]])
            pre = [pre[a] + u4[a] + u5[a] for a in range(h)]
            act = bn(layer.bn_edge, pre)
            new_e.append([e[idx][a] + max(act[a], 0.0) for a in range(h)])
        x, e = new_x, new_e

    probs = []
    for idx in range(n_e):
        vec = e[idx]
        for w, b in model.mlp[:-1]:
            vec = [max(v, 0.0) for v in matvec(w, b, vec)]
        w, b = model.mlp[-1]
        logit = sum(float(w[0][a]) * vec[a] for a in range(h)) + float(b[0])
        probs.append(_sigmoid(logit))
    return probs


# -- Wilcoxon by literal enumeration ------------------------------------------

def wilcoxon_exact_enumeration(diffs) -> tuple[float, float]:
    """(W+, one-tailed p) by literally enumerating all 2^n sign patterns."""
    diffs = [d for d in diffs if d != 0]
    n = len(diffs)
    absd = sorted(range(n), key=lambda i: abs(diffs[i]))
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(diffs[absd[j + 1]]) == abs(diffs[absd[i]]):
            j += 1
        for k in range(i, j + 1):
            ranks[absd[k]] = (i + j) / 2 + 1
        i = j + 1
    w_obs = sum(r for r, d in zip(ranks, diffs) if d > 0)
    count = 0
    for pattern in range(1 << n):
        w = sum(ranks[i] for i in range(n) if pattern >> i & 1)
        if w <= w_obs + 1e-9:
            count += 1
    return w_obs, count / (1 << n)
