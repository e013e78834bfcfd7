"""Initial-solution constructors.

``clarke_wright`` is the default starting point for the search; it merges
out-and-back routes in decreasing-savings order and finishes with a 2-opt
pass per route.  ``nearest_neighbor`` is a simpler fallback used for seed
diversity.  Both are deterministic and always emit feasible solutions.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as kernels
from ._state import SolverState
from .instance import Instance
from .solution import Solution
from .localsearch import build_neighbor_lists

# Above this size the savings list is restricted to near pairs; the full
# O(N^2) list is impractical at Flanders scale.
CW_FULL_MAX_N = 2000
CW_NEIGHBOR_K = 30


def _savings_pairs(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    n = inst.n
    if n <= CW_FULL_MAX_N:
        ii, jj = np.triu_indices(n, k=1)
        return (ii + 1).astype(np.int64), (jj + 1).astype(np.int64)
    lists = build_neighbor_lists(inst, k=CW_NEIGHBOR_K)
    src = np.repeat(np.arange(1, n + 1, dtype=np.int64), lists.table.shape[1])
    dst = lists.table[1:].reshape(-1).astype(np.int64)
    keep = dst > 0
    src, dst = src[keep], dst[keep]
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    keys = np.unique(lo * (n + 1) + hi)
    return keys // (n + 1), keys % (n + 1)


def _pair_dist(inst: Instance, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    m = inst.dist_matrix()
    if m is not None:
        return m[ii, jj].astype(np.int64)
    dx = inst.coords[ii, 0] - inst.coords[jj, 0]
    dy = inst.coords[ii, 1] - inst.coords[jj, 1]
    return np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)


def clarke_wright(inst: Instance) -> Solution:
    """Parallel-savings construction.

    Savings s(i,j) = d(0,i) + d(0,j) - d(i,j); pairs are processed in
    decreasing-savings order with ties broken by (min index, max index).
    Only strictly positive savings merge, only at route endpoints, and only
    when the merged load fits the capacity.
    """
    n = inst.n
    if n == 1:
        return Solution.from_routes(inst, [[1]])
    d0 = inst.dist_row(0)
    ii, jj = _savings_pairs(inst)
    s = d0[ii] + d0[jj] - _pair_dist(inst, ii, jj)
    keep = s > 0
    ii, jj, s = ii[keep], jj[keep], s[keep]
    order = np.lexsort((jj, ii, -s))
    ii, jj = ii[order], jj[order]

    # Routes as undirected chains: each customer has up to two chain links;
    # union-find tracks membership and aggregate load.
    links = np.full((n + 1, 2), -1, dtype=np.int64)
    degree = np.zeros(n + 1, dtype=np.int64)
    parent = np.arange(n + 1, dtype=np.int64)
    load = inst.demands.copy()

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return int(root)

    cap = inst.capacity
    for a, b in zip(ii, jj):
        a, b = int(a), int(b)
        if degree[a] >= 2 or degree[b] >= 2:
            continue
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if load[ra] + load[rb] > cap:
            continue
        links[a, degree[a]] = b
        links[b, degree[b]] = a
        degree[a] += 1
        degree[b] += 1
        parent[rb] = ra
        load[ra] += load[rb]

    # Extract chains starting from the lowest-indexed endpoint of each.
    seen = np.zeros(n + 1, dtype=bool)
    routes = []
    for c in range(1, n + 1):
        if seen[c] or degree[c] == 2:
            continue
        seq = []
        prev = -1
        cur = c
        while cur != -1:
            seq.append(cur)
            seen[cur] = True
            nxt = -1
            for slot in range(2):
                cand = int(links[cur, slot])
                if cand != -1 and cand != prev:
                    nxt = cand
                    break
            prev, cur = cur, nxt
        routes.append(seq)
    sol = Solution.from_routes(inst, routes)
    state = SolverState.from_solution(sol)
    kernels.two_opt(state)
    return state.to_solution()


def nearest_neighbor(inst: Instance) -> Solution:
    """Greedy chains from the depot, opening a new route when capacity binds."""
    n = inst.n
    unvisited = np.ones(n + 1, dtype=bool)
    unvisited[0] = False
    routes: list[list[int]] = []
    huge = np.iinfo(np.int64).max
    while unvisited.any():
        route: list[int] = []
        load = 0
        cur = 0
        while True:
            feasible = unvisited & (inst.demands <= inst.capacity - load)
            feasible[0] = False
            if not feasible.any():
                break
            d = inst.dist_row(cur)
            d = np.where(feasible, d, huge)
            nxt = int(np.argmin(d))
            route.append(nxt)
            load += int(inst.demands[nxt])
            unvisited[nxt] = False
            cur = nxt
        routes.append(route)
    return Solution.from_routes(inst, routes)
