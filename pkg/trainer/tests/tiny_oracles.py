"""Brute-force helpers for trainer tests (independent of the packages)."""

from __future__ import annotations

import itertools


def brute_force_optimum(inst) -> int:
    """Exact CVRP optimum over all partitions and orders (n <= ~7)."""
    best = None
    customers = list(range(1, inst.n + 1))

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
        if any(sum(int(inst.demands[c]) for c in b) > inst.capacity for b in part):
            continue
        total = 0
        for block in part:
            route_best = None
            for perm in itertools.permutations(block):
                c = inst.dist(0, perm[0])
                for a, b in zip(perm, perm[1:]):
                    c += inst.dist(a, b)
                c += inst.dist(perm[-1], 0)
                if route_best is None or c < route_best:
                    route_best = c
            total += route_best
        if best is None or total < best:
            best = total
    return best


def optimal_edge_sets(inst) -> tuple[int, set[frozenset]]:
    """All undirected edge sets achieving the optimum (tiny n)."""
    opt = brute_force_optimum(inst)
    sets: set[frozenset] = set()
    customers = list(range(1, inst.n + 1))

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
        if any(sum(int(inst.demands[c]) for c in b) > inst.capacity for b in part):
            continue
        total = 0
        per_route = []
        for block in part:
            best = None
            for perm in itertools.permutations(block):
                c = inst.dist(0, perm[0])
                for a, b in zip(perm, perm[1:]):
                    c += inst.dist(a, b)
                c += inst.dist(perm[-1], 0)
                if best is None or c < best[0]:
                    best = (c, [perm])
                elif c == best[0]:
                    best[1].append(perm)
            per_route.append(best)
            total += best[0]
        if total != opt:
            continue
        for combo in itertools.product(*[b[1] for b in per_route]):
            edges = set()
            for perm in combo:
                prev = 0
                for c in perm:
                    edges.add((min(prev, c), max(prev, c)))
                    prev = c
                edges.add((min(prev, 0), max(prev, 0)))
            sets.add(frozenset(edges))
    return opt, sets
