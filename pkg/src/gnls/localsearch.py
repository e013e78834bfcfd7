"""Improvement operators: intra-route 2-opt plus inter-route relocate/swap.

All operators are first-improvement and only ever apply strictly improving
moves, so costs never increase and the combined loop terminates (integer
costs are bounded below by zero).  Inter-route candidates are pruned by
per-customer nearest-neighbor lists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from ._state import SolverState
from .instance import Instance
from .solution import Route, Solution

DEFAULT_K_LS = 10
_KDTREE_MIN_N = 4000


@dataclass
class NeighborLists:
    """Per-customer nearest customers, ascending by (distance, index).

    ``table`` is an int32 array of shape (N+1, k) padded with -1; row 0 (the
    depot) is all -1.  Lists never contain the customer itself or the depot.
    """

    k: int
    table: np.ndarray


def build_neighbor_lists(inst: Instance, k: int = DEFAULT_K_LS) -> NeighborLists:
    n = inst.n
    k_eff = min(k, n - 1) if n > 1 else 0
    table = np.full((n + 1, k), -1, dtype=np.int32)
    if k_eff == 0:
        return NeighborLists(k, table)
    if n >= _KDTREE_MIN_N:
        # Candidate sets from a KD-tree on exact coordinates, then re-ranked
        # by the instance's rounded metric.  Near-boundary ties at the k-th
        # slot may differ from a full scan; the lists are a pruning device.
        from scipy.spatial import cKDTree

        pts = inst.coords[1:]
        tree = cKDTree(pts)
        _, idx = tree.query(pts, k=k_eff + 1)
        for i in range(1, n + 1):
            cand = idx[i - 1] + 1
            cand = cand[cand != i][:k_eff]
            d = np.array([inst.dist(i, int(j)) for j in cand], dtype=np.int64)
            order = np.lexsort((cand, d))
            table[i, :k_eff] = cand[order]
    else:
        for i in range(1, n + 1):
            d = inst.dist_row(i)[1:]
            d[i - 1] = np.iinfo(np.int64).max
            order = np.lexsort((np.arange(1, n + 1), d))[:k_eff]
            table[i, :k_eff] = (order + 1).astype(np.int32)
    return NeighborLists(k, table)


def two_opt(inst: Instance, route: Route) -> Route:
    """First-improvement segment reversals until no reversal improves."""
    if len(route.seq) < 2:
        return Route(list(route.seq), route.load, route.cost)
    state = SolverState(inst)
    state.add_route(route.seq)
    kernels.two_opt(state)
    return state.to_solution().routes[0]


def relocate(sol: Solution, lists: NeighborLists) -> Solution:
    """One first-improvement sweep moving single customers between routes."""
    state = SolverState.from_solution(sol)
    kernels.relocate(state, lists.table)
    return state.to_solution()


def swap(sol: Solution, lists: NeighborLists) -> Solution:
    """One first-improvement sweep exchanging customer pairs between routes."""
    state = SolverState.from_solution(sol)
    kernels.swap(state, lists.table)
    return state.to_solution()


def ls_fixpoint(state: SolverState, table: np.ndarray) -> int:
    """Loop two_opt/relocate/swap until a full cycle applies nothing."""
    total = 0
    while True:
        d = kernels.two_opt(state)
        d += kernels.relocate(state, table)
        d += kernels.swap(state, table)
        total += d
        if d == 0:
            return total


def run_local_search(sol: Solution, lists: NeighborLists) -> Solution:
    """Combined fixpoint of all operators; output cost <= input cost."""
    state = SolverState.from_solution(sol)
    ls_fixpoint(state, lists.table)
    return state.to_solution()
