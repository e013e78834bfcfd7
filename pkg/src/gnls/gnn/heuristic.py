"""Weight-free fallback selector: preserve the short initial-solution edges."""

from __future__ import annotations

import math

from ..instance import Instance
from ..solution import Solution, solution_edges
from .forward import MarkSet


def heuristic_selector(inst: Instance, s0: Solution, quantile: float) -> MarkSet:
    """Mark endpoints of the shortest ``quantile`` fraction of the s0 edges.

    Short edges stand in for "likely kept in a high-quality solution".  The
    selected set is a prefix of one fixed ordering, so the marks grow
    monotonically with the quantile.
    """
    if not (0.0 <= quantile <= 1.0):
        raise ValueError("quantile must be in [0, 1]")
    edges = sorted(solution_edges(s0),
                   key=lambda ab: (inst.dist(ab[0], ab[1]), ab[0], ab[1]))
    count = int(math.floor(quantile * len(edges) + 1e-9))
    marked = set()
    for a, b in edges[:count]:
        marked.add(a)
        marked.add(b)
    marked.discard(0)
    return MarkSet(frozenset(marked), quantile, "heuristic")
