"""Solutions: depot-anchored routes, exact integer costs, validation, file IO.

The depot is implicit at both ends of every route; e.g. ``Route([3, 5])``
means depot -> 3 -> 5 -> depot.  Cost accounting never touches floating
point: route costs are integers and the tracked total must equal a full
recomputation exactly at all times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .instance import Instance


@dataclass
class Route:
    """Customer sequence with its running load and exact integer cost."""

    seq: list[int]
    load: int
    cost: int

    def __len__(self):
        return len(self.seq)


@dataclass
class Violation:
    kind: str  # "duplicate_visit" | "missing_visit" | "capacity_exceeded" | "bad_customer" | "cost_mismatch"
    detail: str
    route_index: int | None = None
    customer: int | None = None

    def __str__(self):
        return f"{self.kind}: {self.detail}"


class Solution:
    """A set of routes partitioning the customers of a bound instance."""

    def __init__(self, inst: Instance, routes: list[Route]):
        self.inst = inst
        self.routes = routes
        self.total_cost = sum(r.cost for r in routes)

    @classmethod
    def from_routes(cls, inst: Instance, seqs: list[list[int]]) -> "Solution":
        """Build from raw sequences, computing loads and costs; empty routes dropped."""
        routes = []
        for seq in seqs:
            seq = [int(c) for c in seq]
            if not seq:
                continue
            load = int(inst.demands[seq].sum()) if seq else 0
            routes.append(Route(seq, load, inst.seq_cost(seq)))
        return cls(inst, routes)

    def copy(self) -> "Solution":
        return Solution(self.inst, [Route(list(r.seq), r.load, r.cost) for r in self.routes])

    def route_of(self) -> np.ndarray:
        """Route index per customer; -1 for customers not present."""
        out = np.full(self.inst.n + 1, -1, dtype=np.int32)
        for ri, r in enumerate(self.routes):
            out[r.seq] = ri
        return out

    def __repr__(self):
        return f"Solution(routes={len(self.routes)}, cost={self.total_cost})"


def recompute_cost(sol: Solution) -> int:
    """From-scratch total; must equal the incrementally tracked cost exactly."""
    return sum(sol.inst.seq_cost(r.seq) for r in sol.routes)


def validate(sol: Solution) -> list[Violation]:
    """Feasibility check; an empty list means feasible."""
    inst = sol.inst
    violations: list[Violation] = []
    seen = np.zeros(inst.n + 1, dtype=np.int64)
    for ri, route in enumerate(sol.routes):
        for c in route.seq:
            if not (1 <= c <= inst.n):
                violations.append(Violation("bad_customer", f"route {ri} visits node {c}",
                                            route_index=ri, customer=c))
            else:
                seen[c] += 1
        load = int(inst.demands[[c for c in route.seq if 1 <= c <= inst.n]].sum())
        if load != route.load:
            violations.append(Violation("cost_mismatch", f"route {ri} load {route.load} != {load}",
                                        route_index=ri))
        if load > inst.capacity:
            violations.append(Violation("capacity_exceeded",
                                        f"route {ri} load {load} > {inst.capacity}",
                                        route_index=ri))
        actual = inst.seq_cost(route.seq)
        if actual != route.cost:
            violations.append(Violation("cost_mismatch",
                                        f"route {ri} cost {route.cost} != {actual}",
                                        route_index=ri))
    for c in range(1, inst.n + 1):
        if seen[c] == 0:
            violations.append(Violation("missing_visit", f"customer {c} unvisited", customer=c))
        elif seen[c] > 1:
            violations.append(Violation("duplicate_visit",
                                        f"customer {c} visited {int(seen[c])} times", customer=c))
    tracked = sum(r.cost for r in sol.routes)
    if tracked != sol.total_cost:
        violations.append(Violation("cost_mismatch",
                                    f"total {sol.total_cost} != sum of routes {tracked}"))
    return violations


def gap(cost: float, bks: int) -> float:
    """Percentage excess over the best-known cost: (cost - bks) / bks * 100."""
    if bks <= 0:
        raise ValueError("bks must be positive")
    return (cost - bks) / bks * 100.0


def format_gap(value: float) -> str:
    return f"{value:.3f}"


def solution_edges(sol: Solution) -> set[tuple[int, int]]:
    """Undirected edge set of the solution, as (min, max) node pairs."""
    edges: set[tuple[int, int]] = set()
    for route in sol.routes:
        seq = route.seq
        if not seq:
            continue
        prev = 0
        for c in seq:
            edges.add((min(prev, c), max(prev, c)))
            prev = c
        edges.add((0, prev) if prev >= 0 else (prev, 0))
    return edges


@dataclass
class PartialSolution:
    """Solution with some customers removed and awaiting reinsertion."""

    solution: Solution
    absent: list[int] = field(default_factory=list)

    def customers_covered(self) -> bool:
        present = sum(len(r.seq) for r in self.solution.routes)
        return present + len(self.absent) == self.solution.inst.n


# -- solution file formats ---------------------------------------------------

def format_solution(sol: Solution) -> str:
    """CVRPLIB-style text: one "Route #i: ..." line per route plus "Cost"."""
    out = []
    for i, route in enumerate(sol.routes, start=1):
        out.append(f"Route #{i}: " + " ".join(str(c) for c in route.seq))
    out.append(f"Cost {sol.total_cost}")
    out.append("")
    return "\n".join(out)


def parse_solution(text: str, inst: Instance) -> Solution:
    """Read the text format back; the stated Cost line is checked if present."""
    seqs = []
    stated_cost = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.lower().startswith("route"):
            _, _, rest = line.partition(":")
            seqs.append([int(tok) for tok in rest.split()])
        elif line.lower().startswith("cost"):
            stated_cost = int(float(line.split()[1]))
    sol = Solution.from_routes(inst, seqs)
    if stated_cost is not None and stated_cost != sol.total_cost:
        raise ValueError(f"solution file states cost {stated_cost}, recomputed {sol.total_cost}")
    return sol


def solution_to_json(sol: Solution, *, gap_pct: float | None = None,
                     seed: int | None = None, time_s: float | None = None) -> str:
    payload = {
        "instance": sol.inst.name,
        "routes": [list(map(int, r.seq)) for r in sol.routes],
        "cost": int(sol.total_cost),
        "gap": None if gap_pct is None else round(gap_pct, 3),
        "seed": seed,
        "time_s": time_s,
    }
    return json.dumps(payload, indent=2)
