"""Minimal readers for the solver's file formats.

The trainer talks to the solver package only через files and its CLI, so it
carries its own small parsers for CVRPLIB instance documents and
"Route #i:" solution files, plus the rounded-Euclidean metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def rounded_euclid(dx: float, dy: float) -> int:
    return int(math.floor(math.sqrt(dx * dx + dy * dy) + 0.5))


@dataclass
class InstanceData:
    name: str
    coords: np.ndarray   # (N+1, 2), depot first
    demands: np.ndarray  # (N+1,)
    capacity: int

    @property
    def n(self) -> int:
        return self.coords.shape[0] - 1

    def dist(self, i: int, j: int) -> int:
        return rounded_euclid(self.coords[i, 0] - self.coords[j, 0],
                              self.coords[i, 1] - self.coords[j, 1])

    def dist_matrix(self) -> np.ndarray:
        dx = self.coords[:, 0:1] - self.coords[:, 0:1].T
        dy = self.coords[:, 1:2] - self.coords[:, 1:2].T
        return np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)


def read_instance(path) -> InstanceData:
    name = ""
    dimension = None
    capacity = None
    coords: dict[int, tuple[float, float]] = {}
    demands: dict[int, int] = {}
    depot = 1
    lines = Path(path).read_text().splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line == "EOF":
            continue
        key = line.split(":", 1)[0].strip().upper()
        if key == "NAME":
            name = line.split(":", 1)[1].strip()
        elif key == "DIMENSION":
            dimension = int(line.split(":", 1)[1])
        elif key == "CAPACITY":
            capacity = int(line.split(":", 1)[1])
        elif line.upper().startswith("NODE_COORD_SECTION"):
            for _ in range(dimension):
                parts = lines[i].split()
                i += 1
                coords[int(parts[0])] = (float(parts[1]), float(parts[2]))
        elif line.upper().startswith("DEMAND_SECTION"):
            for _ in range(dimension):
                parts = lines[i].split()
                i += 1
                demands[int(parts[0])] = int(parts[1])
        elif line.upper().startswith("DEPOT_SECTION"):
            depot = int(lines[i].strip())
            i += 1
    order = [depot] + [node for node in sorted(coords) if node != depot]
    c = np.array([coords[v] for v in order], dtype=np.float64)
    q = np.array([demands[v] for v in order], dtype=np.int64)
    q[0] = 0
    return InstanceData(name, c, q, capacity)


def read_solution(path) -> tuple[list[list[int]], int | None]:
    """Route sequences (customer indices) and the stated cost, if any."""
    routes: list[list[int]] = []
    cost = None
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if line.lower().startswith("route"):
            routes.append([int(t) for t in line.partition(":")[2].split()])
        elif line.lower().startswith("cost"):
            cost = int(float(line.split()[1]))
    return routes, cost


def solution_cost(inst: InstanceData, routes: list[list[int]]) -> int:
    total = 0
    for seq in routes:
        prev = 0
        for c in seq:
            total += inst.dist(prev, c)
            prev = c
        total += inst.dist(prev, 0)
    return total


def solution_edges(routes: list[list[int]]) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    for seq in routes:
        prev = 0
        for c in seq:
            edges.add((min(prev, c), max(prev, c)))
            prev = c
        edges.add((min(prev, 0), max(prev, 0)))
    return edges
