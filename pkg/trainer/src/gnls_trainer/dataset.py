"""Supervised dataset generation via the solver CLI.

One example = a generated instance, its construction-heuristic initial
solution and a reference solution from a long unguided search; the label of
an initial-solution edge is 1 iff the edge survives into the reference.
Examples live on disk as one directory each: instance.vrp, s0.sol, ref.sol
and labels.csv ("a,b,label" per undirected s0 edge).
"""

from __future__ import annotations

import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .formats import (InstanceData, read_instance, read_solution,
                      solution_cost, solution_edges)

DEFAULT_ORACLE_BUDGET = 20_000


@dataclass
class LabeledExample:
    inst: InstanceData
    s0_routes: list[list[int]]
    ref_routes: list[list[int]]
    labels: dict[tuple[int, int], int]  # undirected s0 edge -> {0, 1}

    def validate(self) -> None:
        s0 = solution_edges(self.s0_routes)
        if set(self.labels) != s0:
            raise ValueError("labels must cover exactly the s0 edge set")
        if solution_cost(self.inst, self.ref_routes) > solution_cost(self.inst, self.s0_routes):
            raise ValueError("reference solution worse than the initial one")

    @property
    def positive_fraction(self) -> float:
        if not self.labels:
            return 0.0
        return sum(self.labels.values()) / len(self.labels)


def make_labels(s0_routes, ref_routes) -> dict[tuple[int, int], int]:
    ref = solution_edges(ref_routes)
    return {edge: int(edge in ref) for edge in sorted(solution_edges(s0_routes))}


def _generate_one(args) -> Path:
    (out_dir, index, n, seed, budget, solver_bin, capacity, demand_max) = args
    ex_dir = out_dir / f"example-{index:05d}"
    ex_dir.mkdir(parents=True, exist_ok=True)
    inst_path = ex_dir / "instance.vrp"
    s0_path = ex_dir / "s0.sol"
    ref_path = ex_dir / "ref.sol"
    subprocess.run([solver_bin, "generate", "--seed", str(seed), "--n", str(n),
                    "--capacity", str(capacity), "--demand-max", str(demand_max),
                    "--out", str(inst_path)], check=True, capture_output=True)
    subprocess.run([solver_bin, "solve", str(inst_path),
                    "--iterations", str(budget), "--seed", "0",
                    "--construction", "cw",
                    "--save-initial", str(s0_path),
                    "--save-solution", str(ref_path)],
                   check=True, capture_output=True)
    inst = read_instance(inst_path)
    s0_routes, _ = read_solution(s0_path)
    ref_routes, _ = read_solution(ref_path)
    labels = make_labels(s0_routes, ref_routes)
    with open(ex_dir / "labels.csv", "w") as fh:
        fh.write("a,b,label\n")
        for (a, b), y in labels.items():
            fh.write(f"{a},{b},{y}\n")
    return ex_dir


def build_dataset(count: int, n: int, seed: int, out_dir,
                  oracle_budget: int = DEFAULT_ORACLE_BUDGET,
                  workers: int = 4, solver_bin: str = "gnls",
                  capacity: int = 100, demand_max: int = 10) -> list[Path]:
    """Generate ``count`` labeled examples under ``out_dir``; deterministic
    in (seed, n, count, oracle_budget)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(out_dir, i, n, seed + i, oracle_budget, solver_bin, capacity,
              demand_max) for i in range(count)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            dirs = list(pool.map(_generate_one, tasks))
    else:
        dirs = [_generate_one(t) for t in tasks]
    return sorted(dirs)


def load_example(ex_dir) -> LabeledExample:
    ex_dir = Path(ex_dir)
    inst = read_instance(ex_dir / "instance.vrp")
    s0_routes, _ = read_solution(ex_dir / "s0.sol")
    ref_routes, _ = read_solution(ex_dir / "ref.sol")
    labels = {}
    for line in (ex_dir / "labels.csv").read_text().splitlines()[1:]:
        a, b, y = line.split(",")
        labels[(int(a), int(b))] = int(y)
    ex = LabeledExample(inst, s0_routes, ref_routes, labels)
    ex.validate()
    return ex


def load_dataset(root) -> list[LabeledExample]:
    root = Path(root)
    return [load_example(d) for d in sorted(root.glob("example-*"))]
