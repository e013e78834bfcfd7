"""Destroy-repair loop with adaptive string intensities and SA acceptance.

Per iteration: pick a destroy operator (random removal or string removal,
50/50), remove customers restricted to the guidance oracle's allowed set,
reinsert them, run local search to a fixpoint, then accept by simulated
annealing.  All randomness flows through one ``numpy`` generator seeded from
the config, and the draw order is fixed, so runs are bit-reproducible for a
fixed seed; a null guidance oracle draws nothing and therefore reproduces
the unguided run exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from ._state import SolverState
from .instance import Instance
from .localsearch import build_neighbor_lists, ls_fixpoint, DEFAULT_K_LS
from .solution import PartialSolution, Solution, validate

IMPROVED = "improved"
NEAR_IDENTICAL = "near_identical"
WORSE = "worse"


@dataclass
class ShakeState:
    """Per-customer disruption intensities, clamped to [omega_min, omega_max]."""

    omega: np.ndarray  # int32, index 0 unused
    omega_min: int
    omega_max: int

    @classmethod
    def initial(cls, sol: Solution) -> "ShakeState":
        # Initial intensity scales with typical route length; the paper-style
        # rule of thumb is 5% of the average route, at least 1.
        n = sol.inst.n
        n_routes = max(1, len(sol.routes))
        avg_len = n / n_routes
        init = max(1, math.ceil(0.05 * avg_len))
        omega_max = max(1, max((len(r.seq) for r in sol.routes), default=1))
        omega = np.full(n + 1, min(init, omega_max), dtype=np.int32)
        omega[0] = 0
        return cls(omega, 1, omega_max)

    def update(self, touched, outcome: str) -> "ShakeState":
        """Worse -> +1, NearIdentical -> -1, Improved -> unchanged; clamped."""
        touched = np.asarray(touched, dtype=np.int64)
        if touched.size == 0 or outcome == IMPROVED:
            return self
        if outcome == WORSE:
            self.omega[touched] = np.minimum(self.omega[touched] + 1, self.omega_max)
        elif outcome == NEAR_IDENTICAL:
            self.omega[touched] = np.maximum(self.omega[touched] - 1, self.omega_min)
        else:
            raise ValueError(f"unknown outcome {outcome!r}")
        return self


@dataclass
class LnsConfig:
    max_iterations: int = 100_000
    time_budget: float | None = None  # seconds; None = iteration budget only
    sa_initial_temp: float | None = None  # default: 0.1% of the start cost
    sa_final_temp: float | None = None  # default: 0.01% of the start cost
    destroy_fraction: float = 0.1
    destroy_cap: int = 100
    rng_seed: int = 0
    repair: str = "greedy"  # or "regret2"
    k_ls: int = DEFAULT_K_LS
    audit_removed: bool = False  # record removed node sets in the trace
    debug_checks: bool = False  # validate the current solution every iteration

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.repair not in ("greedy", "regret2"):
            raise ValueError("repair must be 'greedy' or 'regret2'")
        if self.sa_initial_temp is not None and self.sa_final_temp is not None:
            if self.sa_initial_temp <= 0 or self.sa_final_temp <= 0:
                raise ValueError("SA temperatures must be positive")
            if self.sa_final_temp > self.sa_initial_temp:
                raise ValueError("sa_final_temp must not exceed sa_initial_temp")


@dataclass
class RunTrace:
    """Per-iteration record of the search; best cost is non-increasing."""

    iteration: list[int] = field(default_factory=list)
    current: list[int] = field(default_factory=list)
    best: list[int] = field(default_factory=list)
    accepted: list[bool] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)
    temperature: list[float] = field(default_factory=list)
    removed_sets: list[list[int]] | None = None
    wall_time_s: float = 0.0

    def append(self, it, cur, best, acc, n_removed, temp):
        self.iteration.append(it)
        self.current.append(cur)
        self.best.append(best)
        self.accepted.append(acc)
        self.removed.append(n_removed)
        self.temperature.append(temp)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,current,best,accepted,removed,temperature\n")
            for i in range(len(self.iteration)):
                fh.write(f"{self.iteration[i]},{self.current[i]},{self.best[i]},"
                         f"{int(self.accepted[i])},{self.removed[i]},"
                         f"{self.temperature[i]:.6g}\n")

    def rows(self):
        for i in range(len(self.iteration)):
            yield (self.iteration[i], self.current[i], self.best[i],
                   self.accepted[i], self.removed[i], self.temperature[i])


def _allowed_to_mask(inst: Instance, allowed) -> np.ndarray:
    """Normalize a predicate / bool array / None into a bool mask over 0..N."""
    n = inst.n
    if allowed is None:
        mask = np.ones(n + 1, dtype=bool)
    elif callable(allowed):
        mask = np.fromiter((bool(allowed(c)) for c in range(n + 1)), dtype=bool,
                           count=n + 1)
    else:
        mask = np.asarray(allowed, dtype=bool).copy()
        if mask.shape != (n + 1,):
            raise ValueError("allowed mask must have shape (N+1,)")
    mask[0] = False
    return mask


def _remove_random(state: SolverState, n_remove: int, mask: np.ndarray,
                   rng: np.random.Generator) -> list[int]:
    pool = np.flatnonzero(mask & state.present_mask())
    m = min(int(n_remove), pool.size)
    if m == 0:
        return []
    chosen = np.sort(rng.choice(pool, size=m, replace=False))
    for c in chosen:
        state.remove_customer(int(c))
    return [int(c) for c in chosen]


def _remove_string(state: SolverState, seed: int, omega: np.ndarray,
                   mask: np.ndarray, neighbors: np.ndarray) -> list[int]:
    """String removal around ``seed`` with a total budget of omega[seed].

    The window expands around the seed alternating successor/predecessor
    sides, skipping prohibited customers (the string "extends past" them).
    Leftover budget spills over to strings around the seed's nearest allowed
    neighbors in not-yet-ruined routes.
    """
    n = state.n
    budget = int(omega[seed])
    removed: list[int] = []
    ruined: set[int] = set()
    k = neighbors.shape[1]
    cur = seed
    while budget > 0 and cur != -1:
        ruined.add(int(state.route_of[cur]))
        taken = [cur]
        left = int(state.pred[cur])
        right = int(state.succ[cur])
        side_right = True
        while len(taken) < budget and (left <= n and left > 0 or right <= n and right > 0):
            if side_right and 0 < right <= n:
                if mask[right]:
                    taken.append(right)
                right = int(state.succ[right])
            elif 0 < left <= n:
                if mask[left]:
                    taken.append(left)
                left = int(state.pred[left])
            side_right = not side_right
        for c in taken:
            state.remove_customer(c)
        removed.extend(taken)
        budget -= len(taken)
        if budget <= 0:
            break
        cur = -1
        for t in range(k):
            u = int(neighbors[seed, t])
            if u < 0:
                break
            if not mask[u] or state.route_of[u] < 0 or int(state.route_of[u]) in ruined:
                continue
            cur = u
            break
    return removed


def destroy_random(sol: Solution, n_remove: int, allowed, rng) -> PartialSolution:
    """Remove min(n_remove, |allowed present|) uniformly chosen allowed customers."""
    if not (0 <= n_remove <= sol.inst.n):
        raise ValueError("n_remove must be within [0, N]")
    mask = _allowed_to_mask(sol.inst, allowed)
    state = SolverState.from_solution(sol)
    removed = _remove_random(state, n_remove, mask, rng)
    return PartialSolution(state.to_solution(), removed)


def destroy_string(sol: Solution, seed_customer: int, shake: ShakeState,
                   allowed, rng=None, neighbors: np.ndarray | None = None) -> PartialSolution:
    """Remove a string of up to omega[seed] customers around the seed."""
    mask = _allowed_to_mask(sol.inst, allowed)
    if not (1 <= seed_customer <= sol.inst.n):
        raise ValueError("seed customer out of range")
    if not mask[seed_customer]:
        raise ValueError(f"seed customer {seed_customer} is not allowed")
    if neighbors is None:
        neighbors = build_neighbor_lists(sol.inst).table
    state = SolverState.from_solution(sol)
    removed = _remove_string(state, seed_customer, shake.omega, mask, neighbors)
    return PartialSolution(state.to_solution(), removed)


def update_omega(shake: ShakeState, touched, outcome: str) -> ShakeState:
    return shake.update(touched, outcome)


def repair_greedy(part: PartialSolution, rng) -> Solution:
    """Reinsert absent customers in random order, each at its cheapest position."""
    state = SolverState.from_solution(part.solution)
    if part.absent:
        order = rng.permutation(np.asarray(sorted(part.absent), dtype=np.int64))
        kernels.greedy_insert(state, order)
    return state.to_solution()


def repair_regret2(part: PartialSolution) -> Solution:
    """Reinsert by largest regret (2nd-best minus best delta) first; deterministic."""
    state = SolverState.from_solution(part.solution)
    if part.absent:
        kernels.regret2_insert(state, np.asarray(sorted(part.absent), dtype=np.int64))
    return state.to_solution()


def run_lns(inst: Instance, start: Solution, cfg: LnsConfig,
            guidance=None) -> tuple[Solution, RunTrace]:
    """Core destroy-repair search; returns the best solution and the trace.

    ``guidance`` is an object with ``maybe_remark(iteration, new_best,
    solution_factory)`` and ``allowed_mask(rng)`` (see gnls.guidance); None
    runs unguided.
    """
    t_start = time.perf_counter()
    rng = np.random.default_rng(cfg.rng_seed)
    trace = RunTrace(removed_sets=[] if cfg.audit_removed else None)

    cur = SolverState.from_solution(start)
    scratch = cur.copy()
    best = cur.copy()
    cur_cost = cur.total
    best_cost = cur.total

    n = inst.n
    neighbors = build_neighbor_lists(inst, cfg.k_ls).table
    shake = ShakeState.initial(start)
    all_mask = np.ones(n + 1, dtype=bool)
    all_mask[0] = False

    start_cost = max(1, start.total_cost)
    t0 = cfg.sa_initial_temp if cfg.sa_initial_temp is not None else 1e-3 * start_cost
    tf = cfg.sa_final_temp if cfg.sa_final_temp is not None else 1e-4 * start_cost
    t0 = max(t0, 1e-12)
    tf = min(max(tf, 1e-12), t0)
    decay_span = max(1, cfg.max_iterations - 1)

    # Upper bound for random removals: destroy_fraction of N, capped for very
    # large N, but never below min(4, N) -- at tiny N a one-customer removal
    # cannot restructure partitions and the search stalls.
    hi = min(cfg.destroy_cap, max(math.ceil(cfg.destroy_fraction * n), min(4, n)))
    new_best_flag = False

    for it in range(cfg.max_iterations):
        if cfg.time_budget is not None and time.perf_counter() - t_start > cfg.time_budget:
            break
        if guidance is not None:
            guidance.maybe_remark(it, new_best_flag, lambda: cur.to_solution())
        new_best_flag = False

        op_random = rng.random() < 0.5
        mask = guidance.allowed_mask(rng) if guidance is not None else all_mask

        scratch.copy_from(cur)
        if op_random:
            n_remove = int(rng.integers(1, hi + 1))
            removed = _remove_random(scratch, n_remove, mask, rng)
        else:
            pool = np.flatnonzero(mask)
            if pool.size > 0:
                seed = int(pool[rng.integers(0, pool.size)])
                removed = _remove_string(scratch, seed, shake.omega, mask, neighbors)
            else:
                removed = []

        if removed:
            if cfg.repair == "greedy":
                order = rng.permutation(np.asarray(removed, dtype=np.int64))
                kernels.greedy_insert(scratch, order)
            else:
                kernels.regret2_insert(scratch, np.asarray(sorted(removed), dtype=np.int64))
        ls_fixpoint(scratch, neighbors)

        delta = scratch.total - cur_cost
        outcome = IMPROVED if delta < 0 else (NEAR_IDENTICAL if delta == 0 else WORSE)
        shake.update(removed, outcome)

        temp = t0 * (tf / t0) ** (it / decay_span)
        if delta <= 0:
            accept = True
        else:
            accept = rng.random() < math.exp(-delta / temp)
        if accept:
            cur, scratch = scratch, cur
            cur_cost = cur.total
        if cur_cost < best_cost:
            best.copy_from(cur)
            best_cost = cur_cost
            new_best_flag = True

        trace.append(it, cur_cost, best_cost, accept, len(removed), temp)
        if cfg.audit_removed:
            trace.removed_sets.append(list(removed))
        if cfg.debug_checks:
            problems = validate(cur.to_solution())
            if problems:
                raise AssertionError(f"iteration {it}: {problems[0]}")

    trace.wall_time_s = time.perf_counter() - t_start
    return best.to_solution(), trace
