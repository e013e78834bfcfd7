"""Linked-list working representation used by the search kernels.

Routes are doubly-linked circular lists.  Node ids 1..n are customers; each
route slot r owns a virtual depot node with id n+1+r that closes the cycle.
Any id > n means "the depot" for distance purposes.  Removing or inserting a
customer is O(1) and keeps per-route loads and integer costs exact, which is
what lets the destroy/repair loop track the total cost without recomputing.

Empty route slots (size 0) may exist transiently between a destroy and the
following repair; the repair kernels compact them away.
"""

from __future__ import annotations

import numpy as np

from .instance import Instance, rounded_euclid
from .solution import Route, Solution


class SolverState:
    """Mutable search state bound to one instance.

    Arrays (length 2n+2, index space: 0 unused, 1..n customers, n+1.. virtual
    depots):
      succ, pred   int32 successor/predecessor links (-1 for absent customers)
      route_of     int32 route slot per customer (-1 when absent), r for v_r
    Per-slot arrays (length n+1):
      load         int64 route demand sums
      rcost        int64 route integer costs
      size         int32 route lengths
    """

    def __init__(self, inst: Instance):
        n = inst.n
        self.inst = inst
        self.n = n
        self.capacity = int(inst.capacity)
        self.demands = inst.demands
        self.dmat = inst.dist_matrix()
        self.xs = np.ascontiguousarray(inst.coords[:, 0])
        self.ys = np.ascontiguousarray(inst.coords[:, 1])
        cap = 2 * n + 2
        self.succ = np.full(cap, -1, dtype=np.int32)
        self.pred = np.full(cap, -1, dtype=np.int32)
        self.route_of = np.full(cap, -1, dtype=np.int32)
        self.load = np.zeros(n + 1, dtype=np.int64)
        self.rcost = np.zeros(n + 1, dtype=np.int64)
        self.size = np.zeros(n + 1, dtype=np.int32)
        self.n_slots = 0
        self.total = 0

    # -- distances ----------------------------------------------------------

    def dist(self, i: int, j: int) -> int:
        if i > self.n:
            i = 0
        if j > self.n:
            j = 0
        if self.dmat is not None:
            return int(self.dmat[i, j])
        return rounded_euclid(self.xs[i] - self.xs[j], self.ys[i] - self.ys[j])

    # -- construction / conversion ------------------------------------------

    @classmethod
    def from_solution(cls, sol: Solution) -> "SolverState":
        st = cls(sol.inst)
        for route in sol.routes:
            st.add_route(route.seq)
        return st

    def add_route(self, seq) -> int:
        """Append a route slot holding ``seq``; returns the slot index."""
        r = self.n_slots
        v = self.n + 1 + r
        self.n_slots += 1
        self.route_of[v] = r
        prev = v
        load = 0
        cost = 0
        last = 0
        for c in seq:
            c = int(c)
            self.succ[prev] = c
            self.pred[c] = prev
            self.route_of[c] = r
            cost += self.dist(last, c)
            load += int(self.demands[c])
            prev = c
            last = c
        self.succ[prev] = v
        self.pred[v] = prev
        cost += self.dist(last, 0) if seq else 0
        self.load[r] = load
        self.rcost[r] = cost
        self.size[r] = len(seq)
        self.total += cost
        return r

    def route_seq(self, r: int) -> list[int]:
        v = self.n + 1 + r
        seq = []
        c = int(self.succ[v])
        while c <= self.n:
            seq.append(c)
            c = int(self.succ[c])
        return seq

    def to_solution(self) -> Solution:
        routes = []
        for r in range(self.n_slots):
            if self.size[r] == 0:
                continue
            seq = self.route_seq(r)
            routes.append(Route(seq, int(self.load[r]), int(self.rcost[r])))
        return Solution(self.inst, routes)

    def copy(self) -> "SolverState":
        st = SolverState.__new__(SolverState)
        st.inst = self.inst
        st.n = self.n
        st.capacity = self.capacity
        st.demands = self.demands
        st.dmat = self.dmat
        st.xs = self.xs
        st.ys = self.ys
        st.succ = self.succ.copy()
        st.pred = self.pred.copy()
        st.route_of = self.route_of.copy()
        st.load = self.load.copy()
        st.rcost = self.rcost.copy()
        st.size = self.size.copy()
        st.n_slots = self.n_slots
        st.total = self.total
        return st

    def copy_from(self, other: "SolverState") -> None:
        """In-place restore from a snapshot sharing the same instance."""
        self.succ[:] = other.succ
        self.pred[:] = other.pred
        self.route_of[:] = other.route_of
        self.load[:] = other.load
        self.rcost[:] = other.rcost
        self.size[:] = other.size
        self.n_slots = other.n_slots
        self.total = other.total

    # -- O(1) mutations -----------------------------------------------------

    def remove_customer(self, c: int) -> int:
        """Unlink customer c; returns the (non-positive is typical) cost delta."""
        r = int(self.route_of[c])
        a = int(self.pred[c])
        b = int(self.succ[c])
        delta = self.dist(a, b) - self.dist(a, c) - self.dist(c, b)
        self.succ[a] = b
        self.pred[b] = a
        self.succ[c] = -1
        self.pred[c] = -1
        self.route_of[c] = -1
        self.size[r] -= 1
        self.load[r] -= int(self.demands[c])
        self.rcost[r] += delta
        self.total += delta
        return delta

    def insert_after(self, c: int, a: int) -> int:
        """Link customer c directly after node a (customer or virtual depot)."""
        r = int(self.route_of[a])
        b = int(self.succ[a])
        delta = self.dist(a, c) + self.dist(c, b) - self.dist(a, b)
        self.succ[a] = c
        self.pred[c] = a
        self.succ[c] = b
        self.pred[b] = c
        self.route_of[c] = r
        self.size[r] += 1
        self.load[r] += int(self.demands[c])
        self.rcost[r] += delta
        self.total += delta
        return delta

    def new_route_slot(self) -> int:
        """Open an empty route slot (lowest empty slot is reused, else appended)."""
        for r in range(self.n_slots):
            if self.size[r] == 0:
                return r
        r = self.n_slots
        self.n_slots += 1
        v = self.n + 1 + r
        self.succ[v] = v
        self.pred[v] = v
        self.route_of[v] = r
        self.load[r] = 0
        self.rcost[r] = 0
        self.size[r] = 0
        return r

    def compact_slots(self) -> None:
        """Drop empty route slots, renumbering the survivors in order."""
        w = 0
        for r in range(self.n_slots):
            if self.size[r] == 0:
                continue
            if w != r:
                v_old = self.n + 1 + r
                v_new = self.n + 1 + w
                first = int(self.succ[v_old])
                last = int(self.pred[v_old])
                self.succ[v_new] = first
                self.pred[v_new] = last
                self.pred[first] = v_new
                self.succ[last] = v_new
                self.route_of[v_new] = w
                seq_node = first
                while seq_node <= self.n:
                    self.route_of[seq_node] = w
                    seq_node = int(self.succ[seq_node])
                self.load[w] = self.load[r]
                self.rcost[w] = self.rcost[r]
                self.size[w] = self.size[r]
            w += 1
        for r in range(w, self.n_slots):
            self.load[r] = 0
            self.rcost[r] = 0
            self.size[r] = 0
        self.n_slots = w

    def present_mask(self) -> np.ndarray:
        """Boolean over 0..n: True where the customer is currently routed."""
        mask = self.route_of[: self.n + 1] >= 0
        mask[0] = False
        return mask
