"""Mark lifecycle inside the LNS loop: selection, aspiration, re-marking.

A marked customer is prohibited from removal unless the tabu aspiration
fires: per (node, destroy-call) a uniform R in [0,1) is drawn and the node
is admitted when R > p_theta.  Unmarked nodes never consume randomness, so
a null selector leaves the run's RNG stream untouched and the guided run
reduces bit-for-bit to the unguided baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gnn import (MarkSet, build_graph, decode_marks, forward, heuristic_selector,
                  load_weights)
from .gnn.graph import DEFAULT_KNN
from .instance import Instance
from .solution import Solution

REMARK_ONCE = "once"
REMARK_EVERY_K = "every_k"
REMARK_ON_NEW_BEST = "on_new_best"

# threshold / aspiration presets, keyed by baseline family, benchmark set
# and size band.
PRESETS: dict[str, tuple[float, float]] = {
    "hgs-x-small": (0.80, 0.65),  # N < 300
    "hgs-x-large": (0.80, 0.70),  # N >= 300
    "filo-x-small": (0.90, 0.60),
    "filo-x-large": (0.85, 0.65),
    "filo-b": (0.85, 0.60),
}


@dataclass
class GuidanceConfig:
    threshold: float = 0.8
    p_theta: float = 0.65
    remark_policy: str = REMARK_ONCE
    remark_every: int = 1000  # used by the every_k policy
    selector: str = "null"  # "gnn" | "heuristic" | "null"
    weights_path: str | None = None  # gnn selector
    quantile: float = 0.5  # heuristic selector
    knn: int = DEFAULT_KNN
    s0_only: bool = False  # restrict the inference graph to s0 edges

    def __post_init__(self):
        if not (0.0 <= self.p_theta <= 1.0):
            raise ValueError("p_theta must be in [0, 1]")
        if not (0.0 <= self.threshold <= 1.0):
            raise ValueError("threshold must be in [0, 1]")
        if self.remark_policy not in (REMARK_ONCE, REMARK_EVERY_K, REMARK_ON_NEW_BEST):
            raise ValueError(f"unknown remark policy {self.remark_policy!r}")
        if self.remark_policy == REMARK_EVERY_K and self.remark_every < 1:
            raise ValueError("remark_every must be >= 1")
        if self.selector not in ("gnn", "heuristic", "null"):
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.selector == "gnn" and not self.weights_path:
            raise ValueError("gnn selector needs a weights file")

    @classmethod
    def from_preset(cls, name: str, **kw) -> "GuidanceConfig":
        t, p = PRESETS[name]
        return cls(threshold=t, p_theta=p, **kw)


def preset_for(family: str, benchmark: str, n: int) -> str:
    """Preset name for a baseline family ("hgs"/"filo"), set ("x"/"b") and size."""
    if benchmark == "b":
        return "filo-b"
    band = "small" if n < 300 else "large"
    return f"{family}-x-{band}"


def mark(cfg: GuidanceConfig, inst: Instance, current: Solution,
         model=None) -> MarkSet:
    """Run the configured selector against the current solution."""
    if cfg.selector == "null":
        return MarkSet.empty()
    if cfg.selector == "heuristic":
        return heuristic_selector(inst, current, cfg.quantile)
    if model is None:
        model = load_weights(cfg.weights_path)
    g = build_graph(inst, current, k=cfg.knn, include_knn=not cfg.s0_only)
    probs = forward(model, g)
    return decode_marks(probs, g, cfg.threshold)


def allowed(marks: MarkSet, p_theta: float, node: int,
            rng: np.random.Generator) -> bool:
    """Aspiration check for one node: unmarked passes, marked needs R > p_theta."""
    if node not in marks.marked:
        return True
    return rng.random() > p_theta


def should_remark(cfg: GuidanceConfig, iteration: int, new_best: bool) -> bool:
    if cfg.remark_policy == REMARK_ONCE:
        return iteration == 0
    if cfg.remark_policy == REMARK_EVERY_K:
        return iteration % cfg.remark_every == 0
    return new_best


class GuidanceOracle:
    """Prohibition oracle handed to run_lns.

    Holds the current MarkSet and answers per-destroy-call allowed masks.
    The marked index array is kept sorted so the aspiration draws happen in
    a deterministic node order.  Marks are immutable between remark events;
    concurrent runs each own an oracle instance (the experiment harness
    builds one per run) so nothing is shared mutable.
    """

    def __init__(self, cfg: GuidanceConfig, inst: Instance):
        self.cfg = cfg
        self.inst = inst
        self.model = load_weights(cfg.weights_path) if cfg.selector == "gnn" else None
        self.marks = MarkSet.empty()
        self._marked_idx = np.empty(0, dtype=np.int64)
        self._base = np.ones(inst.n + 1, dtype=bool)
        self._base[0] = False

    def set_marks(self, marks: MarkSet) -> None:
        self.marks = marks
        self._marked_idx = np.array(sorted(marks.marked), dtype=np.int64)

    def maybe_remark(self, iteration: int, new_best: bool, solution_factory) -> bool:
        if not should_remark(self.cfg, iteration, new_best):
            return False
        self.set_marks(mark(self.cfg, self.inst, solution_factory(), model=self.model))
        return True

    def allowed_mask(self, rng: np.random.Generator) -> np.ndarray:
        """Boolean over nodes 0..N; one aspiration draw per marked node."""
        mask = self._base.copy()
        if self._marked_idx.size:
            draws = rng.random(self._marked_idx.size)
            mask[self._marked_idx] = draws > self.cfg.p_theta
        return mask


def null_oracle(inst: Instance) -> GuidanceOracle:
    return GuidanceOracle(GuidanceConfig(selector="null"), inst)
