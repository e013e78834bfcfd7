"""Supervised training with class-weighted BCE and curriculum stages.

Stage 1 trains on small instances with full graphs; later stages fine-tune
the same weights on larger instances with k-NN-sparsified graphs.  The loss
is binary cross-entropy on the directed initial-solution edges, with the
positive class weighted by the stage's negative/positive ratio unless the
config overrides it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from .dataset import LabeledExample
from .graphs import GraphBundle, build_training_graph, merge_graphs
from .model import SelectorNet


@dataclass
class CurriculumStage:
    n: int
    examples: list[LabeledExample]
    mode: str = "full"  # "full" | "knn"
    k: int = 25


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_graphs: int = 16
    lr: float = 1e-3
    pos_weight: float | None = None  # None: negatives/positives of the stage
    n_layers: int = 3
    hidden: int = 32
    n_mlp_layers: int = 2
    eta_eps: float = 1e-2
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_graphs < 1:
            raise ValueError("epochs and batch_graphs must be >= 1")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class TrainHistory:
    stage_losses: list[list[float]] = field(default_factory=list)

    @property
    def all_losses(self) -> list[float]:
        return [loss for stage in self.stage_losses for loss in stage]


def stage_graphs(stage: CurriculumStage) -> list[GraphBundle]:
    return [build_training_graph(ex.inst, ex.s0_routes, labels=ex.labels,
                                 mode=stage.mode, k=stage.k)
            for ex in stage.examples]


def _stage_pos_weight(graphs: list[GraphBundle]) -> float:
    pos = sum(float(g.s0_labels[g.s0_mask].sum()) for g in graphs)
    total = sum(int(g.s0_mask.sum()) for g in graphs)
    neg = total - pos
    if pos == 0:
        return 1.0
    return max(neg / pos, 1e-6)


def train(cfg: TrainConfig, stages: list[CurriculumStage],
          net: SelectorNet | None = None, log=None) -> tuple[SelectorNet, TrainHistory]:
    """Train through the curriculum; later stages continue from the same
    weights (never a fresh init).  Raises on divergence (non-finite loss)."""
    if not stages or any(not s.examples for s in stages):
        raise ValueError("every stage needs a non-empty dataset")
    ns = [s.n for s in stages]
    if ns != sorted(ns):
        raise ValueError("curriculum stages must be ordered by increasing n")
    torch.manual_seed(cfg.seed)
    if net is None:
        net = SelectorNet(n_layers=cfg.n_layers, hidden=cfg.hidden,
                          n_mlp_layers=cfg.n_mlp_layers, eta_eps=cfg.eta_eps)
    optim = torch.optim.Adam(net.parameters(), lr=cfg.lr)
    history = TrainHistory()
    gen = torch.Generator().manual_seed(cfg.seed)

    for stage_idx, stage in enumerate(stages):
        graphs = stage_graphs(stage)
        pw = cfg.pos_weight if cfg.pos_weight is not None else _stage_pos_weight(graphs)
        loss_fn = torch.nn.BCEWithLogitsLoss(pos_weight=torch.tensor(float(pw)))
        losses = []
        for epoch in range(cfg.epochs):
            net.train()
            order = torch.randperm(len(graphs), generator=gen).tolist()
            total_loss = 0.0
            n_batches = 0
            for lo in range(0, len(order), cfg.batch_graphs):
                batch = merge_graphs([graphs[i] for i in order[lo:lo + cfg.batch_graphs]])
                optim.zero_grad()
                logits = net(batch.feats, batch.dist, batch.kind, batch.src, batch.dst)
                loss = loss_fn(logits[batch.s0_mask], batch.s0_labels[batch.s0_mask])
                if not torch.isfinite(loss):
                    raise RuntimeError(
                        f"training diverged: non-finite loss at stage {stage_idx} "
                        f"epoch {epoch} (lr={cfg.lr}, pos_weight={pw:.3f})")
                loss.backward()
                optim.step()
                total_loss += loss.item()
                n_batches += 1
            epoch_loss = total_loss / n_batches
            losses.append(epoch_loss)
            if log is not None:
                log(f"stage {stage_idx} epoch {epoch + 1}/{cfg.epochs} "
                    f"loss {epoch_loss:.5f}")
        history.stage_losses.append(losses)
    return net, history


def smoothed(values: list[float], window: int = 10) -> list[float]:
    """Trailing moving average with a growing head window."""
    out = []
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        chunk = values[lo:i + 1]
        out.append(sum(chunk) / len(chunk))
    return out


def smoothed_strictly_decreasing(values: list[float], window: int = 10,
                                 stride: int = 10) -> bool:
    """True when the smoothed loss strictly decreases across strides."""
    s = smoothed(values, window)
    idx = list(range(0, len(s), stride))
    if idx[-1] != len(s) - 1:
        idx.append(len(s) - 1)
    return all(s[b] < s[a] for a, b in zip(idx, idx[1:]))
