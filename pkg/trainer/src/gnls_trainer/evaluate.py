"""Precision/recall of preserved-edge predictions against dataset labels."""

from __future__ import annotations

import torch

from .dataset import LabeledExample
from .graphs import build_training_graph
from .model import SelectorNet


def evaluate_precision(net: SelectorNet, examples: list[LabeledExample],
                       t: float, mode: str = "full", k: int = 25
                       ) -> tuple[float, float]:
    """(precision, recall) of "edge preserved" at threshold ``t``.

    Directed edge scores are averaged into undirected probabilities before
    thresholding, matching the solver's decoding.  With zero predicted
    positives precision is reported as 0.0.
    """
    tp = fp = fn = 0
    for ex in examples:
        g = build_training_graph(ex.inst, ex.s0_routes, labels=ex.labels,
                                 mode=mode, k=k)
        probs = net.edge_probabilities(g)
        sums = torch.zeros(g.n_und, dtype=probs.dtype)
        sums.index_add_(0, g.und_index[g.s0_mask], probs[g.s0_mask])
        p_und = sums / 2.0
        labels = torch.zeros(g.n_und)
        labels.index_add_(0, g.und_index[g.s0_mask],
                          g.s0_labels[g.s0_mask])
        labels = (labels / 2.0).round().long()
        pred = p_und > t
        truth = labels == 1
        tp += int((pred & truth).sum())
        fp += int((pred & ~truth).sum())
        fn += int((~pred & truth).sum())
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    return precision, recall


def predicted_positive_count(net: SelectorNet, examples: list[LabeledExample],
                             t: float, mode: str = "full", k: int = 25) -> int:
    count = 0
    for ex in examples:
        g = build_training_graph(ex.inst, ex.s0_routes, mode=mode, k=k)
        probs = net.edge_probabilities(g)
        sums = torch.zeros(g.n_und, dtype=probs.dtype)
        sums.index_add_(0, g.und_index[g.s0_mask], probs[g.s0_mask])
        count += int(((sums / 2.0) > t).sum())
    return count


def base_rate(examples: list[LabeledExample]) -> float:
    """Precision of the predict-everything baseline (positive label share)."""
    pos = sum(sum(ex.labels.values()) for ex in examples)
    total = sum(len(ex.labels) for ex in examples)
    return pos / total if total else 0.0
