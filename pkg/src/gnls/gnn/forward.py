"""Selector inference: message passing, edge scores, and mark decoding.

Per conv layer, with x the node states and e the directed-edge states:

    eta_ij = sigmoid(e_ij) / (sum_{j' ~ i} sigmoid(e_ij') + eps)    (elementwise)
    x_i    <- x_i + ReLU(BN(W1 x_i + b1 + sum_{j ~ i} eta_ij * (W2 x_j + b2)))
    e_ij   <- e_ij + ReLU(BN(W3 e_ij + b3 + W4 x_i + b4 + W5 x_j + b5))

where j ~ i ranges over the out-edges of i (self-loops included), both
updates read the layer's input states, and BN applies the stored running
statistics.  After the last layer an MLP maps each directed edge state to a
logit, squashed to a probability by a logistic.

Everything is float64 and vectorized over the edge list, which is sorted by
source node so per-node sums are contiguous segment reductions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .graph import SparseGraph
from .model import BN_EPS, BatchNorm, GnnError, SelectorModel


@dataclass(frozen=True)
class MarkSet:
    """Customers the destroy phase must preserve (instance node indices)."""

    marked: frozenset[int]
    threshold: float | None
    source: str  # "gnn" | "heuristic" | "null"

    def __post_init__(self):
        if 0 in self.marked:
            raise ValueError("the depot can never be marked")

    def __len__(self):
        return len(self.marked)

    @classmethod
    def empty(cls, source: str = "null") -> "MarkSet":
        return cls(frozenset(), None, source)


def _bn(bn: BatchNorm, v: np.ndarray) -> np.ndarray:
    return (v - bn.mean) / np.sqrt(bn.var + BN_EPS) * bn.gamma + bn.beta


def forward(model: SelectorModel, g: SparseGraph,
            capture: list | None = None) -> np.ndarray:
    """Probability in (0,1) per directed edge of ``g``.

    ``capture``, when given a list, receives one dict per conv layer with
    the layer's input edge states, the attention weights actually used and
    the per-node sigmoid sums (for verifying the normalization identity).
    Pure function of (model, graph): identical inputs give identical output.
    """
    if g.node_features.shape[1] != model.node_w.shape[1]:
        raise GnnError(
            f"graph has {g.node_features.shape[1]} node features, "
            f"model embeds {model.node_w.shape[1]}")
    if g.edge_kind.size and int(g.edge_kind.max()) >= model.kind_w.shape[0]:
        raise GnnError("graph edge kind out of range for the model's kind table")
    src = g.edge_src.astype(np.int64)
    dst = g.edge_dst.astype(np.int64)
    n_v = g.n_nodes
    if np.any(np.diff(src) < 0):
        raise GnnError("edge list must be sorted by source node")
    seg = np.searchsorted(src, np.arange(n_v))
    counts = np.bincount(src, minlength=n_v)
    if (counts == 0).any():
        raise GnnError("every node needs at least one out-edge (self-loop)")

    x = g.node_features @ model.node_w.T + model.node_b
    e = np.concatenate([
        g.edge_distance[:, None] @ model.dist_w.T + model.dist_b,
        model.kind_w[g.edge_kind.astype(np.int64)],
    ], axis=1)

    eps = model.eta_eps
    for layer in model.layers:
        sig = expit(e)
        sig_sum = np.add.reduceat(sig, seg, axis=0)
        eta = sig / (sig_sum[src] + eps)
        if capture is not None:
            capture.append({"edge_in": e.copy(), "node_in": x.copy(),
                            "eta": eta.copy(), "sigma_sum": sig_sum.copy()})
        u2 = x @ layer.w2.T + layer.b2
        agg = np.add.reduceat(eta * u2[dst], seg, axis=0)
        node_pre = x @ layer.w1.T + layer.b1 + agg
        x_new = x + np.maximum(_bn(layer.bn_node, node_pre), 0.0)
        edge_pre = (e @ layer.w3.T + layer.b3
                    + (x @ layer.w4.T + layer.b4)[src]
                    + (x @ layer.w5.T + layer.b5)[dst])
        e = e + np.maximum(_bn(layer.bn_edge, edge_pre), 0.0)
        x = x_new

    hidden = e
    for w, b in model.mlp[:-1]:
        hidden = np.maximum(hidden @ w.T + b, 0.0)
    w_last, b_last = model.mlp[-1]
    logits = (hidden @ w_last.T + b_last)[:, 0]
    return expit(logits)


def decode_marks(probs: np.ndarray, g: SparseGraph, t: float) -> MarkSet:
    """Threshold the initial-solution edges and mark their endpoints.

    Only edges flagged by ``s0_edge_mask`` are considered; the undirected
    probability of an edge is the mean of its two directed scores.  Edges
    with probability strictly above ``t`` mark both non-depot endpoints.
    Monotone: raising t can only shrink the mark set.
    """
    if not (0.0 <= t <= 1.0):
        raise ValueError("threshold must be in [0, 1]")
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape != (g.n_edges,):
        raise GnnError("probability vector does not match the edge list")
    mask = g.s0_edge_mask
    if not mask.any():
        return MarkSet(frozenset(), t, "gnn")
    ids_a = g.node_ids[g.edge_src[mask]].astype(np.int64)
    ids_b = g.node_ids[g.edge_dst[mask]].astype(np.int64)
    big = int(g.node_ids.max()) + 1
    keys = np.minimum(ids_a, ids_b) * big + np.maximum(ids_a, ids_b)
    uniq, inv = np.unique(keys, return_inverse=True)
    p_und = (np.bincount(inv, weights=probs[mask])
             / np.bincount(inv))
    sel = uniq[p_und > t]
    marked = set((sel // big).tolist()) | set((sel % big).tolist())
    marked.discard(0)
    return MarkSet(frozenset(marked), t, "gnn")
