"""Training-graph construction.

The rules mirror the solver's inference graphs so the training distribution
matches what the model sees in production: coordinates normalized by the
node bounding box, demand utilization q/Q, edge distances normalized by the
largest edge distance, edge kinds {0: knn, 1: initial-solution, 2:
self-loop}, both directions of every undirected edge, edges sorted by
(src, dst).  The curriculum uses full graphs for small instances and
k-nearest-neighbor sparsification for the larger fine-tuning stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .formats import InstanceData, solution_edges

KIND_KNN = 0
KIND_SOLUTION = 1
KIND_SELF = 2


@dataclass
class GraphBundle:
    """Tensors for one graph plus the undirected s0-edge bookkeeping."""

    feats: torch.Tensor      # (n_v, 3) float
    dist: torch.Tensor       # (n_e,) float
    kind: torch.Tensor       # (n_e,) long
    src: torch.Tensor        # (n_e,) long
    dst: torch.Tensor        # (n_e,) long
    s0_mask: torch.Tensor    # (n_e,) bool, directed
    s0_labels: torch.Tensor  # (n_e,) float, defined where s0_mask (else 0)
    und_index: torch.Tensor  # (n_e,) long, undirected s0-edge id (-1 elsewhere)
    n_und: int               # number of undirected s0 edges

    @property
    def n_nodes(self) -> int:
        return self.feats.shape[0]


def build_training_graph(inst: InstanceData, s0_routes: list[list[int]],
                         labels: dict[tuple[int, int], int] | None = None,
                         mode: str = "full", k: int = 25,
                         dtype=torch.float32) -> GraphBundle:
    """Graph for (instance, initial solution); ``labels`` maps undirected
    s0 edges (lo, hi) to {0,1}.  mode "full" connects every node pair;
    "knn" keeps k nearest neighbors per node (plus the s0 edges)."""
    n_v = inst.n + 1
    coords = inst.coords
    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    feats = np.empty((n_v, 3))
    feats[:, :2] = (coords - lo) / span
    feats[:, 2] = inst.demands / inst.capacity

    dmat = inst.dist_matrix()
    s0 = sorted(solution_edges(s0_routes))
    s0_keys = np.array([a * n_v + b for a, b in s0], dtype=np.int64)

    if mode == "full":
        a, b = np.triu_indices(n_v, k=1)
        und = a.astype(np.int64) * n_v + b.astype(np.int64)
    elif mode == "knn":
        kk = min(k, n_v - 1)
        order_keys = dmat * n_v + np.arange(n_v)[None, :]
        np.fill_diagonal(order_keys, np.iinfo(np.int64).max)
        nn = np.argsort(order_keys, axis=1, kind="stable")[:, :kk]
        src_k = np.repeat(np.arange(n_v, dtype=np.int64), kk)
        dst_k = nn.reshape(-1).astype(np.int64)
        und = np.unique(np.concatenate([
            np.minimum(src_k, dst_k) * n_v + np.maximum(src_k, dst_k), s0_keys]))
    else:
        raise ValueError("mode must be 'full' or 'knn'")

    u_lo = und // n_v
    u_hi = und % n_v
    self_ids = np.arange(n_v, dtype=np.int64)
    src = np.concatenate([u_lo, u_hi, self_ids])
    dst = np.concatenate([u_hi, u_lo, self_ids])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]

    keys = np.minimum(src, dst) * n_v + np.maximum(src, dst)
    s0_mask = np.isin(keys, s0_keys) & (src != dst)
    kind = np.where(src == dst, KIND_SELF, np.where(s0_mask, KIND_SOLUTION, KIND_KNN))

    dist = dmat[src, dst].astype(np.float64)
    max_d = dist.max() if dist.size else 1.0
    dist = dist / (max_d if max_d > 0 else 1.0)

    key_to_und = {int(key): i for i, key in enumerate(s0_keys)}
    und_index = np.array([key_to_und.get(int(k2), -1) if m else -1
                          for k2, m in zip(keys, s0_mask)], dtype=np.int64)
    lab = np.zeros(len(src))
    if labels is not None:
        for i, (m, k2) in enumerate(zip(s0_mask, keys)):
            if m:
                a, b = int(k2) // n_v, int(k2) % n_v
                lab[i] = float(labels[(a, b)])

    return GraphBundle(
        feats=torch.as_tensor(feats, dtype=dtype),
        dist=torch.as_tensor(dist, dtype=dtype),
        kind=torch.as_tensor(kind, dtype=torch.long),
        src=torch.as_tensor(src, dtype=torch.long),
        dst=torch.as_tensor(dst, dtype=torch.long),
        s0_mask=torch.as_tensor(s0_mask, dtype=torch.bool),
        s0_labels=torch.as_tensor(lab, dtype=dtype),
        und_index=torch.as_tensor(und_index, dtype=torch.long),
        n_und=len(s0),
    )


def merge_graphs(graphs: list[GraphBundle]) -> GraphBundle:
    """Disjoint union for mini-batching; BN then normalizes over the union."""
    feats, dist, kind, src, dst, mask, lab, und = [], [], [], [], [], [], [], []
    node_off = 0
    und_off = 0
    for g in graphs:
        feats.append(g.feats)
        dist.append(g.dist)
        kind.append(g.kind)
        src.append(g.src + node_off)
        dst.append(g.dst + node_off)
        mask.append(g.s0_mask)
        lab.append(g.s0_labels)
        shifted = g.und_index.clone()
        shifted[shifted >= 0] += und_off
        und.append(shifted)
        node_off += g.n_nodes
        und_off += g.n_und
    return GraphBundle(
        feats=torch.cat(feats), dist=torch.cat(dist), kind=torch.cat(kind),
        src=torch.cat(src), dst=torch.cat(dst), s0_mask=torch.cat(mask),
        s0_labels=torch.cat(lab), und_index=torch.cat(und), n_und=und_off)


def graph_from_dump(dump: dict, dtype=torch.float64) -> GraphBundle:
    """Bundle from the solver CLI's --dump-graph JSON (shared-fixture checks)."""
    src = torch.as_tensor(dump["edge_src"], dtype=torch.long)
    n_e = src.shape[0]
    return GraphBundle(
        feats=torch.as_tensor(dump["node_features"], dtype=dtype),
        dist=torch.as_tensor(dump["edge_distance"], dtype=dtype),
        kind=torch.as_tensor(dump["edge_kind"], dtype=torch.long),
        src=src,
        dst=torch.as_tensor(dump["edge_dst"], dtype=torch.long),
        s0_mask=torch.as_tensor(dump["s0_edge_mask"], dtype=torch.bool),
        s0_labels=torch.zeros(n_e, dtype=dtype),
        und_index=torch.full((n_e,), -1, dtype=torch.long),
        n_und=0,
    )
