"""Sparse graph construction for the node selector.

The selector sees the depot plus at most 1000 customers (the ones nearest
the depot, for very large instances), with edges from k-nearest-neighbor
adjacency united with the initial solution's edge set, plus a self-loop per
node.  Both directions of every undirected edge are present, and edges are
sorted by (src, dst) so the forward pass can segment-sum per source node.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..instance import Instance
from ..solution import Solution, solution_edges

GRAPH_CUSTOMER_CAP = 1000
DEFAULT_KNN = 25


class EdgeKind(IntEnum):
    KNN = 0
    SOLUTION = 1
    SELF_LOOP = 2


@dataclass
class SparseGraph:
    """Node/edge tensors over graph-local indices.

    ``node_ids`` maps graph node -> instance node (row 0 is the depot).
    ``node_features`` columns: x, y (normalized to [0,1] by the retained
    nodes' bounding box) and demand utilization q/Q.
    """

    node_ids: np.ndarray       # int32 (n_v,)
    node_features: np.ndarray  # float64 (n_v, 3)
    edge_src: np.ndarray       # int32 (n_e,) graph-local
    edge_dst: np.ndarray       # int32 (n_e,)
    edge_distance: np.ndarray  # float64 (n_e,), normalized to [0, 1]
    edge_kind: np.ndarray      # int8 (n_e,), EdgeKind values
    s0_edge_mask: np.ndarray   # bool (n_e,)

    @property
    def n_nodes(self) -> int:
        return self.node_ids.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_src.shape[0]


def _retained_nodes(inst: Instance) -> np.ndarray:
    n = inst.n
    if n <= GRAPH_CUSTOMER_CAP:
        return np.arange(n + 1, dtype=np.int32)
    d0 = inst.dist_row(0)[1:]
    order = np.lexsort((np.arange(1, n + 1), d0))[:GRAPH_CUSTOMER_CAP]
    customers = np.sort(order + 1).astype(np.int32)
    return np.concatenate(([0], customers)).astype(np.int32)


def build_graph(inst: Instance, s0: Solution, k: int = DEFAULT_KNN,
                include_knn: bool = True) -> SparseGraph:
    """Build the selector's input graph for an instance and initial solution.

    ``include_knn=False`` restricts the edge set to the initial solution's
    edges (plus self-loops).
    """
    node_ids = _retained_nodes(inst)
    n_v = node_ids.shape[0]
    g_of = np.full(inst.n + 1, -1, dtype=np.int64)
    g_of[node_ids] = np.arange(n_v)

    coords = inst.coords[node_ids]
    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    feats = np.empty((n_v, 3), dtype=np.float64)
    feats[:, :2] = (coords - lo) / span
    feats[:, 2] = inst.demands[node_ids] / inst.capacity

    # Retained-node pairwise rounded distances (n_v <= 1001 keeps this small).
    dx = coords[:, 0:1] - coords[:, 0:1].T
    dy = coords[:, 1:2] - coords[:, 1:2].T
    dmat = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)

    und_keys = []
    if include_knn:
        kk = min(k, n_v - 1)
        if kk > 0:
            order_keys = dmat * n_v + np.arange(n_v)[None, :]  # ties -> lower index
            np.fill_diagonal(order_keys, np.iinfo(np.int64).max)
            nn = np.argsort(order_keys, axis=1, kind="stable")[:, :kk]
            src = np.repeat(np.arange(n_v), kk)
            dst = nn.reshape(-1)
            und_keys.append(np.minimum(src, dst) * n_v + np.maximum(src, dst))

    s0_pairs = [(g_of[a], g_of[b]) for a, b in solution_edges(s0)
                if g_of[a] >= 0 and g_of[b] >= 0]
    if s0_pairs:
        sa = np.array([p[0] for p in s0_pairs], dtype=np.int64)
        sb = np.array([p[1] for p in s0_pairs], dtype=np.int64)
        s0_keys = np.unique(np.minimum(sa, sb) * n_v + np.maximum(sa, sb))
    else:
        s0_keys = np.empty(0, dtype=np.int64)
    und_keys.append(s0_keys)

    und = np.unique(np.concatenate(und_keys)) if und_keys else np.empty(0, dtype=np.int64)
    u_lo = und // n_v
    u_hi = und % n_v
    self_ids = np.arange(n_v, dtype=np.int64)
    src = np.concatenate([u_lo, u_hi, self_ids])
    dst = np.concatenate([u_hi, u_lo, self_ids])

    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]

    keys = np.minimum(src, dst) * n_v + np.maximum(src, dst)
    s0_mask = np.isin(keys, s0_keys) & (src != dst)
    kind = np.where(src == dst, np.int8(EdgeKind.SELF_LOOP),
                    np.where(s0_mask, np.int8(EdgeKind.SOLUTION), np.int8(EdgeKind.KNN)))

    edge_d = dmat[src, dst].astype(np.float64)
    max_d = edge_d.max() if edge_d.size else 1.0
    if max_d <= 0:
        max_d = 1.0
    edge_d /= max_d

    return SparseGraph(
        node_ids=node_ids,
        node_features=feats,
        edge_src=src.astype(np.int32),
        edge_dst=dst.astype(np.int32),
        edge_distance=edge_d,
        edge_kind=kind.astype(np.int8),
        s0_edge_mask=s0_mask,
    )
