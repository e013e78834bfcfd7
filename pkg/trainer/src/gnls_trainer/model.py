"""Torch implementation of the selector architecture.

Must stay numerically interchangeable with the solver's inference pass: the
weight container is the contract, and in eval mode (running batch-norm
statistics, epsilon 1e-5) this module and the solver produce the same edge
probabilities for the same graph.  See container.py for the file format.
"""

from __future__ import annotations

import torch
from torch import nn

BN_EPS = 1e-5
DEFAULT_ETA_EPS = 1e-2
PAPER_CONV_LAYERS = 10
PAPER_HIDDEN = 120
PAPER_MLP_LAYERS = 3


class ConvLayer(nn.Module):
    def __init__(self, hidden: int):
        super().__init__()
        self.w1 = nn.Linear(hidden, hidden)
        self.w2 = nn.Linear(hidden, hidden)
        self.w3 = nn.Linear(hidden, hidden)
        self.w4 = nn.Linear(hidden, hidden)
        self.w5 = nn.Linear(hidden, hidden)
        self.bn_node = nn.BatchNorm1d(hidden, eps=BN_EPS)
        self.bn_edge = nn.BatchNorm1d(hidden, eps=BN_EPS)

    def forward(self, x, e, src, dst, eta_eps):
        sig = torch.sigmoid(e)
        denom = torch.zeros_like(x).index_add_(0, src, sig) + eta_eps
        eta = sig / denom[src]
        msg = eta * self.w2(x)[dst]
        agg = torch.zeros_like(x).index_add_(0, src, msg)
        x_new = x + torch.relu(self.bn_node(self.w1(x) + agg))
        e_new = e + torch.relu(self.bn_edge(self.w3(e) + self.w4(x)[src] + self.w5(x)[dst]))
        return x_new, e_new


class SelectorNet(nn.Module):
    """Edge classifier over sparse CVRP graphs; forward returns edge logits."""

    def __init__(self, n_layers: int = 3, hidden: int = 32, n_mlp_layers: int = 2,
                 eta_eps: float = DEFAULT_ETA_EPS):
        super().__init__()
        if hidden % 2 != 0:
            raise ValueError("hidden width must be even")
        self.n_layers = n_layers
        self.hidden = hidden
        self.n_mlp_layers = n_mlp_layers
        self.eta_eps = eta_eps
        h2 = hidden // 2
        self.node_embed = nn.Linear(3, hidden)
        self.dist_embed = nn.Linear(1, h2)
        self.kind_embed = nn.Embedding(3, h2)
        self.convs = nn.ModuleList(ConvLayer(hidden) for _ in range(n_layers))
        mlp = []
        for m in range(n_mlp_layers):
            last = m == n_mlp_layers - 1
            mlp.append(nn.Linear(hidden, 1 if last else hidden))
            if not last:
                mlp.append(nn.ReLU())
        self.mlp = nn.Sequential(*mlp)

    def forward(self, feats, dist, kind, src, dst) -> torch.Tensor:
        x = self.node_embed(feats)
        e = torch.cat([self.dist_embed(dist.unsqueeze(1)), self.kind_embed(kind)],
                      dim=1)
        for conv in self.convs:
            x, e = conv(x, e, src, dst, self.eta_eps)
        return self.mlp(e).squeeze(1)

    def edge_probabilities(self, graph) -> torch.Tensor:
        """Eval-mode probabilities for a graph bundle (see graphs.py)."""
        self.eval()
        with torch.no_grad():
            logits = self(graph.feats, graph.dist, graph.kind, graph.src, graph.dst)
        return torch.sigmoid(logits)
