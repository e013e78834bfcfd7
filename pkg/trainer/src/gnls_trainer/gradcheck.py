"""Finite-difference validation of the forward implementation.

Compares autograd gradients of the training loss against central
differences for every scalar parameter, in double precision with batch
normalization in inference mode (running statistics), so repeated loss
evaluations are side-effect free.
"""

from __future__ import annotations

import torch

from .graphs import GraphBundle
from .model import SelectorNet


def _loss(net: SelectorNet, g: GraphBundle, labels: torch.Tensor,
          pos_weight: float) -> torch.Tensor:
    logits = net(g.feats, g.dist, g.kind, g.src, g.dst)
    fn = torch.nn.BCEWithLogitsLoss(
        pos_weight=torch.tensor(pos_weight, dtype=logits.dtype))
    return fn(logits[g.s0_mask], labels)


def grad_check(net: SelectorNet, g: GraphBundle, step: float = 1e-5,
               pos_weight: float = 2.0, seed: int = 0) -> float:
    """Max relative error between analytic and numeric gradients."""
    net = net.double()
    net.eval()
    g = GraphBundle(feats=g.feats.double(), dist=g.dist.double(), kind=g.kind,
                    src=g.src, dst=g.dst, s0_mask=g.s0_mask,
                    s0_labels=g.s0_labels.double(), und_index=g.und_index,
                    n_und=g.n_und)
    gen = torch.Generator().manual_seed(seed)
    n_s0 = int(g.s0_mask.sum())
    labels = (torch.rand(n_s0, generator=gen) > 0.5).double()

    net.zero_grad()
    loss = _loss(net, g, labels, pos_weight)
    loss.backward()
    # the last conv layer's node-path parameters never reach the edge
    # classifier, so autograd leaves them without a gradient: that is a real
    # zero, and the central differences confirm it
    analytic = {name: (p.grad.detach().clone() if p.grad is not None
                       else torch.zeros_like(p))
                for name, p in net.named_parameters()}

    worst = 0.0
    with torch.no_grad():
        for name, p in net.named_parameters():
            flat = p.view(-1)
            grad = analytic[name].view(-1)
            for idx in range(flat.shape[0]):
                orig = float(flat[idx])
                flat[idx] = orig + step
                up = float(_loss(net, g, labels, pos_weight))
                flat[idx] = orig - step
                down = float(_loss(net, g, labels, pos_weight))
                flat[idx] = orig
                numeric = (up - down) / (2 * step)
                a = float(grad[idx])
                rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
                worst = max(worst, rel)
    return worst


def grad_check_sweep(net: SelectorNet, g: GraphBundle, steps) -> list[float]:
    """Error as a function of the finite-difference step (checker sanity)."""
    return [grad_check(net, g, step=s) for s in steps]
