"""Weight container IO (the trainer side of the solver contract).

Layout, little-endian: magic b"GNNW1\\0"; header <IIIf = conv layers L,
hidden h, MLP layers, eta_eps; <I tensor count; then per tensor
<I name_len | name | <I rank | <I*rank dims | float32 row-major data.
Tensor names follow "node_embed.weight", "conv{l}.w1".."w5"/"b1".."b5",
"conv{l}.bn_node.gamma/beta/mean/var" (same for bn_edge) and
"mlp{m}.weight"/"mlp{m}.bias"; batch-norm running statistics are exported
frozen.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import torch

from .model import SelectorNet

MAGIC = b"GNNW1\x00"


def _tensor_map(net: SelectorNet) -> dict[str, torch.Tensor]:
    t = {
        "node_embed.weight": net.node_embed.weight,
        "node_embed.bias": net.node_embed.bias,
        "dist_embed.weight": net.dist_embed.weight,
        "dist_embed.bias": net.dist_embed.bias,
        "kind_embed.weight": net.kind_embed.weight,
    }
    for l, conv in enumerate(net.convs):
        for w in range(1, 6):
            lin = getattr(conv, f"w{w}")
            t[f"conv{l}.w{w}"] = lin.weight
            t[f"conv{l}.b{w}"] = lin.bias
        for side in ("bn_node", "bn_edge"):
            bn = getattr(conv, side)
            t[f"conv{l}.{side}.gamma"] = bn.weight
            t[f"conv{l}.{side}.beta"] = bn.bias
            t[f"conv{l}.{side}.mean"] = bn.running_mean
            t[f"conv{l}.{side}.var"] = bn.running_var
    linears = [m for m in net.mlp if isinstance(m, torch.nn.Linear)]
    for m, lin in enumerate(linears):
        t[f"mlp{m}.weight"] = lin.weight
        t[f"mlp{m}.bias"] = lin.bias
    return t


def tensor_order(n_layers: int, n_mlp_layers: int) -> list[str]:
    names = ["node_embed.weight", "node_embed.bias", "dist_embed.weight",
             "dist_embed.bias", "kind_embed.weight"]
    for l in range(n_layers):
        names += [f"conv{l}.w{w}" for w in range(1, 6)]
        names += [f"conv{l}.b{w}" for w in range(1, 6)]
        for side in ("bn_node", "bn_edge"):
            names += [f"conv{l}.{side}.{p}" for p in ("gamma", "beta", "mean", "var")]
    for m in range(n_mlp_layers):
        names += [f"mlp{m}.weight", f"mlp{m}.bias"]
    return names


def export_weights(net: SelectorNet, path) -> None:
    """Write the model (running BN statistics frozen) to a container file."""
    tensors = _tensor_map(net)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIIf", net.n_layers, net.hidden,
                             net.n_mlp_layers, net.eta_eps))
        order = tensor_order(net.n_layers, net.n_mlp_layers)
        fh.write(struct.pack("<I", len(order)))
        for name in order:
            arr = tensors[name].detach().cpu().numpy().astype("<f4")
            encoded = name.encode()
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(np.ascontiguousarray(arr).tobytes())


def import_weights(path) -> SelectorNet:
    """Read a container back into a SelectorNet (float32 parameters)."""
    data = Path(path).read_bytes()
    pos = 0

    def take(count, what):
        nonlocal pos
        if pos + count > len(data):
            raise ValueError(f"truncated container while reading {what}")
        out = data[pos:pos + count]
        pos += count
        return out

    if take(6, "magic") != MAGIC:
        raise ValueError("bad magic: not a selector weight container")
    n_layers, hidden, n_mlp, eta_eps = struct.unpack("<IIIf", take(16, "header"))
    (count,) = struct.unpack("<I", take(4, "count"))
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", take(4, "name length"))
        name = take(name_len, "name").decode()
        (rank,) = struct.unpack("<I", take(4, "rank"))
        dims = struct.unpack(f"<{rank}I", take(4 * rank, "dims"))
        n_vals = int(np.prod(dims)) if dims else 1
        arr = np.frombuffer(take(4 * n_vals, name), dtype="<f4").reshape(dims)
        tensors[name] = arr
    net = SelectorNet(n_layers=n_layers, hidden=hidden, n_mlp_layers=n_mlp,
                      eta_eps=float(eta_eps))
    mapping = _tensor_map(net)
    if set(mapping) != set(tensors):
        raise ValueError("container tensors do not match the architecture")
    with torch.no_grad():
        for name, target in mapping.items():
            src = torch.from_numpy(tensors[name].copy())
            if tuple(target.shape) != tuple(src.shape):
                raise ValueError(f"tensor {name}: shape mismatch")
            target.copy_(src)
    return net
