"""Selector model weights and the portable weight container.

Container layout (little-endian):

    magic   6 bytes  b"GNNW1\\0"
    header  <IIIf    conv layer count L, hidden width h, MLP layer count, eta_eps
    count   <I       number of tensors
    tensor  <I name_len | name utf-8 | <I rank | <I * rank dims | f32 data row-major

Tensor names, in canonical order (h2 = h // 2):

    node_embed.weight (h,3)    node_embed.bias (h,)
    dist_embed.weight (h2,1)   dist_embed.bias (h2,)
    kind_embed.weight (3,h2)
    conv{l}.w1..w5 (h,h)       conv{l}.b1..b5 (h,)
    conv{l}.bn_node.{gamma,beta,mean,var} (h,)
    conv{l}.bn_edge.{gamma,beta,mean,var} (h,)
    mlp{m}.weight (h,h), last (1,h)
    mlp{m}.bias (h,), last (1,)

Batch normalization at inference uses the stored running statistics with a
fixed epsilon of 1e-5 inside the square root; eta_eps is the stability
constant of the attention normalization and travels in the header.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"GNNW1\x00"
BN_EPS = 1e-5
DEFAULT_ETA_EPS = 1e-2
PAPER_CONV_LAYERS = 10
PAPER_HIDDEN = 120
PAPER_MLP_LAYERS = 3


class GnnError(ValueError):
    pass


class GnnWeightError(GnnError):
    pass


@dataclass
class BatchNorm:
    gamma: np.ndarray
    beta: np.ndarray
    mean: np.ndarray
    var: np.ndarray


@dataclass
class ConvLayer:
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray
    w4: np.ndarray
    w5: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray
    b4: np.ndarray
    b5: np.ndarray
    bn_node: BatchNorm
    bn_edge: BatchNorm


@dataclass
class SelectorModel:
    n_layers: int
    hidden: int
    n_mlp_layers: int
    eta_eps: float
    node_w: np.ndarray
    node_b: np.ndarray
    dist_w: np.ndarray
    dist_b: np.ndarray
    kind_w: np.ndarray
    layers: list[ConvLayer]
    mlp: list[tuple[np.ndarray, np.ndarray]]


def expected_tensors(n_layers: int, hidden: int, n_mlp_layers: int) -> list[tuple[str, tuple[int, ...]]]:
    h = hidden
    h2 = h // 2
    out: list[tuple[str, tuple[int, ...]]] = [
        ("node_embed.weight", (h, 3)),
        ("node_embed.bias", (h,)),
        ("dist_embed.weight", (h2, 1)),
        ("dist_embed.bias", (h2,)),
        ("kind_embed.weight", (3, h2)),
    ]
    for l in range(n_layers):
        for w in range(1, 6):
            out.append((f"conv{l}.w{w}", (h, h)))
        for w in range(1, 6):
            out.append((f"conv{l}.b{w}", (h,)))
        for side in ("bn_node", "bn_edge"):
            for p in ("gamma", "beta", "mean", "var"):
                out.append((f"conv{l}.{side}.{p}", (h,)))
    for m in range(n_mlp_layers):
        rows = 1 if m == n_mlp_layers - 1 else h
        out.append((f"mlp{m}.weight", (rows, h)))
        out.append((f"mlp{m}.bias", (rows,)))
    return out


def _model_tensor_map(model: SelectorModel) -> dict[str, np.ndarray]:
    t = {
        "node_embed.weight": model.node_w,
        "node_embed.bias": model.node_b,
        "dist_embed.weight": model.dist_w,
        "dist_embed.bias": model.dist_b,
        "kind_embed.weight": model.kind_w,
    }
    for l, layer in enumerate(model.layers):
        for w in range(1, 6):
            t[f"conv{l}.w{w}"] = getattr(layer, f"w{w}")
            t[f"conv{l}.b{w}"] = getattr(layer, f"b{w}")
        for side in ("bn_node", "bn_edge"):
            bn = getattr(layer, side)
            t[f"conv{l}.{side}.gamma"] = bn.gamma
            t[f"conv{l}.{side}.beta"] = bn.beta
            t[f"conv{l}.{side}.mean"] = bn.mean
            t[f"conv{l}.{side}.var"] = bn.var
    for m, (w, b) in enumerate(model.mlp):
        t[f"mlp{m}.weight"] = w
        t[f"mlp{m}.bias"] = b
    return t


def save_weights(model: SelectorModel, path) -> None:
    tensors = _model_tensor_map(model)
    order = expected_tensors(model.n_layers, model.hidden, model.n_mlp_layers)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIIf", model.n_layers, model.hidden,
                             model.n_mlp_layers, model.eta_eps))
        fh.write(struct.pack("<I", len(order)))
        for name, shape in order:
            arr = np.ascontiguousarray(tensors[name], dtype=np.float32)
            if arr.shape != shape:
                raise GnnWeightError(f"tensor {name}: shape {arr.shape} != {shape}")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise GnnWeightError(f"truncated file while reading {what}")
        out = self.data[self.pos:self.pos + count]
        self.pos += count
        return out


def load_weights(path) -> SelectorModel:
    """Load and strictly validate a weight container.

    Any problem (bad magic, unexpected or missing tensor, shape mismatch,
    non-finite value, non-positive batch-norm variance, trailing garbage)
    raises GnnWeightError naming the offender; no partial model escapes.
    """
    r = _Reader(Path(path).read_bytes())
    if r.take(len(MAGIC), "magic") != MAGIC:
        raise GnnWeightError("bad magic: not a selector weight container")
    n_layers, hidden, n_mlp, eta_eps = struct.unpack("<IIIf", r.take(16, "header"))
    if hidden % 2 != 0:
        raise GnnWeightError(f"hidden width must be even, got {hidden}")
    if n_layers < 1 or n_mlp < 1 or hidden < 2:
        raise GnnWeightError("header declares an empty model")
    if not np.isfinite(eta_eps) or eta_eps <= 0:
        raise GnnWeightError(f"eta_eps must be positive and finite, got {eta_eps}")
    expected = dict(expected_tensors(n_layers, hidden, n_mlp))
    (count,) = struct.unpack("<I", r.take(4, "tensor count"))
    if count != len(expected):
        raise GnnWeightError(f"expected {len(expected)} tensors, header says {count}")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", r.take(4, "tensor name length"))
        name = r.take(name_len, "tensor name").decode("utf-8")
        if name not in expected:
            raise GnnWeightError(f"unexpected tensor {name!r}")
        if name in tensors:
            raise GnnWeightError(f"duplicate tensor {name!r}")
        (rank,) = struct.unpack("<I", r.take(4, f"rank of {name}"))
        dims = struct.unpack(f"<{rank}I", r.take(4 * rank, f"dims of {name}"))
        if tuple(dims) != expected[name]:
            raise GnnWeightError(f"tensor {name}: shape {dims} != {expected[name]}")
        n_vals = int(np.prod(dims)) if dims else 1
        raw = r.take(4 * n_vals, f"data of {name}")
        arr = np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(dims)
        if not np.isfinite(arr).all():
            raise GnnWeightError(f"tensor {name}: non-finite value")
        tensors[name] = arr
    if r.pos != len(r.data):
        raise GnnWeightError("trailing bytes after last tensor")
    missing = set(expected) - set(tensors)
    if missing:
        raise GnnWeightError(f"missing tensors: {sorted(missing)}")
    for l in range(n_layers):
        for side in ("bn_node", "bn_edge"):
            if (tensors[f"conv{l}.{side}.var"] <= 0).any():
                raise GnnWeightError(f"tensor conv{l}.{side}.var: non-positive variance")

    layers = []
    for l in range(n_layers):
        layers.append(ConvLayer(
            *(tensors[f"conv{l}.w{w}"] for w in range(1, 6)),
            *(tensors[f"conv{l}.b{w}"] for w in range(1, 6)),
            bn_node=BatchNorm(*(tensors[f"conv{l}.bn_node.{p}"]
                                for p in ("gamma", "beta", "mean", "var"))),
            bn_edge=BatchNorm(*(tensors[f"conv{l}.bn_edge.{p}"]
                                for p in ("gamma", "beta", "mean", "var"))),
        ))
    mlp = [(tensors[f"mlp{m}.weight"], tensors[f"mlp{m}.bias"]) for m in range(n_mlp)]
    return SelectorModel(
        n_layers=n_layers, hidden=hidden, n_mlp_layers=n_mlp, eta_eps=float(eta_eps),
        node_w=tensors["node_embed.weight"], node_b=tensors["node_embed.bias"],
        dist_w=tensors["dist_embed.weight"], dist_b=tensors["dist_embed.bias"],
        kind_w=tensors["kind_embed.weight"], layers=layers, mlp=mlp,
    )


def random_model(rng: np.random.Generator, n_layers: int = 3, hidden: int = 16,
                 n_mlp_layers: int = 2, eta_eps: float = DEFAULT_ETA_EPS) -> SelectorModel:
    """Random (untrained) model, mostly for tests and fixtures."""
    if hidden % 2 != 0:
        raise GnnError("hidden width must be even")
    h, h2 = hidden, hidden // 2
    scale = 1.0 / np.sqrt(h)

    def mat(*shape):
        return rng.normal(0.0, scale, size=shape)

    def bn():
        return BatchNorm(gamma=rng.uniform(0.8, 1.2, h), beta=rng.normal(0, 0.05, h),
                         mean=rng.normal(0, 0.05, h), var=rng.uniform(0.8, 1.2, h))

    layers = [ConvLayer(*(mat(h, h) for _ in range(5)),
                        *(rng.normal(0, 0.01, h) for _ in range(5)),
                        bn_node=bn(), bn_edge=bn())
              for _ in range(n_layers)]
    mlp = []
    for m in range(n_mlp_layers):
        rows = 1 if m == n_mlp_layers - 1 else h
        mlp.append((rng.normal(0.0, scale, size=(rows, h)), rng.normal(0, 0.01, rows)))
    return SelectorModel(
        n_layers=n_layers, hidden=h, n_mlp_layers=n_mlp_layers, eta_eps=eta_eps,
        node_w=mat(h, 3), node_b=rng.normal(0, 0.01, h),
        dist_w=mat(h2, 1), dist_b=rng.normal(0, 0.01, h2),
        kind_w=mat(3, h2), layers=layers, mlp=mlp,
    )
