"""Learned node selector: graph building, inference, decoding, fallbacks."""

from .forward import MarkSet, decode_marks, forward
from .graph import DEFAULT_KNN, EdgeKind, SparseGraph, build_graph
from .heuristic import heuristic_selector
from .model import (BN_EPS, DEFAULT_ETA_EPS, GnnError, GnnWeightError,
                    SelectorModel, expected_tensors, load_weights,
                    random_model, save_weights)

__all__ = [
    "BN_EPS",
    "DEFAULT_ETA_EPS",
    "DEFAULT_KNN",
    "EdgeKind",
    "GnnError",
    "GnnWeightError",
    "MarkSet",
    "SelectorModel",
    "SparseGraph",
    "build_graph",
    "decode_marks",
    "expected_tensors",
    "forward",
    "heuristic_selector",
    "load_weights",
    "random_model",
    "save_weights",
]
