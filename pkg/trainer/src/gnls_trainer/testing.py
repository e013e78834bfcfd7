"""Shared tiny fixtures for tests and the CLI gradient check."""

from __future__ import annotations

import numpy as np

from .formats import InstanceData
from .graphs import GraphBundle, build_training_graph


def tiny_instance() -> InstanceData:
    coords = np.array([(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)])
    demands = np.array([0, 2, 3, 2], dtype=np.int64)
    return InstanceData("tiny", coords, demands, 5)


def tiny_fixture_graph() -> GraphBundle:
    """4-node full graph with a two-route initial solution."""
    inst = tiny_instance()
    s0 = [[1, 2], [3]]
    labels = {edge: i % 2 for i, edge in enumerate(sorted_edges(s0))}
    return build_training_graph(inst, s0, labels=labels, mode="full")


def sorted_edges(routes):
    from .formats import solution_edges
    return sorted(solution_edges(routes))
