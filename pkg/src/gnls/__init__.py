"""CVRP solving with large neighborhood search guided by a learned node selector."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .instance import Instance, generate_instance, load_instance, parse_instance
from .solution import Solution, gap, recompute_cost, solution_edges, validate

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "Instance",
    "Solution",
    "gap",
    "generate_instance",
    "load_instance",
    "parse_instance",
    "recompute_cost",
    "solution_edges",
    "validate",
    "__version__",
]
