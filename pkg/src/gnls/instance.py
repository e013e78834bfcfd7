"""CVRP instances: CVRPLIB parsing, random generation, integer distance oracle.

Node indexing convention used throughout the package: the depot is node 0 and
customers are nodes 1..N.  Distances are rounded Euclidean (half-up to the
nearest integer) and all cost accounting downstream is exact integer
arithmetic.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

GRID_EXTENT = 1000
DIST_MATRIX_MAX_N = 2000

DEPOT_MODES = ("central", "edge", "random")


class ParseError(ValueError):
    """Malformed CVRPLIB document.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def rounded_euclid(dx: float, dy: float) -> int:
    """Half-up rounding of the Euclidean norm (TSPLIB EUC_2D convention).

    The formula sqrt(dx*dx + dy*dy) is the single canonical one used by every
    distance path in the package (matrix, vectorized, compiled kernels) so
    that all of them produce bit-identical integers.
    """
    return int(math.floor(math.sqrt(dx * dx + dy * dy) + 0.5))


class Instance:
    """Immutable CVRP problem: depot + N customers with demands and a capacity.

    ``coords`` has shape (N+1, 2) with the depot in row 0; ``demands`` has
    shape (N+1,) with ``demands[0] == 0``.  For N <= 2000 a full int32
    distance matrix is built lazily and cached; larger instances compute
    distances on demand so Flanders-scale problems stay in memory bounds.
    """

    def __init__(self, name, coords, demands, capacity, depot_kind=None):
        coords = np.ascontiguousarray(coords, dtype=np.float64)
        demands = np.ascontiguousarray(demands, dtype=np.int64)
        if coords.ndim != 2 or coords.shape[1] != 2 or coords.shape[0] < 2:
            raise ValueError("coords must be (N+1, 2) with N >= 1")
        if demands.shape != (coords.shape[0],):
            raise ValueError("demands length must match coords")
        if not np.isfinite(coords).all():
            raise ValueError("coordinates must be finite")
        if demands[0] != 0:
            raise ValueError("depot demand must be 0")
        capacity = int(capacity)
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        if (demands[1:] <= 0).any():
            bad = int(np.flatnonzero(demands[1:] <= 0)[0]) + 1
            raise ValueError(f"customer {bad} has non-positive demand")
        if (demands[1:] > capacity).any():
            bad = int(np.flatnonzero(demands[1:] > capacity)[0]) + 1
            raise ValueError(f"customer {bad}: demand exceeds capacity")
        coords.setflags(write=False)
        demands.setflags(write=False)
        self.name = str(name)
        self.coords = coords
        self.demands = demands
        self.capacity = capacity
        self.depot_kind = depot_kind  # "central" / "edge" / "random" when known
        self._matrix: np.ndarray | None = None

    @property
    def n(self) -> int:
        """Number of customers N (nodes are 0..N)."""
        return self.coords.shape[0] - 1

    def __eq__(self, other):
        return (
            isinstance(other, Instance)
            and self.name == other.name
            and self.capacity == other.capacity
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.demands, other.demands)
        )

    def __repr__(self):
        return f"Instance({self.name!r}, n={self.n}, Q={self.capacity})"

    def dist_matrix(self) -> np.ndarray | None:
        """Full int32 matrix for N <= 2000, else None (compute on demand)."""
        if self.n > DIST_MATRIX_MAX_N:
            return None
        if self._matrix is None:
            dx = self.coords[:, 0:1] - self.coords[:, 0:1].T
            dy = self.coords[:, 1:2] - self.coords[:, 1:2].T
            m = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int32)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def dist(self, i: int, j: int) -> int:
        if not (0 <= i <= self.n and 0 <= j <= self.n):
            raise IndexError(f"node index out of range: ({i}, {j})")
        m = self.dist_matrix()
        if m is not None:
            return int(m[i, j])
        dx = self.coords[i, 0] - self.coords[j, 0]
        dy = self.coords[i, 1] - self.coords[j, 1]
        return rounded_euclid(dx, dy)

    def dist_row(self, i: int) -> np.ndarray:
        """Distances from node i to every node, as int64."""
        m = self.dist_matrix()
        if m is not None:
            return m[i].astype(np.int64)
        dx = self.coords[:, 0] - self.coords[i, 0]
        dy = self.coords[:, 1] - self.coords[i, 1]
        return np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)

    def seq_cost(self, seq) -> int:
        """Cost of the depot-anchored route visiting ``seq`` in order."""
        seq = np.asarray(seq, dtype=np.int64)
        if seq.size == 0:
            return 0
        full = np.concatenate(([0], seq, [0]))
        m = self.dist_matrix()
        if m is not None:
            return int(m[full[:-1], full[1:]].astype(np.int64).sum())
        dx = self.coords[full[:-1], 0] - self.coords[full[1:], 0]
        dy = self.coords[full[:-1], 1] - self.coords[full[1:], 1]
        return int(np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64).sum())


def _header_value(line: str) -> str:
    return line.split(":", 1)[1].strip()


def parse_instance(text: str) -> Instance:
    """Parse a CVRPLIB/TSPLIB CVRP document.

    Requires DIMENSION, CAPACITY, NODE_COORD_SECTION, DEMAND_SECTION and
    DEPOT_SECTION.  The depot named by DEPOT_SECTION becomes node 0; the
    remaining file nodes become customers 1..N in file order.  The depot's
    listed demand is forced to 0.
    """
    lines = text.splitlines()
    name = ""
    dimension = None
    capacity = None
    weight_type = "EUC_2D"
    coord_rows: dict[int, tuple[float, float]] = {}
    demand_rows: dict[int, int] = {}
    depot_ids: list[int] = []

    i = 0
    n_lines = len(lines)

    def err(msg, ln):
        raise ParseError(msg, line=ln)

    while i < n_lines:
        raw = lines[i]
        ln = i + 1
        stripped = raw.strip()
        i += 1
        if not stripped or stripped == "EOF":
            continue
        key = stripped.split(":", 1)[0].strip().upper()
        if key == "NAME":
            name = _header_value(stripped)
        elif key == "DIMENSION":
            try:
                dimension = int(_header_value(stripped))
            except ValueError:
                err("DIMENSION is not an integer", ln)
        elif key == "CAPACITY":
            try:
                capacity = int(_header_value(stripped))
            except ValueError:
                err("CAPACITY is not an integer", ln)
        elif key == "EDGE_WEIGHT_TYPE":
            weight_type = _header_value(stripped).upper()
        elif stripped.upper().startswith("NODE_COORD_SECTION"):
            if dimension is None:
                err("NODE_COORD_SECTION before DIMENSION", ln)
            for _ in range(dimension):
                if i >= n_lines:
                    err("truncated NODE_COORD_SECTION", i)
                parts = lines[i].split()
                ln = i + 1
                i += 1
                if len(parts) < 3:
                    err("coordinate row needs 'id x y'", ln)
                try:
                    node = int(parts[0])
                    x, y = float(parts[1]), float(parts[2])
                except ValueError:
                    err("malformed coordinate row", ln)
                if not (math.isfinite(x) and math.isfinite(y)):
                    err("non-finite coordinate", ln)
                if node in coord_rows:
                    err(f"duplicate coordinate for node {node}", ln)
                coord_rows[node] = (x, y)
        elif stripped.upper().startswith("DEMAND_SECTION"):
            if dimension is None:
                err("DEMAND_SECTION before DIMENSION", ln)
            for _ in range(dimension):
                if i >= n_lines:
                    err("truncated DEMAND_SECTION", i)
                parts = lines[i].split()
                ln = i + 1
                i += 1
                if len(parts) < 2:
                    err("demand row needs 'id q'", ln)
                try:
                    node = int(parts[0])
                    q = int(parts[1])
                except ValueError:
                    err("malformed demand row", ln)
                if q < 0:
                    err(f"negative demand for node {node}", ln)
                if capacity is not None and q > capacity:
                    err(f"node {node}: demand exceeds capacity", ln)
                demand_rows[node] = q
        elif stripped.upper().startswith("DEPOT_SECTION"):
            while i < n_lines:
                token = lines[i].strip()
                ln = i + 1
                i += 1
                if token == "-1" or token == "EOF" or not token:
                    break
                try:
                    depot_ids.append(int(token.split()[0]))
                except ValueError:
                    err("malformed depot row", ln)
        # unknown headers (COMMENT, TYPE, ...) are skipped

    if dimension is None:
        raise ParseError("missing DIMENSION header")
    if capacity is None:
        raise ParseError("missing CAPACITY header")
    if dimension < 2:
        raise ParseError("DIMENSION must be at least 2 (depot + 1 customer)")
    if weight_type != "EUC_2D":
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {weight_type!r}")
    if not coord_rows:
        raise ParseError("missing NODE_COORD_SECTION")
    if not demand_rows:
        raise ParseError("missing DEMAND_SECTION")
    if not depot_ids:
        raise ParseError("missing DEPOT_SECTION")
    if len(depot_ids) != 1:
        raise ParseError("exactly one depot is supported")
    if len(coord_rows) != dimension:
        raise ParseError("NODE_COORD_SECTION does not cover DIMENSION nodes")
    if len(demand_rows) != dimension:
        raise ParseError("DEMAND_SECTION does not cover DIMENSION nodes")

    depot = depot_ids[0]
    if depot not in coord_rows:
        raise ParseError(f"depot node {depot} has no coordinates")
    file_order = [depot] + [node for node in sorted(coord_rows) if node != depot]
    coords = np.array([coord_rows[node] for node in file_order], dtype=np.float64)
    demands = np.array([demand_rows.get(node, 0) for node in file_order], dtype=np.int64)
    demands[0] = 0  # depot demand forced to 0
    try:
        return Instance(name or f"unnamed-n{dimension}", coords, demands, capacity)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def _fmt_coord(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_instance(inst: Instance) -> str:
    """Serialize back to CVRPLIB text (depot written as file node 1)."""
    out = [
        f"NAME : {inst.name}",
        "TYPE : CVRP",
        f"DIMENSION : {inst.n + 1}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        f"CAPACITY : {inst.capacity}",
        "NODE_COORD_SECTION",
    ]
    for i in range(inst.n + 1):
        out.append(f"{i + 1} {_fmt_coord(inst.coords[i, 0])} {_fmt_coord(inst.coords[i, 1])}")
    out.append("DEMAND_SECTION")
    for i in range(inst.n + 1):
        out.append(f"{i + 1} {int(inst.demands[i])}")
    out.extend(["DEPOT_SECTION", "1", "-1", "EOF", ""])
    return "\n".join(out)


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(format_instance(inst))


def generate_instance(seed: int, n: int, depot_mode: str = "random",
                      demand_range: tuple[int, int] = (1, 10),
                      capacity: int = 100, name: str | None = None) -> Instance:
    """Deterministic random instance on the [0, 1000]^2 integer grid.

    depot_mode: "central" -> (500, 500); "edge" -> (0, 0); "random" -> uniform.
    Demands are uniform integers in ``demand_range``.  Pure function of its
    arguments: the same call always returns a byte-identical instance.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi = int(demand_range[0]), int(demand_range[1])
    if not (1 <= lo <= hi <= capacity):
        raise ValueError("demand_range must satisfy 1 <= lo <= hi <= capacity")
    mode = depot_mode.lower()
    if mode not in DEPOT_MODES:
        raise ValueError(f"depot_mode must be one of {DEPOT_MODES}")
    rng = np.random.default_rng(seed)
    if mode == "central":
        depot = (GRID_EXTENT // 2, GRID_EXTENT // 2)
    elif mode == "edge":
        depot = (0, 0)
    else:
        depot = tuple(rng.integers(0, GRID_EXTENT + 1, size=2))
    customers = rng.integers(0, GRID_EXTENT + 1, size=(n, 2))
    demands = rng.integers(lo, hi + 1, size=n)
    coords = np.vstack([np.array(depot, dtype=np.float64), customers.astype(np.float64)])
    all_demands = np.concatenate(([0], demands))
    if name is None:
        name = f"gen-n{n}-{mode}-s{seed}"
    return Instance(name, coords, all_demands, capacity, depot_kind=mode)
