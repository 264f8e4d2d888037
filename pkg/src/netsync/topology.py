"""Network topologies, link model, and prior assignment.

Networks live in the plane. Agents carry unknown clock offsets; reference
nodes know the reference time exactly. Two nodes are linked when their
Euclidean distance is positive and no greater than the communication range
``r_max``. All generators are pure functions of their parameters and seed.
"""
from __future__ import annotations

import ast
import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .seeding import derived_rng

__all__ = [
    "LinkModel",
    "PriorSpec",
    "UniformPriors",
    "BernoulliPriors",
    "RegionPriors",
    "Topology",
    "gen_lattice",
    "gen_stochastic",
    "gen_scaling_family",
    "assign_priors",
    "is_connected",
    "gauss_circle_degree",
    "interior_mask",
    "write_topology_csv",
    "read_topology_csv",
]


@dataclass(frozen=True)
class LinkModel:
    """Two-way timing link: ``n_rounds`` rounds with noise variance ``sigma2``.

    The per-link Fisher information is ``gamma = 2 * n_rounds / sigma2``.
    Defaults give ``gamma = 1``, the normalization used throughout the
    experiment suite.
    """

    n_rounds: int = 1
    sigma2: float = 2.0

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be a positive integer")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def gamma(self) -> float:
        return 2.0 * self.n_rounds / self.sigma2


@dataclass(frozen=True, eq=False)
class PriorSpec:
    """Per-agent prior information.

    ``n_p`` counts equivalent two-way observations from a virtual reference
    node; ``xi_p = gamma * n_p`` is the same prior expressed as Fisher
    information (1/s^2). Both arrays have one entry per agent.
    """

    n_p: np.ndarray
    xi_p: np.ndarray

    @classmethod
    def from_n_p(cls, n_p: np.ndarray, link: LinkModel) -> "PriorSpec":
        n_p = np.asarray(n_p, dtype=float)
        if np.any(n_p < 0):
            raise ValueError("prior observation counts must be non-negative")
        return cls(n_p=n_p, xi_p=link.gamma * n_p)

    @classmethod
    def from_xi_p(cls, xi_p: np.ndarray, link: LinkModel) -> "PriorSpec":
        xi_p = np.asarray(xi_p, dtype=float)
        if np.any(xi_p < 0):
            raise ValueError("prior Fisher information must be non-negative")
        return cls(n_p=xi_p * link.sigma2 / (2.0 * link.n_rounds), xi_p=xi_p)


@dataclass(frozen=True)
class UniformPriors:
    """Every agent gets ``n_p`` equivalent prior observations."""

    n_p: float


@dataclass(frozen=True)
class BernoulliPriors:
    """Each agent independently gets ``n_p`` with probability ``p_a``."""

    p_a: float
    n_p: float
    seed: int


@dataclass(frozen=True)
class RegionPriors:
    """Agents inside the rectangle ``(xmin, ymin, xmax, ymax)`` get ``n_p``."""

    rect: tuple[float, float, float, float]
    n_p: float


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable node layout plus the derived symmetric adjacency.

    Nodes are indexed densely: agents ``0 .. n_agents-1``, then reference
    nodes. ``adjacency`` is an int8 CSR matrix over all nodes with zero
    diagonal; entry (i, j) is 1 iff ``0 < dist(i, j) <= r_max``.
    """

    positions: np.ndarray
    n_agents: int
    reference_ids: tuple[int, ...]
    r_max: float
    adjacency: sp.csr_matrix
    meta: Mapping[str, Any] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    @property
    def n_references(self) -> int:
        return len(self.reference_ids)

    def degrees(self) -> np.ndarray:
        """Total neighbor count of every node."""
        return np.asarray(self.adjacency.sum(axis=1)).ravel().astype(int)

    def agent_degrees(self) -> np.ndarray:
        """d_A: number of neighboring agents, per agent."""
        na = self.n_agents
        block = self.adjacency[:na, :na]
        return np.asarray(block.sum(axis=1)).ravel().astype(int)

    def reference_degrees(self) -> np.ndarray:
        """d_R: number of neighboring reference nodes, per agent."""
        na = self.n_agents
        if self.n_references == 0:
            return np.zeros(na, dtype=int)
        block = self.adjacency[:na, na:]
        return np.asarray(block.sum(axis=1)).ravel().astype(int)

    def agent_adjacency(self) -> sp.csr_matrix:
        """Agent-to-agent adjacency block."""
        na = self.n_agents
        return sp.csr_matrix(self.adjacency[:na, :na])

    def neighbor_lists(self) -> list[np.ndarray]:
        """Neighbor indices of every node, in index order."""
        adj = self.adjacency
        return [adj.indices[adj.indptr[i]:adj.indptr[i + 1]] for i in range(self.n_nodes)]


def _build_adjacency(positions: np.ndarray, r_max: float) -> sp.csr_matrix:
    n = positions.shape[0]
    if n == 0:
        return sp.csr_matrix((0, 0), dtype=np.int8)
    tree = cKDTree(positions)
    pairs = tree.query_pairs(r_max, output_type="ndarray")
    if len(pairs):
        # query_pairs is inclusive of r_max but also returns coincident
        # points, which are not links.
        d2 = np.sum((positions[pairs[:, 0]] - positions[pairs[:, 1]]) ** 2, axis=1)
        pairs = pairs[d2 > 0.0]
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]]) if len(pairs) else np.empty(0, int)
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]]) if len(pairs) else np.empty(0, int)
    adj = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
    )
    return adj


def _make_topology(positions, n_agents, reference_ids, r_max, meta) -> Topology:
    positions = np.ascontiguousarray(positions, dtype=float)
    if not np.all(np.isfinite(positions)):
        raise ValueError("node positions must be finite")
    return Topology(
        positions=positions,
        n_agents=int(n_agents),
        reference_ids=tuple(int(i) for i in reference_ids),
        r_max=float(r_max),
        adjacency=_build_adjacency(positions, r_max),
        meta=dict(meta),
    )


def gen_lattice(side_b: float, lattice_spacing: float = 1.0, r_max: float = 1.0) -> Topology:
    """Agents on all grid points of ``[0, side_b]^2`` with the given spacing.

    Produces ``(floor(side_b / spacing) + 1)^2`` agents and no reference
    nodes. ``r_max`` must be at least the spacing for the lattice to have any
    links at all, but smaller values are accepted (the connectivity check
    then fails downstream).
    """
    if not side_b > 0:
        raise ValueError("side_b must be positive")
    if not lattice_spacing > 0:
        raise ValueError("lattice_spacing must be positive")
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    n_ticks = int(math.floor(side_b / lattice_spacing + 1e-9)) + 1
    ticks = np.arange(n_ticks) * lattice_spacing
    xs, ys = np.meshgrid(ticks, ticks, indexing="ij")
    positions = np.column_stack([xs.ravel(), ys.ravel()])
    meta = {
        "generator": "lattice",
        "side_b": side_b,
        "lattice_spacing": lattice_spacing,
        "r_max": r_max,
    }
    return _make_topology(positions, len(positions), (), r_max, meta)


def gen_stochastic(side_b: float, intensity: float, r_max: float, seed: int) -> Topology:
    """``round(intensity * side_b^2)`` agents placed i.i.d. uniform on the square.

    Fixed-count (binomial point process) semantics: the agent count is
    deterministic given the parameters, only the positions are random.
    """
    if not side_b > 0:
        raise ValueError("side_b must be positive")
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    n_agents = int(round(intensity * side_b * side_b))
    rng = derived_rng(seed, 0)
    positions = rng.random((n_agents, 2)) * side_b
    meta = {
        "generator": "stochastic",
        "side_b": side_b,
        "intensity": intensity,
        "r_max": r_max,
        "seed": seed,
    }
    return _make_topology(positions, n_agents, (), r_max, meta)


def gen_scaling_family(
    mode: str,
    n_agents: int,
    r_max: float,
    seed: int,
    intensity: float | None = None,
    area: float | None = None,
) -> Topology:
    """One member of a dense or extended scaling family.

    extended
        Fixed agent ``intensity``; the square area grows as
        ``n_agents / intensity``.
    dense
        Fixed ``area``; the intensity grows as ``n_agents / area``.

    Exactly ``n_agents`` agents are placed uniformly on the resulting square.
    """
    if n_agents < 1:
        raise ValueError("n_agents must be positive")
    if mode == "extended":
        if intensity is None or not intensity > 0:
            raise ValueError("extended mode requires a positive intensity")
        side_b = math.sqrt(n_agents / intensity)
    elif mode == "dense":
        if area is None or not area > 0:
            raise ValueError("dense mode requires a positive area")
        side_b = math.sqrt(area)
    else:
        raise ValueError(f"invalid mode {mode!r} (expected 'dense' or 'extended')")
    rng = derived_rng(seed, 0)
    positions = rng.random((n_agents, 2)) * side_b
    meta = {
        "generator": f"scaling-{mode}",
        "mode": mode,
        "n_agents": n_agents,
        "side_b": side_b,
        "r_max": r_max,
        "seed": seed,
    }
    return _make_topology(positions, n_agents, (), r_max, meta)


def assign_priors(topology: Topology, scheme, link: LinkModel) -> PriorSpec:
    """Per-agent prior information under one of the assignment schemes."""
    na = topology.n_agents
    if isinstance(scheme, UniformPriors):
        if scheme.n_p < 0:
            raise ValueError("n_p must be non-negative")
        n_p = np.full(na, float(scheme.n_p))
    elif isinstance(scheme, BernoulliPriors):
        if not 0.0 <= scheme.p_a <= 1.0:
            raise ValueError("p_a must lie in [0, 1]")
        if scheme.n_p < 0:
            raise ValueError("n_p must be non-negative")
        rng = derived_rng(scheme.seed, 1)
        mask = rng.random(na) < scheme.p_a
        n_p = np.where(mask, float(scheme.n_p), 0.0)
    elif isinstance(scheme, RegionPriors):
        if scheme.n_p < 0:
            raise ValueError("n_p must be non-negative")
        xmin, ymin, xmax, ymax = scheme.rect
        pos = topology.positions[:na]
        inside = (
            (pos[:, 0] >= xmin)
            & (pos[:, 0] <= xmax)
            & (pos[:, 1] >= ymin)
            & (pos[:, 1] <= ymax)
        )
        n_p = np.where(inside, float(scheme.n_p), 0.0)
    else:
        raise TypeError(f"unknown prior scheme {scheme!r}")
    return PriorSpec.from_n_p(n_p, link)


def is_connected(topology: Topology) -> bool:
    """True iff the agent+reference graph has a single connected component."""
    n = topology.n_nodes
    if n <= 1:
        return True
    n_comp = sp.csgraph.connected_components(topology.adjacency, directed=False, return_labels=False)
    return int(n_comp) == 1


def _floor_sqrt(v: float) -> int:
    """floor(sqrt(v)) robust to floating-point rounding at perfect squares."""
    if v < 0:
        return -1
    k = int(math.sqrt(v))
    while (k + 1) * (k + 1) <= v:
        k += 1
    while k * k > v:
        k -= 1
    return k


def gauss_circle_degree(r_max: float) -> int:
    """Number of integer lattice points within distance ``r_max`` of the origin.

    Evaluates ``1 + 4*floor(r) + 4*sum_n floor(sqrt(r^2 - n^2))``. Note the
    count includes the origin itself, so it exceeds the neighbor count of a
    lattice agent by one; callers that need the adjacency degree should
    subtract one (see :func:`netsync.lattice.LatticeKernel.from_range`).
    """
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    fr = math.floor(r_max)
    total = 1 + 4 * fr
    r2 = r_max * r_max
    for n in range(1, fr + 1):
        total += 4 * _floor_sqrt(r2 - n * n)
    return total


def interior_mask(topology: Topology, side_b: float | None = None) -> np.ndarray:
    """Agents whose distance to the boundary of ``[0, side_b]^2`` is >= r_max."""
    if side_b is None:
        side_b = topology.meta.get("side_b")
        if side_b is None:
            raise ValueError("side_b not recorded in topology metadata; pass it explicitly")
    pos = topology.positions[: topology.n_agents]
    dist = np.minimum.reduce(
        [pos[:, 0], pos[:, 1], side_b - pos[:, 0], side_b - pos[:, 1]]
    )
    return dist >= topology.r_max


# ---------------------------------------------------------------------------
# Serialization: CSV with a key-value comment header
# ---------------------------------------------------------------------------

def write_topology_csv(topology: Topology, path: str | Path) -> None:
    """Write nodes as CSV rows under a ``# key = value`` comment header."""
    buf = io.StringIO()
    header = dict(topology.meta)
    header["n_agents"] = topology.n_agents
    header["r_max"] = topology.r_max
    for key in sorted(header):
        buf.write(f"# {key} = {header[key]!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node_id", "kind", "x", "y"])
    refs = set(topology.reference_ids)
    for i, (x, y) in enumerate(topology.positions):
        kind = "reference" if i in refs else "agent"
        writer.writerow([i, kind, repr(float(x)), repr(float(y))])
    Path(path).write_text(buf.getvalue())


def read_topology_csv(path: str | Path) -> Topology:
    """Rebuild a topology (including adjacency) from its CSV file."""
    lines = Path(path).read_text().splitlines()
    meta: dict[str, Any] = {}
    data_lines: list[str] = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            try:
                meta[key.strip()] = ast.literal_eval(value.strip())
            except (ValueError, SyntaxError):
                meta[key.strip()] = value.strip()
        elif line.strip():
            data_lines.append(line)
    reader = csv.reader(data_lines)
    header = next(reader)
    if header[:4] != ["node_id", "kind", "x", "y"]:
        raise ValueError(f"unexpected topology CSV header: {header}")
    rows = [(int(rec[0]), rec[1], float(rec[2]), float(rec[3])) for rec in reader if rec]
    rows.sort()
    positions = np.array([[x, y] for _, _, x, y in rows], dtype=float)
    reference_ids = tuple(i for i, kind, _, _ in rows if kind == "reference")
    n_agents = int(meta.pop("n_agents", len(rows) - len(reference_ids)))
    r_max = float(meta.pop("r_max"))
    return _make_topology(positions, n_agents, reference_ids, r_max, meta)
