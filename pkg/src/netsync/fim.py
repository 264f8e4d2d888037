"""Fisher information matrices and the associated Markov transition matrices.

Three variants are built from a topology:

absolute
    ``J = gamma * (D_C + D_R - A) + Xi_P`` over the agents, where ``D_C`` and
    ``D_R`` count agent and reference neighbors, ``A`` is the agent adjacency
    and ``Xi_P`` holds the prior Fisher information.
relative
    ``J = gamma * (D_C - A)``, a weighted graph Laplacian with zero row sums.
extended
    The block matrix over agents, reference nodes and one virtual reference
    per agent, in which every prior appears as an explicit edge of weight
    ``xi_p`` and reference-type nodes carry a large diagonal ``xi_inf``.

The off-diagonal ratio ``-J[a, b] / J[a, a]`` of any variant is the one-step
transition probability of a random walk; reference-type states absorb.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from ._linalg import DENSE_LIMIT, as_dense, pack_matrix
from .errors import DegenerateNodeError
from .topology import LinkModel, PriorSpec, Topology

__all__ = [
    "FimMatrix",
    "TransitionMatrix",
    "SkewSpec",
    "build_absolute_fim",
    "build_relative_fim",
    "build_extended_fim",
    "build_transition_matrix",
    "apply_skew",
    "default_xi_inf",
    "write_matrix_csv",
]


@dataclass(frozen=True, eq=False)
class FimMatrix:
    """A symmetric information matrix with its construction context.

    ``data`` is dense (ndarray) up to side 2000 and CSR above. The side is
    ``n_agents`` for the absolute/relative variants and
    ``2 * n_agents + n_references`` for the extended variant.
    """

    variant: str
    data: np.ndarray | sp.spmatrix
    gamma: float
    n_agents: int
    n_references: int = 0
    xi_inf: float = 0.0

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def dense(self) -> np.ndarray:
        return as_dense(self.data)

    def diagonal(self) -> np.ndarray:
        if sp.issparse(self.data):
            return self.data.diagonal()
        return np.diag(self.data).copy()


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """One-step transition matrix of the random walk attached to a FIM.

    ``row_weight`` keeps the diagonal of the source FIM in units of gamma
    (``d_A + d_R + N_p`` for the absolute variant, ``d_A`` for the relative
    one); it lets downstream solvers symmetrize ``I - P`` without access to
    the original FIM. Rows listed in ``absorbing_states`` are unit rows.
    """

    data: np.ndarray | sp.spmatrix
    absorbing_states: tuple[int, ...]
    variant: str
    row_weight: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def dense(self) -> np.ndarray:
        return as_dense(self.data)

    def row_sums(self) -> np.ndarray:
        if sp.issparse(self.data):
            return np.asarray(self.data.sum(axis=1)).ravel()
        return self.data.sum(axis=1)


@dataclass(frozen=True, eq=False)
class SkewSpec:
    """Per-agent multiplicative clock skews (dimensionless, near one)."""

    alphas: np.ndarray

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float)
        if np.any(alphas <= 0):
            raise ValueError("clock skews must be positive")
        object.__setattr__(self, "alphas", alphas)


def build_absolute_fim(topology: Topology, priors: PriorSpec, link: LinkModel) -> FimMatrix:
    """Information matrix for synchronization against the reference clock."""
    gamma = link.gamma
    d_total = topology.agent_degrees() + topology.reference_degrees()
    a = topology.agent_adjacency().astype(float)
    j = sp.diags(gamma * d_total + priors.xi_p) - gamma * a
    return FimMatrix(
        variant="absolute",
        data=pack_matrix(j),
        gamma=gamma,
        n_agents=topology.n_agents,
        n_references=topology.n_references,
    )


def build_relative_fim(topology: Topology, link: LinkModel) -> FimMatrix:
    """Laplacian information matrix for agreement on an arbitrary common clock."""
    if topology.n_references:
        raise ValueError("relative synchronization is defined for agent-only networks")
    gamma = link.gamma
    a = topology.agent_adjacency().astype(float)
    j = sp.diags(gamma * topology.agent_degrees().astype(float)) - gamma * a
    return FimMatrix(
        variant="relative",
        data=pack_matrix(j),
        gamma=gamma,
        n_agents=topology.n_agents,
    )


def default_xi_inf(fim: FimMatrix) -> float:
    """Default pseudo-infinite prior: 1e12 times the largest diagonal entry."""
    return 1e12 * float(np.max(fim.diagonal()))


def build_extended_fim(
    topology: Topology,
    priors: PriorSpec,
    link: LinkModel,
    xi_inf: float | None = None,
) -> FimMatrix:
    """Block FIM over agents, references, and per-agent virtual references.

    Agent ``i`` is linked to reference neighbors with weight gamma and to its
    virtual reference (index ``i + n_agents + n_references``) with weight
    ``xi_p[i]``; reference-type diagonals are ``xi_inf``. The leading agent
    block equals the absolute FIM.
    """
    absolute = build_absolute_fim(topology, priors, link)
    na, nr = topology.n_agents, topology.n_references
    if xi_inf is None:
        xi_inf = default_xi_inf(absolute)
    n = 2 * na + nr
    gamma = link.gamma
    a_r = gamma * as_dense(topology.adjacency[:na, na:]) if nr else np.zeros((na, 0))
    j = np.zeros((n, n))
    j[:na, :na] = absolute.dense()
    if nr:
        j[:na, na:na + nr] = -a_r
        j[na:na + nr, :na] = -a_r.T
    rng_v = np.arange(na)
    j[rng_v, na + nr + rng_v] = -priors.xi_p
    j[na + nr + rng_v, rng_v] = -priors.xi_p
    j[np.arange(na, n), np.arange(na, n)] = xi_inf
    return FimMatrix(
        variant="extended",
        data=pack_matrix(j),
        gamma=gamma,
        n_agents=na,
        n_references=nr,
        xi_inf=float(xi_inf),
    )


def build_transition_matrix(fim: FimMatrix) -> TransitionMatrix:
    """Walk transition matrix ``P[a, b] = -J[a, b] / J[a, a]`` for ``a != b``.

    Absolute variant: substochastic over agents (rows leak probability
    ``(d_R + N_p) / (d_A + d_R + N_p)`` to implicit absorption). Relative
    variant: row-stochastic. Extended variant: reference-type states are
    explicit absorbing (unit) rows.
    """
    diag = fim.diagonal()
    n = fim.n
    if fim.variant in ("absolute", "relative"):
        bad = np.flatnonzero(diag <= 0)
        if len(bad):
            raise DegenerateNodeError(int(bad[0]))
        if sp.issparse(fim.data):
            p = sp.csr_matrix(fim.data, copy=True).astype(float)
            p.setdiag(0.0)
            p.eliminate_zeros()
            p = sp.diags(-1.0 / diag) @ p
            p = sp.csr_matrix(p)
        else:
            p = -fim.data / diag[:, None]
            np.fill_diagonal(p, 0.0)
        return TransitionMatrix(
            data=p,
            absorbing_states=(),
            variant=fim.variant,
            row_weight=diag / fim.gamma,
        )
    if fim.variant == "extended":
        na, nr = fim.n_agents, fim.n_references
        absorbing = tuple(range(na, n))
        dense = fim.dense()
        bad = np.flatnonzero(np.diag(dense)[:na] <= 0)
        if len(bad):
            raise DegenerateNodeError(int(bad[0]))
        p = -dense / np.diag(dense)[:, None]
        np.fill_diagonal(p, 0.0)
        p[na:, :] = 0.0
        p[absorbing, absorbing] = 1.0
        row_weight = np.diag(dense) / fim.gamma
        return TransitionMatrix(
            data=pack_matrix(p),
            absorbing_states=absorbing,
            variant="extended",
            row_weight=row_weight,
        )
    raise ValueError(f"unknown FIM variant {fim.variant!r}")


def apply_skew(fim: FimMatrix, skews: SkewSpec) -> FimMatrix:
    """Congruence transform ``B^-1 J B^-1`` with ``B = diag(alphas)``."""
    if fim.variant not in ("absolute", "relative"):
        raise ValueError("skews apply to the absolute or relative variants only")
    alphas = skews.alphas
    if alphas.shape != (fim.n,):
        raise ValueError("need one skew per agent")
    inv = 1.0 / alphas
    if sp.issparse(fim.data):
        d = sp.diags(inv)
        data = sp.csr_matrix(d @ fim.data @ d)
    else:
        data = fim.data * np.outer(inv, inv)
    return FimMatrix(
        variant=fim.variant,
        data=data,
        gamma=fim.gamma,
        n_agents=fim.n_agents,
        n_references=fim.n_references,
    )


def write_matrix_csv(fim: FimMatrix, path, fmt: str = "dense") -> None:
    """Dump a matrix as dense CSV rows or as (row, col, value) triplets."""
    import csv
    from pathlib import Path

    if fmt not in ("dense", "coo"):
        raise ValueError("fmt must be 'dense' or 'coo'")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fmt == "dense":
            for row in as_dense(fim.data):
                writer.writerow([repr(float(v)) for v in row])
        else:
            coo = sp.coo_matrix(fim.data)
            writer.writerow(["row", "col", "value"])
            for r, c, v in sorted(zip(coo.row, coo.col, coo.data), key=lambda t: (t[0], t[1])):
                writer.writerow([r, c, repr(float(v))])
