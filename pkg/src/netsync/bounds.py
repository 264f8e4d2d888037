"""Synchronization error bounds (ASEB / RSEB) and their cross-check routes.

The absolute bound per agent is the diagonal of the inverse information
matrix; the relative bound is the trace of the Moore-Penrose pseudo-inverse
of the Laplacian information matrix divided by the agent count. Every bound
has at least two independent computation routes, kept side by side so they
can be cross-checked to tight tolerances:

* ASEB: direct inverse vs. the CDI closed form.
* tr(J^+): eigendecomposition vs. the fundamental-matrix (Z) route vs. the
  relative-CDI sum.

The relative-CDI sum uses the numerator ``1 - 1/n + delta_i``; the simpler
``1 + delta_i`` form (available behind ``corrected=False``) overstates the
trace by ``sum_i 1 / (gamma d_i n)`` and is retained only for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._linalg import PIVOT_RTOL, reachable_mask, spd_inverse, spd_inverse_diag
from .errors import SynchronizabilityError
from .fim import FimMatrix, TransitionMatrix, build_absolute_fim
from .seeding import derived_rng
from .topology import LinkModel, PriorSpec, Topology

__all__ = [
    "BoundReport",
    "RsebResult",
    "SkewBoundResult",
    "aseb_direct",
    "aseb_via_cdi",
    "rseb_pseudo",
    "rseb_via_z",
    "rseb_via_relative_cdi",
    "check_node_equivalence",
    "skewed_bound_expectation",
    "uniform_skew_sampler",
]

# Eigenvalues below this fraction of the largest are treated as null space.
_NULL_RTOL = 1e-8


def _raise_unsynchronizable(fim: FimMatrix, cause: Exception | None = None):
    """Diagnose which agents are cut off from every information source."""
    j = fim.dense()
    row_sums = j.sum(axis=1)
    scale = float(np.max(np.diag(j))) if fim.n else 1.0
    leaky = row_sums > PIVOT_RTOL * scale
    pattern = (j != 0) & ~np.eye(fim.n, dtype=bool)
    unreachable = np.flatnonzero(~reachable_mask(pattern, leaky))
    shown = ", ".join(map(str, unreachable[:20]))
    msg = (
        "network is not absolutely synchronizable"
        + (f": agents [{shown}] have no path to any information source" if len(unreachable) else "")
    )
    raise SynchronizabilityError(msg, unreachable=tuple(int(i) for i in unreachable)) from cause


def aseb_direct(fim: FimMatrix) -> np.ndarray:
    """Per-agent absolute bound: diagonal of the exact inverse FIM."""
    if fim.variant != "absolute":
        raise ValueError("aseb_direct expects the absolute FIM")
    try:
        return spd_inverse_diag(fim.dense())
    except np.linalg.LinAlgError as exc:
        _raise_unsynchronizable(fim, exc)


def aseb_via_cdi(
    topology: Topology,
    priors: PriorSpec,
    link: LinkModel,
    cdi: np.ndarray,
) -> np.ndarray:
    """Per-agent absolute bound from the CDI closed form.

    ``s_i = (1 + delta_i) / (gamma * (d_A + d_R) + xi_p)``; must agree with
    :func:`aseb_direct` to numerical precision.
    """
    delta = np.asarray(cdi, dtype=float)
    if not np.all(np.isfinite(delta)):
        raise SynchronizabilityError("CDI is not finite; absolute bound undefined")
    denom = link.gamma * (topology.agent_degrees() + topology.reference_degrees()) + priors.xi_p
    return (1.0 + delta) / denom


@dataclass(frozen=True, eq=False)
class RsebResult:
    """Relative bound with the per-agent pseudo-inverse diagonal."""

    trace_pinv: float
    rseb: float
    diag_pinv: np.ndarray


def rseb_pseudo(fim: FimMatrix) -> RsebResult:
    """tr(J^+)/n by eigendecomposition with the null direction projected out."""
    if fim.variant != "relative":
        raise ValueError("rseb_pseudo expects the relative FIM")
    j = fim.dense()
    eigvals, eigvecs = np.linalg.eigh(j)
    lam_max = float(eigvals[-1])
    if lam_max <= 0:
        raise SynchronizabilityError("relative FIM has no positive eigenvalues")
    null = eigvals < _NULL_RTOL * lam_max
    if int(null.sum()) != 1:
        raise SynchronizabilityError(
            f"agent graph is disconnected: pseudo-inverse null space has dimension {int(null.sum())}"
        )
    inv = np.zeros_like(eigvals)
    np.divide(1.0, eigvals, out=inv, where=~null)
    diag = (eigvecs**2) @ inv
    trace = float(inv.sum())
    return RsebResult(trace_pinv=trace, rseb=trace / fim.n, diag_pinv=diag)


def rseb_via_z(
    transition: TransitionMatrix,
    link: LinkModel,
    degrees: Optional[np.ndarray] = None,
) -> float:
    """tr(J^+) through the fundamental matrix of the row-stochastic walk.

    ``tr(J^+) = gamma^-1 * tr(C Z D^-1 C)`` with ``Z = (I - P + 1 pi^T)^-1``,
    stationary distribution ``pi = d / sum(d)`` and centering matrix ``C``.
    """
    if transition.variant != "relative":
        raise ValueError("rseb_via_z expects the relative transition matrix")
    d = np.asarray(transition.row_weight if degrees is None else degrees, dtype=float)
    n = transition.n
    start = np.zeros(n, dtype=bool)
    start[0] = True
    if not reachable_mask(transition.data, start).all():
        raise SynchronizabilityError("agent graph is disconnected")
    pi = d / d.sum()
    z = np.linalg.inv(np.eye(n) - transition.dense() + np.outer(np.ones(n), pi))
    c = np.eye(n) - np.full((n, n), 1.0 / n)
    return float(np.trace(c @ z @ np.diag(1.0 / d) @ c)) / link.gamma


def rseb_via_relative_cdi(
    rel_cdi: np.ndarray,
    degrees: np.ndarray,
    link: LinkModel,
    corrected: bool = True,
) -> float:
    """tr(J^+) from per-agent relative CDI values.

    The corrected numerator is ``1 - 1/n + delta_i``; ``corrected=False``
    switches to the plain ``1 + delta_i`` comparison form.
    """
    delta = np.asarray(rel_cdi, dtype=float)
    d = np.asarray(degrees, dtype=float)
    n = len(delta)
    offset = (1.0 - 1.0 / n) if corrected else 1.0
    return float(np.sum((offset + delta) / (link.gamma * d)))


def check_node_equivalence(
    topology: Topology,
    priors: PriorSpec,
    link: LinkModel,
    agent_k: int,
    xi_inf: float = 1e12,
) -> float:
    """Deviation between a near-infinite prior at ``agent_k`` and matrix reduction.

    Builds the FIM with ``xi_p[agent_k] = xi_inf``, then compares the inverse
    of the full matrix with row/column ``k`` dropped against the inverse of
    the reduced matrix. Returns the max elementwise relative deviation; both
    reductions coincide exactly in the infinite-prior limit.
    """
    if not 0 <= agent_k < topology.n_agents:
        raise ValueError("agent_k out of range")
    fim = build_absolute_fim(topology, priors, link)
    j = fim.dense()
    j_inf = j.copy()
    j_inf[agent_k, agent_k] += xi_inf - priors.xi_p[agent_k]
    keep = np.arange(fim.n) != agent_k
    reduced = j[np.ix_(keep, keep)]
    try:
        lhs = spd_inverse(j_inf)[np.ix_(keep, keep)]
        rhs = spd_inverse(reduced)
    except np.linalg.LinAlgError as exc:
        raise SynchronizabilityError(
            f"reduced system is singular when agent {agent_k} is removed"
        ) from exc
    floor = 1e-12 * float(np.max(np.abs(rhs)))
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), floor)))


@dataclass(frozen=True, eq=False)
class SkewBoundResult:
    """Monte Carlo expectation of the skewed bound diagonal."""

    expected_diag: np.ndarray
    base_diag: np.ndarray
    ratio: np.ndarray
    stderr: np.ndarray
    margin: np.ndarray
    trials: int


def uniform_skew_sampler(low: float, high: float) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler for i.i.d. uniform clock skews on ``[low, high]``."""
    if not 0 < low <= high:
        raise ValueError("skew range must be positive")

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(low, high, size=n)

    return sample


def skewed_bound_expectation(
    fim: FimMatrix,
    skew_sampler: Callable[[np.random.Generator, int], np.ndarray],
    trials: int,
    seed: int,
) -> SkewBoundResult:
    """Monte Carlo average of ``diag(B J^-1 B)`` against ``diag(J^-1)``.

    The congruence identity makes each trial's diagonal exactly
    ``alpha_i^2 * [J^-1]_ii``, so the average is accumulated that way. For
    mean-one skews the expected margin over the skewless bound is
    non-negative (Jensen direction).
    """
    if fim.variant != "absolute":
        raise ValueError("skewed_bound_expectation expects the absolute FIM")
    if trials < 2:
        raise ValueError("need at least two trials")
    try:
        base = spd_inverse_diag(fim.dense())
    except np.linalg.LinAlgError as exc:
        _raise_unsynchronizable(fim, exc)
    rng = derived_rng(seed, 3)
    n = fim.n
    acc = np.zeros(n)
    acc2 = np.zeros(n)
    for _ in range(trials):
        alphas = skew_sampler(rng, n)
        d = alphas**2 * base
        acc += d
        acc2 += d**2
    mean = acc / trials
    var = np.maximum(acc2 / trials - mean**2, 0.0)
    stderr = np.sqrt(var / (trials - 1))
    return SkewBoundResult(
        expected_diag=mean,
        base_diag=base,
        ratio=mean / base,
        stderr=stderr,
        margin=mean - base,
        trials=trials,
    )


@dataclass(frozen=True, eq=False)
class BoundReport:
    """Bounds for one network with method cross-check metadata."""

    aseb: np.ndarray
    aseb_method_deviation: float
    rseb: Optional[float]
    trace_pinv: Optional[float]
    rseb_method_deviation: Optional[float]
    condition_number: float


def bound_report(topology: Topology, priors: PriorSpec, link: LinkModel) -> BoundReport:
    """ASEB (two routes) and, for agent-only networks, RSEB (three routes)."""
    from .cdi import cdi_exact, rel_cdi_exact
    from .fim import build_relative_fim, build_transition_matrix

    fim = build_absolute_fim(topology, priors, link)
    direct = aseb_direct(fim)
    transition = build_transition_matrix(fim)
    via_cdi = aseb_via_cdi(topology, priors, link, cdi_exact(transition))
    aseb_dev = float(np.max(np.abs(direct - via_cdi) / direct))
    eigvals = np.linalg.eigvalsh(fim.dense())
    cond = float(eigvals[-1] / eigvals[0]) if eigvals[0] > 0 else math.inf

    rseb = trace = rseb_dev = None
    if topology.n_references == 0:
        rel_fim = build_relative_fim(topology, link)
        rel_tr = build_transition_matrix(rel_fim)
        try:
            pseudo = rseb_pseudo(rel_fim)
            z_route = rseb_via_z(rel_tr, link)
            cdi_route = rseb_via_relative_cdi(
                rel_cdi_exact(rel_tr), topology.agent_degrees(), link
            )
            trace = pseudo.trace_pinv
            rseb = pseudo.rseb
            rseb_dev = float(
                max(abs(z_route - trace), abs(cdi_route - trace)) / abs(trace)
            )
        except SynchronizabilityError:
            pass
    return BoundReport(
        aseb=direct,
        aseb_method_deviation=aseb_dev,
        rseb=rseb,
        trace_pinv=trace,
        rseb_method_deviation=rseb_dev,
        condition_number=cond,
    )
