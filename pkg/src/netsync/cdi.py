"""Cooperative dilution intensity (CDI) and relative CDI.

The CDI of agent ``i`` is the expected number of returns to ``i`` of an
absorbing random walk: ``delta_i = [(I - P)^-1]_ii - 1`` for the substochastic
transition matrix of the absolute problem. The relative CDI is the centered
analogue built from the fundamental matrix ``Z = (I - P + 1 pi^T)^-1`` of the
row-stochastic walk. Three routes are provided (exact solve, truncated
series, Monte Carlo walks) plus ensemble averaging over random topologies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from ._linalg import as_dense, reachable_mask, spd_inverse_diag
from .errors import SynchronizabilityError
from .fim import TransitionMatrix, build_absolute_fim, build_transition_matrix
from .seeding import derived_rng, derived_seed_sequence
from .topology import LinkModel, PriorSpec, Topology, UniformPriors, assign_priors, gen_stochastic, is_connected

__all__ = [
    "CdiReport",
    "StochasticCdiResult",
    "cdi_exact",
    "cdi_series",
    "rel_cdi_exact",
    "rel_cdi_abel",
    "cdi_random_walk",
    "expected_cdi_stochastic",
]

# Row sums this far below one mark a state with an absorption leak.
_LEAK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CdiReport:
    """CDI values with method metadata.

    ``delta`` is a per-agent vector for matrix methods and a scalar for the
    single-agent walk estimator.
    """

    delta: np.ndarray | float
    method: str
    truncation_n: Optional[int] = None
    tail_bound: Optional[float] = None
    stderr: Optional[float] = None
    agent: Optional[int] = None
    n_walks: Optional[int] = None
    n_truncated: Optional[int] = None


@dataclass(frozen=True, eq=False)
class StochasticCdiResult:
    """Expected network-average CDI over topology snapshots."""

    mean: float
    stderr: float
    snapshots: int
    resample_count: int
    snapshot_means: np.ndarray


def _require_absolute(transition: TransitionMatrix) -> None:
    if transition.variant != "absolute":
        raise ValueError(f"expected an absolute transition matrix, got {transition.variant!r}")


def _unreachable(transition: TransitionMatrix) -> np.ndarray:
    """Agents with no path to any absorbing leak (unsynchronizable)."""
    sums = transition.row_sums()
    leaky = sums < 1.0 - _LEAK_TOL
    if not leaky.any():
        return np.arange(transition.n)
    reach = reachable_mask(transition.data, leaky)
    return np.flatnonzero(~reach)


def _check_synchronizable(transition: TransitionMatrix) -> None:
    bad = _unreachable(transition)
    if len(bad):
        shown = ", ".join(map(str, bad[:20]))
        more = "" if len(bad) <= 20 else f" (+{len(bad) - 20} more)"
        raise SynchronizabilityError(
            f"network is not absolutely synchronizable: agents [{shown}]{more} "
            "have no path to a reference node or to an agent with prior information",
            unreachable=tuple(int(i) for i in bad),
        )


def cdi_exact(transition: TransitionMatrix) -> np.ndarray:
    """Per-agent CDI ``diag((I - P)^-1) - 1`` by direct factorization.

    The solve symmetrizes ``I - P`` with the stored row weights ``w`` into
    the positive definite matrix ``M = diag(w) (I - P)`` and runs a Cholesky
    factorization with column solves, so ``delta_i = w_i [M^-1]_ii - 1``.
    """
    _require_absolute(transition)
    _check_synchronizable(transition)
    w = transition.row_weight
    if w is None:
        raise ValueError("transition matrix lacks row weights")
    p = transition.dense()
    m = np.diag(w) - p * w[:, None]
    m = 0.5 * (m + m.T)
    try:
        inv_diag = spd_inverse_diag(m)
    except np.linalg.LinAlgError as exc:
        raise SynchronizabilityError(f"information matrix numerically singular: {exc}") from exc
    return w * inv_diag - 1.0


def cdi_series(transition: TransitionMatrix, tol: float, n_cap: int = 10**6) -> CdiReport:
    """Truncated series ``sum_n diag(P^n)`` with a geometric tail bound.

    The truncation order ``M`` is the smallest one whose worst-case tail
    ``rho^(M+1) / (1 - rho)`` (``rho`` = maximum row sum) is below ``tol``.
    Row-stochastic inputs are rejected; the relative CDI has its own route.
    """
    _require_absolute(transition)
    _check_synchronizable(transition)
    rho = float(np.max(transition.row_sums()))
    if rho >= 1.0 - _LEAK_TOL:
        raise ValueError("series truncation requires a strictly substochastic matrix")
    if rho <= 0.0:
        return CdiReport(delta=np.zeros(transition.n), method="series", truncation_n=1, tail_bound=0.0)
    m_order = 1
    while rho ** (m_order + 1) / (1.0 - rho) >= tol:
        m_order += 1
        if m_order > n_cap:
            raise SynchronizabilityError(
                f"series truncation order exceeds cap {n_cap} (rho={rho:.6g}); "
                "series diverges too slowly to evaluate"
            )
    p = transition.dense()
    power = p.copy()
    acc = np.diag(power).copy()
    for _ in range(2, m_order + 1):
        power = power @ p
        acc += np.diag(power)
    tail = rho ** (m_order + 1) / (1.0 - rho)
    return CdiReport(delta=acc, method="series", truncation_n=m_order, tail_bound=tail)


def _require_relative(transition: TransitionMatrix) -> np.ndarray:
    if transition.variant != "relative":
        raise ValueError(f"expected a relative transition matrix, got {transition.variant!r}")
    if transition.row_weight is None:
        raise ValueError("transition matrix lacks row weights")
    start = np.zeros(transition.n, dtype=bool)
    start[0] = True
    if not reachable_mask(transition.data, start).all():
        raise SynchronizabilityError("agent graph is disconnected (pseudo-inverse null space dimension > 1)")
    return np.asarray(transition.row_weight, dtype=float)


def rel_cdi_exact(transition: TransitionMatrix, degrees: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-agent relative CDI through the fundamental matrix.

    With ``Z = (I - P + 1 pi^T)^-1`` and stationary weights
    ``pi_i = d_i / sum(d)``, the relative CDI is
    ``delta_i = Z_ii - mean_j(Z_ji) - (1 - 1/n)``.
    """
    w = _require_relative(transition)
    d = w if degrees is None else np.asarray(degrees, dtype=float)
    n = transition.n
    pi = d / d.sum()
    z = np.linalg.inv(np.eye(n) - transition.dense() + np.outer(np.ones(n), pi))
    return np.diag(z) - z.sum(axis=0) / n - (1.0 - 1.0 / n)


def rel_cdi_abel(
    transition: TransitionMatrix,
    zs: tuple[float, ...] = (0.9, 0.99, 0.999),
) -> np.ndarray:
    """Abel-summed relative CDI series, Richardson-extrapolated to z -> 1.

    The centered series generally oscillates on bipartite graphs, so the
    partial sums have no ordinary limit; the Abel regularization evaluates
    the resolvent ``(I - zP)^-1 - I`` on a ramp of ``z`` values and
    extrapolates polynomially in ``1 - z``. Cross-check use only; the exact
    route is :func:`rel_cdi_exact`.
    """
    _require_relative(transition)
    n = transition.n
    p = transition.dense()
    xs, vals = [], []
    for z in zs:
        r = np.linalg.inv(np.eye(n) - z * p) - np.eye(n)
        term = np.diag(r) - r.sum(axis=0) / n
        xs.append(1.0 - z)
        vals.append(term)
    # Neville polynomial extrapolation to x = 0.
    work = [v.copy() for v in vals]
    for level in range(1, len(xs)):
        for i in range(len(xs) - level):
            x0, x1 = xs[i], xs[i + level]
            work[i] = (x0 * work[i + 1] - x1 * work[i]) / (x0 - x1)
    return work[0]


def _default_max_steps(degrees: np.ndarray, absorb_units: np.ndarray) -> int:
    mean_abs = float(absorb_units.mean())
    if mean_abs <= 0:
        raise SynchronizabilityError("no absorption anywhere: walk never terminates")
    return int(math.ceil(10.0 * (degrees.mean() + mean_abs) / mean_abs))


def cdi_random_walk(
    topology: Topology,
    priors: PriorSpec,
    agent_i: int,
    n_walks: int,
    max_steps: Optional[int] = None,
    seed: int = 0,
) -> CdiReport:
    """Monte Carlo CDI of one agent by simulating absorbing walks.

    Each walk starts at ``agent_i``. At an agent ``a`` the walk is absorbed
    by the local virtual reference with probability ``n_p[a] / (d_a + n_p[a])``
    and otherwise steps to a uniformly random neighbor; stepping onto a
    reference node also absorbs. The estimate is the mean number of returns
    to ``agent_i``; its standard error comes from the per-walk sample
    variance. Walks still alive after ``max_steps`` are truncated and
    counted, with the residual bias bounded geometrically in ``tail_bound``.
    """
    if n_walks < 1:
        raise ValueError("n_walks must be positive")
    na = topology.n_agents
    if not 0 <= agent_i < na:
        raise ValueError(f"agent_i out of range (n_agents={na})")
    degrees = topology.degrees()[:na].astype(float)
    n_p = priors.n_p
    absorb_units = n_p + topology.reference_degrees()
    if max_steps is None:
        max_steps = _default_max_steps(degrees, absorb_units)

    neighbors = topology.neighbor_lists()[:na]
    max_deg = max((len(nb) for nb in neighbors), default=0)
    nbr_pad = np.full((na, max(max_deg, 1)), -1, dtype=np.int64)
    for a, nb in enumerate(neighbors):
        nbr_pad[a, : len(nb)] = nb
    absorb_p = np.where(degrees + n_p > 0, n_p / (degrees + n_p), 1.0)

    rng = derived_rng(seed, 2)
    state = np.full(n_walks, agent_i, dtype=np.int64)
    alive_idx = np.arange(n_walks)
    returns = np.zeros(n_walks, dtype=np.int64)
    for _ in range(max_steps):
        cur = state[alive_idx]
        u = rng.random(len(cur))
        absorbed = u < absorb_p[cur]
        move = ~absorbed
        if move.any():
            mcur = cur[move]
            pick = (rng.random(len(mcur)) * degrees[mcur]).astype(np.int64)
            np.minimum(pick, degrees[mcur].astype(np.int64) - 1, out=pick)
            nxt = nbr_pad[mcur, pick]
            hit_ref = nxt >= na
            returned = (nxt == agent_i) & ~hit_ref
            returns[alive_idx[move][returned]] += 1
            state[alive_idx[move]] = np.where(hit_ref, -1, nxt)
            absorbed[move] = hit_ref
        # walks that drew absorption this step, or walked onto a reference
        alive_idx = alive_idx[~absorbed]
        if len(alive_idx) == 0:
            break
    n_truncated = len(alive_idx)
    delta_hat = float(returns.mean())
    stderr = float(returns.std(ddof=1) / math.sqrt(n_walks)) if n_walks > 1 else 0.0
    # residual returns of a truncated walk are dominated by a geometric series
    # with ratio = the largest per-step survival probability
    rho = float(np.max(degrees / (degrees + absorb_units))) if na else 0.0
    tail = (n_truncated / n_walks) * (rho / (1.0 - rho)) if rho < 1.0 else math.inf
    return CdiReport(
        delta=delta_hat,
        method="walk",
        stderr=stderr,
        tail_bound=tail,
        agent=agent_i,
        n_walks=n_walks,
        n_truncated=n_truncated,
        truncation_n=max_steps,
    )


def expected_cdi_stochastic(
    side_b: float,
    intensity: float,
    r_max: float,
    n_p: float,
    link: LinkModel,
    snapshots: int,
    seed: int,
    max_attempts: int = 1000,
) -> StochasticCdiResult:
    """Expected network-average CDI over independent topology snapshots.

    Disconnected snapshots are resampled with a fresh derived seed and
    counted in ``resample_count``.
    """
    if snapshots < 1:
        raise ValueError("snapshots must be positive")
    means = np.empty(snapshots)
    resamples = 0
    for s in range(snapshots):
        for attempt in range(max_attempts):
            sub_seed = int(derived_seed_sequence(seed, s, attempt).generate_state(1)[0])
            topo = gen_stochastic(side_b, intensity, r_max, seed=sub_seed)
            if is_connected(topo):
                break
            resamples += 1
        else:
            raise RuntimeError(f"no connected snapshot found in {max_attempts} attempts")
        priors = assign_priors(topo, UniformPriors(n_p), link)
        transition = build_transition_matrix(build_absolute_fim(topo, priors, link))
        means[s] = float(cdi_exact(transition).mean())
    stderr = float(means.std(ddof=1) / math.sqrt(snapshots)) if snapshots > 1 else 0.0
    return StochasticCdiResult(
        mean=float(means.mean()),
        stderr=stderr,
        snapshots=snapshots,
        resample_count=resamples,
        snapshot_means=means,
    )
