"""Shared fixtures: hand-built graphs and a corpus of random connected networks."""
from __future__ import annotations

import numpy as np
import pytest

from netsync.seeding import derived_seed_sequence
from netsync.topology import (
    LinkModel,
    PriorSpec,
    Topology,
    gen_stochastic,
    is_connected,
)
from netsync.topology import _make_topology


@pytest.fixture(scope="session")
def link() -> LinkModel:
    """gamma = 1 normalization used throughout."""
    return LinkModel(n_rounds=1, sigma2=2.0)


def make_topology(positions, n_agents=None, reference_ids=(), r_max=1.0) -> Topology:
    positions = np.asarray(positions, dtype=float)
    if n_agents is None:
        n_agents = len(positions) - len(reference_ids)
    return _make_topology(positions, n_agents, reference_ids, r_max, {})


@pytest.fixture
def path2() -> Topology:
    """Two agents one unit apart."""
    return make_topology([[0.0, 0.0], [1.0, 0.0]])


@pytest.fixture
def triangle() -> Topology:
    """Three mutually connected agents."""
    return make_topology([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]])


@pytest.fixture
def star4() -> Topology:
    """Hub agent 0 connected to three leaves (K_{1,3})."""
    return make_topology([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def agent_ref_pair() -> Topology:
    """One agent (0) next to one reference node (1)."""
    return make_topology([[0.0, 0.0], [1.0, 0.0]], n_agents=1, reference_ids=(1,))


def random_connected_network(
    master_seed: int,
    index: int,
    n_agents: int,
    link: LinkModel,
    p_prior: float = 0.5,
    intensity: float = 0.15,
    r_max: float = 4.5,
) -> tuple[Topology, PriorSpec]:
    """Deterministic connected stochastic network with mixed priors.

    Disconnected draws are retried with a derived seed. At least one agent
    always carries prior information so the absolute problem is solvable.
    """
    side = float(np.sqrt(n_agents / intensity))
    for attempt in range(200):
        seed = int(derived_seed_sequence(master_seed, index, attempt).generate_state(1)[0])
        topo = gen_stochastic(side, n_agents / side**2, r_max, seed=seed)
        if topo.n_agents == n_agents and is_connected(topo):
            break
    else:  # pragma: no cover
        raise RuntimeError("could not draw a connected network")
    rng = np.random.default_rng(derived_seed_sequence(master_seed, index, 10_000))
    mask = rng.random(n_agents) < p_prior
    if not mask.any():
        mask[0] = True
    n_p = np.where(mask, rng.uniform(0.5, 4.0, n_agents), 0.0)
    return topo, PriorSpec.from_n_p(n_p, link)


def network_corpus(link: LinkModel, count: int, max_agents: int, master_seed: int = 1234):
    """The mixed-prior corpus used by the invariant and acceptance tests."""
    rng = np.random.default_rng(master_seed)
    sizes = rng.integers(5, max_agents + 1, size=count)
    return [
        random_connected_network(master_seed, i, int(sizes[i]), link) for i in range(count)
    ]
