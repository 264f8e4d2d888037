"""Topology generators, priors, connectivity, and the Gauss-circle count."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netsync.topology import (
    BernoulliPriors,
    LinkModel,
    RegionPriors,
    UniformPriors,
    assign_priors,
    gauss_circle_degree,
    gen_lattice,
    gen_scaling_family,
    gen_stochastic,
    interior_mask,
    is_connected,
    read_topology_csv,
    write_topology_csv,
)

from conftest import make_topology


def brute_gauss_circle(r: float) -> int:
    f = math.floor(r)
    return sum(
        1
        for x in range(-f, f + 1)
        for y in range(-f, f + 1)
        if x * x + y * y <= r * r
    )


def bfs_connected(topology) -> bool:
    n = topology.n_nodes
    if n <= 1:
        return True
    nbrs = topology.neighbor_lists()
    seen = {0}
    stack = [0]
    while stack:
        for j in nbrs[stack.pop()]:
            if j not in seen:
                seen.add(int(j))
                stack.append(int(j))
    return len(seen) == n


class TestLattice:
    def test_3x3(self):
        topo = gen_lattice(2, 1, 1)
        assert topo.n_agents == 9
        assert topo.n_references == 0
        deg = topo.degrees()
        corners = [i for i, (x, y) in enumerate(topo.positions) if {x, y} <= {0.0, 2.0}]
        center = [i for i, (x, y) in enumerate(topo.positions) if (x, y) == (1.0, 1.0)]
        assert all(deg[i] == 2 for i in corners)
        assert deg[center[0]] == 4

    def test_interior_degree_r2(self):
        topo = gen_lattice(50, 1, 2)
        # oracle: enumerate integer offsets with 0 < dist <= 2
        expected = sum(
            1
            for x in range(-2, 3)
            for y in range(-2, 3)
            if 0 < x * x + y * y <= 4
        )
        assert expected == 12
        interior = interior_mask(topo, 50)
        deg = topo.degrees()
        assert np.all(deg[interior] == expected)

    def test_sub_range_spacing(self):
        topo = gen_lattice(1, 1, 0.5)
        assert topo.n_agents == 4
        assert topo.adjacency.nnz == 0
        assert not is_connected(topo)

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            gen_lattice(-1, 1, 1)
        with pytest.raises(ValueError):
            gen_lattice(2, 0, 1)
        with pytest.raises(ValueError):
            gen_lattice(2, 1, 0)

    def test_fractional_spacing(self):
        topo = gen_lattice(1, 0.25, 0.25)
        assert topo.n_agents == 25


class TestStochastic:
    def test_count(self):
        topo = gen_stochastic(50, 1.0, 2.0, seed=7)
        assert topo.n_agents == 2500
        assert np.all(topo.positions >= 0) and np.all(topo.positions <= 50)

    def test_zero_intensity_rejected(self):
        with pytest.raises(ValueError):
            gen_stochastic(10, 0.0, 2.0, seed=1)

    def test_determinism(self):
        a = gen_stochastic(20, 0.2, 3.0, seed=5)
        b = gen_stochastic(20, 0.2, 3.0, seed=5)
        assert a.positions.tobytes() == b.positions.tobytes()
        assert (a.adjacency != b.adjacency).nnz == 0
        c = gen_stochastic(20, 0.2, 3.0, seed=6)
        assert a.positions.tobytes() != c.positions.tobytes()


class TestScalingFamily:
    def test_extended_area(self):
        topo = gen_scaling_family("extended", 400, r_max=20, seed=1, intensity=0.01)
        assert topo.meta["side_b"] == pytest.approx(200.0)
        assert topo.n_agents == 400

    def test_dense_area(self):
        topo = gen_scaling_family("dense", 500, r_max=20, seed=1, area=10000)
        assert topo.meta["side_b"] == pytest.approx(100.0)
        assert topo.n_agents == 500

    def test_dense_doubling_keeps_side(self):
        a = gen_scaling_family("dense", 250, r_max=20, seed=1, area=10000)
        b = gen_scaling_family("dense", 500, r_max=20, seed=1, area=10000)
        assert a.meta["side_b"] == b.meta["side_b"]
        assert b.n_agents == 2 * a.n_agents

    def test_invalid_mode(self):
        with pytest.raises(ValueError, match="invalid mode"):
            gen_scaling_family("sparse", 100, r_max=5, seed=1, intensity=1.0)


class TestPriors:
    def test_uniform(self, link):
        topo = gen_stochastic(20, 0.25, 3.0, seed=2)
        priors = assign_priors(topo, UniformPriors(5.0), link)
        assert np.all(priors.n_p == 5.0)
        assert np.all(priors.xi_p == link.gamma * 5.0)

    def test_bernoulli_fraction(self, link):
        topo = gen_stochastic(60, 1.0, 3.0, seed=3)
        priors = assign_priors(topo, BernoulliPriors(p_a=0.3, n_p=5.0, seed=11), link)
        frac = np.mean(priors.n_p > 0)
        assert abs(frac - 0.3) < 0.03
        again = assign_priors(topo, BernoulliPriors(p_a=0.3, n_p=5.0, seed=11), link)
        assert np.array_equal(priors.n_p, again.n_p)

    def test_bernoulli_certain_is_uniform(self, link):
        topo = gen_stochastic(15, 0.3, 3.0, seed=4)
        bern = assign_priors(topo, BernoulliPriors(p_a=1.0, n_p=2.0, seed=1), link)
        unif = assign_priors(topo, UniformPriors(2.0), link)
        assert np.array_equal(bern.n_p, unif.n_p)

    def test_region(self, link):
        topo = gen_lattice(4, 1, 1)
        priors = assign_priors(topo, RegionPriors(rect=(0, 0, 2, 2), n_p=3.0), link)
        pos = topo.positions
        inside = (pos[:, 0] <= 2) & (pos[:, 1] <= 2)
        assert np.array_equal(priors.n_p > 0, inside)

    def test_prior_units_roundtrip(self):
        link = LinkModel(n_rounds=4, sigma2=0.5)
        topo = gen_lattice(2, 1, 1)
        priors = assign_priors(topo, UniformPriors(3.0), link)
        np.testing.assert_allclose(priors.xi_p * link.sigma2 / (2 * link.n_rounds), priors.n_p, rtol=1e-15)


class TestConnectivity:
    def test_boundary_inclusive(self):
        topo = make_topology([[0.0, 0.0], [2.5, 0.0]], r_max=2.5)
        assert is_connected(topo)

    def test_beyond_range(self):
        topo = make_topology([[0.0, 0.0], [2.5 + 1e-9, 0.0]], r_max=2.5)
        assert not is_connected(topo)

    def test_lattice_bfs_oracle(self):
        topo = gen_lattice(2, 1, 1)
        assert is_connected(topo) == bfs_connected(topo) is True

    def test_random_matches_bfs_oracle(self):
        for seed in range(8):
            topo = gen_stochastic(12, 0.15, 3.0, seed=seed)
            assert is_connected(topo) == bfs_connected(topo)

    def test_single_node(self):
        topo = make_topology([[0.0, 0.0]])
        assert is_connected(topo)


class TestGaussCircle:
    @pytest.mark.parametrize("r,expected", [(1, 5), (2, 13), (3, 29)])
    def test_small_values(self, r, expected):
        assert gauss_circle_degree(r) == expected
        assert brute_gauss_circle(r) == expected

    def test_enumeration_integers(self):
        for r in range(1, 31):
            assert gauss_circle_degree(r) == brute_gauss_circle(r)

    @given(st.floats(min_value=1.0, max_value=30.0, allow_nan=False))
    @settings(max_examples=120, deadline=None)
    def test_enumeration_floats(self, r):
        assert gauss_circle_degree(r) == brute_gauss_circle(r)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gauss_circle_degree(0.0)


class TestAdjacencyInvariants:
    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=30, deadline=None)
    def test_symmetric_no_self_loops(self, seed):
        topo = gen_stochastic(8, 0.4, 2.5, seed=seed)
        adj = topo.adjacency
        assert (adj != adj.T).nnz == 0
        assert adj.diagonal().sum() == 0

    def test_degree_consistency(self, link):
        topo = make_topology(
            [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            n_agents=3,
            reference_ids=(3,),
        )
        total = topo.degrees()[: topo.n_agents]
        assert np.array_equal(topo.agent_degrees() + topo.reference_degrees(), total)
        assert topo.reference_degrees().sum() > 0

    def test_coincident_points_not_linked(self):
        topo = make_topology([[0.0, 0.0], [0.0, 0.0]], r_max=1.0)
        assert topo.adjacency.nnz == 0


class TestSerialization:
    def test_round_trip(self, tmp_path):
        topo = gen_stochastic(15, 0.25, 3.0, seed=9)
        path = tmp_path / "topo.csv"
        write_topology_csv(topo, path)
        back = read_topology_csv(path)
        np.testing.assert_allclose(back.positions, topo.positions, rtol=0, atol=0)
        assert back.n_agents == topo.n_agents
        assert back.r_max == topo.r_max
        assert (back.adjacency != topo.adjacency).nnz == 0

    def test_round_trip_with_references(self, tmp_path):
        topo = make_topology(
            [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]], n_agents=2, reference_ids=(2,)
        )
        path = tmp_path / "topo.csv"
        write_topology_csv(topo, path)
        back = read_topology_csv(path)
        assert back.reference_ids == (2,)
        assert back.n_agents == 2

    def test_write_deterministic(self, tmp_path):
        topo = gen_stochastic(10, 0.2, 3.0, seed=1)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_topology_csv(topo, a)
        write_topology_csv(topo, b)
        assert a.read_bytes() == b.read_bytes()
