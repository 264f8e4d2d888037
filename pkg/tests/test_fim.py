"""Information matrices, transition matrices, and skew transforms."""
from __future__ import annotations

import numpy as np
import pytest

from netsync.errors import DegenerateNodeError
from netsync.fim import (
    SkewSpec,
    apply_skew,
    build_absolute_fim,
    build_extended_fim,
    build_relative_fim,
    build_transition_matrix,
    write_matrix_csv,
)
from netsync.topology import PriorSpec, UniformPriors, assign_priors

from conftest import make_topology, network_corpus, random_connected_network


def priors_of(link, *n_p):
    return PriorSpec.from_n_p(np.array(n_p, dtype=float), link)


class TestAbsoluteFim:
    def test_two_agents(self, path2, link):
        fim = build_absolute_fim(path2, priors_of(link, 1.0, 1.0), link)
        np.testing.assert_array_equal(fim.dense(), [[2.0, -1.0], [-1.0, 2.0]])

    def test_agent_with_reference(self, agent_ref_pair, link):
        fim = build_absolute_fim(agent_ref_pair, priors_of(link, 0.0), link)
        np.testing.assert_array_equal(fim.dense(), [[1.0]])

    def test_isolated_agent_zero(self, link):
        topo = make_topology([[0.0, 0.0]])
        fim = build_absolute_fim(topo, priors_of(link, 0.0), link)
        np.testing.assert_array_equal(fim.dense(), [[0.0]])
        with pytest.raises(DegenerateNodeError, match="node 0"):
            build_transition_matrix(fim)

    def test_offdiagonal_sign(self, link):
        topo, priors = random_connected_network(77, 0, 30, link)
        j = build_absolute_fim(topo, priors, link).dense()
        off = j[~np.eye(len(j), dtype=bool)]
        assert np.all(off <= 0)

    def test_factorization_identity(self, link):
        # J = (gamma * (D_C + D_R) + Xi) @ (I - P), entrywise
        topo, priors = random_connected_network(78, 1, 40, link)
        fim = build_absolute_fim(topo, priors, link)
        p = build_transition_matrix(fim)
        d = fim.diagonal()
        lhs = fim.dense()
        rhs = d[:, None] * (np.eye(fim.n) - p.dense())
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * d.max())


class TestRelativeFim:
    def test_path(self, path2, link):
        fim = build_relative_fim(path2, link)
        np.testing.assert_array_equal(fim.dense(), [[1.0, -1.0], [-1.0, 1.0]])

    def test_triangle(self, triangle, link):
        fim = build_relative_fim(triangle, link)
        np.testing.assert_array_equal(
            fim.dense(), [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
        )

    def test_zero_row_sums_and_psd(self, link):
        topo, _ = random_connected_network(79, 2, 35, link)
        fim = build_relative_fim(topo, link)
        j = fim.dense()
        np.testing.assert_allclose(j @ np.ones(fim.n), 0.0, atol=1e-12)
        assert np.linalg.eigvalsh(j)[0] > -1e-10

    def test_rejects_references(self, agent_ref_pair, link):
        with pytest.raises(ValueError, match="agent-only"):
            build_relative_fim(agent_ref_pair, link)


class TestExtendedFim:
    def test_agent_plus_reference_block(self, agent_ref_pair, link):
        xi_inf = 1e9
        fim = build_extended_fim(agent_ref_pair, priors_of(link, 0.0), link, xi_inf=xi_inf)
        j = fim.dense()
        assert j.shape == (3, 3)  # agent, reference, virtual reference
        np.testing.assert_array_equal(j[:2, :2], [[1.0, -1.0], [-1.0, xi_inf]])
        # no prior: the virtual reference is disconnected
        assert j[0, 2] == 0.0 and j[2, 2] == xi_inf

    def test_prior_adds_one_virtual_edge(self, path2, link):
        fim = build_extended_fim(path2, priors_of(link, 2.0, 0.0), link, xi_inf=1e9)
        j = fim.dense()
        assert j.shape == (4, 4)
        assert j[0, 2] == -priors_of(link, 2.0, 0.0).xi_p[0]
        assert j[1, 3] == 0.0
        assert np.count_nonzero(j[0, 2:]) == 1

    def test_agent_block_matches_absolute(self, link):
        topo, priors = random_connected_network(80, 3, 20, link)
        absolute = build_absolute_fim(topo, priors, link)
        extended = build_extended_fim(topo, priors, link)
        na = topo.n_agents
        np.testing.assert_array_equal(extended.dense()[:na, :na], absolute.dense())

    def test_inverse_block_approaches_absolute(self, link):
        # reduced inverse of the extended system reproduces the absolute bound
        topo, priors = random_connected_network(81, 4, 12, link)
        absolute = build_absolute_fim(topo, priors, link)
        extended = build_extended_fim(topo, priors, link, xi_inf=1e12)
        na = topo.n_agents
        inv_abs = np.linalg.inv(absolute.dense())
        inv_ext = np.linalg.inv(extended.dense())[:na, :na]
        np.testing.assert_allclose(inv_ext, inv_abs, rtol=1e-4)


class TestTransitionMatrix:
    def test_two_agent_example(self, path2, link):
        fim = build_absolute_fim(path2, priors_of(link, 1.0, 1.0), link)
        p = build_transition_matrix(fim)
        np.testing.assert_array_equal(p.dense(), [[0.0, 0.5], [0.5, 0.0]])
        assert p.absorbing_states == ()
        np.testing.assert_array_equal(p.row_weight, [2.0, 2.0])

    def test_relative_triangle_row_stochastic(self, triangle, link):
        p = build_transition_matrix(build_relative_fim(triangle, link))
        dense = p.dense()
        assert np.all(dense[~np.eye(3, dtype=bool)] == 0.5)
        np.testing.assert_allclose(p.row_sums(), 1.0)

    def test_extended_absorbing_rows(self, agent_ref_pair, link):
        fim = build_extended_fim(agent_ref_pair, priors_of(link, 1.0), link)
        p = build_transition_matrix(fim)
        assert p.absorbing_states == (1, 2)
        dense = p.dense()
        np.testing.assert_array_equal(dense[1], [0.0, 1.0, 0.0])
        np.testing.assert_array_equal(dense[2], [0.0, 0.0, 1.0])

    def test_extended_agent_block_consistent(self, link):
        # agent-to-agent transitions agree between the extended chain and the
        # absolute chain once priors are folded into virtual references
        topo, priors = random_connected_network(82, 5, 25, link)
        absolute = build_transition_matrix(build_absolute_fim(topo, priors, link))
        extended = build_transition_matrix(build_extended_fim(topo, priors, link))
        na = topo.n_agents
        np.testing.assert_allclose(
            extended.dense()[:na, :na], absolute.dense(), rtol=0, atol=1e-15
        )

    def test_entries_in_unit_interval(self, link):
        for topo, priors in network_corpus(link, 5, 40, master_seed=83):
            p = build_transition_matrix(build_absolute_fim(topo, priors, link)).dense()
            assert np.all(p >= 0) and np.all(p <= 1)
            assert np.all(p.sum(axis=1) <= 1 + 1e-12)


class TestSkews:
    def test_identity(self, path2, link):
        fim = build_absolute_fim(path2, priors_of(link, 1.0, 1.0), link)
        out = apply_skew(fim, SkewSpec(np.ones(2)))
        np.testing.assert_array_equal(out.dense(), fim.dense())

    def test_hand_example(self, path2, link):
        fim = build_absolute_fim(path2, priors_of(link, 1.0, 1.0), link)
        out = apply_skew(fim, SkewSpec(np.array([2.0, 1.0])))
        np.testing.assert_allclose(out.dense(), [[0.5, -0.5], [-0.5, 2.0]])

    def test_diagonal_scaling(self, link):
        topo, priors = random_connected_network(84, 6, 15, link)
        fim = build_absolute_fim(topo, priors, link)
        alphas = np.random.default_rng(0).uniform(0.5, 2.0, fim.n)
        out = apply_skew(fim, SkewSpec(alphas))
        np.testing.assert_allclose(out.diagonal(), fim.diagonal() / alphas**2, rtol=1e-14)

    def test_inverse_congruence(self, link):
        # (B^-1 J B^-1)^-1 == B J^-1 B
        topo, priors = random_connected_network(85, 7, 20, link)
        fim = build_absolute_fim(topo, priors, link)
        alphas = np.random.default_rng(1).uniform(0.8, 1.2, fim.n)
        skewed = apply_skew(fim, SkewSpec(alphas)).dense()
        lhs = np.linalg.inv(skewed)
        rhs = np.outer(alphas, alphas) * np.linalg.inv(fim.dense())
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def test_rejects_bad_input(self, path2, link):
        fim = build_absolute_fim(path2, priors_of(link, 1.0, 1.0), link)
        with pytest.raises(ValueError):
            SkewSpec(np.array([1.0, -0.5]))
        ext = build_extended_fim(path2, priors_of(link, 1.0, 1.0), link)
        with pytest.raises(ValueError, match="variant"):
            apply_skew(ext, SkewSpec(np.ones(4)))


class TestMatrixDump:
    def test_dense_and_coo(self, tmp_path, triangle, link):
        fim = build_relative_fim(triangle, link)
        dense_path = tmp_path / "dense.csv"
        coo_path = tmp_path / "coo.csv"
        write_matrix_csv(fim, dense_path, fmt="dense")
        write_matrix_csv(fim, coo_path, fmt="coo")
        rows = dense_path.read_text().splitlines()
        assert len(rows) == 3
        assert [float(v) for v in rows[0].split(",")] == [2.0, -1.0, -1.0]
        coo = coo_path.read_text().splitlines()
        assert coo[0] == "row,col,value"
        assert len(coo) == 1 + 9  # full triangle Laplacian has 9 nonzeros
        with pytest.raises(ValueError):
            write_matrix_csv(fim, tmp_path / "x.csv", fmt="json")
