import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netenergy import (ConvergenceError, GramianSpec, StabilityError, ValidationError,
                       aggregate_gramians, controllability_matrix, ctrb_gramian,
                       energy_flow, energy_flow_matrix, network_from_matrix, obsv_gramian)
from netenergy.gramian import smith_lyapunov

import oracles
from conftest import random_net, small_instances

INF = GramianSpec.infinite()


def test_spec_validation():
    with pytest.raises(ValidationError):
        GramianSpec.finite(0)
    assert GramianSpec.parse("inf").is_infinite
    assert GramianSpec.parse("7").T == 7
    with pytest.raises(ValidationError):
        GramianSpec.parse("soon")


def test_controllability_matrix_examples(chain2):
    C = controllability_matrix(chain2, [0], 2)
    np.testing.assert_array_equal(C, [[1, 0], [0, 0.5]])
    assert np.linalg.matrix_rank(C) == 2
    C = controllability_matrix(chain2, [1], 2)
    np.testing.assert_array_equal(C, [[0, 0], [1, 0]])
    assert np.linalg.matrix_rank(C) == 1
    C = controllability_matrix(network_from_matrix(np.zeros((2, 2))), [0, 1], 1)
    np.testing.assert_array_equal(C, np.eye(2))


def test_empty_driver_set_rejected(chain2):
    with pytest.raises(ValidationError):
        controllability_matrix(chain2, [], 2)
    with pytest.raises(ValidationError):
        ctrb_gramian(chain2, [], INF)
    with pytest.raises(ValidationError):
        ctrb_gramian(chain2, [2], INF)


def test_scalar_infinite_gramian():
    net = network_from_matrix([[0.9]])
    assert ctrb_gramian(net, [0], INF).mat[0, 0] == pytest.approx(1 / 0.19, rel=1e-12)
    assert obsv_gramian(net, [0], INF).mat[0, 0] == pytest.approx(1 / 0.19, rel=1e-12)


def test_chain_finite_gramians(chain2):
    spec = GramianSpec.finite(3)
    np.testing.assert_allclose(ctrb_gramian(chain2, [0], spec).mat, np.diag([1, 0.25]))
    np.testing.assert_allclose(obsv_gramian(chain2, [1], spec).mat, np.diag([0.25, 1]))


def test_single_step_gramian_is_projector(rng):
    net = random_net(rng, 5)
    for i in range(5):
        e = np.eye(5)[:, [i]]
        np.testing.assert_array_equal(ctrb_gramian(net, [i], GramianSpec.finite(1)).mat, e @ e.T)
        np.testing.assert_array_equal(obsv_gramian(net, [i], GramianSpec.finite(1)).mat, e @ e.T)


def test_unstable_infinite_rejected():
    net = network_from_matrix([[1.2]])
    with pytest.raises(StabilityError) as exc:
        ctrb_gramian(net, [0], INF)
    assert exc.value.radius == pytest.approx(1.2)


def test_smith_reports_iterations():
    A = np.array([[0.999999]])
    with pytest.raises(ConvergenceError) as exc:
        smith_lyapunov(A, np.eye(1), tol=1e-12, max_iter=3)
    assert exc.value.iterations == 3


def test_aggregate_chain(chain2):
    # brute force: W_I = I + A A^T, M_I = I + A^T A since A^2 = 0
    A = chain2.adj
    W_ref = oracles.gramian(A, [0, 1], 3)
    M_ref = oracles.obsv(A, [0, 1], 3)
    np.testing.assert_allclose(W_ref, np.diag([1, 1.25]))
    np.testing.assert_allclose(M_ref, np.diag([1.25, 1]))
    W, M = aggregate_gramians(chain2, GramianSpec.finite(3))
    np.testing.assert_allclose(W.mat, W_ref, rtol=1e-15)
    np.testing.assert_allclose(M.mat, M_ref, rtol=1e-15)


@pytest.mark.parametrize("spec", [GramianSpec.finite(4), INF])
def test_aggregate_zero_matrix(spec):
    W, M = aggregate_gramians(network_from_matrix(np.zeros((3, 3))), spec)
    np.testing.assert_array_equal(W.mat, np.eye(3))
    np.testing.assert_array_equal(M.mat, np.eye(3))


def test_aggregate_diagonal_is_normal():
    net = network_from_matrix(np.diag([0.5, -0.3, 0.8]))
    for spec in (GramianSpec.finite(6), INF):
        W, M = aggregate_gramians(net, spec)
        np.testing.assert_allclose(W.mat, M.mat, rtol=1e-14)


def test_energy_flow_examples(chain2):
    spec = GramianSpec.finite(3)
    assert energy_flow(chain2, 0, 1, spec) == pytest.approx(0.25)
    assert energy_flow(chain2, 1, 0, spec) == 0.0
    assert energy_flow(chain2, 0, 0, spec) == 1.0
    assert energy_flow(chain2, 1, 1, INF) == pytest.approx(1.0)


@pytest.mark.parametrize("horizon", [5, None])
def test_energy_flow_duality(rng, horizon):
    spec = GramianSpec(T=horizon)
    for _ in range(10):
        net = random_net(rng, int(rng.integers(2, 7)))
        for i in range(net.n):
            for j in range(net.n):
                via_w = ctrb_gramian(net, [i], spec).mat[j, j]
                via_m = obsv_gramian(net, [j], spec).mat[i, i]
                assert via_w == pytest.approx(via_m, rel=1e-10, abs=1e-14)
                assert energy_flow(net, i, j, spec) == pytest.approx(via_w, rel=1e-10, abs=1e-14)


def test_energy_flow_matrix_matches_brute_force(rng):
    for net in small_instances(20, seed=5):
        T = int(rng.integers(1, 9))
        E = energy_flow_matrix(net, GramianSpec.finite(T))
        np.testing.assert_allclose(E, oracles.energy_flows(net.adj, T), rtol=1e-12, atol=1e-15)


def test_energy_flow_matrix_infinite_against_long_sum(rng):
    for net in small_instances(20, seed=6):
        E = energy_flow_matrix(net, INF)
        ref = oracles.energy_flows(net.adj, 2000)
        np.testing.assert_allclose(E, ref, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("horizon", [1, 3, 10, None])
def test_additivity(horizon):
    rng = np.random.default_rng(77)
    spec = GramianSpec(T=horizon)
    for net in small_instances(30, seed=8, n_max=6):
        k = int(rng.integers(1, net.n + 1))
        drivers = rng.choice(net.n, size=k, replace=False)
        W = ctrb_gramian(net, drivers, spec).mat
        parts = sum(ctrb_gramian(net, [i], spec).mat for i in drivers)
        assert np.linalg.norm(W - parts) <= 1e-10 * np.linalg.norm(W)


def test_finite_matches_power_oracle():
    rng = np.random.default_rng(3)
    for net in small_instances(30, seed=9):
        T = int(rng.integers(1, 12))
        drivers = rng.choice(net.n, size=int(rng.integers(1, net.n + 1)), replace=False)
        np.testing.assert_allclose(ctrb_gramian(net, drivers, GramianSpec.finite(T)).mat,
                                   oracles.gramian(net.adj, drivers, T), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(obsv_gramian(net, drivers, GramianSpec.finite(T)).mat,
                                   oracles.obsv(net.adj, drivers, T), rtol=1e-12, atol=1e-14)


def test_infinite_matches_scipy_lyapunov():
    rng = np.random.default_rng(4)
    for net in small_instances(30, seed=10):
        drivers = rng.choice(net.n, size=int(rng.integers(1, net.n + 1)), replace=False)
        W = ctrb_gramian(net, drivers, INF).mat
        ref = oracles.gramian_inf(net.adj, drivers)
        assert np.linalg.norm(W - ref) <= 1e-10 * np.linalg.norm(ref)
        B = np.eye(net.n)[:, drivers]
        resid = net.adj @ W @ net.adj.T - W + B @ B.T
        assert np.linalg.norm(resid) <= 1e-12 * np.linalg.norm(W)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.integers(0, 2**32))
def test_path_semantics_on_dags(n, t, seed):
    rng = np.random.default_rng(seed)
    net = random_net(rng, n, "dag", density=0.6)
    P = controllability_matrix(net, range(n), t + 1)[:, t * n:(t + 1) * n]
    for i in range(n):
        for j in range(n):
            assert P[j, i] == pytest.approx(oracles.path_weight_sum(net.adj, i, j, t), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("horizon", [4, None])
def test_gramians_psd(horizon):
    spec = GramianSpec(T=horizon)
    for net in small_instances(30, seed=11):
        for G in aggregate_gramians(net, spec):
            assert np.array_equal(G.mat, G.mat.T)
            assert G.min_eigenvalue() >= -1e-9 * G.trace()
