import json

import numpy as np
import pytest

import saddlekit as sk


def one_dim():
    # J(w) = w^2 / 2, constraint w = 0.
    return sk.Problem(np.array([[0.5]]), np.zeros(1), np.array([[1.0]]), np.zeros(1))


def test_incremental_first_step():
    trace = sk.solve(one_dim(), "inc", mu_w=0.1, mu_lambda=0.1, max_iterations=1,
                     stop_tolerance=0.0, with_reference=False, w_init=np.ones(1))
    assert trace["w"][0] == pytest.approx(0.9, abs=1e-15)
    assert trace["lambda"][0] == pytest.approx(0.09, abs=1e-15)


def test_rate_example():
    problem = sk.Problem(np.eye(2), np.array([1.0, -1.0]), np.array([[1.0, 1.0]]), np.array([0.5]))
    c = sk.quadratic_regularity(problem, 1.0)
    s = sk.spectral_quantities(problem.B)
    assert s.sigma_max == pytest.approx(np.sqrt(2.0))
    bounds = sk.step_size_bounds(c, s)
    rate = sk.theoretical_rate(c, s, 0.5 * bounds.mu_w_bound, bounds.mu_lambda_bound)
    assert 0.0 < rate.gamma < 1.0
    with pytest.raises(sk.ConfigError):
        sk.theoretical_rate(c, s, 2.0 * bounds.mu_w_bound, bounds.mu_lambda_bound)


def test_solver_reaches_kkt_point():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4))
    R = a @ a.T + np.eye(4)
    r = rng.standard_normal(4)
    B = rng.standard_normal((2, 4))
    b = B @ rng.standard_normal(4)
    problem = sk.Problem(R, r, B, b)
    ref = sk.solve_kkt_reference(problem)
    c = sk.quadratic_regularity(problem, 0.0)
    s = sk.spectral_quantities(B)
    trace = sk.solve(problem, "inc", mu_w=0.5 / c.delta_rho,
                     mu_lambda=c.nu_rho / s.sigma_max ** 2, max_iterations=20000)
    assert trace["status"] == "CONVERGED"
    np.testing.assert_allclose(trace["w"], ref.w_star, atol=1e-4)
    # Same w* from numpy's dense KKT solve.
    K = np.block([[2 * R, B.T], [B, np.zeros((2, 2))]])
    sol = np.linalg.solve(K, np.concatenate([-r, b]))
    np.testing.assert_allclose(ref.w_star, sol[:4], atol=1e-10)


def test_forward_backward_rejects_nonzero_b():
    problem = sk.Problem(np.eye(1), np.zeros(1), np.eye(1), np.ones(1))
    with pytest.raises(sk.ConfigError):
        sk.solve(problem, "fb", mu_w=0.1, mu_lambda=0.1, max_iterations=1, with_reference=False)


def test_problem_json_roundtrip(tmp_path):
    problem = one_dim()
    path = tmp_path / "p.json"
    sk.save_problem(problem, path)
    back = sk.load_problem(path)
    assert json.loads(back.to_json()) == json.loads(problem.to_json())
    with pytest.raises(sk.IoError):
        sk.load_problem(tmp_path / "missing.json")


def test_metropolis_doubly_stochastic():
    edges, _ = sk.erdos_renyi(8, 0.4, 5)
    A = sk.metropolis_weights(8, edges)
    np.testing.assert_allclose(A, A.T, atol=1e-14)
    np.testing.assert_allclose(A.sum(axis=0), np.ones(8), atol=1e-12)


def test_nu_rho_estimate_example():
    est = sk.nu_rho_estimate(1.0, 1.0, 1.0, 4.0)
    assert est.eta_star == pytest.approx(0.423854, abs=1e-6)
    assert est.nu_rho == pytest.approx(0.152292, abs=1e-6)


def test_small_experiment(tmp_path):
    summary = sk.run_experiment("well", K=4, M=3, seed=2, algorithms="PD,EXTRA",
                                rho_sweep=[], grid="2:2", max_iterations=5000,
                                out_dir=tmp_path)
    tags = [s["algorithm"] for s in summary["summary"]]
    assert tags == ["PD_DIST", "EXTRA"]
    assert all(s["status"] == "REACHED" for s in summary["summary"])
    assert (tmp_path / "summary.json").exists()
    assert (tmp_path / "convergence_long.csv").exists()
