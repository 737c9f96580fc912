import dataclasses
import math

import numpy as np
import pytest
from conftest import small_system
from oracles import active_set_oracle
from hypothesis import given, settings
from hypothesis import strategies as st

from rbfvar.assembly import ProblemKind, objective
from rbfvar.errors import ConfigurationError, DomainError
from rbfvar.solvers import (
    AdmmParams,
    AdmmState,
    EllipticParams,
    admm_residuals,
    admm_v_update,
    admm_w_update,
    elliptic_system,
    obstacle_matrix,
    solve_elliptic,
    solve_obstacle,
)
from rbfvar.tsvd import tsvd_factorize


def test_param_validation():
    with pytest.raises(ConfigurationError):
        EllipticParams(beta=0.0)
    with pytest.raises(ConfigurationError):
        EllipticParams(beta=1.0, tau=1.0)
    with pytest.raises(ConfigurationError):
        AdmmParams(mu=1, beta=1, rho=-1)
    with pytest.raises(ConfigurationError):
        AdmmParams(mu=1, beta=1, rho=1, max_iter=0)


def test_elliptic_zero_rhs_gives_zero():
    sys, *_ = small_system(ProblemKind.POISSON)
    zero = dataclasses.replace(sys, f=np.zeros_like(sys.f), g=np.zeros_like(sys.g))
    rep = solve_elliptic(zero, EllipticParams(beta=10.0))
    np.testing.assert_array_equal(rep.weights, 0.0)
    assert rep.converged and rep.residual_history == []


@pytest.mark.parametrize("kind", [ProblemKind.POISSON, ProblemKind.REACTION_DIFFUSION])
def test_elliptic_matches_dense_solve(kind):
    sys, *_ = small_system(kind, N=3, m_omega=8, b=0.5, seed=2)
    beta = 10.0
    rep = solve_elliptic(sys, EllipticParams(beta=beta))
    A = sys.A1 + beta * sys.A3.T @ sys.A3
    rhs = sys.A2.T @ sys.f + beta * sys.A3.T @ sys.g
    direct = np.linalg.solve(A, rhs)
    assert np.linalg.norm(rep.weights - direct) <= 1e-8 * np.linalg.norm(direct)
    assert rep.rank_kept == 3
    # stationarity of the discrete functional
    assert np.linalg.norm(A @ rep.weights - rhs) <= 1e-8 * np.linalg.norm(rhs)


def test_elliptic_rejects_obstacle():
    sys, *_ = small_system(ProblemKind.OBSTACLE)
    with pytest.raises(ConfigurationError):
        solve_elliptic(sys, EllipticParams(beta=1.0))
    ell, *_ = small_system(ProblemKind.POISSON)
    with pytest.raises(ConfigurationError):
        solve_obstacle(ell, AdmmParams(mu=1, beta=1, rho=1))


def test_v_update_branches():
    np.testing.assert_array_equal(admm_v_update([-0.5, 0.3, 2.0], mu=1.0, rho=1.0), [-0.5, 0.0, 1.0])


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(0.1, 10))
def test_v_update_is_prox_by_grid_scan(t, mu, rho):
    step = 1e-4
    grid = np.arange(-6.0, 6.0 + step, step)
    vals = mu * np.maximum(grid, 0.0) + 0.5 * rho * (grid - t) ** 2
    best = grid[np.argmin(vals)]
    assert abs(admm_v_update(t, mu, rho) - best) <= step


def _obstacle_params(**kw):
    base = dict(mu=2.0, beta=50.0, rho=1.0, tau=1e-15, max_iter=20000, eps_primal=1e-10, eps_dual=1e-10)
    base.update(kw)
    return AdmmParams(**base)


def test_w_update_zero_rhs():
    sys, *_ = small_system(ProblemKind.OBSTACLE)
    sys = dataclasses.replace(sys, g=np.zeros_like(sys.g))
    p = _obstacle_params()
    fac = tsvd_factorize(obstacle_matrix(sys, p.beta, p.rho), p.tau)
    v = np.random.default_rng(0).standard_normal(sys.meta.m_omega)
    np.testing.assert_allclose(admm_w_update(fac, sys, p, v, sys.psi - v), 0.0, atol=1e-14)


def test_w_update_matches_dense_solve():
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=5, m_omega=9, b=3.0, seed=3)
    p = _obstacle_params(rho=3.0)
    A = obstacle_matrix(sys, p.beta, p.rho)
    rng = np.random.default_rng(1)
    v, z = rng.standard_normal(9), rng.standard_normal(9)
    rhs = p.beta * sys.A3.T @ sys.g + p.rho * sys.A2.T @ (sys.psi - v - z)
    w = admm_w_update(tsvd_factorize(A, p.tau), sys, p, v, z)
    np.testing.assert_allclose(w, np.linalg.solve(A, rhs), rtol=1e-8)
    with pytest.raises(DomainError):
        admm_w_update(tsvd_factorize(A, p.tau), sys, p, v[:3], z)


def test_w_update_ignores_truncated_directions():
    # rank-deficient normal matrix: adding a null-space rhs component changes nothing
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=6, m_omega=10, b=0.05, seed=0)
    p = _obstacle_params(tau=1e-6)
    fac = tsvd_factorize(obstacle_matrix(sys, p.beta, p.rho), p.tau)
    assert fac.rank < 6
    v = np.zeros(10)
    z = np.zeros(10)
    base = admm_w_update(fac, sys, p, v, z)
    U_full, _, _ = np.linalg.svd(obstacle_matrix(sys, p.beta, p.rho))
    null = U_full[:, fac.rank]
    # push the extra component through A2^T by solving for a z perturbation
    dz, *_ = np.linalg.lstsq(sys.A2.T, -null / p.rho, rcond=None)
    shifted = admm_w_update(fac, sys, p, v, z + dz)
    np.testing.assert_allclose(shifted, base, atol=1e-8 * max(1.0, np.linalg.norm(base)))


def test_residual_examples():
    sys, *_ = small_system(ProblemKind.OBSTACLE)
    m = sys.meta.m_omega
    z = np.ones(m)
    st0 = AdmmState(w=np.zeros(sys.meta.N), v=sys.psi.copy(), z=z)
    r_rel, s_rel = admm_residuals(st0, sys, 2.0, v_prev=sys.psi.copy())
    assert r_rel == 0.0 and s_rel == 0.0


def test_residual_zero_denominators():
    sys, *_ = small_system(ProblemKind.OBSTACLE)
    sys = dataclasses.replace(sys, psi=np.zeros(sys.meta.m_omega))
    m, N = sys.meta.m_omega, sys.meta.N
    st0 = AdmmState(w=np.zeros(N), v=np.zeros(m), z=np.zeros(m))
    assert admm_residuals(st0, sys, 1.0, np.zeros(m)) == (0.0, 0.0)
    assert admm_residuals(st0, sys, 1.0, np.ones(m))[1] == math.inf


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 100))
def test_residuals_match_formula(seed, rho):
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=4, m_omega=7, seed=seed % 1000)
    rng = np.random.default_rng(seed)
    w, v, z, vp = rng.standard_normal(4), rng.standard_normal(7), rng.standard_normal(7), rng.standard_normal(7)
    r_rel, s_rel = admm_residuals(AdmmState(w=w, v=v, z=z), sys, rho, vp)
    A2, psi = sys.A2, sys.psi
    r = [v[j] - psi[j] + sum(A2[j, i] * w[i] for i in range(4)) for j in range(7)]
    a2w = [sum(A2[j, i] * w[i] for i in range(4)) for j in range(7)]
    s = [rho * sum(A2[j, i] * (v[j] - vp[j]) for j in range(7)) for i in range(4)]
    d = [rho * sum(A2[j, i] * z[j] for j in range(7)) for i in range(4)]
    nrm = lambda x: math.sqrt(sum(t * t for t in x))
    assert r_rel == pytest.approx(nrm(r) / max(nrm(a2w), nrm(v), nrm(psi)), rel=1e-14)
    assert s_rel == pytest.approx(nrm(s) / nrm(d), rel=1e-14)


def test_obstacle_far_below_converges_to_zero():
    sys, *_ = small_system(ProblemKind.OBSTACLE)
    sys = dataclasses.replace(sys, g=np.zeros_like(sys.g), psi=np.full(sys.meta.m_omega, -1e6))
    rep = solve_obstacle(sys, _obstacle_params(eps_primal=1e-6, eps_dual=1e-6))
    assert rep.converged and rep.iterations <= 50
    assert np.linalg.norm(rep.weights) <= 1e-6


@pytest.mark.parametrize("seed", range(6))
def test_tiny_admm_matches_bruteforce_minimizer(seed):
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=3, m_omega=4, b=2.0, seed=seed)
    # lift the obstacle so that some constraints bind
    sys = dataclasses.replace(sys, psi=sys.psi + 1.5 / 4)
    p = _obstacle_params(mu=5.0, beta=20.0, rho=5.0)
    rep = solve_obstacle(sys, p)
    assert rep.converged
    w_ref = active_set_oracle(sys, p.beta, p.mu)
    assert np.linalg.norm(rep.weights - w_ref) <= 1e-4 * max(1.0, np.linalg.norm(w_ref))


def test_obstacle_run_properties():
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=8, m_omega=30, b=3.0, seed=5)
    sys = dataclasses.replace(sys, psi=sys.psi + 1.5 / 30)
    p = _obstacle_params(mu=2.0, beta=50.0, rho=20.0, eps_primal=1e-8, eps_dual=1e-8)
    rep = solve_obstacle(sys, p)
    assert rep.converged
    st_ = rep.state
    assert st_.iter == rep.iterations and np.array_equal(st_.w, rep.weights)
    slack_gap = np.linalg.norm(st_.v - (sys.psi - sys.A2 @ st_.w))
    assert slack_gap / max(1.0, np.linalg.norm(sys.psi)) <= 10 * p.eps_primal
    assert admm_residuals(st_, sys, p.rho, st_.v)[0] == pytest.approx(st_.r_norm, rel=1e-10)
    its = [h[0] for h in rep.residual_history]
    assert its == sorted(set(its)) and its[-1] == rep.iterations
    w = rep.weights
    # objective at the end is no worse than at the zero start
    assert objective(sys, w, p.beta, p.mu) <= objective(sys, np.zeros(8), p.beta, p.mu)
    again = solve_obstacle(sys, p)
    assert np.array_equal(again.weights, rep.weights) and again.iterations == rep.iterations


def test_nonconvergence_is_reported_not_raised():
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=8, m_omega=30, seed=1)
    rep = solve_obstacle(sys, _obstacle_params(max_iter=3))
    assert not rep.converged and rep.iterations == 3
    assert [h[0] for h in rep.residual_history] == [1, 2, 3]


def test_history_thinning():
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=8, m_omega=30, seed=1)
    rep = solve_obstacle(sys, _obstacle_params(max_iter=1205, eps_primal=1e-300, eps_dual=1e-300))
    its = [h[0] for h in rep.residual_history]
    assert its[:1000] == list(range(1, 1001))
    assert its[1000:] == list(range(1010, 1201, 10))


def test_elliptic_system_helper():
    sys, *_ = small_system(ProblemKind.POISSON)
    A, b = elliptic_system(sys, 4.0)
    np.testing.assert_allclose(A, sys.A1 + 4.0 * sys.A3.T @ sys.A3)
    np.testing.assert_allclose(b, sys.A2.T @ sys.f + 4.0 * sys.A3.T @ sys.g)


def test_fast_loop_matches_step_by_step_updates():
    sys, *_ = small_system(ProblemKind.OBSTACLE, N=8, m_omega=30, b=3.0, seed=5)
    sys = dataclasses.replace(sys, psi=sys.psi + 1.5 / 30)
    p = _obstacle_params(mu=2.0, beta=50.0, rho=20.0, max_iter=60, eps_primal=1e-300, eps_dual=1e-300)
    rep = solve_obstacle(sys, p)
    fac = tsvd_factorize(obstacle_matrix(sys, p.beta, p.rho), p.tau)
    m = sys.meta.m_omega
    v, z = np.zeros(m), np.zeros(m)
    for it in range(1, 61):
        w = admm_w_update(fac, sys, p, v, z)
        v_prev = v
        v = admm_v_update(sys.psi - sys.A2 @ w - z, p.mu, p.rho)
        z = z + v - sys.psi + sys.A2 @ w
        r_rel, s_rel = admm_residuals(AdmmState(w=w, v=v, z=z), sys, p.rho, v_prev)
        _, r_fast, s_fast = rep.residual_history[it - 1]
        assert r_fast == pytest.approx(r_rel, rel=1e-6, abs=1e-300)
        assert s_fast == pytest.approx(s_rel, rel=1e-6, abs=1e-300)
    np.testing.assert_allclose(rep.weights, w, rtol=1e-7, atol=1e-10 * np.max(np.abs(w)))
