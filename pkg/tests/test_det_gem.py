import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from emdoa.array_model import REFERENCE_SIGMA, generate_deterministic_snapshots
from emdoa.common import AlgorithmConfig
from emdoa.det_gem import DetGemState, gem_cm_step1, gem_cm_step2, gem_e_step, gem_run
from emdoa.likelihood import DetParams, det_llf

from .oracles import basin_grid_max, condition_gaussian, linear_gaussian_joint, steer


def random_state(rng, n, m, t):
    theta = rng.uniform(0.3, 2.8, m)
    f = rng.standard_normal((m, t)) + 1j * rng.standard_normal((m, t))
    omega = rng.uniform(0.2, 3.0, (n, m))
    return DetGemState(theta, f, omega)


def gem_oracle(state, v):
    """Conditional mean and covariance diagonals of the stacked per-source data."""
    n, t = v.shape
    m = state.theta.size
    d = steer(state.theta, n)
    blocks = np.hstack([np.eye(n)] * m)
    cov_latent = np.diag(state.omega.T.ravel()).astype(complex)
    g_mean = np.zeros((m, n, t), dtype=complex)
    for tt in range(t):
        mean_latent = np.concatenate([d[:, k] * state.f[k, tt] for k in range(m)])
        mean, cov = linear_gaussian_joint(blocks, cov_latent, mean_latent)
        mu, c = condition_gaussian(mean, cov, np.arange(m * n, m * n + n), v[:, tt])
        g_mean[:, :, tt] = mu.reshape(m, n)
    return g_mean, np.diag(c).real.reshape(m, n).T


def test_e_step_zero_residual():
    rng = np.random.default_rng(0)
    state = random_state(rng, 4, 2, 3)
    v = steer(state.theta, 4) @ state.f
    cache = gem_e_step(state, v)
    for m in range(2):
        np.testing.assert_allclose(cache.g[m], np.outer(steer(state.theta[m], 4)[:, 0], state.f[m]), atol=1e-12)


def test_e_step_single_source_has_no_conditional_spread():
    rng = np.random.default_rng(1)
    state = random_state(rng, 3, 1, 2)
    v = rng.standard_normal((3, 2)) + 0j
    cache = gem_e_step(state, v)
    assert np.all(cache.c == 0)
    np.testing.assert_allclose(cache.g[0], v, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_e_step_matches_joint_gaussian_conditioning(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 2, 2, 1)
    v = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
    cache = gem_e_step(state, v)
    g, c = gem_oracle(state, v)
    np.testing.assert_allclose(cache.g, g, atol=1e-10)
    np.testing.assert_allclose(cache.c, c, atol=1e-10)
    assert np.all(cache.c >= 0) and np.all(cache.c < state.omega)


def test_cm1_rank_one_fit():
    target = 1.3
    state = DetGemState([1.25], np.ones((1, 1)), np.ones((5, 1)))
    g = steer(target, 5)[:, 0]
    cache = gem_e_step(state, g[:, None])
    theta, f = gem_cm_step1(cache, state)
    assert theta[0] == pytest.approx(target, abs=1e-4)
    assert f[0, 0] == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("seed", range(5))
def test_cm1_matches_grid_and_closed_form_waveform(seed):
    rng = np.random.default_rng(100 + seed)
    n, m, t = 10, 2, 6
    state = random_state(rng, n, m, t)
    v = rng.standard_normal((n, t)) + 1j * rng.standard_normal((n, t))
    cache = gem_e_step(state, v)
    theta, f = gem_cm_step1(cache, state)
    for k in range(m):
        w = state.omega[:, k]
        g_tilde = cache.g[k] / np.sqrt(w)[:, None]
        theta_grid, _ = basin_grid_max(g_tilde @ g_tilde.conj().T / t, w, theta[k])
        assert theta[k] == pytest.approx(theta_grid, abs=1e-3)
        # waveform: weighted least squares given the angle
        d = steer(theta[k], n)[:, 0]
        f_ls = np.linalg.lstsq((d / np.sqrt(w))[:, None], g_tilde, rcond=None)[0][0]
        np.testing.assert_allclose(f[k], f_ls, atol=1e-10)


def test_cm2_full_damping_is_identity():
    rng = np.random.default_rng(7)
    state = random_state(rng, 4, 2, 3)
    v = rng.standard_normal((4, 3)) + 0j
    cache = gem_e_step(state, v)
    phi = gem_cm_step1(cache, state)
    np.testing.assert_array_equal(gem_cm_step2(cache, phi, state, 1.0), state.omega)


def test_cm2_no_damping_recovers_moment_estimate():
    rng = np.random.default_rng(8)
    state = random_state(rng, 4, 2, 3)
    v = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    cache = gem_e_step(state, v)
    theta, f = gem_cm_step1(cache, state)
    out = gem_cm_step2(cache, (theta, f), state, 0.0)
    for k in range(2):
        resid = cache.g[k] - np.outer(steer(theta[k], 4)[:, 0], f[k])
        np.testing.assert_allclose(out[:, k], cache.c[:, k] + np.mean(np.abs(resid) ** 2, axis=1), rtol=1e-12)


def test_cm2_rejects_bad_beta():
    rng = np.random.default_rng(9)
    state = random_state(rng, 3, 1, 2)
    cache = gem_e_step(state, np.ones((3, 2), dtype=complex))
    with pytest.raises(ValueError):
        gem_cm_step2(cache, (state.theta, state.f), state, 1.5)


@pytest.mark.parametrize("seed", range(5))
def test_cm2_decreases_per_entry_objective(seed):
    rng = np.random.default_rng(200 + seed)
    state = random_state(rng, 5, 2, 4)
    v = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    cache = gem_e_step(state, v)
    theta, f = gem_cm_step1(cache, state)
    beta = rng.uniform(0, 1)
    new = gem_cm_step2(cache, (theta, f), state, beta)
    target = gem_cm_step2(cache, (theta, f), state, 0.0)
    assert np.all(new > 0)
    lhs = np.log(new) + target / new
    rhs = np.log(state.omega) + target / state.omega
    assert np.all(lhs <= rhs + 1e-12)
    # direct check that c + d is the unconstrained minimizer of each entry
    for n_ in range(5):
        a = target[n_, 0]
        res = minimize_scalar(lambda s: np.log(s) + a / s, bounds=(1e-6, 100), method="bounded",
                              options={"xatol": 1e-10})
        assert res.x == pytest.approx(a, rel=1e-3)


def test_initial_state_splits_noise():
    s = DetGemState.initial([0.5, 1.0], 3, 4, sigma0=2.0)
    np.testing.assert_allclose(s.omega, 1.0)
    np.testing.assert_allclose(s.sigma, 2.0)
    assert s.f.shape == (2, 4)
    with pytest.raises(ValueError):
        DetGemState([0.5], np.ones((1, 2)), np.zeros((3, 1)))


def test_already_converged_start_stops_quickly():
    theta = np.radians([50.0, 100.0])
    rng = np.random.default_rng(10)
    f = 3 * (rng.standard_normal((2, 40)) + 1j * rng.standard_normal((2, 40)))
    v = steer(theta, 8) @ f
    init = DetGemState(theta, f, np.full((8, 2), 1e-3))
    rec = gem_run(v, init)
    assert rec.n_iter <= 2
    np.testing.assert_allclose(rec.theta, theta, atol=np.radians(1e-3))


def test_first_configuration_converges_and_is_monotone():
    theta = np.radians([40.0, 80.0])
    p = np.array([6.0, 8.0])
    rng = np.random.default_rng(11)
    f = np.sqrt(p / 2)[:, None] * (rng.standard_normal((2, 500)) + 1j * rng.standard_normal((2, 500)))
    v = generate_deterministic_snapshots(theta, f, REFERENCE_SIGMA, seed=12)
    init = DetGemState.initial(np.radians([45.0, 85.0]), 10, 500)
    rec = gem_run(v, init, AlgorithmConfig(beta=0.5))
    assert rec.converged and rec.is_monotone()
    np.testing.assert_allclose(np.degrees(rec.theta), [40, 80], atol=1.0)
    assert rec.llf.shape == (rec.n_iter + 1,)
    assert rec.omega.shape == (10, 2) and np.all(rec.omega > 0)
    # the recorded values are the incomplete-data likelihood at the final iterate
    assert rec.llf[-1] == pytest.approx(det_llf(DetParams(rec.theta, rec.f, rec.sigma), v))


def test_iteration_cap_flags_nonconvergence():
    rng = np.random.default_rng(13)
    v = rng.standard_normal((6, 30)) + 1j * rng.standard_normal((6, 30))
    rec = gem_run(v, DetGemState.initial([1.0, 2.0], 6, 30), AlgorithmConfig(max_iter=2, tol_deg=1e-12))
    assert not rec.converged and rec.n_iter == 2
