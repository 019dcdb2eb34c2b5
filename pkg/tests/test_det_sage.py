import numpy as np
import pytest

from emdoa.array_model import REFERENCE_SIGMA, generate_deterministic_snapshots
from emdoa.common import AlgorithmConfig
from emdoa.det_gem import DetGemState, gem_run
from emdoa.det_sage import DetSageState, sage_cm_steps, sage_e_step, sage_run
from emdoa.likelihood import DetParams, det_llf

from .oracles import basin_grid_max, steer


def random_state(rng, n, m, t):
    return DetSageState(rng.uniform(0.3, 2.8, m),
                        rng.standard_normal((m, t)) + 1j * rng.standard_normal((m, t)),
                        rng.uniform(0.3, 3.0, n))


def test_e_step_exact_fit():
    rng = np.random.default_rng(0)
    s = random_state(rng, 4, 2, 3)
    v = steer(s.theta, 4) @ s.f
    for i in range(2):
        np.testing.assert_allclose(sage_e_step(s, v, i), np.outer(steer(s.theta[i], 4)[:, 0], s.f[i]), atol=1e-12)


def test_e_step_single_source_returns_data():
    rng = np.random.default_rng(1)
    s = random_state(rng, 3, 1, 2)
    v = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    np.testing.assert_allclose(sage_e_step(s, v, 0), v, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_e_step_direct_formula(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, 2, 2, 1)
    v = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
    for i in range(2):
        other = 1 - i
        expected = v - np.outer(steer(s.theta[other], 2)[:, 0], s.f[other])
        np.testing.assert_allclose(sage_e_step(s, v, i), expected, atol=1e-12)


def test_full_damping_keeps_noise():
    rng = np.random.default_rng(2)
    s = random_state(rng, 5, 2, 4)
    v = rng.standard_normal((5, 4)) + 0j
    new = sage_cm_steps(sage_e_step(s, v, 0), s, 0, 1.0)
    np.testing.assert_array_equal(new.sigma, s.sigma)


def test_zero_residual_shrinks_noise():
    s = DetSageState([1.2], np.full((1, 3), 2.0 + 0j), np.array([1.0, 2.0, 4.0]))
    v = steer(1.2, 3) @ s.f
    new = sage_cm_steps(sage_e_step(s, v, 0), s, 0, 0.9)
    np.testing.assert_allclose(new.sigma, 0.9 * s.sigma, rtol=1e-9)


def test_unit_noise_waveform_uses_sensor_count():
    s = DetSageState([1.0], np.ones((1, 2)), np.ones(4))
    g = np.outer(steer(1.0, 4)[:, 0], [1.0, 2.0])
    new = sage_cm_steps(g, s, 0, 0.9)
    # q = N: the fit of an exact rank-one column returns its amplitude
    np.testing.assert_allclose(new.f[0], [1.0, 2.0], atol=1e-3)


def test_rejects_bad_gamma():
    s = DetSageState([1.0], np.ones((1, 2)), np.ones(3))
    with pytest.raises(ValueError):
        sage_cm_steps(np.ones((3, 2), dtype=complex), s, 0, 0.0)


@pytest.mark.parametrize("seed", range(5))
def test_cycle_matches_oracles_and_leaves_others_alone(seed):
    rng = np.random.default_rng(50 + seed)
    n, t = 10, 8
    s = random_state(rng, n, 2, t)
    v = rng.standard_normal((n, t)) + 1j * rng.standard_normal((n, t))
    i = int(rng.integers(2))
    g = sage_e_step(s, v, i)
    new = sage_cm_steps(g, s, i, 0.9)
    w = s.sigma
    gt = g / np.sqrt(w)[:, None]
    theta_grid, _ = basin_grid_max(gt @ gt.conj().T / t, w, new.theta[i])
    assert new.theta[i] == pytest.approx(theta_grid, abs=1e-3)
    d = steer(new.theta[i], n)[:, 0]
    f_ls = np.linalg.lstsq((d / np.sqrt(w))[:, None], gt, rcond=None)[0][0]
    np.testing.assert_allclose(new.f[i], f_ls, atol=1e-10)
    assert np.all(new.sigma >= 0.9 * s.sigma)
    j = 1 - i
    assert new.theta[j] == s.theta[j]
    np.testing.assert_array_equal(new.f[j], s.f[j])
    assert new.i == i + 1
    assert det_llf(DetParams(new.theta, new.f, new.sigma), v) >= det_llf(DetParams(s.theta, s.f, s.sigma), v) - 1e-9


def fig1_data(seed, t=500):
    theta = np.radians([40.0, 80.0])
    p = np.array([6.0, 8.0])
    rng = np.random.default_rng(seed)
    f = np.sqrt(p / 2)[:, None] * (rng.standard_normal((2, t)) + 1j * rng.standard_normal((2, t)))
    return generate_deterministic_snapshots(theta, f, REFERENCE_SIGMA, seed=seed + 1)


def test_first_configuration_converges_faster_than_gem():
    v = fig1_data(20)
    init = np.radians([45.0, 85.0])
    sage = sage_run(v, DetSageState.initial(init, 10, 500), AlgorithmConfig(gamma=0.9))
    gem = gem_run(v, DetGemState.initial(init, 10, 500), AlgorithmConfig(beta=0.5))
    np.testing.assert_allclose(np.degrees(sage.theta), [40, 80], atol=1.0)
    assert sage.n_iter < gem.n_iter
    assert sage.is_monotone()
    cyc = sage.cycle_llf
    assert np.all(np.diff(cyc) >= -1e-6 * np.abs(cyc[:-1]))
    assert len(cyc) == 2 * sage.n_iter + 1
    # same basin: both land on the same stationary point
    assert np.max(np.abs(np.degrees(sage.theta - gem.theta))) < 0.01


def test_single_source_run_is_monotone():
    rng = np.random.default_rng(21)
    f = 2 * (rng.standard_normal((1, 100)) + 1j * rng.standard_normal((1, 100)))
    v = generate_deterministic_snapshots([1.0], f, REFERENCE_SIGMA, seed=22)
    rec = sage_run(v, DetSageState.initial([1.1], 10, 100))
    assert rec.converged and rec.is_monotone()
    assert abs(np.degrees(rec.theta[0]) - np.degrees(1.0)) < 1.0


def test_cap_flag():
    v = fig1_data(23, t=50)
    rec = sage_run(v, DetSageState.initial(np.radians([45.0, 85.0]), 10, 50), AlgorithmConfig(max_iter=1))
    assert not rec.converged and rec.n_iter == 1
