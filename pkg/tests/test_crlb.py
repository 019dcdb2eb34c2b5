import numpy as np
import pytest

from emdoa.array_model import REFERENCE_SIGMA
from emdoa.crlb import UnidentifiableError, det_crlb, stoch_crlb, stoch_fim

from .oracles import det_fim_numeric, stoch_fim_numeric


def test_stochastic_bound_halves_with_double_snapshots():
    theta, p = np.radians([45.0, 65.0]), [3.0, 3.0]
    np.testing.assert_allclose(stoch_crlb(theta, p, REFERENCE_SIGMA, 200), stoch_crlb(theta, p, REFERENCE_SIGMA, 100) / 2,
                               rtol=1e-10)


def test_stochastic_bound_positive_for_close_pair():
    assert np.all(stoch_crlb(np.radians([45.0, 65.0]), [3.0, 3.0], REFERENCE_SIGMA, 25) > 0)


def test_stochastic_fim_matches_numeric_oracle():
    theta, p, sigma, t = np.array([1.1]), np.array([2.0]), np.array([0.7, 1.3, 2.0]), 10
    np.testing.assert_allclose(stoch_fim(theta, p, sigma, t), stoch_fim_numeric(theta, p, sigma, t), rtol=1e-4,
                               atol=1e-4)
    bound = np.linalg.inv(stoch_fim_numeric(theta, p, sigma, t))[0, 0]
    assert stoch_crlb(theta, p, sigma, t)[0] == pytest.approx(bound, rel=1e-4)


def test_stochastic_fim_two_sources_numeric():
    theta, p, sigma, t = np.array([0.9, 1.8]), np.array([2.0, 1.0]), np.array([0.5, 1.5, 1.0, 2.5]), 7
    np.testing.assert_allclose(stoch_fim(theta, p, sigma, t), stoch_fim_numeric(theta, p, sigma, t), rtol=1e-4,
                               atol=1e-3)


def test_stochastic_bound_decreases_in_snapshots_and_power():
    theta = np.radians([45.0, 65.0])
    a = stoch_crlb(theta, [3.0, 3.0], REFERENCE_SIGMA, 100)
    assert np.all(stoch_crlb(theta, [3.0, 3.0], REFERENCE_SIGMA, 150) < a)
    b = stoch_crlb(theta, [6.0, 3.0], REFERENCE_SIGMA, 100)
    assert b[0] < a[0]


def test_deterministic_scaling():
    rng = np.random.default_rng(0)
    f = rng.standard_normal((2, 20)) + 1j * rng.standard_normal((2, 20))
    theta = np.radians([50.0, 100.0])
    np.testing.assert_allclose(det_crlb(theta, np.sqrt(2) * f, REFERENCE_SIGMA), det_crlb(theta, f, REFERENCE_SIGMA) / 2,
                               rtol=1e-10)


def test_deterministic_single_source_matches_numeric_oracle():
    rng = np.random.default_rng(1)
    f = rng.standard_normal((1, 3)) + 1j * rng.standard_normal((1, 3))
    sigma = np.full(4, 1.5)
    bound = np.linalg.inv(det_fim_numeric([0.8], f, sigma))[0, 0]
    assert det_crlb([0.8], f, sigma)[0] == pytest.approx(bound, rel=1e-4)


def test_deterministic_two_sources_nonuniform_numeric():
    rng = np.random.default_rng(2)
    f = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    sigma = np.array([0.5, 2.0, 1.0, 3.0])
    theta = np.array([0.9, 1.6])
    bound = np.diag(np.linalg.inv(det_fim_numeric(theta, f, sigma)))[:2]
    np.testing.assert_allclose(det_crlb(theta, f, sigma), bound, rtol=1e-4)


def test_far_apart_sources_decouple():
    rng = np.random.default_rng(3)
    f = rng.standard_normal((2, 50)) + 1j * rng.standard_normal((2, 50))
    sigma = np.ones(10)
    theta = np.radians([30.0, 120.0])
    joint = det_crlb(theta, f, sigma)
    single = [det_crlb(theta[k:k + 1], f[k:k + 1], sigma)[0] for k in range(2)]
    np.testing.assert_allclose(joint, single, rtol=0.05)


def test_coincident_sources_are_unidentifiable():
    with pytest.raises(UnidentifiableError):
        det_crlb([1.0, 1.0], np.ones((2, 5)), np.ones(4))
    with pytest.raises(UnidentifiableError):
        stoch_crlb([1.0, 1.0], [1.0, 1.0], np.ones(4), 10)


def test_angles_outside_range_rejected():
    with pytest.raises(ValueError):
        stoch_crlb([0.0], [1.0], np.ones(3), 10)
