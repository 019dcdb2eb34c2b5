"""Uniform linear array model, steering vectors and synthetic snapshots.

The array has ``N`` sensors at half-wavelength spacing, so the steering phase
of sensor ``k`` for a source at angle ``theta`` is ``-k * pi * cos(theta)``.
Angles are in radians everywhere in the library.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayConfig",
    "NoiseProfile",
    "REFERENCE_SIGMA",
    "check_angles",
    "steering_vector",
    "steering_derivative",
    "steering_matrix",
    "steering_matrix_derivative",
    "complex_gaussian",
    "generate_deterministic_snapshots",
    "generate_stochastic_snapshots",
    "sample_covariance",
    "trial_rng",
]

#: Per-sensor noise variances used throughout the reported simulations (N=10).
REFERENCE_SIGMA = np.array([1.1, 2.3, 3.0, 4.2, 1.3, 0.5, 5.0, 2.2, 6.7, 10.0])


@dataclass(frozen=True)
class ArrayConfig:
    """ULA with ``n_sensors`` elements and half-wavelength spacing."""

    n_sensors: int

    def __post_init__(self):
        if int(self.n_sensors) != self.n_sensors or self.n_sensors < 2:
            raise ValueError("n_sensors must be an integer >= 2")

    def steering(self, theta):
        return steering_matrix(theta, self.n_sensors)


@dataclass(frozen=True)
class NoiseProfile:
    """Per-sensor noise variances (``Sigma = diag(sigma)``)."""

    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 1 or not np.all(sigma > 0):
            raise ValueError("noise variances must be a vector of positive reals")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def uniform(cls, n, value=1.0):
        return cls(np.full(n, float(value)))


def check_angles(theta):
    """Return ``theta`` as a float array, raising if any angle is outside (0, pi)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if not np.all((theta > 0) & (theta < np.pi)):
        raise ValueError(f"angles must lie strictly inside (0, pi), got {theta}")
    return theta


def steering_vector(theta_m, n):
    """Steering vector ``[1, e^{-j pi cos t}, ..., e^{-j (n-1) pi cos t}]``."""
    (theta_m,) = check_angles(theta_m)
    k = np.arange(n)
    return np.exp(-1j * np.pi * k * np.cos(theta_m))


def steering_derivative(theta_m, n):
    """Derivative of :func:`steering_vector` with respect to the angle."""
    (theta_m,) = check_angles(theta_m)
    k = np.arange(n)
    return 1j * k * np.pi * np.sin(theta_m) * np.exp(-1j * np.pi * k * np.cos(theta_m))


def steering_matrix(theta, n):
    """N x M matrix whose columns are the steering vectors of ``theta``."""
    theta = check_angles(theta)
    k = np.arange(n)[:, None]
    return np.exp(-1j * np.pi * k * np.cos(theta)[None, :])


def steering_matrix_derivative(theta, n):
    """Columnwise angle derivative of :func:`steering_matrix`."""
    theta = check_angles(theta)
    k = np.arange(n)[:, None]
    return 1j * np.pi * k * np.sin(theta)[None, :] * np.exp(-1j * np.pi * k * np.cos(theta)[None, :])


def trial_rng(master_seed, trial_index=None):
    """Independent generator for ``(master_seed, trial_index)``.

    Streams for different trial indices are statistically independent, so a
    trial can be regenerated on its own without replaying earlier trials.
    """
    if trial_index is None:
        return np.random.default_rng(master_seed)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(int(trial_index),)))


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng, variance, size):
    """Circular complex Gaussian draws with total variance ``variance``.

    Real and imaginary parts are independent with variance ``variance / 2``.
    ``variance`` broadcasts against ``size``.
    """
    rng = _as_rng(rng)
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def generate_deterministic_snapshots(theta, f, sigma, seed):
    """Snapshots ``V = D(theta) F + Z`` with ``Z`` columns ~ CN(0, diag(sigma)).

    Parameters
    ----------
    theta : array_like, shape (M,)
        Source angles in radians.
    f : ndarray, shape (M, T)
        Deterministic source waveforms.
    sigma : array_like, shape (N,)
        Per-sensor noise variances.
    seed : int or numpy.random.Generator

    Returns
    -------
    ndarray, shape (N, T)
    """
    sigma = NoiseProfile(sigma).sigma
    f = np.atleast_2d(np.asarray(f, dtype=complex))
    theta = check_angles(theta)
    if f.shape[0] != theta.size:
        raise ValueError("f must have one row per source")
    n, t = sigma.size, f.shape[1]
    noise = complex_gaussian(seed, sigma[:, None], (n, t))
    return steering_matrix(theta, n) @ f + noise


def generate_stochastic_snapshots(theta, p, sigma, t, seed):
    """Snapshots with i.i.d. CN(0, P_m) sources and CN(0, diag(sigma)) noise.

    Returns the N x T snapshot matrix; column covariance is
    ``sum_m P_m d_m d_m^H + diag(sigma)``.
    """
    rng = _as_rng(seed)
    sigma = NoiseProfile(sigma).sigma
    theta = check_angles(theta)
    p = np.asarray(p, dtype=float)
    if p.shape != theta.shape or np.any(p < 0):
        raise ValueError("powers must be nonnegative, one per source")
    n = sigma.size
    signals = complex_gaussian(rng, p[:, None], (theta.size, t))
    noise = complex_gaussian(rng, sigma[:, None], (n, t))
    return steering_matrix(theta, n) @ signals + noise


def sample_covariance(v):
    """``(1/T) V V^H`` for an N x T snapshot matrix."""
    v = np.asarray(v)
    if v.ndim == 1:
        v = v[:, None]
    r = v @ v.conj().T / v.shape[1]
    return 0.5 * (r + r.conj().T)
