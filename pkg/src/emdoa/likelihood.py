"""Incomplete-data log-likelihoods for the deterministic and stochastic models."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .array_model import check_angles, steering_matrix

__all__ = ["DetParams", "StochParams", "det_llf", "stoch_llf", "stoch_covariance"]


@dataclass
class DetParams:
    theta: np.ndarray
    f: np.ndarray
    sigma: np.ndarray


@dataclass
class StochParams:
    theta: np.ndarray
    p: np.ndarray
    sigma: np.ndarray


def _positive_sigma(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("noise variances must be positive")
    return sigma


def det_llf(params, v):
    """Deterministic-model log-likelihood of snapshots ``v`` (N x T).

    ``-T N ln(pi) - T sum(ln sigma) - sum_t r(t)^H Sigma^{-1} r(t)`` with the
    residual ``r(t) = v(t) - D(theta) f(t)``.
    """
    sigma = _positive_sigma(params.sigma)
    v = np.asarray(v)
    n, t = v.shape
    residual = v - steering_matrix(params.theta, n) @ np.atleast_2d(params.f)
    weighted = np.sum((residual.real**2 + residual.imag**2) / sigma[:, None])
    return float(-t * n * np.log(np.pi) - t * np.sum(np.log(sigma)) - weighted)


def stoch_covariance(theta, p, sigma):
    """Array covariance ``sum_m P_m d_m d_m^H + diag(sigma)``."""
    sigma = np.asarray(sigma, dtype=float)
    d = steering_matrix(theta, sigma.size)
    h = (d * np.asarray(p, dtype=float)) @ d.conj().T
    h[np.diag_indices_from(h)] += sigma
    return h


def stoch_llf(params, r_hat, t):
    """Stochastic-model log-likelihood from the sample covariance ``r_hat``.

    Uses a Cholesky factorization of the model covariance; a failed
    factorization raises ``numpy.linalg.LinAlgError`` rather than being
    regularized, since positive noise variances make it positive definite.
    """
    sigma = _positive_sigma(params.sigma)
    check_angles(params.theta)
    h = stoch_covariance(params.theta, params.p, sigma)
    n = h.shape[0]
    chol = linalg.cho_factor(h, lower=True)
    logdet = 2.0 * np.sum(np.log(np.diag(chol[0]).real))
    trace = np.trace(linalg.cho_solve(chol, r_hat)).real
    return float(-t * (n * np.log(np.pi) + logdet + trace))
