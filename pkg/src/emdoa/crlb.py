"""Cramer-Rao bounds on the DOAs under unknown nonuniform noise.

Both bounds treat the noise variances as nuisance parameters. The
deterministic bound is conditional on the waveforms ``F``, which are
nuisance parameters as well; the stochastic bound has the source powers as
nuisance parameters.
"""

import numpy as np
from scipy import linalg

from .array_model import check_angles, steering_matrix, steering_matrix_derivative
from .likelihood import stoch_covariance

__all__ = ["stoch_fim", "stoch_crlb", "det_crlb", "UnidentifiableError"]


class UnidentifiableError(np.linalg.LinAlgError):
    """Raised when the Fisher information is singular."""


def _theta_block_of_inverse(fim, m):
    try:
        chol = linalg.cho_factor(fim, lower=True)
    except np.linalg.LinAlgError as exc:
        raise UnidentifiableError("Fisher information matrix is singular") from exc
    inv = linalg.cho_solve(chol, np.eye(fim.shape[0]))
    return np.diag(inv)[:m].copy()


def stoch_fim(theta, p, sigma, t):
    """Fisher information over ``(theta, P, sigma)`` for ``t`` i.i.d. snapshots.

    Entries are ``t * Re Tr(H^-1 dH_i H^-1 dH_j)`` with ``H`` the array
    covariance.
    """
    theta = check_angles(theta)
    p = np.asarray(p, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    n, m = sigma.size, theta.size
    d = steering_matrix(theta, n)
    dd = steering_matrix_derivative(theta, n)
    h_inv = linalg.inv(stoch_covariance(theta, p, sigma))
    derivs = []
    for k in range(m):
        outer = np.outer(dd[:, k], d[:, k].conj())
        derivs.append(p[k] * (outer + outer.conj().T))
    for k in range(m):
        derivs.append(np.outer(d[:, k], d[:, k].conj()))
    for k in range(n):
        e = np.zeros((n, n))
        e[k, k] = 1.0
        derivs.append(e)
    b = np.array([h_inv @ a for a in derivs])
    # Tr(B_i B_j) = sum(B_i * B_j^T)
    fim = np.einsum("iab,jba->ij", b, b).real
    return t * 0.5 * (fim + fim.T)


def stoch_crlb(theta, p, sigma, t):
    """Per-DOA variance bounds (rad^2) for the stochastic model."""
    fim = stoch_fim(theta, p, sigma, t)
    return _theta_block_of_inverse(fim, np.size(theta))


def det_crlb(theta, f, sigma):
    """Per-DOA variance bounds (rad^2) for the deterministic model, conditional on ``F``.

    The waveforms are eliminated through the projection onto the orthogonal
    complement of the whitened steering matrix; the noise block decouples
    from the mean parameters.
    """
    theta = check_angles(theta)
    f = np.atleast_2d(np.asarray(f, dtype=complex))
    sigma = np.asarray(sigma, dtype=float)
    n, m = sigma.size, theta.size
    s = 1.0 / np.sqrt(sigma)[:, None]
    a = s * steering_matrix(theta, n)
    da = s * steering_matrix_derivative(theta, n)
    gram = a.conj().T @ a
    try:
        proj_da = da - a @ linalg.solve(gram, a.conj().T @ da, assume_a="her")
    except (np.linalg.LinAlgError, linalg.LinAlgWarning) as exc:
        raise UnidentifiableError("steering matrix is rank deficient") from exc
    signal = f @ f.conj().T
    fim = 2.0 * (da.conj().T @ proj_da * signal.T).real
    return _theta_block_of_inverse(0.5 * (fim + fim.T), m)
