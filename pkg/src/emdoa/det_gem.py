"""ECM-based generalized EM for the deterministic model in nonuniform noise.

Each source owns a share ``omega[:, m]`` of the per-sensor noise; the shares
sum to the total noise variances. One iteration is an E-step over all
sources, a whitened DOA/waveform update per source with the shares held
fixed, and a damped update of the shares.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from .array_model import steering_matrix, steering_vector
from .common import AlgorithmConfig, TrialRecord, theta_step_deg
from .likelihood import DetParams, det_llf
from .line_search import GradientAscent

__all__ = ["DetGemState", "DetEStepCache", "gem_e_step", "gem_cm_step1", "gem_cm_step2", "gem_run"]


@dataclass
class DetGemState:
    theta: np.ndarray
    f: np.ndarray
    omega: np.ndarray
    b: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.f = np.atleast_2d(np.asarray(self.f, dtype=complex))
        self.omega = np.asarray(self.omega, dtype=float)
        if np.any(self.omega <= 0):
            raise ValueError("per-source noise variances must be positive")
        if self.omega.shape[1] != self.theta.size or self.f.shape[0] != self.theta.size:
            raise ValueError("theta, f and omega disagree on the number of sources")

    @property
    def sigma(self):
        return self.omega.sum(axis=1)

    @classmethod
    def initial(cls, theta, n, t, f0=1.0, sigma0=1.0):
        """Constant waveforms ``f0`` and the noise ``sigma0`` split evenly over sources."""
        theta = np.asarray(theta, dtype=float)
        m = theta.size
        sigma0 = np.broadcast_to(np.asarray(sigma0, dtype=float), (n,))
        return cls(theta, np.full((m, t), f0, dtype=complex), np.repeat(sigma0[:, None] / m, m, axis=1))


@dataclass
class DetEStepCache:
    g: np.ndarray  # (M, N, T) conditional means of the per-source data
    c: np.ndarray  # (N, M) diagonal of the conditional covariances


def gem_e_step(state, v):
    """Conditional means and covariance diagonals of the per-source data."""
    v = np.asarray(v)
    n = v.shape[0]
    d = steering_matrix(state.theta, n)
    sigma = state.sigma
    residual = v - d @ state.f
    share = state.omega / sigma[:, None]  # (N, M)
    g = d.T[:, :, None] * state.f[:, None, :] + share.T[:, :, None] * residual[None, :, :]
    c = state.omega * (1.0 - share)
    return DetEStepCache(g=g, c=c)


def gem_cm_step1(cache, state, searcher=GradientAscent()):
    """Per-source whitened fit: new angles by local ascent, waveforms in closed form."""
    m_src, n, t = cache.g.shape
    theta = state.theta.copy()
    f = np.empty((m_src, t), dtype=complex)
    for m in range(m_src):
        w = state.omega[:, m]
        g_tilde = cache.g[m] / np.sqrt(w)[:, None]
        r_tilde = g_tilde @ g_tilde.conj().T / t
        theta[m] = searcher.search(r_tilde, w, state.theta[m]).theta
        q = np.sum(1.0 / w)
        d = steering_vector(theta[m], n)
        f[m] = (d.conj() / w) @ cache.g[m] / q
    return theta, f


def gem_cm_step2(cache, new_phi, state, beta):
    """Damped noise-share update ``beta * omega + (1 - beta) * (c + d)``."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    theta, f = new_phi
    n = cache.g.shape[1]
    d = steering_matrix(theta, n)
    fit = d.T[:, :, None] * f[:, None, :]  # (M, N, T)
    err = cache.g - fit
    dres = np.mean(err.real**2 + err.imag**2, axis=2).T  # (N, M)
    return beta * state.omega + (1.0 - beta) * (cache.c + dres)


def _llf(state, v):
    return det_llf(DetParams(state.theta, state.f, state.sigma), v)


def gem_run(v, init, config=AlgorithmConfig()):
    """Iterate E-step, CM-step 1 and CM-step 2 until the angles settle."""
    start = time.perf_counter()
    state = replace(init, theta=init.theta.copy(), f=init.f.copy(), omega=init.omega.copy())
    llf = [_llf(state, v)]
    thetas = [np.degrees(state.theta)]
    converged = False
    for b in range(1, config.max_iter + 1):
        cache = gem_e_step(state, v)
        theta, f = gem_cm_step1(cache, state, config.search)
        omega = gem_cm_step2(cache, (theta, f), state, config.beta)
        previous = state.theta
        state = DetGemState(theta, f, omega, b)
        llf.append(_llf(state, v))
        thetas.append(np.degrees(theta))
        if theta_step_deg(theta, previous) <= config.tol_deg:
            converged = True
            break
    return TrialRecord(
        algorithm="det-gem",
        llf=np.array(llf),
        theta_deg=np.array(thetas),
        converged=converged,
        n_iter=state.b,
        theta=state.theta,
        sigma=state.sigma,
        f=state.f,
        omega=state.omega,
        wall_clock=time.perf_counter() - start,
    )
