"""The two SAGE algorithms for the stochastic model in nonuniform noise.

Variant ``"A"`` updates every angle and power at once from the per-source
conditional covariances (noise split by the known weights ``alpha``).
Variant ``"B"`` updates one source per cycle, giving it the whole noise,
and refreshes the other powers on the way. Both finish an iteration with
the same extra E/M pass that re-estimates powers and noise variances from
the source-signal/noise complete data.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .array_model import sample_covariance, steering_matrix
from .common import AlgorithmConfig, TrialRecord, theta_step_deg
from .likelihood import StochParams, stoch_llf
from .line_search import GradientAscent

__all__ = [
    "StochSageState",
    "StochEStepCache",
    "stoch_e_step_A",
    "stoch_m_step_A",
    "additional_em_steps",
    "stoch_cycle_B",
    "stoch_sage_run",
]


@dataclass
class StochSageState:
    theta: np.ndarray
    p: np.ndarray
    sigma: np.ndarray
    alpha: np.ndarray | None = None
    b: int = 0
    i: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        m = self.theta.size
        if self.alpha is None:
            self.alpha = np.full(m, 1.0 / m)
        self.alpha = np.asarray(self.alpha, dtype=float)
        if np.any(self.sigma <= 0):
            raise ValueError("noise variances must be positive")
        if np.any(self.p < 0):
            raise ValueError("powers must be nonnegative")
        if np.any(self.alpha <= 0) or not np.isclose(self.alpha.sum(), 1.0):
            raise ValueError("alpha must be positive and sum to one")
        if self.p.shape != self.theta.shape or self.alpha.shape != self.theta.shape:
            raise ValueError("theta, p and alpha disagree on the number of sources")

    def copy(self):
        return StochSageState(self.theta.copy(), self.p.copy(), self.sigma.copy(), self.alpha.copy(), self.b, self.i)

    @classmethod
    def initial(cls, theta, n, p0=1.0, sigma0=1.0, alpha=None):
        theta = np.asarray(theta, dtype=float)
        p0 = np.broadcast_to(np.asarray(p0, dtype=float), theta.shape).copy()
        sigma0 = np.broadcast_to(np.asarray(sigma0, dtype=float), (n,)).copy()
        return cls(theta, p0, sigma0, alpha)


@dataclass
class StochEStepCache:
    r_m: np.ndarray  # (M, N, N) conditional per-source covariances
    p_hat: np.ndarray | None = None
    r_z: np.ndarray | None = None


def _hermitian(a):
    return 0.5 * (a + a.conj().swapaxes(-1, -2))


def _conditional_covariance(h_part, h_total_chol, r_v):
    """``E{(1/T) sum g g^H | V}`` for ``g`` with covariance ``h_part`` inside ``v``.

    ``h_part H^{-1} R H^{-1} h_part + h_part - h_part H^{-1} h_part``.
    """
    k = linalg.cho_solve(h_total_chol, h_part)  # H^{-1} h_part
    return _hermitian(k.conj().T @ r_v @ k + h_part - h_part @ k)


def _model_covariance(d, p, sigma):
    h = (d * p) @ d.conj().T
    h[np.diag_indices_from(h)] += sigma
    return h


def stoch_e_step_A(state, r_v):
    """Per-source conditional covariances at the current iterate (noise split by ``alpha``)."""
    n = state.sigma.size
    d = steering_matrix(state.theta, n)
    chol = linalg.cho_factor(_model_covariance(d, state.p, state.sigma), lower=True)
    r_m = np.empty((state.theta.size, n, n), dtype=complex)
    for m in range(state.theta.size):
        h_m = state.p[m] * np.outer(d[:, m], d[:, m].conj())
        h_m[np.diag_indices(n)] += state.alpha[m] * state.sigma
        r_m[m] = _conditional_covariance(h_m, chol, r_v)
    return StochEStepCache(r_m=r_m)


def _whitened_fit(r, sigma, seed, noise_share, searcher):
    """Angle by local ascent on the whitened covariance, then the clamped power."""
    w = sigma
    s = 1.0 / np.sqrt(w)
    r_tilde = r * np.outer(s, s)
    result = searcher.search(r_tilde, w, seed)
    q = np.sum(1.0 / w)
    p = max((result.value / q - noise_share) / q, 0.0)
    # objective is flat in the angle at zero power: keep the old angle
    theta = result.theta if p > 0 else seed
    return theta, p


def stoch_m_step_A(cache, state, searcher=GradientAscent()):
    """Simultaneous angle/power update of every source with the noise held fixed."""
    theta = state.theta.copy()
    p = state.p.copy()
    for m in range(theta.size):
        theta[m], p[m] = _whitened_fit(cache.r_m[m], state.sigma, state.theta[m], state.alpha[m], searcher)
    return theta, p


def _power_statistics(d, p, sigma, r_v):
    """Conditional power statistics and the model-covariance factor."""
    chol = linalg.cho_factor(_model_covariance(d, p, sigma), lower=True)
    q_bar = linalg.cho_solve(chol, d * p)  # columns H^{-1} d_m P_m
    p_hat = np.einsum("nm,nk,km->m", q_bar.conj(), r_v, q_bar).real
    p_hat += p * (1.0 - np.einsum("nm,nm->m", d.conj(), q_bar).real)
    return np.maximum(p_hat, 0.0), chol


def additional_em_steps(theta, p, sigma, r_v, zeta):
    """Re-estimate powers and noise variances with the angles held fixed.

    Returns ``(p, sigma)``; every noise entry whose conditional estimate is
    not positive is replaced by ``zeta * sigma_old + (1 - zeta) * estimate``.
    """
    if not 0.0 < zeta <= 1.0:
        raise ValueError("zeta must lie in (0, 1]")
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.size
    d = steering_matrix(theta, n)
    p_new, chol = _power_statistics(d, np.asarray(p, dtype=float), sigma, r_v)
    r_z = _conditional_covariance(np.diag(sigma).astype(complex), chol, r_v)
    z = np.diag(r_z).real.copy()
    bad = z <= 0
    z[bad] = zeta * sigma[bad] + (1.0 - zeta) * z[bad]
    return p_new, z


def additional_e_step(theta, p, sigma, r_v):
    """Cache of the conditional statistics used by :func:`additional_em_steps`."""
    sigma = np.asarray(sigma, dtype=float)
    d = steering_matrix(theta, sigma.size)
    p_hat, chol = _power_statistics(d, np.asarray(p, dtype=float), sigma, r_v)
    r_z = _conditional_covariance(np.diag(sigma).astype(complex), chol, r_v)
    return StochEStepCache(r_m=np.empty((0,) + r_z.shape, dtype=complex), p_hat=p_hat, r_z=r_z)


def stoch_cycle_B(state, r_v, i, searcher=GradientAscent()):
    """Cycle ``i`` (0-based) of the sequential variant; the noise stays fixed."""
    n = state.sigma.size
    d = steering_matrix(state.theta, n)
    p_hat, chol = _power_statistics(d, state.p, state.sigma, r_v)
    h_i = state.p[i] * np.outer(d[:, i], d[:, i].conj())
    h_i[np.diag_indices(n)] += state.sigma
    r_i = _conditional_covariance(h_i, chol, r_v)
    new = state.copy()
    others = np.arange(state.theta.size) != i
    new.p[others] = p_hat[others]
    new.theta[i], new.p[i] = _whitened_fit(r_i, state.sigma, state.theta[i], 1.0, searcher)
    new.i = i + 1
    return new


def _llf(state, r_v, t):
    return stoch_llf(StochParams(state.theta, state.p, state.sigma), r_v, t)


def stoch_sage_run(v, init, variant="B", config=AlgorithmConfig()):
    """Run variant ``"A"`` or ``"B"`` until the angles settle."""
    if variant not in ("A", "B"):
        raise ValueError("variant must be 'A' or 'B'")
    start = time.perf_counter()
    v = np.asarray(v)
    t = v.shape[1]
    r_v = sample_covariance(v)
    state = init.copy()
    llf = [_llf(state, r_v, t)]
    thetas = [np.degrees(state.theta)]
    cycle_llf = [llf[0]]
    converged = False
    for b in range(1, config.max_iter + 1):
        previous = state.theta.copy()
        if variant == "A":
            cache = stoch_e_step_A(state, r_v)
            theta, p = stoch_m_step_A(cache, state, config.search)
            state = StochSageState(theta, p, state.sigma, state.alpha)
        else:
            for i in range(state.theta.size):
                state = stoch_cycle_B(state, r_v, i, config.search)
                cycle_llf.append(_llf(state, r_v, t))
        p, sigma = additional_em_steps(state.theta, state.p, state.sigma, r_v, config.zeta)
        state = StochSageState(state.theta, p, sigma, state.alpha, b)
        llf.append(_llf(state, r_v, t))
        thetas.append(np.degrees(state.theta))
        if theta_step_deg(state.theta, previous) <= config.tol_deg:
            converged = True
            break
    return TrialRecord(
        algorithm=f"stoch-sage-{variant}",
        llf=np.array(llf),
        theta_deg=np.array(thetas),
        converged=converged,
        n_iter=state.b,
        theta=state.theta,
        sigma=state.sigma,
        p=state.p,
        cycle_llf=np.array(cycle_llf) if variant == "B" else None,
        wall_clock=time.perf_counter() - start,
    )
