"""Seeded gradient ascent with Armijo backtracking for the 1-D DOA updates.

Every EM-type update of a single angle maximizes

    h(theta) = d~(theta)^H R~ d~(theta),   d~ = diag(w)^(-1/2) d(theta)

locally, starting from the previous angle so that the estimate stays in its
current basin. A global grid search is deliberately not offered: with
unequal source powers it pulls every angle onto the strongest source.
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .array_model import steering_derivative, steering_vector

__all__ = ["SearchProblem", "AscentResult", "GradientAscent", "objective_and_gradient", "ascend"]


@dataclass
class SearchProblem:
    """Quadratic form ``h`` defined by ``r_tilde`` and whitening weights."""

    r_tilde: np.ndarray
    whitening: np.ndarray
    seed_angle: float

    def __post_init__(self):
        self.r_tilde = np.asarray(self.r_tilde, dtype=complex)
        self.whitening = np.asarray(self.whitening, dtype=float)
        n = self.whitening.size
        if self.r_tilde.shape != (n, n):
            raise ValueError("r_tilde must be N x N with N matching the whitening weights")
        if np.any(self.whitening <= 0):
            raise ValueError("whitening weights must be positive")
        if not 0.0 < self.seed_angle < np.pi:
            raise ValueError("seed angle must lie inside (0, pi)")
        coef = _lag_coefficients(self.r_tilde, self.whitening)
        self._c0 = float(coef[0].real)
        self._coef = [complex(c) for c in coef[1:]]

    @property
    def n(self):
        return self.whitening.size

    def evaluate(self, theta):
        """Fast ``(h, h')`` via the lag-sum representation of the quadratic form."""
        return _lag_eval(self._c0, self._coef, theta)


def _lag_coefficients(r_tilde, whitening):
    # h(u) = c_0 + 2 Re sum_{tau>0} c_tau e^{j tau u}, u = pi cos(theta)
    s = 1.0 / np.sqrt(whitening)
    a = r_tilde * np.outer(s, s)
    n = a.shape[0]
    return np.array([np.trace(a, offset=-tau) for tau in range(n)])


def _lag_eval(c0, coef, theta):
    # scalar loop: N is small and numpy call overhead dominates at this size
    z = cmath.exp(1j * math.pi * math.cos(theta))
    zk = 1.0 + 0j
    h = 0.0
    dh_du = 0.0
    for k, c in enumerate(coef, 1):
        zk *= z
        term = c * zk
        h += term.real
        dh_du -= k * term.imag
    return c0 + 2.0 * h, 2.0 * dh_du * (-math.pi * math.sin(theta))


def objective_and_gradient(problem, theta):
    """``h(theta)`` and ``h'(theta) = 2 Re{d~'(theta)^H R~ d~(theta)}``."""
    s = 1.0 / np.sqrt(problem.whitening)
    d = s * steering_vector(theta, problem.n)
    dd = s * steering_derivative(theta, problem.n)
    rd = problem.r_tilde @ d
    return float(np.vdot(d, rd).real), float(2.0 * np.vdot(dd, rd).real)


class AscentResult(NamedTuple):
    theta: float
    value: float
    gradient: float
    n_iter: int
    converged: bool


@dataclass(frozen=True)
class GradientAscent:
    """Constants of the damped ascent; instances are the search handle passed to the EM steps.

    ``step_fraction`` bounds the first trial step to that fraction of the
    distance to the nearer end of (0, pi) in the ascent direction, which keeps
    every iterate inside the interval. ``max_iter`` and ``max_halvings`` are
    safety caps; hitting either returns the best iterate with
    ``converged=False``.
    """

    grad_tol: float = 1e-3
    step_fraction: float = 0.1
    armijo: float = 0.3
    shrink: float = 0.5
    max_iter: int = 500
    max_halvings: int = 60

    def search(self, r_tilde, whitening, seed):
        return ascend(SearchProblem(r_tilde, whitening, seed), self)

    def __call__(self, r_tilde, whitening, seed):
        return self.search(r_tilde, whitening, seed).theta


def ascend(problem, params=GradientAscent()):
    """Local maximizer of ``h`` reached from ``problem.seed_angle``.

    The returned value never falls below ``h(seed)``: a step is only taken
    once it passes the sufficient-increase test.
    """
    theta = float(problem.seed_angle)
    h, g = problem.evaluate(theta)
    n_iter = 0
    while abs(g) > params.grad_tol:
        if n_iter >= params.max_iter:
            return AscentResult(theta, h, g, n_iter, False)
        if g > 0:
            t = params.step_fraction * (np.pi - theta) / g
        else:
            t = -params.step_fraction * theta / g
        accepted = False
        for _ in range(params.max_halvings + 1):
            trial = theta + t * g
            h_trial, g_trial = problem.evaluate(trial)
            if h_trial >= h + params.armijo * t * g * g:
                accepted = True
                break
            t *= params.shrink
        n_iter += 1
        if not accepted:
            return AscentResult(theta, h, g, n_iter, False)
        theta, h, g = trial, h_trial, g_trial
    return AscentResult(theta, h, g, n_iter, True)
