"""Configuration and per-run records shared by all estimators."""

from dataclasses import dataclass, field

import numpy as np

from .line_search import GradientAscent

__all__ = ["AlgorithmConfig", "TrialRecord", "theta_step_deg"]


@dataclass(frozen=True)
class AlgorithmConfig:
    """Damping constants, stopping rule and search constants.

    ``beta`` damps the per-source noise update of GEM, ``gamma`` the noise
    update of deterministic SAGE and ``zeta`` the fallback for non-positive
    noise estimates in the stochastic algorithms. ``gamma=1`` is allowed but
    freezes the noise estimate at its initial value.
    """

    beta: float = 0.5
    gamma: float = 0.9
    zeta: float = 0.5
    tol_deg: float = 1e-3
    max_iter: int = 2000
    search: GradientAscent = field(default_factory=GradientAscent)

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0.0 < self.zeta <= 1.0:
            raise ValueError("zeta must lie in (0, 1]")
        if self.tol_deg <= 0:
            raise ValueError("tol_deg must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class TrialRecord:
    """Convergence trace of one estimator run.

    ``llf[b]`` and ``theta_deg[b]`` hold the iterate after iteration ``b``
    (index 0 is the initial point), so both have ``n_iter + 1`` rows.
    ``cycle_llf`` is only filled by the sequential (SAGE) algorithms and holds
    the log-likelihood after every cycle.
    """

    algorithm: str
    llf: np.ndarray
    theta_deg: np.ndarray
    converged: bool
    n_iter: int
    theta: np.ndarray
    sigma: np.ndarray
    f: np.ndarray | None = None
    p: np.ndarray | None = None
    omega: np.ndarray | None = None
    cycle_llf: np.ndarray | None = None
    wall_clock: float = 0.0

    def is_monotone(self, rtol=1e-6):
        """True when no LLF step drops by more than ``rtol * |LLF|``."""
        llf = np.asarray(self.llf)
        drops = llf[:-1] - llf[1:]
        return bool(np.all(drops <= rtol * np.abs(llf[:-1])))


def theta_step_deg(new, old):
    """Euclidean norm of the angle change, in degrees."""
    return float(np.linalg.norm(np.degrees(np.asarray(new) - np.asarray(old))))
