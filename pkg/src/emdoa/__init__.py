"""EM-type maximum-likelihood DOA estimation in unknown nonuniform noise."""

from .array_model import (
    REFERENCE_SIGMA,
    ArrayConfig,
    NoiseProfile,
    generate_deterministic_snapshots,
    generate_stochastic_snapshots,
    sample_covariance,
    steering_derivative,
    steering_vector,
)
from .common import AlgorithmConfig, TrialRecord
from .crlb import det_crlb, stoch_crlb
from .det_gem import DetGemState, gem_run
from .det_sage import DetSageState, sage_run
from .likelihood import DetParams, StochParams, det_llf, stoch_llf
from .line_search import GradientAscent, SearchProblem, ascend, objective_and_gradient
from .stoch_sage import StochSageState, stoch_sage_run

__version__ = "0.1.0"

__all__ = [
    "REFERENCE_SIGMA",
    "ArrayConfig",
    "NoiseProfile",
    "generate_deterministic_snapshots",
    "generate_stochastic_snapshots",
    "sample_covariance",
    "steering_derivative",
    "steering_vector",
    "AlgorithmConfig",
    "TrialRecord",
    "det_crlb",
    "stoch_crlb",
    "DetGemState",
    "gem_run",
    "DetSageState",
    "sage_run",
    "DetParams",
    "StochParams",
    "det_llf",
    "stoch_llf",
    "GradientAscent",
    "SearchProblem",
    "ascend",
    "objective_and_gradient",
    "StochSageState",
    "stoch_sage_run",
]
