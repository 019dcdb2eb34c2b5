"""
Array model and log-likelihoods
===============================

A ten-sensor half-wavelength ULA observes two sources through sensor noise
whose variance differs from sensor to sensor. This script builds both data
models and evaluates their log-likelihoods at the truth and at a perturbed
angle pair.
"""

import numpy as np

from emdoa import (
    REFERENCE_SIGMA,
    DetParams,
    StochParams,
    det_llf,
    generate_deterministic_snapshots,
    generate_stochastic_snapshots,
    sample_covariance,
    steering_vector,
    stoch_llf,
)

theta = np.radians([40.0, 80.0])
powers = np.array([6.0, 8.0])
t = 200

# Steering vectors have unit-modulus entries; broadside (90 deg) is all ones.
print("steering at 90 deg:", np.round(steering_vector(np.pi / 2, 4), 12))

# Deterministic model: the waveforms are fixed unknowns.
rng = np.random.default_rng(0)
f = np.sqrt(powers / 2)[:, None] * (rng.standard_normal((2, t)) + 1j * rng.standard_normal((2, t)))
v = generate_deterministic_snapshots(theta, f, REFERENCE_SIGMA, seed=1)

# Stochastic model: the waveforms are Gaussian with the given powers.
v_s = generate_stochastic_snapshots(theta, powers, REFERENCE_SIGMA, t, seed=2)
r_hat = sample_covariance(v_s)
print("per-sensor power of the stochastic data:", np.round(np.diag(r_hat).real, 2))

for label, angles in (("truth", theta), ("off by 2 deg", theta + np.radians(2.0))):
    det = det_llf(DetParams(angles, f, REFERENCE_SIGMA), v)
    sto = stoch_llf(StochParams(angles, powers, REFERENCE_SIGMA), r_hat, t)
    print(f"{label:>13}: deterministic LLF {det:12.2f}   stochastic LLF {sto:12.2f}")
