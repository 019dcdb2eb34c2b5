"""
Seeded gradient ascent for one angle
====================================

Every EM-type angle update maximizes a whitened quadratic form
h(theta) = d~(theta)^H R~ d~(theta) locally, starting from the previous
estimate. The ascent never lowers h below its value at the seed, and from a
seed near a peak it climbs that peak.
"""

import numpy as np

from emdoa import GradientAscent, SearchProblem, ascend, steering_vector

n = 10
weights = np.linspace(0.5, 3.0, n)
scale = 1 / np.sqrt(weights)

# A whitened covariance with a strong source at 50 deg and a weak one at 120 deg.
r = np.zeros((n, n), dtype=complex)
for deg, power in ((50.0, 5.0), (120.0, 1.0)):
    d = scale * steering_vector(np.radians(deg), n)
    r += power * np.outer(d, d.conj())
r += np.diag(scale**2)

for seed_deg in (45.0, 70.0, 115.0):
    problem = SearchProblem(r, weights, np.radians(seed_deg))
    res = ascend(problem)
    h_seed = problem.evaluate(np.radians(seed_deg))[0]
    print(f"seed {seed_deg:6.1f} deg -> {np.degrees(res.theta):8.3f} deg, h {h_seed:8.2f} -> {res.value:8.2f}, "
          f"{res.n_iter} steps, |h'| = {abs(res.gradient):.1e}")

# The constants are adjustable; the estimators take any such searcher.
coarse = GradientAscent(grad_tol=1e-1)
print("coarser tolerance:", np.degrees(coarse(r, weights, np.radians(45.0))))
