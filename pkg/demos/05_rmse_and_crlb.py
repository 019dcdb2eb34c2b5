"""
RMSE against the Cramer-Rao bound
=================================

A short snapshot sweep with the stochastic variant B. Its RMSE approaches
the stochastic bound as T grows. The bundled configuration asks for 1000
trials per point; 100 keep this script quick.
"""

from dataclasses import replace

from emdoa.harness import bundled_config, load_config
from emdoa.harness.engine import rmse_rows, run_trials

cfg = replace(load_config(bundled_config("fig07")), trials=100, sweep_values=(25, 100, 400))
header, rows = rmse_rows(cfg, run_trials(cfg))
print(f"{'T':>5} {'RMSE (deg)':>11} {'sqrt CRLB':>10} {'ratio':>6}")
for row in rows:
    print(f"{row[0]:5.0f} {row[2]:11.4f} {row[3]:10.4f} {row[2] / row[3]:6.2f}")
