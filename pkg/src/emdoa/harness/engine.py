"""Monte Carlo engine: trial execution, DOA matching, RMSE and CSV outputs."""

import csv
import hashlib
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..array_model import complex_gaussian, steering_matrix
from ..crlb import det_crlb, stoch_crlb
from ..det_gem import DetGemState, gem_run
from ..det_sage import DetSageState, sage_run
from ..stoch_sage import StochSageState, stoch_sage_run

__all__ = [
    "match_and_error",
    "classify_wanted",
    "rmse",
    "TrialResult",
    "scenario_rng",
    "fixed_waveforms",
    "simulate",
    "run_algorithm",
    "run_trial",
    "run_trials",
    "run_experiment",
    "scatter_rows",
    "rmse_rows",
    "crlb_rows",
    "trace_rows",
    "write_csv",
    "format_csv",
]

_FIXED_F_KEY = 2**31 - 1


def match_and_error(estimate, truth):
    """Best source association and the signed errors ``estimate - truth``.

    Returns ``(perm, errors)`` where ``estimate[perm[m]]`` is matched to
    ``truth[m]``; the association minimizes the summed squared error over
    all permutations. Units are those of the inputs.
    """
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError("estimate and truth must have the same length")
    best, best_cost = None, np.inf
    for perm in itertools.permutations(range(truth.size)):
        cost = np.sum((estimate[list(perm)] - truth) ** 2)
        if cost < best_cost:
            best, best_cost = perm, cost
    perm = np.array(best, dtype=int)
    return perm, estimate[perm] - truth


def classify_wanted(estimate, truth, radius=5.0):
    """True when every matched error is within ``radius`` (inclusive)."""
    _, err = match_and_error(estimate, truth)
    return bool(np.all(np.abs(err) <= radius))


def rmse(errors):
    """Pooled RMSE over trials and sources of an array of matched errors."""
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        return float("nan")
    return float(np.sqrt(np.mean(errors**2)))


@dataclass
class TrialResult:
    trial: int
    sweep_value: float | None
    algorithm: str
    record: object
    errors_deg: np.ndarray
    wanted: bool
    sample_hash: str


def scenario_rng(seed, sweep_index, trial):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(sweep_index), int(trial))))


def fixed_waveforms(cfg, scenario, sweep_index):
    """The waveform matrix shared by all trials of a sweep point, from its own stream."""
    rng = scenario_rng(cfg.seed, sweep_index, _FIXED_F_KEY)
    p = np.array(scenario.powers)
    return complex_gaussian(rng, p[:, None], (scenario.n_sources, scenario.snapshots))


def simulate(cfg, scenario, sweep_index, trial, f_fixed=None):
    """Snapshots of one trial (shared by every algorithm of the trial)."""
    rng = scenario_rng(cfg.seed, sweep_index, trial)
    n, m, t = scenario.n_sensors, scenario.n_sources, scenario.snapshots
    p = np.array(scenario.powers)
    sigma = np.array(scenario.sigma)
    if cfg.model == "deterministic":
        f = f_fixed if f_fixed is not None else complex_gaussian(rng, p[:, None], (m, t))
    else:
        f = complex_gaussian(rng, p[:, None], (m, t))
    noise = complex_gaussian(rng, sigma[:, None], (n, t))
    return steering_matrix(scenario.theta, n) @ f + noise


def run_algorithm(name, v, cfg, scenario):
    """Run one estimator from the configured initial point."""
    n, t = v.shape
    init = cfg.init
    acfg = cfg.algorithm_config
    if name == "det-gem":
        state = DetGemState.initial(init.theta, n, t, f0=init.f0, sigma0=init.sigma0)
        return gem_run(v, state, acfg)
    if name == "det-sage":
        state = DetSageState.initial(init.theta, n, t, f0=init.f0, sigma0=init.sigma0)
        return sage_run(v, state, acfg)
    if name in ("stoch-sage-A", "stoch-sage-B"):
        state = StochSageState.initial(init.theta, n, p0=init.p0, sigma0=init.sigma0, alpha=scenario.alpha)
        return stoch_sage_run(v, state, name[-1], acfg)
    raise ValueError(f"unknown algorithm {name!r}")


def _sample_hash(v):
    return hashlib.sha256(np.ascontiguousarray(v[:, 0]).tobytes()).hexdigest()[:16]


def run_trial(cfg, sweep_index, sweep_value, trial, f_fixed=None):
    scenario = cfg.scenario.at(cfg.sweep_axis, sweep_value)
    v = simulate(cfg, scenario, sweep_index, trial, f_fixed)
    digest = _sample_hash(v)
    out = []
    for name in cfg.algorithms:
        rec = run_algorithm(name, v, cfg, scenario)
        _, err = match_and_error(np.degrees(rec.theta), scenario.theta_deg)
        wanted = bool(np.all(np.abs(err) <= cfg.wanted_radius_deg))
        out.append(TrialResult(trial, sweep_value, name, rec, err, wanted, digest))
    return out


def _run_task(args):
    return run_trial(*args)


def run_trials(cfg, workers=1):
    """All trials of all sweep points; results sorted by (sweep point, trial, algorithm order)."""
    tasks = []
    for k, value in enumerate(cfg.sweep_points()):
        scenario = cfg.scenario.at(cfg.sweep_axis, value)
        f_fixed = None
        if cfg.model == "deterministic" and scenario.fixed_waveforms:
            f_fixed = fixed_waveforms(cfg, scenario, k)
        tasks.extend((cfg, k, value, trial, f_fixed) for trial in range(cfg.trials))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        chunks = [_run_task(task) for task in tasks]
    order = {name: i for i, name in enumerate(cfg.algorithms)}
    results = [r for chunk in chunks for r in chunk]
    results.sort(key=lambda r: (-np.inf if r.sweep_value is None else r.sweep_value, r.trial, order[r.algorithm]))
    return results


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def format_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    Path(path).write_text(format_csv(header, rows), encoding="utf-8")


def trace_rows(record):
    """``iteration, llf, theta_1_deg, ...`` rows of one run."""
    m = record.theta_deg.shape[1]
    header = ["iteration", "llf"] + [f"theta_{k + 1}_deg" for k in range(m)] + ["algo"]
    rows = [[b, record.llf[b], *record.theta_deg[b], record.algorithm] for b in range(len(record.llf))]
    return header, rows


def scatter_rows(results, m):
    header = (["trial", "algo"] + [f"theta_hat_{k + 1}_deg" for k in range(m)]
              + ["wanted", "converged", "n_iter", "sample_hash"])
    rows = [[r.trial, r.algorithm, *np.degrees(r.record.theta), r.wanted, r.record.converged, r.record.n_iter,
             r.sample_hash] for r in results]
    return header, rows


def crlb_value(cfg, scenario, sweep_index):
    """Per-source CRLB (rad^2) matching the data model of the sweep point."""
    if cfg.model == "stochastic":
        return stoch_crlb(scenario.theta, scenario.powers, scenario.sigma, scenario.snapshots)
    if scenario.fixed_waveforms:
        return det_crlb(scenario.theta, fixed_waveforms(cfg, scenario, sweep_index), scenario.sigma)
    # independent waveforms per trial: bound of the expected signal covariance
    f = np.diag(np.sqrt(np.array(scenario.powers) * scenario.snapshots))
    return det_crlb(scenario.theta, f, scenario.sigma)


def rmse_rows(cfg, results):
    """One row per sweep point and algorithm, sorted by sweep value."""
    m = cfg.scenario.n_sources
    header = (["sweep_value", "algo", "rmse_deg", "crlb_sqrt_deg", "trials_used", "rmse_converged_deg",
               "n_converged", "wanted", "mean_iterations"]
              + [f"rmse_{k + 1}_deg" for k in range(m)] + [f"crlb_sqrt_{k + 1}_deg" for k in range(m)])
    rows = []
    for k, value in enumerate(cfg.sweep_points()):
        scenario = cfg.scenario.at(cfg.sweep_axis, value)
        bound = np.degrees(np.sqrt(crlb_value(cfg, scenario, k)))
        pooled_bound = float(np.sqrt(np.mean(bound**2)))
        for name in cfg.algorithms:
            sel = [r for r in results if r.algorithm == name and r.sweep_value == value]
            errs = np.array([r.errors_deg for r in sel])
            conv = np.array([r.record.converged for r in sel], dtype=bool)
            per_source = [rmse(errs[:, j]) for j in range(m)]
            rows.append([
                "" if value is None else value, name, rmse(errs), pooled_bound, len(sel),
                rmse(errs[conv]) if conv.any() else float("nan"), int(conv.sum()),
                int(sum(r.wanted for r in sel)), float(np.mean([r.record.n_iter for r in sel])),
                *per_source, *bound,
            ])
    return header, rows


def crlb_rows(cfg):
    m = cfg.scenario.n_sources
    header = ["sweep_value", "model", "crlb_sqrt_deg"] + [f"crlb_sqrt_{k + 1}_deg" for k in range(m)]
    rows = []
    for k, value in enumerate(cfg.sweep_points()):
        scenario = cfg.scenario.at(cfg.sweep_axis, value)
        bound = np.degrees(np.sqrt(crlb_value(cfg, scenario, k)))
        rows.append(["" if value is None else value, cfg.model, float(np.sqrt(np.mean(bound**2))), *bound])
    return header, rows


def summarize(cfg, results):
    """Wanted counts, mean iterations and pooled RMSE per algorithm and sweep point."""
    summary = []
    for value in cfg.sweep_points():
        for name in cfg.algorithms:
            sel = [r for r in results if r.algorithm == name and r.sweep_value == value]
            summary.append({
                "sweep_value": value,
                "algo": name,
                "trials": len(sel),
                "wanted": int(sum(r.wanted for r in sel)),
                "converged": int(sum(r.record.converged for r in sel)),
                "mean_iterations": float(np.mean([r.record.n_iter for r in sel])),
                "median_iterations": float(np.median([r.record.n_iter for r in sel])),
                "rmse_deg": rmse(np.array([r.errors_deg for r in sel])),
            })
    return summary


def run_experiment(cfg, out_dir, kind="scatter", workers=1):
    """Run a configured experiment and write its CSV outputs into ``out_dir``.

    ``kind`` is ``"scatter"`` (``scatter.csv``) or ``"rmse"`` (``rmse.csv``).
    Returns ``(results, summary)``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = run_trials(cfg, workers)
    if kind == "scatter":
        write_csv(out / "scatter.csv", *scatter_rows(results, cfg.scenario.n_sources))
    elif kind == "rmse":
        write_csv(out / "rmse.csv", *rmse_rows(cfg, results))
    else:
        raise ValueError("kind must be 'scatter' or 'rmse'")
    return results, summarize(cfg, results)
