"""Command-line entry point: ``emdoa {simulate,estimate,scatter,rmse-sweep,crlb}``.

Exit codes: 0 success, 2 configuration error, 3 non-converged trial with
``--strict``.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .engine import (
    crlb_rows,
    fixed_waveforms,
    format_csv,
    run_algorithm,
    run_experiment,
    simulate,
    trace_rows,
    write_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 2, 3


def _snapshot_rows(v):
    header = ["snapshot", "sensor", "real", "imag"]
    rows = [[t, n, v[n, t].real, v[n, t].imag] for t in range(v.shape[1]) for n in range(v.shape[0])]
    return header, rows


def read_snapshots(path):
    """Inverse of the ``simulate`` output: an N x T complex matrix."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    t = int(data["snapshot"].max()) + 1
    n = int(data["sensor"].max()) + 1
    v = np.zeros((n, t), dtype=complex)
    v[data["sensor"].astype(int), data["snapshot"].astype(int)] = data["real"] + 1j * data["imag"]
    return v


def _trial_inputs(cfg, trial):
    value = cfg.sweep_points()[0]
    scenario = cfg.scenario.at(cfg.sweep_axis, value)
    f_fixed = None
    if cfg.model == "deterministic" and scenario.fixed_waveforms:
        f_fixed = fixed_waveforms(cfg, scenario, 0)
    return scenario, simulate(cfg, scenario, 0, trial, f_fixed)


def cmd_simulate(cfg, args):
    _, v = _trial_inputs(cfg, args.trial)
    text = format_csv(*_snapshot_rows(v))
    _emit(text, args.out, "snapshots.csv")
    return EXIT_OK


def cmd_estimate(cfg, args):
    scenario, v = _trial_inputs(cfg, args.trial)
    if args.snapshots:
        v = read_snapshots(args.snapshots)
    rows, header, converged = [], None, True
    for name in cfg.algorithms:
        rec = run_algorithm(name, v, cfg, scenario)
        header, part = trace_rows(rec)
        rows.extend(part)
        converged &= rec.converged
        print(f"{name}: {rec.n_iter} iterations, converged={rec.converged}, "
              f"theta_deg={np.round(np.degrees(rec.theta), 4).tolist()}", file=sys.stderr)
    _emit(format_csv(header, rows), args.out, "trace.csv")
    return EXIT_NONCONVERGED if args.strict and not converged else EXIT_OK


def _batch(cfg, args, kind):
    out = Path(args.out or ".")
    results, summary = run_experiment(cfg, out, kind=kind, workers=args.workers)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    for row in summary:
        print(json.dumps(row), file=sys.stderr)
    if args.strict and not all(r.record.converged for r in results):
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_scatter(cfg, args):
    return _batch(cfg, args, "scatter")


def cmd_rmse_sweep(cfg, args):
    return _batch(cfg, args, "rmse")


def cmd_crlb(cfg, args):
    _emit(format_csv(*crlb_rows(cfg)), args.out, "crlb.csv")
    return EXIT_OK


def _emit(text, out, filename):
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="emdoa", description="EM-type DOA estimation in nonuniform noise")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="experiment YAML file")
        p.add_argument("--out", help="output directory (stdout for single-file commands when omitted)")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "emit the snapshots of one trial as CSV")
    p.add_argument("--trial", type=int, default=0)
    p = add("estimate", cmd_estimate, "run every configured algorithm once and print the trace")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--snapshots", help="snapshot CSV from 'simulate' to use instead of generating data")
    p.add_argument("--strict", action="store_true")
    for name, func, text in (("scatter", cmd_scatter, "final DOA estimates of every trial"),
                             ("rmse-sweep", cmd_rmse_sweep, "RMSE and CRLB per sweep point")):
        p = add(name, func, text)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--strict", action="store_true")
    add("crlb", cmd_crlb, "CRLB curves over the configured sweep")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
