"""
Batch experiments from the command line
=======================================

The same runs are available as ``emdoa <command> CONFIG --out DIR``. This
script calls the entry point in-process on the bundled Fig. 2-style
configuration (trials cut to 10) and prints the resulting CSV.
"""

import tempfile
from pathlib import Path

from emdoa.harness import bundled_config
from emdoa.harness.cli import main

with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "basins.yaml"
    cfg.write_text(bundled_config("fig02").read_text().replace("trials: 100", "trials: 10"))
    code = main(["scatter", str(cfg), "--out", tmp])
    print("exit code", code)
    print((Path(tmp) / "scatter.csv").read_text())
