"""
Configuration files and the command line
========================================

A run is described by an INI file; the resolved config, snapshots and
CSV tables land in one output directory.
"""

import tempfile
from pathlib import Path

from thinfilm import io
from thinfilm.cli import main

CONFIG = """
[run]
mode = main
N = 33
initial = coeffs: 0.5, 0.25

[regularization]
eps = 1e-2
delta = 1e-1

[solver]
T_final = 1e-4
"""

####################################################################
# Parse and serialise
# -------------------
# Unspecified keys take their defaults; serialising gives a complete,
# re-parseable file.

cfg = io.parse_config(CONFIG, env={})
print(io.serialize_config(cfg))

####################################################################
# Run through the CLI
# -------------------

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "run.ini"
    path.write_text(CONFIG)
    out = Path(tmp) / "out"
    code = main(["run", "--config", str(path), "--out", str(out)])
    print("exit code", code)
    print(sorted(p.name for p in out.iterdir())[:6], "...")
    u, header = io.read_snapshot(out / "snapshot_020.txt")
    print("final snapshot header:", header)
