"""Drive the command-line sweep from Python: write a config, run it, read the CSV back."""

import csv
import sys
import tempfile
from pathlib import Path

from rfso.cli import main

CONFIG = """\
relay.mode = VG
fso.r = 1
hpa.kind = SEL
hpa.ibo_db = 3
sweep.start = 0
sweep.stop = 40
sweep.step = 10
sweep.outputs = capacity_mc,capacity_upper,capacity_approx,ceiling
mc.samples = 100000
mc.seed = 5
output.name = vg_capacity
"""

with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "vg.cfg"
    cfg.write_text(CONFIG)
    code = main(["--config", str(cfg), "--out", tmp])
    if code:
        sys.exit(code)
    with open(Path(tmp) / "vg_capacity.csv", newline="") as fh:
        for row in csv.reader(fh):
            print("  ".join(f"{c:>16s}" for c in row))
    # The JSON sidecar next to the CSV is itself a valid --config and reproduces it exactly.
    print((Path(tmp) / "vg_capacity.json").read_text().splitlines()[0:3], "...")
