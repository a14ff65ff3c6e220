"""
A two-phase run from a config file
==================================

The harness splits a run into a measurement phase, which writes the overlap
matrices to ``overlaps.txt``, and an evolution phase, which reads only that
file. The same thing is available on the command line::

    tqs run demos/configs/tfi2_sampled.ini -o runs/tfi2 --phase quantum
    tqs run demos/configs/tfi2_sampled.ini -o runs/tfi2 --phase classical
    tqs inspect runs/tfi2/overlaps.txt
"""

import json
import sys
from pathlib import Path

from tqs.harness import ExperimentConfig, run

here = Path(__file__).parent
outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("runs") / "tfi2_sampled"
cfg = ExperimentConfig.load(here / "configs" / "tfi2_sampled.ini")

# %%
run(cfg, outdir, phase="quantum")
manifest = json.loads((outdir / "manifest.json").read_text())
print("counts:", manifest["counts"])

# %%
run(cfg, outdir, phase="classical")
manifest = json.loads((outdir / "manifest.json").read_text())
for row in manifest["summary"]:
    print(row)
print("outputs written to", outdir)
