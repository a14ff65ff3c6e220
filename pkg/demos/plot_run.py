"""
Plot a run directory
====================

Reads the trajectory CSVs written by ``tqs run`` and draws fidelity and
observable curves. Usage::

    python demos/plot_run.py runs/heisenberg2 [--observable Z0] [-o figure.png]

Requires matplotlib (``pip install tqs[plot]``).
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def read_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(r[key]) for r in rows]) for key in rows[0] if key != "method"}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("rundir", type=Path)
    parser.add_argument("--observable", default="Z0")
    parser.add_argument("-o", "--output", type=Path)
    args = parser.parse_args(argv)

    fig, (ax_obs, ax_fid) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    for path in sorted(args.rundir.glob("trajectory_*.csv")):
        method = path.stem.split("_", 1)[1]
        cols = read_columns(path)
        if args.observable in cols:
            if method == "exact":
                ax_obs.plot(cols["t"], cols[args.observable], "k--", label=method, zorder=3)
            else:
                ax_obs.plot(cols["t"], cols[args.observable], label=method)
        if "fidelity" in cols:
            ax_fid.plot(cols["t"], cols["fidelity"], label=method)
    ax_obs.set_ylabel(f"<{args.observable}>")
    ax_fid.set_ylabel("fidelity with exact state")
    ax_fid.ticklabel_format(axis="y", useOffset=False)
    ax_fid.set_xlabel("t")
    ax_obs.legend()
    fig.tight_layout()
    out = args.output or args.rundir / "trajectories.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
