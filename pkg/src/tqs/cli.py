"""Command line entry point: ``tqs run``, ``tqs sweep`` and ``tqs inspect``.

On failure the last line on stderr is a JSON object with ``error``, ``message``
and (for configuration problems) ``line`` keys, and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError
from .harness import SWEEP_PARAMETERS, ExperimentConfig, run, sweep
from .overlaps import FORMAT_TAG, OverlapSet

EXIT_USAGE = 2
EXIT_FAILURE = 1


def _parse_values(parameter: str, text: str) -> list:
    conv = float if parameter == "dt" else int
    return [conv(v) for v in text.replace(",", " ").split()]


def inspect_file(path: Path) -> str:
    text = path.read_text()
    first = text.lstrip().split(None, 1)[0] if text.strip() else ""
    if first == FORMAT_TAG:
        return describe_overlaps(OverlapSet.from_text(text))
    if first == "level":
        return describe_basis(text)
    raise ValueError(f"{path}: not an overlap-set file or basis dump")


def describe_overlaps(ov: OverlapSet) -> str:
    lines = [f"overlap set: dimension {ov.dimension}, mode {ov.mode}, basis {ov.basis_id or '-'}"]
    mats = [("E", ov.E), ("D", ov.D)]
    if ov.J is not None:
        mats.append(("J", ov.J))
    if ov.R is not None:
        mats.append((f"R (dt={ov.R_dt})", ov.R))
    mats += [(f"<{k}>", v) for k, v in ov.observables.items()]
    lam = np.linalg.eigvalsh(ov.E)
    cond = f"{lam[-1] / lam[0]:.3e}" if lam[0] > 0 else "inf"
    lines.append(f"E eigenvalues: min {lam[0]:.3e}, max {lam[-1]:.3e}, cond {cond}")
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        for name, m in mats:
            herm = np.abs(m - m.conj().T).max()
            lines.append(f"{name}: hermiticity error {herm:.2e}")
            lines.append(str(m))
    return "\n".join(lines)


def describe_basis(text: str) -> str:
    rows = [ln for ln in text.splitlines() if ln.startswith("level")]
    counts: dict[int, int] = {}
    for ln in rows:
        lvl = int(ln.split()[1].rstrip(":"))
        counts[lvl] = counts.get(lvl, 0) + 1
    cumulative = 0
    out = [f"moment basis: {len(rows)} states"]
    for lvl in sorted(counts):
        cumulative += counts[lvl]
        out.append(f"  level {lvl}: {counts[lvl]} new, {cumulative} cumulative")
    out += ["", *rows]
    return "\n".join(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tqs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment")
    p.add_argument("config", type=Path)
    p.add_argument("-o", "--outdir", type=Path, required=True)
    p.add_argument(
        "--phase",
        choices=("all", "quantum", "classical"),
        default="all",
        help="quantum: measure and write overlaps; classical: evolve from overlaps on disk",
    )

    p = sub.add_parser("sweep", help="repeat a run over parameter values")
    p.add_argument("config", type=Path)
    p.add_argument("parameter", choices=SWEEP_PARAMETERS)
    p.add_argument("values", help="comma or space separated values")
    p.add_argument("-o", "--outdir", type=Path, required=True)

    p = sub.add_parser("inspect", help="pretty-print an overlap set or basis dump")
    p.add_argument("path", type=Path)
    return parser


def _fail(exc: Exception, code: int = EXIT_FAILURE) -> int:
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError) and exc.lineno is not None:
        record["line"] = exc.lineno
    print(json.dumps(record), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "inspect":
            print(inspect_file(args.path))
            return 0
        cfg = ExperimentConfig.load(args.config)
        if args.command == "run":
            out = run(cfg, args.outdir, phase=args.phase)
        else:
            out = sweep(cfg, args.parameter, _parse_values(args.parameter, args.values), args.outdir)
        print(out)
        return 0
    except ConfigError as exc:
        return _fail(exc, EXIT_USAGE)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
