"""Experiment runner: configuration, two-phase runs and parameter sweeps.

A run has a *quantum* phase (prepare the reference state, build the moment
basis, measure overlap matrices, write them to disk) and a *classical* phase
(read the overlap file back and evolve the coefficients). The classical phase
never touches the statevector; the dense oracle is only used afterwards to
score the trajectories when the ``exact`` method is requested.

Configuration format (``#`` starts a comment)::

    [hamiltonian]
    name = heisenberg2          ; or: file = path/to/hamiltonian.txt

    [state]
    kind = random-layers        ; random-layers | basis | circuit
    n_layers = 5
    seed = 11
    entangler = cz              ; cz | cnot
    # bits = 0101               ; kind = basis, qubit 0 leftmost
    # file = circuit.ini        ; kind = circuit

    [ansatz]
    k = 1

    [evolution]
    dt = 0.001
    t_max = 3
    order = 1                   ; 1 | 2 | exact_unitary
    solver = closed_form        ; closed_form | pencil
    # pinv_cutoff = 1e-10

    [measurement]
    mode = exact                ; exact | sampled
    # shots = 8192
    # seed = 7

    [output]
    observables = Z0
    methods = tqs, exact        ; any of tqs, qas, exact
"""

from __future__ import annotations

import csv
import json
import logging
import platform
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, Section, parse_sections
from .models import BUILTINS, NOTES, builtin
from .moments import build_cumulative_moments, closure_reached
from .oracle import Propagator, basis_state_matrix
from .overlaps import EXACT, FORMAT_VERSION, Mode, OverlapSet, circuit_count, compute_overlaps
from .pauli import ORACLE_QUBIT_LIMIT, Hamiltonian, PauliString, dense_matrix, parse_hamiltonian
from .qas import integrate
from .statevec import CircuitSpec, StateVector, prepare
from .stepper import StepConfig, evolve, initial_alpha, step, with_steps
from .trajectory import CSV_SCHEMA_VERSION, Trajectory

log = logging.getLogger(__name__)

METHODS = ("tqs", "qas", "exact")
SWEEP_PARAMETERS = ("dt", "shots", "k")

BASIS_FILE = "basis.txt"
OVERLAP_FILE = "overlaps.txt"
MANIFEST_FILE = "manifest.json"
SUMMARY_FILE = "summary.csv"
CONFIG_FILE = "config.ini"
CIRCUIT_FILE = "circuit.ini"


@dataclass(frozen=True)
class ExperimentConfig:
    hamiltonian: str = "heisenberg2"
    hamiltonian_file: str | None = None
    state_kind: str = "random-layers"
    n_layers: int = 5
    state_seed: int = 11
    entangler: str = "cz"
    bits: str | None = None
    circuit_file: str | None = None
    k: int = 1
    dt: float = 1e-3
    t_max: float = 3.0
    order: int | str = 1
    solver: str = "closed_form"
    pinv_cutoff: float | None = None
    mode: str = "exact"
    shots: int | None = None
    measure_seed: int | None = None
    observables: tuple[str, ...] = ("Z0",)
    methods: tuple[str, ...] = ("tqs", "exact")

    @property
    def measurement(self) -> Mode:
        if self.mode == "sampled":
            return Mode.sampled(self.shots, self.measure_seed if self.measure_seed is not None else 0)
        return EXACT

    @property
    def step_config(self) -> StepConfig:
        return with_steps(
            StepConfig(dt=self.dt, order=self.order, solver=self.solver, pinv_cutoff=self.pinv_cutoff),
            self.t_max,
        )

    # text form ------------------------------------------------------------
    @classmethod
    def from_text(cls, text: str, source: str | None = None, base_dir: Path | None = None):
        sections = parse_sections(text, source)
        known = {"hamiltonian", "state", "ansatz", "evolution", "measurement", "output"}
        for name, sec in sections.items():
            if name not in known:
                raise ConfigError(f"unknown section [{name}]", sec.lineno, source)
        empty = Section("", 0, source=source)
        hs = sections.get("hamiltonian", empty)
        st = sections.get("state", empty)
        an = sections.get("ansatz", empty)
        ev = sections.get("evolution", empty)
        me = sections.get("measurement", empty)
        out = sections.get("output", empty)

        def resolve(p):
            if p is None or base_dir is None:
                return p
            return str((base_dir / p).resolve()) if not Path(p).is_absolute() else p

        kw = {}
        if "file" in hs:
            kw["hamiltonian_file"] = resolve(hs.get("file"))
            kw["hamiltonian"] = "file"
        else:
            kw["hamiltonian"] = hs.get_choice("name", BUILTINS, "heisenberg2")
        kw["state_kind"] = st.get_choice("kind", {"random-layers", "basis", "circuit"}, "random-layers")
        kw["n_layers"] = st.get_int("n_layers", 5)
        kw["state_seed"] = st.get_int("seed", 11)
        kw["entangler"] = st.get_choice("entangler", {"cz", "cnot"}, "cz")
        kw["bits"] = st.get("bits", None)
        kw["circuit_file"] = resolve(st.get("file", None))
        if kw["state_kind"] == "basis" and not kw["bits"]:
            st.fail("bits", "kind = basis needs a bits string")
        if kw["state_kind"] == "circuit" and not kw["circuit_file"]:
            st.fail("file", "kind = circuit needs a circuit file")
        kw["k"] = an.get_int("k", 1)
        if kw["k"] < 0:
            an.fail("k", "must be non-negative")
        kw["dt"] = ev.get_float("dt", 1e-3)
        kw["t_max"] = ev.get_float("t_max", 3.0)
        order = ev.get_choice("order", {"1", "2", "exact_unitary"}, "1")
        kw["order"] = int(order) if order.isdigit() else order
        kw["solver"] = ev.get_choice("solver", {"closed_form", "pencil"}, "closed_form")
        kw["pinv_cutoff"] = ev.get_float("pinv_cutoff", None)
        if not kw["dt"] > 0:
            ev.fail("dt", "must be positive")
        if kw["t_max"] < 0:
            ev.fail("t_max", "must be non-negative")
        ratio = kw["t_max"] / kw["dt"]
        if abs(ratio - round(ratio)) > 1e-6 * max(1.0, ratio):
            ev.fail("t_max", f"t_max / dt = {ratio} is not an integer step count")
        kw["mode"] = me.get_choice("mode", {"exact", "sampled"}, "exact")
        kw["shots"] = me.get_int("shots", None)
        kw["measure_seed"] = me.get_int("seed", None)
        if kw["mode"] == "sampled" and not (kw["shots"] and kw["shots"] > 0):
            me.fail("shots", "sampled mode needs a positive shot count")
        kw["observables"] = tuple(out.get_list("observables", ["Z0"]))
        kw["methods"] = tuple(out.get_list("methods", ["tqs", "exact"]))
        for m in kw["methods"]:
            if m not in METHODS:
                out.fail("methods", f"unknown method {m!r}; choose from {list(METHODS)}")
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_text(path.read_text(), source=str(path), base_dir=path.parent)

    def to_text(self) -> str:
        lines = ["[hamiltonian]"]
        if self.hamiltonian_file:
            lines.append(f"file = {self.hamiltonian_file}")
        else:
            lines.append(f"name = {self.hamiltonian}")
        lines += ["", "[state]", f"kind = {self.state_kind}"]
        if self.state_kind == "random-layers":
            lines += [f"n_layers = {self.n_layers}", f"seed = {self.state_seed}", f"entangler = {self.entangler}"]
        elif self.state_kind == "basis":
            lines.append(f"bits = {self.bits}")
        else:
            lines.append(f"file = {self.circuit_file}")
        lines += ["", "[ansatz]", f"k = {self.k}"]
        lines += ["", "[evolution]", f"dt = {self.dt!r}", f"t_max = {self.t_max!r}"]
        lines += [f"order = {self.order}", f"solver = {self.solver}"]
        if self.pinv_cutoff is not None:
            lines.append(f"pinv_cutoff = {self.pinv_cutoff!r}")
        lines += ["", "[measurement]", f"mode = {self.mode}"]
        if self.mode == "sampled":
            lines += [f"shots = {self.shots}", f"seed = {self.measurement.seed}"]
        lines += ["", "[output]", "observables = " + ", ".join(self.observables)]
        lines.append("methods = " + ", ".join(self.methods))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# building blocks

def load_hamiltonian(cfg: ExperimentConfig) -> Hamiltonian:
    if cfg.hamiltonian_file:
        return parse_hamiltonian(Path(cfg.hamiltonian_file).read_text())
    return builtin(cfg.hamiltonian)


def circuit_spec(cfg: ExperimentConfig, n_qubits: int) -> CircuitSpec | None:
    if cfg.state_kind == "random-layers":
        return CircuitSpec.random_layers(n_qubits, cfg.n_layers, cfg.state_seed, cfg.entangler)
    if cfg.state_kind == "circuit":
        spec = CircuitSpec.from_text(Path(cfg.circuit_file).read_text())
        if spec.n_qubits != n_qubits:
            raise ConfigError(f"circuit has {spec.n_qubits} qubits, Hamiltonian has {n_qubits}")
        return spec
    return None


def initial_state(cfg: ExperimentConfig, n_qubits: int) -> StateVector:
    spec = circuit_spec(cfg, n_qubits)
    if spec is not None:
        return prepare(spec)
    if len(cfg.bits) != n_qubits:
        raise ConfigError(f"bits {cfg.bits!r} do not match {n_qubits} qubits")
    return StateVector.basis_state(cfg.bits)


def observable_hamiltonians(cfg: ExperimentConfig, n_qubits: int) -> dict[str, Hamiltonian]:
    out = {}
    for text in cfg.observables:
        p = PauliString.from_sparse(text, n_qubits)
        out[text] = Hamiltonian.from_terms(n_qubits, [(1.0, p)], allow_identity=True)
    return out


def _oracle_ok(n_qubits: int) -> bool:
    return n_qubits <= ORACLE_QUBIT_LIMIT


# ---------------------------------------------------------------------------
# phases

def run_quantum_phase(cfg: ExperimentConfig, outdir) -> dict:
    """Prepare the state, build the basis, measure and write overlaps."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    h = load_hamiltonian(cfg)
    psi = initial_state(cfg, h.n_qubits)
    basis = build_cumulative_moments(h, cfg.k)
    order = cfg.order
    if order == "exact_unitary" and not _oracle_ok(h.n_qubits):
        raise ValueError(f"exact_unitary needs the dense oracle (n <= {ORACLE_QUBIT_LIMIT})")
    ov = compute_overlaps(
        basis,
        h,
        psi,
        mode=cfg.measurement,
        include_J=order == 2,
        observables=observable_hamiltonians(cfg, h.n_qubits),
        r_dt=cfg.dt if order == "exact_unitary" else None,
    )
    (outdir / BASIS_FILE).write_text(basis.to_text())
    ov.save(outdir / OVERLAP_FILE)
    (outdir / CONFIG_FILE).write_text(cfg.to_text())
    spec = circuit_spec(cfg, h.n_qubits)
    if spec is not None:
        (outdir / CIRCUIT_FILE).write_text(spec.to_text())
    return {
        "n_qubits": h.n_qubits,
        "hamiltonian_terms": len(h),
        "basis_size": len(basis),
        "basis_id": basis.basis_id,
        "basis_levels": [basis.levels.count(i) for i in range(max(basis.levels) + 1)],
        "closed": closure_reached(basis, h),
        "circuit_count": circuit_count(basis, h),
        "circuit_count_with_J": circuit_count(basis, h, include_J=True),
    }


def run_classical_phase(cfg: ExperimentConfig, outdir) -> dict[str, Trajectory]:
    """Evolve from the overlap file on disk. No statevector access."""
    outdir = Path(outdir)
    ov = OverlapSet.load(outdir / OVERLAP_FILE)
    sc = cfg.step_config
    alpha0 = initial_alpha(ov.dimension)
    trajs = {}
    if "tqs" in cfg.methods:
        trajs["tqs"] = evolve(alpha0, ov, sc)
    if "qas" in cfg.methods:
        trajs["qas"] = integrate(alpha0, ov, sc.dt, sc.n_steps, "rk4", pinv_cutoff=sc.pinv_cutoff)
    return trajs


def score_against_exact(
    cfg: ExperimentConfig, trajs: dict[str, Trajectory], times: np.ndarray
) -> Trajectory:
    """Exact reference series; adds fidelity and error columns to ``trajs`` in place."""
    h = load_hamiltonian(cfg)
    if not _oracle_ok(h.n_qubits):
        raise ValueError(f"exact method needs n <= {ORACLE_QUBIT_LIMIT} qubits, got {h.n_qubits}")
    psi = initial_state(cfg, h.n_qubits)
    basis = build_cumulative_moments(h, cfg.k)
    prop = Propagator(h)
    obs = {name: dense_matrix(o) for name, o in observable_hamiltonians(cfg, h.n_qubits).items()}
    exact_states = np.column_stack([prop.apply(psi.amplitudes, t) for t in times])
    ref = Trajectory(times, np.zeros((len(times), 0), dtype=complex), np.full(len(times), np.nan), "exact")
    for name, mat in obs.items():
        ref.add_column(name, np.einsum("it,ij,jt->t", exact_states.conj(), mat, exact_states).real)
    chi = basis_state_matrix(basis, psi)
    for traj in trajs.values():
        approx = chi @ traj.alphas.T
        approx = approx / np.linalg.norm(approx, axis=0)
        traj.add_column("fidelity", np.abs(np.einsum("it,it->t", approx.conj(), exact_states)) ** 2)
        for name in obs:
            traj.add_column(f"exact_{name}", ref.columns[name])
    return ref


def summarize(trajs: dict[str, Trajectory], observables) -> list[dict]:
    rows = []
    for method, tr in trajs.items():
        row = {"method": method}
        if "fidelity" in tr.columns:
            row["terminal_fidelity"] = float(tr.columns["fidelity"][-1])
            row["min_fidelity"] = float(tr.columns["fidelity"].min())
        if method != "exact":
            for name in observables:
                if f"exact_{name}" in tr.columns:
                    err = np.abs(tr.columns[name] - tr.columns[f"exact_{name}"]).max()
                    row[f"max_error_{name}"] = float(err)
            obj = tr.objectives[1:]
            if len(obj) and np.isfinite(obj).any():
                row["max_objective"] = float(np.nanmax(obj))
        rows.append(row)
    return rows


def _write_rows(path: Path, rows: list[dict]) -> None:
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in r.items()})


def run(cfg: ExperimentConfig, outdir, phase: str = "all") -> Path:
    """Execute a run. ``phase`` is ``quantum``, ``classical`` or ``all``."""
    if phase not in ("quantum", "classical", "all"):
        raise ValueError(f"unknown phase {phase!r}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest_path = outdir / MANIFEST_FILE
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}
    if phase in ("quantum", "all"):
        log.info("quantum phase -> %s", outdir)
        manifest = _base_manifest(cfg)
        manifest["counts"] = run_quantum_phase(cfg, outdir)
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    if phase == "quantum":
        return outdir
    if not (outdir / OVERLAP_FILE).exists():
        raise FileNotFoundError(f"{outdir / OVERLAP_FILE} missing; run the quantum phase first")
    log.info("classical phase <- %s", outdir / OVERLAP_FILE)
    trajs = run_classical_phase(cfg, outdir)
    for method, tr in trajs.items():
        tr.to_csv(outdir / f"trajectory_{method}.csv")
    if "exact" in cfg.methods:
        times = cfg.step_config.dt * np.arange(cfg.step_config.n_steps + 1)
        ref = score_against_exact(cfg, trajs, times)
        ref.to_csv(outdir / "trajectory_exact.csv")
        # rewrite with the enrichment columns
        for method, tr in trajs.items():
            tr.to_csv(outdir / f"trajectory_{method}.csv")
    rows = summarize(trajs, cfg.observables)
    _write_rows(outdir / SUMMARY_FILE, rows)
    manifest.setdefault("outputs", {})
    manifest["outputs"] = {
        "trajectories": sorted(f"trajectory_{m}.csv" for m in cfg.methods),
        "summary": SUMMARY_FILE,
    }
    manifest["summary"] = rows
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return outdir


def _base_manifest(cfg: ExperimentConfig) -> dict:
    sc = cfg.step_config
    h_note = NOTES.get(cfg.hamiltonian, f"from file {cfg.hamiltonian_file}")
    return {
        "tool": "tqs",
        "versions": {
            "tqs": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "formats": {"trajectory_csv": CSV_SCHEMA_VERSION, "overlaps": FORMAT_VERSION},
        "seeds": {
            "state": cfg.state_seed if cfg.state_kind == "random-layers" else None,
            "measurement": cfg.measurement.seed,
            "rng": "numpy PCG64",
        },
        "hamiltonian": {"name": cfg.hamiltonian, "reading": h_note},
        "evolution": {
            "dt": sc.dt,
            "n_steps": sc.n_steps,
            "t_max": cfg.t_max,
            "order": sc.order,
            "solver": sc.solver,
            "pinv_cutoff": sc.pinv_cutoff,
        },
        "mode": str(cfg.measurement),
        "config": asdict(cfg),
    }


# ---------------------------------------------------------------------------
# sweeps

def _aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    ov = np.vdot(b, a)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - ph * b))


def step_consistency(ov: OverlapSet, sc: StepConfig) -> float:
    """``|| one step of dt - two steps of dt/2 ||`` from the reference coefficients."""
    a0 = initial_alpha(ov.dimension)
    one, _ = step(a0, ov, replace(sc, n_steps=1))
    half = replace(sc, dt=sc.dt / 2, n_steps=1)
    two, _ = step(a0, ov, half)
    two, _ = step(two, ov, half)
    return _aligned_distance(one, two)


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def sweep(cfg: ExperimentConfig, parameter: str, values, outdir) -> Path:
    """One run per value plus ``sweep.csv`` (per-value metrics) and ``sweep_fit.csv``."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    exact_ov = None
    for v in values:
        if parameter == "dt":
            sub = replace(cfg, dt=float(v))
        elif parameter == "k":
            sub = replace(cfg, k=int(v))
        else:
            seed = cfg.measure_seed if cfg.measure_seed is not None else 0
            sub = replace(cfg, mode="sampled", shots=int(v), measure_seed=seed)
        rundir = outdir / f"{parameter}_{v}"
        run(sub, rundir)
        row = {parameter: v}
        summary = json.loads((rundir / MANIFEST_FILE).read_text())
        row["basis_size"] = summary["counts"]["basis_size"]
        for r in summary["summary"]:
            for key, val in r.items():
                if key != "method":
                    row[f"{r['method']}_{key}"] = val
        ov = OverlapSet.load(rundir / OVERLAP_FILE)
        if parameter == "dt":
            row["step_consistency"] = step_consistency(ov, sub.step_config)
        if parameter == "shots":
            if exact_ov is None:
                h = load_hamiltonian(cfg)
                exact_ov = compute_overlaps(
                    build_cumulative_moments(h, cfg.k), h, initial_state(cfg, h.n_qubits)
                )
            row["overlap_error_std"] = overlap_error_std(ov, exact_ov)
        rows.append(row)
    _write_rows(outdir / "sweep.csv", rows)
    fits = []
    if parameter == "dt":
        fits.append({"quantity": "step_consistency", "versus": "dt",
                     "slope": loglog_slope(values, [r["step_consistency"] for r in rows])})
    if parameter == "shots":
        fits.append({"quantity": "overlap_error_std", "versus": "shots",
                     "slope": loglog_slope(values, [r["overlap_error_std"] for r in rows])})
    if parameter == "k" and rows and "tqs_min_fidelity" in rows[0]:
        mins = [r["tqs_min_fidelity"] for r in rows]
        fits.append({"quantity": "tqs_min_fidelity", "versus": "k",
                     "monotone_non_decreasing": bool(np.all(np.diff(mins) >= -1e-9))})
    if fits:
        _write_rows(outdir / "sweep_fit.csv", fits)
    return outdir


def overlap_error_std(sampled: OverlapSet, exact: OverlapSet) -> float:
    """Std of the independent real components of the ``E`` and ``D`` entry errors.

    Uses the strict upper triangle (real and imaginary parts) of both matrices
    plus the real diagonal of ``D``; the diagonal of ``E`` is exactly one.
    """
    iu = np.triu_indices(exact.dimension, 1)
    parts = []
    for s, e in ((sampled.E, exact.E), (sampled.D, exact.D)):
        d = (s - e)[iu]
        parts += [d.real, d.imag]
    parts.append(np.diag(sampled.D - exact.D).real)
    return float(np.std(np.concatenate(parts)))
