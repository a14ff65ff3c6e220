"""Overlap matrices over a moment basis, measured as Pauli expectations.

Every matrix element ``<chi_m| c P |chi_n> = c <psi| R_m P R_n |psi>`` reduces to
a phase (handled classically) times the expectation of one phase-free Pauli
string in the reference state. Each distinct string is one "circuit": it is
evaluated once, exactly or with a binomial shot estimate, and reused by every
element that needs it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .moments import MomentBasis
from .pauli import Hamiltonian, PauliString, hamiltonian_square_terms, multiply
from .statevec import StateVector, expectation, sample_expectation

FORMAT_TAG = "tqs-overlaps"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Mode:
    """``exact`` or ``sampled`` with a per-string shot budget and RNG seed."""

    kind: str = "exact"
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.kind!r}")
        if self.kind == "sampled" and (self.shots is None or self.shots <= 0):
            raise ValueError("sampled mode needs a positive shot count")

    @classmethod
    def sampled(cls, shots: int, seed: int) -> "Mode":
        return cls("sampled", int(shots), int(seed))

    @property
    def is_sampled(self) -> bool:
        return self.kind == "sampled"

    def __str__(self) -> str:
        if self.is_sampled:
            return f"sampled(shots={self.shots}, seed={self.seed})"
        return "exact"


EXACT = Mode()


@dataclass
class OverlapSet:
    E: np.ndarray
    D: np.ndarray
    J: np.ndarray | None = None
    mode: Mode = EXACT
    basis_id: str = ""
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    R: np.ndarray | None = None
    R_dt: float | None = None

    @property
    def dimension(self) -> int:
        return self.E.shape[0]

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"{FORMAT_TAG} {FORMAT_VERSION}\n")
        buf.write(f"dimension {self.dimension}\n")
        buf.write(f"mode {self.mode.kind}\n")
        if self.mode.is_sampled:
            buf.write(f"shots {self.mode.shots}\nseed {self.mode.seed}\n")
        buf.write(f"basis {self.basis_id or '-'}\n")
        if self.R is not None and self.R_dt is not None:
            buf.write(f"dt_R {self.R_dt!r}\n")
        blocks = [("matrix", "E", self.E), ("matrix", "D", self.D)]
        if self.J is not None:
            blocks.append(("matrix", "J", self.J))
        if self.R is not None:
            blocks.append(("matrix", "R", self.R))
        blocks += [("observable", name, m) for name, m in self.observables.items()]
        for kind, name, mat in blocks:
            buf.write(f"{kind} {name}\n")
            for row in mat:
                buf.write(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) + "\n")
        buf.write("end\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "OverlapSet":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or lines[0].split()[0] != FORMAT_TAG:
            raise ValueError("not an overlap-set file")
        version = int(lines[0].split()[1])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported overlap-set version {version}")
        header: dict[str, str] = {}
        mats: dict[tuple[str, str], np.ndarray] = {}
        i = 1
        m = None
        while i < len(lines):
            key, _, rest = lines[i].partition(" ")
            if key == "end":
                break
            if key in ("matrix", "observable"):
                if m is None:
                    raise ValueError("dimension must precede matrices")
                rows = []
                for row in lines[i + 1 : i + 1 + m]:
                    toks = row.split()
                    if len(toks) != m:
                        raise ValueError(f"{key} {rest}: expected {m} entries per row")
                    rows.append([complex(*map(float, t.split(","))) for t in toks])
                mats[(key, rest.strip())] = np.array(rows, dtype=complex)
                i += m + 1
                continue
            header[key] = rest.strip()
            if key == "dimension":
                m = int(rest)
            i += 1
        if header.get("mode") == "sampled":
            mode = Mode.sampled(int(header["shots"]), int(header["seed"]))
        else:
            mode = EXACT
        basis_id = header.get("basis", "")
        return cls(
            E=mats[("matrix", "E")],
            D=mats[("matrix", "D")],
            J=mats.get(("matrix", "J")),
            mode=mode,
            basis_id="" if basis_id == "-" else basis_id,
            observables={n: v for (k, n), v in mats.items() if k == "observable"},
            R=mats.get(("matrix", "R")),
            R_dt=float(header["dt_R"]) if "dt_R" in header else None,
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "OverlapSet":
        with open(path) as fh:
            return cls.from_text(fh.read())


# ---------------------------------------------------------------------------
# element plans

@dataclass
class _Plan:
    """Sparse description of one Hermitian matrix in terms of Pauli expectations."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    string_ids: np.ndarray


def _plan(
    basis: MomentBasis,
    terms: Sequence[tuple[complex, PauliString]],
    registry: dict[tuple[int, int], int],
    strings: list[PauliString],
) -> _Plan:
    """Upper-triangle entries ``sum_c c * phase(R_m P R_n) * <rep>``."""
    reps = basis.reps
    rows, cols, weights, ids = [], [], [], []
    phases = (1, 1j, -1, -1j)
    left = [[(c, multiply(rm, p)) for c, p in terms] for rm in reps]
    for m in range(len(reps)):
        for c, rp in left[m]:
            for n in range(m, len(reps)):
                prod = multiply(rp, reps[n])
                key = prod.key
                sid = registry.get(key)
                if sid is None:
                    sid = registry[key] = len(strings)
                    strings.append(prod.canonical())
                rows.append(m)
                cols.append(n)
                weights.append(c * phases[prod.phase_exp])
                ids.append(sid)
    return _Plan(
        len(reps),
        np.array(rows, dtype=np.int64),
        np.array(cols, dtype=np.int64),
        np.array(weights, dtype=complex),
        np.array(ids, dtype=np.int64),
    )


def _assemble(plan: _Plan, values: np.ndarray) -> np.ndarray:
    m = plan.dim
    flat = plan.rows * m + plan.cols
    contrib = plan.weights * values[plan.string_ids]
    upper = np.bincount(flat, weights=contrib.real, minlength=m * m) + 1j * np.bincount(
        flat, weights=contrib.imag, minlength=m * m
    )
    upper = upper.reshape(m, m)
    diag = np.diag(upper)
    out = upper + np.triu(upper, 1).conj().T
    out[np.diag_indices(m)] = diag.real
    return out


def _identity_terms(n_qubits: int) -> list[tuple[complex, PauliString]]:
    return [(1.0, PauliString.identity(n_qubits))]


class Estimator:
    """Pauli expectation oracle with a per-string cache.

    In sampled mode the strings are estimated in ``(z_mask, x_mask)`` order from
    a single generator seeded by ``mode.seed``, so results do not depend on the
    order in which matrices request them.
    """

    def __init__(self, psi: StateVector, mode: Mode = EXACT):
        self.psi = psi
        self.mode = mode
        self.cache: dict[tuple[int, int], float] = {}
        self._rng = (
            np.random.Generator(np.random.PCG64(mode.seed)) if mode.is_sampled else None
        )

    def measure(self, strings: Iterable[PauliString]) -> None:
        pending = sorted({p.key: p for p in strings if p.key not in self.cache}.items())
        for key, p in pending:
            if p.is_identity:
                self.cache[key] = 1.0
            elif self._rng is not None:
                self.cache[key] = sample_expectation(p, self.psi, self.mode.shots, self._rng)
            else:
                self.cache[key] = expectation(p, self.psi)

    def values(self, strings: Sequence[PauliString]) -> np.ndarray:
        self.measure(strings)
        return np.array([self.cache[p.key] for p in strings])


def _check(basis: MomentBasis, n_qubits: int) -> None:
    if basis.n_qubits != n_qubits:
        raise ValueError(f"qubit count mismatch: basis {basis.n_qubits} vs {n_qubits}")


def matrix_elements(
    basis: MomentBasis,
    terms: Sequence[tuple[complex, PauliString]],
    estimator: Estimator,
) -> np.ndarray:
    """``M_mn = <chi_m| sum_c c P |chi_n>`` for a Hermitian Pauli sum."""
    _check(basis, estimator.psi.n_qubits)
    registry: dict[tuple[int, int], int] = {}
    strings: list[PauliString] = []
    plan = _plan(basis, terms, registry, strings)
    return _assemble(plan, estimator.values(strings))


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def compute_overlaps(
    basis: MomentBasis,
    h: Hamiltonian,
    psi: StateVector,
    mode: Mode = EXACT,
    include_J: bool = False,
    observables: dict[str, Hamiltonian] | None = None,
    r_dt: float | None = None,
) -> OverlapSet:
    """Measure ``E``, ``D`` and optionally ``J`` and observable matrices.

    With ``r_dt`` set, the exact-unitary matrix ``R`` for that step is also
    attached (computed by the dense oracle, not estimated).
    """
    _check(basis, psi.n_qubits)
    if h.n_qubits != psi.n_qubits:
        raise ValueError("Hamiltonian and state qubit counts differ")
    est = Estimator(psi, mode)
    registry: dict[tuple[int, int], int] = {}
    strings: list[PauliString] = []
    plans = {
        "E": _plan(basis, _identity_terms(h.n_qubits), registry, strings),
        "D": _plan(basis, h.terms, registry, strings),
    }
    if include_J:
        plans["J"] = _plan(basis, hamiltonian_square_terms(h), registry, strings)
    for name, obs in (observables or {}).items():
        plans["obs:" + name] = _plan(basis, obs.terms, registry, strings)
    values = est.values(strings)
    mats = {name: _assemble(plan, values) for name, plan in plans.items()}
    if mode.is_sampled:
        mats = {name: _hermitize(m) for name, m in mats.items()}
    return OverlapSet(
        E=mats["E"],
        D=mats["D"],
        J=mats.get("J"),
        mode=mode,
        basis_id=basis.basis_id,
        observables={k[4:]: v for k, v in mats.items() if k.startswith("obs:")},
        R=compute_R(basis, h, psi, r_dt) if r_dt is not None else None,
        R_dt=r_dt,
    )


def required_strings(
    basis: MomentBasis, h: Hamiltonian, include_J: bool = False, include_D: bool = True
) -> set[tuple[int, int]]:
    """Keys of the distinct Pauli strings whose expectations the matrices need."""
    registry: dict[tuple[int, int], int] = {}
    strings: list[PauliString] = []
    _plan(basis, _identity_terms(h.n_qubits), registry, strings)
    if include_D:
        _plan(basis, h.terms, registry, strings)
    if include_J:
        _plan(basis, hamiltonian_square_terms(h), registry, strings)
    return set(registry)


def circuit_count(basis: MomentBasis, h: Hamiltonian, include_J: bool = False) -> int:
    """Distinct non-identity Pauli expectations needed for ``E``, ``D`` (and ``J``)."""
    return len(required_strings(basis, h, include_J) - {(0, 0)})


def compute_R(basis: MomentBasis, h: Hamiltonian, psi: StateVector, dt: float) -> np.ndarray:
    """``R_mn = <chi_m| exp(-i H dt) |chi_n>`` via the dense oracle."""
    from .oracle import Propagator, basis_state_matrix

    _check(basis, psi.n_qubits)
    chi = basis_state_matrix(basis, psi)
    return chi.conj().T @ Propagator(h).apply(chi, dt)
