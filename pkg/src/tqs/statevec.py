"""Dense statevector backend standing in for the quantum device.

Amplitude index bit ``q`` is qubit ``q`` (qubit 0 least significant). Rotations
are ``R_a(theta) = exp(-i theta a / 2)``. Random circuit angles come from
``numpy.random.Generator(PCG64(seed))`` drawn uniformly on ``[0, 2 pi)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import PauliString, apply_pauli_array

NORM_TOL = 1e-10
ENTANGLERS = ("cz", "cnot")


class StateVector:
    """Normalized n-qubit pure state. Amplitudes are read-only."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, n_qubits: int | None = None, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(len(amps)))) if len(amps) else 0
        if len(amps) != 1 << n or n < 1:
            raise ValueError(f"amplitude length {len(amps)} is not 2**n with n >= 1")
        if n_qubits is not None and n_qubits != n:
            raise ValueError(f"expected {1 << n_qubits} amplitudes, got {len(amps)}")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm**2 - 1) > NORM_TOL:
            raise ValueError(f"state not normalized (norm^2 = {norm**2:.3e})")
        amps.setflags(write=False)
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def basis_state(cls, bits: str | int, n_qubits: int | None = None) -> "StateVector":
        """``|b>`` from a bit string (qubit 0 leftmost) or an integer index."""
        if isinstance(bits, str):
            if not bits or set(bits) - {"0", "1"}:
                raise ValueError(f"invalid bit string {bits!r}")
            n_qubits = len(bits)
            index = sum(int(b) << q for q, b in enumerate(bits))
        else:
            if n_qubits is None:
                raise ValueError("n_qubits required for an integer index")
            index = int(bits)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        """Haar-random state (complex Gaussian, normalized)."""
        dim = 1 << n_qubits
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return cls(v, normalize=True)

    def __len__(self) -> int:
        return len(self.amplitudes)

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "re", "im"])
            for i, a in enumerate(self.amplitudes):
                w.writerow([i, repr(float(a.real)), repr(float(a.imag))])

    @classmethod
    def from_csv(cls, path) -> "StateVector":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        amps = np.zeros(len(rows), dtype=complex)
        for r in rows:
            amps[int(r["index"])] = complex(float(r["re"]), float(r["im"]))
        return cls(amps)


def _check_dims(n_a: int, n_b: int) -> None:
    if n_a != n_b:
        raise ValueError(f"qubit count mismatch: {n_a} vs {n_b}")


# ---------------------------------------------------------------------------
# circuits

@dataclass(frozen=True)
class Layer:
    """Per-qubit ``(theta_x, theta_y, theta_z)`` then a list of two-qubit gates."""

    angles: tuple[tuple[float, float, float], ...]
    entanglers: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    layers: tuple[Layer, ...] = ()
    entangler: str = "cz"
    seed: int | None = None

    def __post_init__(self):
        if self.entangler not in ENTANGLERS:
            raise ValueError(f"entangler must be one of {ENTANGLERS}, got {self.entangler!r}")
        for layer in self.layers:
            if len(layer.angles) != self.n_qubits:
                raise ValueError("each layer needs one angle triple per qubit")
            for c, t in layer.entanglers:
                if c == t:
                    raise ValueError(f"control equals target ({c})")
                if not (0 <= c < self.n_qubits and 0 <= t < self.n_qubits):
                    raise ValueError(f"entangler ({c}, {t}) out of range")

    @classmethod
    def random_layers(
        cls, n_qubits: int, n_layers: int, seed: int, entangler: str = "cz"
    ) -> "CircuitSpec":
        """Randomized rotation layers, each followed by a nearest-neighbour entangling chain."""
        rng = np.random.Generator(np.random.PCG64(seed))
        chain = tuple((q, q + 1) for q in range(n_qubits - 1))
        layers = []
        for _ in range(n_layers):
            theta = rng.uniform(0.0, 2 * np.pi, size=(n_qubits, 3))
            layers.append(Layer(tuple(tuple(map(float, row)) for row in theta), chain))
        return cls(n_qubits, tuple(layers), entangler=entangler, seed=seed)

    # text form: INI-style, same dialect as the harness config
    def to_text(self) -> str:
        lines = ["[circuit]", f"n_qubits = {self.n_qubits}", f"entangler = {self.entangler}"]
        if self.seed is not None:
            lines.append(f"seed = {self.seed}")
        for i, layer in enumerate(self.layers):
            lines.append("")
            lines.append(f"[layer.{i}]")
            angles = "; ".join(" ".join(repr(a) for a in triple) for triple in layer.angles)
            lines.append(f"angles = {angles}")
            lines.append("entanglers = " + " ".join(f"{c}-{t}" for c, t in layer.entanglers))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitSpec":
        from .config import parse_sections

        sections = parse_sections(text)
        head = sections.get("circuit")
        if head is None:
            raise ValueError("circuit file needs a [circuit] section")
        n = head.get_int("n_qubits")
        layer_names = sorted(
            (s for s in sections if s.startswith("layer.")), key=lambda s: int(s.split(".")[1])
        )
        layers = []
        for name in layer_names:
            sec = sections[name]
            triples = []
            for chunk in sec.get("angles").split(";"):
                vals = tuple(float(v) for v in chunk.split())
                if len(vals) != 3:
                    sec.fail("angles", "each qubit needs three angles")
                triples.append(vals)
            ent = []
            for tok in sec.get("entanglers", "").split():
                c, t = tok.split("-")
                ent.append((int(c), int(t)))
            layers.append(Layer(tuple(triples), tuple(ent)))
        seed = head.get("seed", None)
        return cls(
            n,
            tuple(layers),
            entangler=head.get("entangler", "cz"),
            seed=int(seed) if seed is not None else None,
        )


def _rx(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def apply_one_qubit(gate: np.ndarray, q: int, amps: np.ndarray, n_qubits: int) -> np.ndarray:
    psi = amps.reshape(1 << (n_qubits - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", gate, psi).reshape(-1)


def _apply_controlled(kind: str, c: int, t: int, amps: np.ndarray) -> np.ndarray:
    idx = np.arange(len(amps))
    on = ((idx >> c) & 1).astype(bool)
    out = amps.copy()
    if kind == "cz":
        out[on & (((idx >> t) & 1) == 1)] *= -1
    else:
        out[on] = amps[idx[on] ^ (1 << t)]
    return out


def prepare(spec: CircuitSpec) -> StateVector:
    """Run the circuit on ``|0...0>``."""
    amps = np.zeros(1 << spec.n_qubits, dtype=complex)
    amps[0] = 1.0
    for layer in spec.layers:
        for q, (tx, ty, tz) in enumerate(layer.angles):
            # Rx first, then Ry, then Rz
            amps = apply_one_qubit(_rz(tz) @ _ry(ty) @ _rx(tx), q, amps, spec.n_qubits)
        for c, t in layer.entanglers:
            amps = _apply_controlled(spec.entangler, c, t, amps)
    return StateVector(amps, normalize=True)


# ---------------------------------------------------------------------------
# Pauli action and expectations

def apply_pauli(p: PauliString, psi: StateVector) -> StateVector:
    _check_dims(p.n_qubits, psi.n_qubits)
    return StateVector(apply_pauli_array(p, psi.amplitudes))


def expectation(p: PauliString, psi: StateVector) -> float:
    """``<psi|p|psi>`` for a phase-free (Hermitian) Pauli string."""
    if p.phase_exp != 0:
        raise ValueError(f"expectation needs a canonical Pauli string, got {p!r}")
    _check_dims(p.n_qubits, psi.n_qubits)
    if p.is_identity:
        return 1.0
    v = np.vdot(psi.amplitudes, apply_pauli_array(p, psi.amplitudes))
    return float(v.real)


def sample_expectation(
    p: PauliString, psi: StateVector, shots: int, rng: np.random.Generator
) -> float:
    """Shot estimate ``2k/shots - 1`` with ``k ~ Binomial(shots, (1 + <p>) / 2)``."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    prob = min(max((1.0 + expectation(p, psi)) / 2.0, 0.0), 1.0)
    k = rng.binomial(shots, prob)
    return 2.0 * k / shots - 1.0


def inner(psi: StateVector, phi: StateVector) -> complex:
    _check_dims(psi.n_qubits, phi.n_qubits)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def fidelity(psi: StateVector, phi: StateVector) -> float:
    return abs(inner(psi, phi)) ** 2


def state_from_array(amps: Sequence[complex] | np.ndarray) -> StateVector:
    return StateVector(amps, normalize=True)
