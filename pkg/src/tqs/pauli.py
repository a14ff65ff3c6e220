"""Symplectic Pauli strings with exact phase tracking, and Pauli-sum Hamiltonians.

A string is stored as two integer bit masks plus a power of ``i``. Bit ``q`` of
``x`` (``z``) is set when qubit ``q`` carries an X (Z) factor; a qubit with both
bits set carries Y. The dense matrix is

    i**phase * P_{n-1} (x) ... (x) P_1 (x) P_0

so qubit 0 is the least-significant bit of a basis-state index. Internally each
single-qubit factor is written as ``i**(x*z) X**x Z**z``, which is the
convention ``Y = i X Z``. Every phase rule below follows from that identity.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: Largest qubit count for which dense matrices are built.
ORACLE_QUBIT_LIMIT = 12

#: Collected coefficients with smaller magnitude are dropped.
COEFF_TOL = 1e-12

_PHASES = (1, 1j, -1, -1j)
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}
_SPARSE_TOKEN = re.compile(r"^([IXYZ])(\d+)$")


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=False)
class PauliString:
    """An n-qubit Pauli operator ``i**phase_exp * P``."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full or self.x_mask < 0 or self.z_mask < 0:
            raise ValueError("mask has bits outside the qubit range")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # construction ----------------------------------------------------------
    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a dense label such as ``"XZIY"`` (qubit 0 leftmost).

        An optional leading ``+``, ``-``, ``i``, ``+i`` or ``-i`` sets the phase.
        """
        label = label.strip()
        phase = 0
        for prefix, p in (("+i", 1), ("-i", 3), ("i", 1), ("-", 2), ("+", 0)):
            if label.startswith(prefix):
                phase, label = p, label[len(prefix):]
                break
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for q, ch in enumerate(label):
            try:
                bx, bz = _BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(label), x, z, phase)

    @classmethod
    def from_sparse(cls, text: str, n_qubits: int) -> "PauliString":
        """Parse the sparse form ``"X0 Z1 Y3"``; ``"I"`` or ``""`` is the identity."""
        x = z = 0
        seen = set()
        for tok in text.split():
            if tok == "I":
                continue
            m = _SPARSE_TOKEN.match(tok)
            if m is None:
                raise ValueError(f"invalid sparse Pauli token {tok!r}")
            letter, q = m.group(1), int(m.group(2))
            if q >= n_qubits:
                raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")
            if q in seen:
                raise ValueError(f"qubit {q} repeated in {text!r}")
            seen.add(q)
            bx, bz = _BITS[letter]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z)

    # views -----------------------------------------------------------------
    def letter(self, q: int) -> str:
        return _LETTERS[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]

    @property
    def label(self) -> str:
        """Dense label, qubit 0 leftmost, phase omitted."""
        return "".join(self.letter(q) for q in range(self.n_qubits))

    @property
    def sparse(self) -> str:
        toks = [f"{self.letter(q)}{q}" for q in range(self.n_qubits) if self.letter(q) != "I"]
        return " ".join(toks) if toks else "I"

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp]

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def key(self) -> tuple[int, int]:
        """Sort key used for deterministic ordering: ``(z_mask, x_mask)``."""
        return (self.z_mask, self.x_mask)

    def canonical(self) -> "PauliString":
        if self.phase_exp == 0:
            return self
        return PauliString(self.n_qubits, self.x_mask, self.z_mask)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        return multiply(self, other)

    def __str__(self) -> str:
        prefix = ("", "i", "-", "-i")[self.phase_exp]
        return prefix + self.label

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Exact product ``p @ q`` including the global phase."""
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    # (i^{x1 z1} X^x1 Z^z1)(i^{x2 z2} X^x2 Z^z2) = i^{x1z1 + x2z2 + 2 z1x2} X^x Z^z
    # and X^x Z^z = i^{-xz} * (letter form).
    phase = (
        p.phase_exp
        + q.phase_exp
        + _popcount(p.x_mask & p.z_mask)
        + _popcount(q.x_mask & q.z_mask)
        + 2 * _popcount(p.z_mask & q.x_mask)
        - _popcount(x & z)
    )
    return PauliString(p.n_qubits, x, z, phase)


def canonicalize(p: PauliString) -> tuple[PauliString, complex]:
    """Split ``p`` into a phase-free representative and its unit phase."""
    return p.canonical(), p.phase


def commutes(p: PauliString, q: PauliString) -> bool:
    return (_popcount(p.x_mask & q.z_mask) + _popcount(p.z_mask & q.x_mask)) % 2 == 0


def _check_oracle_size(n_qubits: int) -> None:
    if n_qubits > ORACLE_QUBIT_LIMIT:
        raise ValueError(
            f"dense matrices limited to {ORACLE_QUBIT_LIMIT} qubits, got {n_qubits}"
        )


def _basis_indices(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.int64)


def _z_signs(z_mask: int, idx: np.ndarray) -> np.ndarray:
    parity = np.bitwise_count(idx & z_mask) & 1
    return 1 - 2 * parity.astype(np.int8)


@dataclass(frozen=True)
class Hamiltonian:
    """A real-weighted sum of distinct canonical Pauli strings."""

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...]
    allow_identity: bool = False

    def __post_init__(self):
        terms = tuple((float(c), p) for c, p in self.terms)
        seen = set()
        for c, p in terms:
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient {c}")
            if p.n_qubits != self.n_qubits:
                raise ValueError("term qubit count differs from Hamiltonian")
            if p.phase_exp != 0:
                raise ValueError(f"term {p!r} is not canonical")
            if p.is_identity and not self.allow_identity:
                raise ValueError("identity term not allowed (pass allow_identity=True)")
            if p.key in seen:
                raise ValueError(f"duplicate term {p.label}")
            seen.add(p.key)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(
        cls, n_qubits: int, terms: Iterable[tuple[float, str]], allow_identity: bool = False
    ) -> "Hamiltonian":
        """Build from ``(coefficient, sparse-or-dense label)`` pairs, merging repeats."""
        acc: dict[tuple[int, int], float] = {}
        strings: dict[tuple[int, int], PauliString] = {}
        for c, text in terms:
            if isinstance(text, PauliString):
                p = text
            elif re.fullmatch(r"[IXYZ]+", text.strip()) and len(text.strip()) == n_qubits:
                p = PauliString.from_label(text)
            else:
                p = PauliString.from_sparse(text, n_qubits)
            if p.phase_exp not in (0, 2):
                raise ValueError("term phase must be real")
            sign = -1.0 if p.phase_exp == 2 else 1.0
            p = p.canonical()
            acc[p.key] = acc.get(p.key, 0.0) + sign * float(c)
            strings[p.key] = p
        collected = tuple((acc[k], strings[k]) for k in acc if abs(acc[k]) >= COEFF_TOL)
        return cls(n_qubits, collected, allow_identity=allow_identity)

    @property
    def paulis(self) -> list[PauliString]:
        return [p for _, p in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms])

    def __len__(self) -> int:
        return len(self.terms)

    def to_text(self) -> str:
        lines = [f"# qubits: {self.n_qubits}"]
        lines += [f"{c!r} {p.sparse}" for c, p in self.terms]
        return "\n".join(lines) + "\n"

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Return ``H @ psi`` for a raw amplitude vector without forming ``H``."""
        out = np.zeros_like(psi, dtype=complex)
        for c, p in self.terms:
            out += c * apply_pauli_array(p, psi)
        return out


def parse_hamiltonian(text: str, n_qubits: int | None = None) -> Hamiltonian:
    """Parse ``<coefficient> <sparse-pauli>`` lines.

    Blank lines and ``#`` comments are skipped. A comment of the form
    ``# qubits: N`` fixes the qubit count; otherwise it is the explicit
    ``n_qubits`` argument or one more than the largest index seen.
    """
    raw: list[tuple[int, float, str]] = []
    declared = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = re.match(r"#\s*qubits\s*:\s*(\d+)\s*$", stripped)
            if m:
                declared = int(m.group(1))
            continue
        stripped = stripped.split("#", 1)[0].strip()
        parts = stripped.split(None, 1)
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ValueError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
        raw.append((lineno, coeff, parts[1] if len(parts) > 1 else "I"))
    if n_qubits is None:
        n_qubits = declared
    if n_qubits is None:
        idx = [int(m) for _, _, s in raw for m in re.findall(r"\d+", s)]
        n_qubits = max(idx) + 1 if idx else 1
    terms = []
    for lineno, c, s in raw:
        try:
            terms.append((c, PauliString.from_sparse(s, n_qubits)))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    allow_identity = any(p.is_identity for _, p in terms)
    return Hamiltonian.from_terms(n_qubits, terms, allow_identity=allow_identity)


def collect_terms(
    pairs: Iterable[tuple[complex, PauliString]],
) -> list[tuple[complex, PauliString]]:
    """Merge like strings, absorb phases into coefficients, drop near-zero terms.

    Output is ordered by ``(z_mask, x_mask)``.
    """
    acc: dict[tuple[int, int], complex] = defaultdict(complex)
    reps: dict[tuple[int, int], PauliString] = {}
    for c, p in pairs:
        rep, ph = canonicalize(p)
        acc[rep.key] += c * ph
        reps[rep.key] = rep
    return [(acc[k], reps[k]) for k in sorted(acc) if abs(acc[k]) >= COEFF_TOL]


def hamiltonian_square_terms(h: Hamiltonian) -> list[tuple[complex, PauliString]]:
    """``H @ H`` as a collected Pauli sum."""
    return collect_terms(
        (ci * cj, multiply(pi, pj)) for ci, pi in h.terms for cj, pj in h.terms
    )


def apply_pauli_array(p: PauliString, psi: np.ndarray) -> np.ndarray:
    """``dense(p) @ psi`` as a permutation with unit-phase multipliers."""
    idx = _basis_indices(p.n_qubits)
    src = idx ^ p.x_mask
    # row b receives column b ^ x, signed by (-1)^{|z & (b ^ x)|}
    factor = _PHASES[(p.phase_exp + _popcount(p.x_mask & p.z_mask)) % 4]
    return factor * _z_signs(p.z_mask, src) * psi[src]


def dense_matrix(op: PauliString | Hamiltonian) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a Pauli string or Hamiltonian."""
    _check_oracle_size(op.n_qubits)
    if isinstance(op, Hamiltonian):
        dim = 1 << op.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for c, p in op.terms:
            out += c * dense_matrix(p)
        return out
    idx = _basis_indices(op.n_qubits)
    src = idx ^ op.x_mask
    factor = _PHASES[(op.phase_exp + _popcount(op.x_mask & op.z_mask)) % 4]
    mat = np.zeros((len(idx), len(idx)), dtype=complex)
    mat[idx, src] = factor * _z_signs(op.z_mask, src)
    return mat


def dense_terms(n_qubits: int, terms: Sequence[tuple[complex, PauliString]]) -> np.ndarray:
    _check_oracle_size(n_qubits)
    dim = 1 << n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for c, p in terms:
        out += c * dense_matrix(p)
    return out
