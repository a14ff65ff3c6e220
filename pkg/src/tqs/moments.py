"""Cumulative moment bases built from a Hamiltonian's Pauli terms.

Order ``k`` collects every product of at most ``k`` term strings applied to the
reference state, deduplicated up to a global phase (a phase on a basis vector
is absorbed by its complex coefficient). ``k = 0`` is the reference state alone.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .pauli import Hamiltonian, PauliString, multiply


@dataclass(frozen=True)
class MomentBasis:
    """Canonical representatives ``R_i`` with ``|chi_i> = R_i |psi>``.

    ``provenance[i]`` lists term indices in application order: the word
    ``(i1, i2, ..., ij)`` stands for ``P_ij ... P_i2 P_i1``. ``levels[i]`` is the
    word length at which ``reps[i]`` first appeared.
    """

    n_qubits: int
    order: int
    reps: tuple[PauliString, ...]
    provenance: tuple[tuple[int, ...], ...]
    levels: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.reps)

    @property
    def basis_id(self) -> str:
        digest = hashlib.sha256(" | ".join(r.label for r in self.reps).encode())
        return digest.hexdigest()[:16]

    def index(self) -> dict[tuple[int, int], int]:
        return {r.key: i for i, r in enumerate(self.reps)}

    def to_text(self) -> str:
        """One line per state: ``level <k>: <sparse-pauli> <provenance word>``."""
        lines = []
        for rep, word, lvl in zip(self.reps, self.provenance, self.levels):
            w = "-".join(str(i) for i in word) if word else "()"
            lines.append(f"level {lvl}: {rep.sparse} {w}")
        return "\n".join(lines) + "\n"


def build_cumulative_moments(h: Hamiltonian, k: int) -> MomentBasis:
    """Breadth-first closure of the identity under left-multiplication by term strings."""
    if k < 0:
        raise ValueError("moment order must be non-negative")
    ident = PauliString.identity(h.n_qubits)
    reps = [ident]
    words: list[tuple[int, ...]] = [()]
    levels = [0]
    seen = {ident.key}
    frontier = [0]
    terms = h.paulis
    for level in range(1, k + 1):
        found: dict[tuple[int, int], tuple[PauliString, tuple[int, ...]]] = {}
        for src in frontier:
            for j, p in enumerate(terms):
                prod = multiply(p, reps[src]).canonical()
                if prod.key in seen or prod.key in found:
                    continue
                found[prod.key] = (prod, words[src] + (j,))
        if not found:
            break
        frontier = []
        for key in sorted(found):
            rep, word = found[key]
            seen.add(key)
            frontier.append(len(reps))
            reps.append(rep)
            words.append(word)
            levels.append(level)
    return MomentBasis(h.n_qubits, k, tuple(reps), tuple(words), tuple(levels))


def word_product(h: Hamiltonian, word: tuple[int, ...]) -> PauliString:
    """Multiply out a provenance word, ``P_ij ... P_i1``."""
    out = PauliString.identity(h.n_qubits)
    for j in word:
        out = multiply(h.paulis[j], out)
    return out


def closure_reached(basis: MomentBasis, h: Hamiltonian) -> bool:
    """True when every ``P @ R`` (term ``P``, representative ``R``) is already present."""
    present = {r.key for r in basis.reps}
    return all(multiply(p, r).canonical().key in present for r in basis.reps for p in h.paulis)


def closed_basis(h: Hamiltonian, max_order: int = 64) -> MomentBasis:
    """Smallest cumulative basis that is closed under the Hamiltonian terms."""
    for k in range(max_order + 1):
        basis = build_cumulative_moments(h, k)
        if closure_reached(basis, h):
            return basis
    raise RuntimeError(f"no closure within order {max_order}")
