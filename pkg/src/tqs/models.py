"""Built-in Hamiltonians. Qubits are 0-indexed."""

from __future__ import annotations

from .pauli import Hamiltonian


def heisenberg2() -> Hamiltonian:
    """``(XX + YY + ZZ) / 2`` on two qubits."""
    return Hamiltonian.from_terms(2, [(0.5, "X0 X1"), (0.5, "Y0 Y1"), (0.5, "Z0 Z1")])


def xx_chain(n: int = 4) -> Hamiltonian:
    """Open XX chain ``sum_i X_i X_{i+1} / 2``."""
    return Hamiltonian.from_terms(n, [(0.5, f"X{i} X{i + 1}") for i in range(n - 1)])


def transverse_ising(n: int, coupling: float = 0.5, field: float = 1.0, periodic: bool = True) -> Hamiltonian:
    """``coupling * sum Z_i Z_{i+1} + field * sum X_j``."""
    bonds = [(i, (i + 1) % n) for i in range(n if periodic else n - 1)]
    bonds = sorted({tuple(sorted(b)) for b in bonds if b[0] != b[1]})
    terms = [(coupling, f"Z{a} Z{b}") for a, b in bonds]
    terms += [(field, f"X{j}") for j in range(n)]
    return Hamiltonian.from_terms(n, terms)


def tfi8() -> Hamiltonian:
    """Eight-qubit ring: 8 ZZ bonds plus 8 X fields (17 states at first order)."""
    return transverse_ising(8, periodic=True)


def tfi2() -> Hamiltonian:
    """``Z0 Z1 / 2 + X0 + X1``."""
    return transverse_ising(2, periodic=False)


BUILTINS = {
    "heisenberg2": heisenberg2,
    "xx-chain4": lambda: xx_chain(4),
    "tfi8": tfi8,
    "tfi2": tfi2,
}

NOTES = {
    "tfi8": "8-qubit periodic ring (8 ZZ bonds, coefficient 1/2; 8 X fields, coefficient 1)",
    "tfi2": "open 2-qubit chain: 0.5 Z0 Z1 + X0 + X1",
    "heisenberg2": "0.5 (X0 X1 + Y0 Y1 + Z0 Z1)",
    "xx-chain4": "0.5 (X0 X1 + X1 X2 + X2 X3)",
}


def builtin(name: str) -> Hamiltonian:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown built-in Hamiltonian {name!r}; choose from {sorted(BUILTINS)}") from None
