"""Dense ground truth for small systems."""

from __future__ import annotations

import numpy as np

from .moments import MomentBasis
from .pauli import ORACLE_QUBIT_LIMIT, Hamiltonian, apply_pauli_array, dense_matrix
from .statevec import StateVector, fidelity

NORM_CHECK_TOL = 1e-8


class Propagator:
    """``exp(-i H t)`` from one Hermitian eigendecomposition, reused for every ``t``."""

    def __init__(self, h: Hamiltonian):
        if h.n_qubits > ORACLE_QUBIT_LIMIT:
            raise ValueError(f"oracle limited to {ORACLE_QUBIT_LIMIT} qubits")
        self.hamiltonian = h
        self.energies, self.vectors = np.linalg.eigh(dense_matrix(h))

    def apply(self, amps: np.ndarray, t: float) -> np.ndarray:
        """Evolve a vector, or each column of a matrix, by time ``t``."""
        coeffs = self.vectors.conj().T @ amps
        phase = np.exp(-1j * self.energies * t)
        if coeffs.ndim == 2:
            phase = phase[:, None]
        return self.vectors @ (phase * coeffs)

    def unitary(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def evolve(self, psi: StateVector, t: float) -> StateVector:
        return StateVector(self.apply(psi.amplitudes, t), normalize=True)


def exact_evolve(psi: StateVector, h: Hamiltonian, t: float) -> StateVector:
    if psi.n_qubits != h.n_qubits:
        raise ValueError("state and Hamiltonian qubit counts differ")
    return Propagator(h).evolve(psi, t)


def basis_state_matrix(basis: MomentBasis, psi: StateVector) -> np.ndarray:
    """Columns ``R_i |psi>``."""
    if basis.n_qubits != psi.n_qubits:
        raise ValueError("basis and state qubit counts differ")
    return np.column_stack([apply_pauli_array(r, psi.amplitudes) for r in basis.reps])


def reconstruct_state(
    alpha: np.ndarray,
    basis: MomentBasis,
    psi: StateVector,
    E: np.ndarray | None = None,
    normalize: bool = True,
) -> StateVector | np.ndarray:
    """``sum_i alpha_i R_i |psi>``.

    If ``E`` is given, the squared norm before normalization is checked against
    ``alpha^dag E alpha``. With ``normalize=False`` the raw amplitude array is
    returned instead of a :class:`StateVector`.
    """
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (len(basis),):
        raise ValueError(f"expected {len(basis)} coefficients, got {alpha.shape}")
    amps = basis_state_matrix(basis, psi) @ alpha
    norm2 = float(np.vdot(amps, amps).real)
    if E is not None:
        expected = float(np.vdot(alpha, E @ alpha).real)
        if abs(norm2 - expected) > NORM_CHECK_TOL * max(1.0, expected):
            raise ValueError(
                f"reconstructed norm^2 {norm2:.12g} disagrees with alpha^dag E alpha {expected:.12g}"
            )
    if not normalize:
        return amps
    if norm2 == 0:
        raise ValueError("coefficients reconstruct the zero vector")
    return StateVector(amps, normalize=True)


def exact_trajectory(psi: StateVector, h: Hamiltonian, times: np.ndarray) -> list[StateVector]:
    prop = Propagator(h)
    return [prop.evolve(psi, t) for t in times]


def trajectory_fidelity(traj, basis: MomentBasis, psi0: StateVector, h: Hamiltonian) -> np.ndarray:
    """Fidelity of each reconstructed ansatz state with the exact evolved state."""
    prop = Propagator(h)
    chi = basis_state_matrix(basis, psi0)
    out = np.empty(len(traj.times))
    for i, (t, a) in enumerate(zip(traj.times, traj.alphas)):
        approx = StateVector(chi @ a, normalize=True)
        out[i] = fidelity(approx, prop.evolve(psi0, t))
    return out


def exact_observable(
    psi0: StateVector, h: Hamiltonian, obs: Hamiltonian, times: np.ndarray
) -> np.ndarray:
    prop = Propagator(h)
    mat = dense_matrix(obs)
    vals = []
    for t in times:
        v = prop.apply(psi0.amplitudes, t)
        vals.append(np.vdot(v, mat @ v).real)
    return np.array(vals)
