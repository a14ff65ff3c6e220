"""Truncated-Taylor subspace simulation of Hamiltonian dynamics.

Build a moment basis from a Pauli-sum Hamiltonian, measure overlap matrices as
Pauli expectations on an emulated device, then advance the ansatz coefficients
classically by solving a single-constraint QCQP per step.
"""

__version__ = "0.1.0"

from .moments import MomentBasis, build_cumulative_moments, closed_basis, closure_reached
from .overlaps import Mode, OverlapSet, circuit_count, compute_R, compute_overlaps
from .pauli import (
    Hamiltonian,
    PauliString,
    canonicalize,
    dense_matrix,
    hamiltonian_square_terms,
    multiply,
    parse_hamiltonian,
)
from .qas import integrate, qas_rhs
from .statevec import (
    CircuitSpec,
    StateVector,
    apply_pauli,
    expectation,
    fidelity,
    inner,
    prepare,
    sample_expectation,
)
from .stepper import StepConfig, build_G, evolve, observable, step
from .trajectory import Trajectory
from .oracle import exact_evolve, reconstruct_state, trajectory_fidelity

__all__ = [
    "CircuitSpec",
    "Hamiltonian",
    "Mode",
    "MomentBasis",
    "OverlapSet",
    "PauliString",
    "StateVector",
    "StepConfig",
    "Trajectory",
    "apply_pauli",
    "build_G",
    "build_cumulative_moments",
    "canonicalize",
    "circuit_count",
    "closed_basis",
    "closure_reached",
    "compute_R",
    "compute_overlaps",
    "dense_matrix",
    "evolve",
    "exact_evolve",
    "expectation",
    "fidelity",
    "hamiltonian_square_terms",
    "inner",
    "integrate",
    "multiply",
    "observable",
    "parse_hamiltonian",
    "prepare",
    "qas_rhs",
    "reconstruct_state",
    "sample_expectation",
    "step",
    "trajectory_fidelity",
]
