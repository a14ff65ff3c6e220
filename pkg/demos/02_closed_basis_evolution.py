"""
Evolving on a closed basis
==========================

On a basis that is closed under the Hamiltonian terms, the coefficient
dynamics capture the full evolution. Here the 4-qubit XX chain is evolved for
three time units with first-order steps and scored against the dense oracle.
"""

import numpy as np

from tqs.models import xx_chain
from tqs.moments import closed_basis
from tqs.oracle import exact_observable, trajectory_fidelity
from tqs.overlaps import compute_overlaps
from tqs.pauli import Hamiltonian
from tqs.qas import integrate
from tqs.statevec import CircuitSpec, prepare
from tqs.stepper import StepConfig, evolve, initial_alpha, with_steps

h = xx_chain(4)
psi = prepare(CircuitSpec.random_layers(4, n_layers=5, seed=1))
basis = closed_basis(h)
z0 = Hamiltonian.from_terms(4, [(1.0, "Z0")])

# %%
# The quantum side ends here: only the overlap matrices are passed on.
ov = compute_overlaps(basis, h, psi, include_J=True, observables={"Z0": z0})
print(f"basis size {len(basis)}, smallest eigenvalue of E {np.linalg.eigvalsh(ov.E)[0]:.3e}")

# %%
# First- and second-order steps, plus the linear ODE integrated with RK4.
alpha0 = initial_alpha(len(basis))
runs = {
    "order 1": evolve(alpha0, ov, with_steps(StepConfig(dt=1e-2, order=1), 3.0)),
    "order 2": evolve(alpha0, ov, with_steps(StepConfig(dt=1e-2, order=2), 3.0)),
    "rk4 ODE": integrate(alpha0, ov, dt=1e-2, n_steps=300),
}
exact_z = exact_observable(psi, h, z0, runs["order 1"].times)
for name, traj in runs.items():
    fid = trajectory_fidelity(traj, basis, psi, h)
    err = np.abs(traj.columns["Z0"] - exact_z).max()
    print(f"{name}: min fidelity {fid.min():.8f}, max |<Z0> error| {err:.2e}")

# %%
# A basis that is too small cannot follow the state for long.
from tqs.moments import build_cumulative_moments

small = build_cumulative_moments(h, 1)
ov_small = compute_overlaps(small, h, psi)
traj = evolve(initial_alpha(len(small)), ov_small, with_steps(StepConfig(dt=1e-2), 3.0))
print(f"k=1 basis: min fidelity {trajectory_fidelity(traj, small, psi, h).min():.4f}")
