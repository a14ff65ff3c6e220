import numpy as np
import pytest
from scipy.linalg import expm

from tqs.moments import build_cumulative_moments, closed_basis
from tqs.oracle import (
    Propagator,
    exact_evolve,
    exact_observable,
    exact_trajectory,
    reconstruct_state,
    trajectory_fidelity,
)
from tqs.overlaps import compute_overlaps
from tqs.pauli import Hamiltonian, PauliString, dense_matrix
from tqs.statevec import StateVector, expectation, fidelity
from tqs.stepper import Metric, StepConfig, evolve, initial_alpha, with_steps

PLUS = StateVector([1, 1], normalize=True)
HZ = Hamiltonian.from_terms(1, [(1.0, "Z0")])


class TestExactEvolve:
    def test_zero_time(self, h4, psi4):
        np.testing.assert_allclose(exact_evolve(psi4, h4, 0.0).amplitudes, psi4.amplitudes, atol=1e-14)

    def test_precession(self):
        out = exact_evolve(PLUS, HZ, np.pi / 2)
        assert expectation(PauliString.from_label("X"), out) == pytest.approx(-1, abs=1e-10)

    def test_matches_expm(self, h4, psi4):
        U = expm(-1j * 0.7 * dense_matrix(h4))
        np.testing.assert_allclose(exact_evolve(psi4, h4, 0.7).amplitudes, U @ psi4.amplitudes, atol=1e-12)
        np.testing.assert_allclose(Propagator(h4).unitary(0.7), U, atol=1e-12)

    def test_group_property(self, h4, psi4):
        a = exact_evolve(exact_evolve(psi4, h4, 0.4), h4, 1.1)
        b = exact_evolve(psi4, h4, 1.5)
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-9)

    def test_unitary_preserves_fidelity(self, h4, rng):
        for _ in range(5):
            psi, phi = StateVector.random(4, rng), StateVector.random(4, rng)
            before = fidelity(psi, phi)
            after = fidelity(exact_evolve(psi, h4, 2.3), exact_evolve(phi, h4, 2.3))
            assert after == pytest.approx(before, abs=1e-9)

    def test_energy_and_norm(self, h4, psi4):
        H = dense_matrix(h4)
        states = exact_trajectory(psi4, h4, np.linspace(0, 3, 7))
        energies = [np.vdot(s.amplitudes, H @ s.amplitudes).real for s in states]
        assert np.ptp(energies) < 1e-10
        assert all(abs(np.linalg.norm(s.amplitudes) - 1) < 1e-10 for s in states)

    def test_size_limit(self):
        h = Hamiltonian.from_terms(13, [(1.0, "Z0")])
        with pytest.raises(ValueError):
            Propagator(h)

    def test_mismatch(self, h4, psi2):
        with pytest.raises(ValueError):
            exact_evolve(psi2, h4, 1.0)


class TestReconstruct:
    def test_reference(self, h2, psi2):
        basis = build_cumulative_moments(h2, 1)
        out = reconstruct_state(initial_alpha(len(basis)), basis, psi2)
        np.testing.assert_allclose(out.amplitudes, psi2.amplitudes, atol=1e-15)

    def test_norm_matches_E(self, h2, psi2, rng):
        basis = build_cumulative_moments(h2, 1)
        E = compute_overlaps(basis, h2, psi2).E
        for _ in range(10):
            alpha = rng.normal(size=4) + 1j * rng.normal(size=4)
            raw = reconstruct_state(alpha, basis, psi2, E=E, normalize=False)
            assert np.vdot(raw, raw).real == pytest.approx(np.vdot(alpha, E @ alpha).real, abs=1e-10)

    def test_inconsistent_E(self, h2, psi2):
        basis = build_cumulative_moments(h2, 1)
        with pytest.raises(ValueError):
            reconstruct_state(np.ones(4), basis, psi2, E=2 * np.eye(4))

    def test_phase_invariance(self, h2, psi2, rng):
        basis = build_cumulative_moments(h2, 1)
        alpha = rng.normal(size=4) + 1j * rng.normal(size=4)
        ref = StateVector.random(2, rng)
        f1 = fidelity(reconstruct_state(alpha, basis, psi2), ref)
        f2 = fidelity(reconstruct_state(np.exp(1.3j) * alpha, basis, psi2), ref)
        assert f1 == pytest.approx(f2, abs=1e-12)

    def test_zero_vector(self):
        # basis {I, Z} on |0>: alpha = (1, -1) cancels exactly
        basis = build_cumulative_moments(HZ, 1)
        with pytest.raises(ValueError):
            reconstruct_state(np.array([1, -1]), basis, StateVector.basis_state("0"))

    def test_wrong_length(self, h2, psi2):
        with pytest.raises(ValueError):
            reconstruct_state(np.ones(3), build_cumulative_moments(h2, 1), psi2)


class TestTrajectoryFidelity:
    def _run(self, h, psi, k):
        basis = build_cumulative_moments(h, k)
        ov = compute_overlaps(basis, h, psi)
        traj = evolve(initial_alpha(len(basis)), ov, with_steps(StepConfig(dt=1e-3), 3.0))
        return trajectory_fidelity(traj, basis, psi, h)

    def test_closed_basis(self, h4, psi4):
        fid = self._run(h4, psi4, 3)
        assert fid[0] == pytest.approx(1, abs=1e-12)
        assert fid.min() >= 0.999
        assert fid.max() <= 1 + 1e-8

    def test_small_basis_decays(self, h4, psi4):
        assert self._run(h4, psi4, 1).min() < 0.99


def test_exact_observable_precession():
    t = np.linspace(0, np.pi, 5)
    x = Hamiltonian.from_terms(1, [(1.0, "X0")])
    np.testing.assert_allclose(exact_observable(PLUS, HZ, x, t), np.cos(2 * t), atol=1e-12)


def test_metric_rank(h4, psi4):
    # the 8-state closed basis of the 4-qubit chain has full-rank E for a generic state
    E = compute_overlaps(closed_basis(h4), h4, psi4).E
    assert Metric(E, 1e-10).rank == 8
