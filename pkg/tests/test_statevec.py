import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import kron_dense
from tqs.pauli import PauliString, dense_matrix
from tqs.statevec import (
    CircuitSpec,
    Layer,
    StateVector,
    apply_pauli,
    expectation,
    fidelity,
    inner,
    prepare,
    sample_expectation,
)

P = PauliString.from_label
ZERO = StateVector.basis_state("0")
ONE = StateVector.basis_state("1")


def _gate_oracle(spec: CircuitSpec) -> np.ndarray:
    """Full-matrix circuit simulation via Kronecker products and scipy expm."""
    from scipy.linalg import expm

    n = spec.n_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for layer in spec.layers:
        for q, (tx, ty, tz) in enumerate(layer.angles):
            for theta, letter in ((tx, "X"), (ty, "Y"), (tz, "Z")):
                label = "".join(letter if i == q else "I" for i in range(n))
                psi = expm(-0.5j * theta * kron_dense(label)) @ psi
        for c, t in layer.entanglers:
            proj1 = 0.5 * (kron_dense("I" * n) - kron_dense("".join("Z" if i == c else "I" for i in range(n))))
            target = "Z" if spec.entangler == "cz" else "X"
            flip = kron_dense("".join(target if i == t else "I" for i in range(n)))
            psi = (kron_dense("I" * n) - proj1 + proj1 @ flip) @ psi
    return psi


class TestPrepare:
    def test_zero_layers(self):
        psi = prepare(CircuitSpec(3))
        assert psi.amplitudes[0] == 1 and np.count_nonzero(psi.amplitudes) == 1

    def test_rx_pi(self):
        spec = CircuitSpec(1, (Layer(((np.pi, 0.0, 0.0),)),))
        psi = prepare(spec)
        assert abs(psi.amplitudes[1]) ** 2 == pytest.approx(1, abs=1e-10)
        assert psi.amplitudes[1] == pytest.approx(-1j, abs=1e-12)

    def test_deterministic_and_normalized(self):
        a = prepare(CircuitSpec.random_layers(2, 5, seed=42))
        b = prepare(CircuitSpec.random_layers(2, 5, seed=42))
        assert np.linalg.norm(a.amplitudes) == pytest.approx(1, abs=1e-10)
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
        c = prepare(CircuitSpec.random_layers(2, 5, seed=43))
        assert not np.allclose(a.amplitudes, c.amplitudes)

    @pytest.mark.parametrize("entangler", ["cz", "cnot"])
    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_matrix_oracle(self, n, entangler):
        spec = CircuitSpec.random_layers(n, 3, seed=7, entangler=entangler)
        np.testing.assert_allclose(prepare(spec).amplitudes, _gate_oracle(spec), atol=1e-12)

    def test_text_roundtrip(self):
        spec = CircuitSpec.random_layers(3, 2, seed=5, entangler="cnot")
        again = CircuitSpec.from_text(spec.to_text())
        assert again == spec

    def test_invalid_entangler(self):
        with pytest.raises(ValueError):
            CircuitSpec(2, (Layer(((0, 0, 0), (0, 0, 0)), ((1, 1),)),))
        with pytest.raises(ValueError):
            CircuitSpec(2, (Layer(((0, 0, 0), (0, 0, 0)), ((0, 2),)),))


class TestApplyPauli:
    def test_identity(self, rng):
        psi = StateVector.random(3, rng)
        np.testing.assert_array_equal(apply_pauli(P("III"), psi).amplitudes, psi.amplitudes)

    def test_x_flips(self):
        np.testing.assert_array_equal(apply_pauli(P("X"), ZERO).amplitudes, ONE.amplitudes)

    @settings(max_examples=60, deadline=None)
    @given(st.text("IXYZ", min_size=3, max_size=3), st.integers(0, 3), st.integers(0, 2**32 - 1))
    def test_matches_dense(self, label, k, seed):
        psi = StateVector.random(3, np.random.default_rng(seed))
        p = P(label)
        p = PauliString(3, p.x_mask, p.z_mask, k)
        got = apply_pauli(p, psi).amplitudes
        np.testing.assert_allclose(got, kron_dense(label, 1j**k) @ psi.amplitudes, atol=1e-12)
        assert np.linalg.norm(got) == pytest.approx(1, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_pauli(P("XX"), ZERO)


class TestExpectation:
    def test_basic(self):
        assert expectation(P("Z"), ZERO) == 1
        assert expectation(P("X"), ZERO) == 0

    def test_random_quadratic_form(self, rng):
        psi = StateVector.random(4, rng)
        p = PauliString.from_sparse("X0 Z2", 4)
        expected = np.vdot(psi.amplitudes, dense_matrix(p) @ psi.amplitudes).real
        assert expectation(p, psi) == pytest.approx(expected, abs=1e-12)

    def test_global_phase_invariance(self, rng):
        psi = StateVector.random(3, rng)
        phased = StateVector(np.exp(0.7j) * psi.amplitudes)
        for label in ["XYZ", "ZZI", "YIX"]:
            assert expectation(P(label), phased) == pytest.approx(expectation(P(label), psi), abs=1e-14)

    def test_rejects_non_canonical(self):
        with pytest.raises(ValueError):
            expectation(PauliString(1, 1, 0, 1), ZERO)


class TestSampling:
    def test_deterministic_outcome(self):
        rng = np.random.default_rng(0)
        assert sample_expectation(P("Z"), ZERO, 17, rng) == 1.0

    def test_zero_shots(self):
        with pytest.raises(ValueError):
            sample_expectation(P("Z"), ZERO, 0, np.random.default_rng(0))

    def test_reproducible(self):
        a = sample_expectation(P("X"), ZERO, 8192, np.random.default_rng(5))
        b = sample_expectation(P("X"), ZERO, 8192, np.random.default_rng(5))
        assert a == b

    def test_tail_bound_8192(self):
        # 5/sqrt(8192) is five standard deviations for a fair coin
        vals = [sample_expectation(P("X"), ZERO, 8192, np.random.default_rng(s)) for s in range(2000)]
        assert np.mean(np.abs(vals) < 5 / np.sqrt(8192)) >= 0.9999

    def test_std_scaling(self):
        psi = prepare(CircuitSpec.random_layers(2, 3, seed=2))
        p = P("XY")
        shots = np.array([256, 1024, 4096, 16384])
        stds = []
        for s in shots:
            vals = [sample_expectation(p, psi, int(s), np.random.default_rng(1000 + i)) for i in range(400)]
            stds.append(np.std(vals))
        slope = np.polyfit(np.log(shots), np.log(stds), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)


class TestFidelity:
    def test_self_and_orthogonal(self, rng):
        psi = StateVector.random(2, rng)
        assert fidelity(psi, psi) == pytest.approx(1, abs=1e-12)
        assert fidelity(ZERO, ONE) == 0

    def test_global_phase(self, rng):
        psi = StateVector.random(3, rng)
        theta = rng.uniform(0, 2 * np.pi)
        phased = StateVector(np.exp(1j * theta) * psi.amplitudes)
        assert fidelity(psi, phased) == pytest.approx(1, abs=1e-12)
        assert abs(inner(psi, phased)) == pytest.approx(1, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(ZERO, StateVector.basis_state("00"))


class TestStateVector:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            StateVector([1.0, 1.0])

    def test_read_only(self):
        with pytest.raises(ValueError):
            ZERO.amplitudes[0] = 0

    def test_basis_state_ordering(self):
        # qubit 0 is the least significant bit of the index
        assert StateVector.basis_state("10").amplitudes[1] == 1
        assert StateVector.basis_state("01").amplitudes[2] == 1

    def test_csv_roundtrip(self, tmp_path, rng):
        psi = StateVector.random(3, rng)
        psi.to_csv(tmp_path / "psi.csv")
        np.testing.assert_array_equal(StateVector.from_csv(tmp_path / "psi.csv").amplitudes, psi.amplitudes)
