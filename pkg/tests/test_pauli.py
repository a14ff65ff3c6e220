import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import kron_dense
from tqs.models import heisenberg2, xx_chain
from tqs.pauli import (
    Hamiltonian,
    PauliString,
    canonicalize,
    collect_terms,
    dense_matrix,
    dense_terms,
    hamiltonian_square_terms,
    multiply,
    parse_hamiltonian,
)

P = PauliString.from_label


class TestDense:
    def test_identity_and_z(self):
        np.testing.assert_array_equal(dense_matrix(P("I")), np.eye(2))
        np.testing.assert_array_equal(dense_matrix(P("Z")), np.diag([1, -1]))

    @pytest.mark.parametrize("label", ["X", "Y", "Z", "XY", "ZIY", "YYXZ"])
    def test_matches_kron(self, label):
        np.testing.assert_array_equal(dense_matrix(P(label)), kron_dense(label))

    def test_phase(self):
        p = PauliString(2, 0b01, 0b10, 3)
        np.testing.assert_array_equal(dense_matrix(p), kron_dense("XZ", -1j))

    def test_h4_hermitian_traceless(self):
        m = dense_matrix(xx_chain(4))
        assert m.shape == (16, 16)
        np.testing.assert_array_equal(m, m.conj().T)
        assert np.trace(m) == 0

    def test_size_guard(self):
        with pytest.raises(ValueError):
            dense_matrix(PauliString.identity(13))


class TestMultiply:
    def test_involution(self):
        r = multiply(P("X"), P("X"))
        assert r.is_identity and r.phase_exp == 0

    def test_x_times_z(self):
        r = multiply(P("X"), P("Z"))
        assert r.label == "Y" and r.phase_exp == 3
        np.testing.assert_array_equal(dense_matrix(r), kron_dense("X") @ kron_dense("Z"))

    def test_two_qubit(self):
        # (X (x) I)(Z (x) Z) with qubit 0 leftmost in labels
        r = multiply(P("XI"), P("ZZ"))
        assert r.label == "YZ" and r.phase == -1j
        np.testing.assert_array_equal(
            dense_matrix(r), kron_dense("XI") @ kron_dense("ZZ")
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            multiply(P("X"), P("XX"))

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_dense_homomorphism(self, data):
        n = data.draw(st.integers(1, 3))
        a = data.draw(st.text("IXYZ", min_size=n, max_size=n))
        b = data.draw(st.text("IXYZ", min_size=n, max_size=n))
        pa, pb = data.draw(st.integers(0, 3)), data.draw(st.integers(0, 3))
        p, q = P(a), P(b)
        p = PauliString(n, p.x_mask, p.z_mask, pa)
        q = PauliString(n, q.x_mask, q.z_mask, pb)
        expected = kron_dense(a, 1j**pa) @ kron_dense(b, 1j**pb)
        np.testing.assert_array_equal(dense_matrix(multiply(p, q)), expected)

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_associative(self, data):
        n = data.draw(st.integers(1, 3))
        a, b, c = (P(data.draw(st.text("IXYZ", min_size=n, max_size=n))) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))

    @settings(max_examples=100, deadline=None)
    @given(st.text("IXYZ", min_size=1, max_size=4))
    def test_square_is_identity(self, label):
        r = multiply(P(label), P(label))
        assert r.is_identity and r.phase_exp == 0


class TestCanonicalize:
    def test_already_canonical(self):
        assert canonicalize(P("Y")) == (P("Y"), 1)

    def test_product(self):
        rep, ph = canonicalize(multiply(P("X"), P("Z")))
        assert rep == P("Y") and ph == -1j

    def test_minus_identity(self):
        rep, ph = canonicalize(PauliString(1, 0, 0, 2))
        assert rep.is_identity and rep.phase_exp == 0 and ph == -1

    @settings(max_examples=100, deadline=None)
    @given(st.text("IXYZ", min_size=1, max_size=3), st.integers(0, 3))
    def test_phase_times_rep(self, label, k):
        p = P(label)
        p = PauliString(p.n_qubits, p.x_mask, p.z_mask, k)
        rep, ph = canonicalize(p)
        assert rep.phase_exp == 0
        np.testing.assert_array_equal(ph * dense_matrix(rep), dense_matrix(p))


class TestText:
    @pytest.mark.parametrize("label", ["XZIY", "I", "YYY", "ZIIIIX"])
    def test_label_roundtrip(self, label):
        assert P(label).label == label

    def test_sparse(self):
        p = PauliString.from_sparse("X0 Z1 Y3", 4)
        assert p.label == "XZIY"
        assert p.sparse == "X0 Z1 Y3"
        assert PauliString.from_sparse(p.sparse, 4) == p
        assert PauliString.identity(3).sparse == "I"

    @pytest.mark.parametrize("bad", ["X4", "Q0", "X0 Z0"])
    def test_sparse_errors(self, bad):
        with pytest.raises(ValueError):
            PauliString.from_sparse(bad, 4)

    def test_hamiltonian_file_roundtrip(self):
        h = heisenberg2()
        again = parse_hamiltonian(h.to_text())
        assert again == h

    def test_hamiltonian_file_comments(self):
        text = "# test\n0.5 X0 X1  # bond\n\n-1.25 Z2\n"
        h = parse_hamiltonian(text)
        assert h.n_qubits == 3
        assert [(c, p.sparse) for c, p in h.terms] == [(0.5, "X0 X1"), (-1.25, "Z2")]

    def test_hamiltonian_file_bad_line(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_hamiltonian("1.0 X0\nabc Z0\n")


class TestHamiltonian:
    def test_rejects_duplicates_and_identity(self):
        with pytest.raises(ValueError):
            Hamiltonian(1, ((1.0, P("X")), (2.0, P("X"))))
        with pytest.raises(ValueError):
            Hamiltonian(1, ((1.0, P("I")),))
        Hamiltonian(1, ((1.0, P("I")),), allow_identity=True)

    def test_rejects_non_canonical(self):
        with pytest.raises(ValueError):
            Hamiltonian(1, ((1.0, PauliString(1, 1, 0, 1)),))

    def test_from_terms_merges(self):
        h = Hamiltonian.from_terms(2, [(1.0, "X0"), (0.5, "X0"), (1.0, "Z1")])
        assert [c for c, _ in h.terms] == [1.5, 1.0]


class TestSquare:
    def test_z_squared(self):
        terms = hamiltonian_square_terms(Hamiltonian.from_terms(1, [(1.0, "Z0")]))
        assert len(terms) == 1
        c, p = terms[0]
        assert p.is_identity and c == 1.0

    def test_cross_terms_cancel(self):
        a, b = 0.7, -1.3
        terms = hamiltonian_square_terms(Hamiltonian.from_terms(1, [(a, "X0"), (b, "Z0")]))
        assert len(terms) == 1
        assert terms[0][1].is_identity
        assert terms[0][0] == pytest.approx(a * a + b * b, abs=1e-15)

    def test_heisenberg_square_dense(self):
        h = heisenberg2()
        dense_h = (
            0.5 * kron_dense("XX") + 0.5 * kron_dense("YY") + 0.5 * kron_dense("ZZ")
        )
        got = dense_terms(2, hamiltonian_square_terms(h))
        np.testing.assert_allclose(got, dense_h @ dense_h, atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_random_square_real_and_exact(self, data):
        n = data.draw(st.integers(1, 3))
        labels = data.draw(
            st.lists(st.text("IXYZ", min_size=n, max_size=n).filter(lambda s: set(s) != {"I"}),
                     min_size=1, max_size=5, unique=True)
        )
        coeffs = data.draw(st.lists(st.floats(-2, 2, allow_nan=False), min_size=len(labels), max_size=len(labels)))
        h = Hamiltonian.from_terms(n, list(zip(coeffs, labels)))
        terms = hamiltonian_square_terms(h)
        for c, p in terms:
            assert abs(c.imag) < 1e-12
            assert p.phase_exp == 0
        keys = [p.key for _, p in terms]
        assert keys == sorted(keys)
        m = dense_matrix(h)
        np.testing.assert_allclose(dense_terms(n, terms), m @ m, atol=1e-12)

    def test_collect_drops_zeros(self):
        x = P("X")
        assert collect_terms([(1.0, x), (-1.0, x)]) == []
