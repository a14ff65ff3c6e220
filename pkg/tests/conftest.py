import numpy as np
import pytest

from tqs.models import heisenberg2, tfi2, xx_chain
from tqs.statevec import CircuitSpec, prepare

PAULI_2x2 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_dense(label: str, phase: complex = 1) -> np.ndarray:
    """Dense oracle by explicit Kronecker products; qubit 0 is the rightmost factor."""
    out = np.eye(1, dtype=complex)
    for ch in label:
        out = np.kron(PAULI_2x2[ch], out)
    return phase * out


def aligned_distance(a, b) -> float:
    ov = np.vdot(b, a)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(np.asarray(a) - ph * np.asarray(b)))


def slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def h2():
    return heisenberg2()


@pytest.fixture(scope="session")
def h4():
    return xx_chain(4)


@pytest.fixture(scope="session")
def htfi2():
    return tfi2()


@pytest.fixture(scope="session")
def psi2():
    return prepare(CircuitSpec.random_layers(2, 5, seed=3))


@pytest.fixture(scope="session")
def psi4():
    return prepare(CircuitSpec.random_layers(4, 5, seed=1))


# acceptance reporting ------------------------------------------------------

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def _report(name: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
