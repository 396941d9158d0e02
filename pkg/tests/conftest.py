import numpy as np
import pytest

from qtsp import fixture_graph
from qtsp.statevec import StateVector


def basis_state(num_qubits: int, index: int) -> StateVector:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def random_state(num_qubits: int, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    amps /= np.linalg.norm(amps)
    return StateVector(num_qubits, amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(np.vdot(a.amplitudes, b.amplitudes))


@pytest.fixture(scope="session")
def x1():
    return fixture_graph("x1")


@pytest.fixture(scope="session")
def x2():
    return fixture_graph("x2")


@pytest.fixture(scope="session")
def x3():
    return fixture_graph("x3")


@pytest.fixture(scope="session")
def x4():
    return fixture_graph("x4")
