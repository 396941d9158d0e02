"""Simulator core: gates, circuits, QFT, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtsp import (Circuit, NormDriftError, ValidationError, apply_circuit,
                  apply_gate, build_inverse_qft, build_qft, gate_count,
                  new_state, sample)
from qtsp import statevec as sv
from qtsp.statevec import StateVector, max_qubits

from conftest import basis_state, fidelity, random_state


# ---------------------------------------------------------------- new_state

def test_new_state_single_qubit():
    assert np.allclose(new_state(1).amplitudes, [1, 0])


def test_new_state_two_qubits():
    assert np.allclose(new_state(2).amplitudes, [1, 0, 0, 0])


def test_new_state_13_qubits():
    state = new_state(13)
    assert state.dim == 8192
    assert state.amplitudes[0] == 1
    assert np.count_nonzero(state.amplitudes) == 1


def test_new_state_rejects_over_cap(monkeypatch):
    monkeypatch.setenv("QTSP_MAX_QUBITS", "10")
    assert max_qubits() == 10
    with pytest.raises(Exception):
        new_state(11)


def test_env_cap_cannot_raise(monkeypatch):
    monkeypatch.setenv("QTSP_MAX_QUBITS", "40")
    assert max_qubits() == 32


# ---------------------------------------------------------------- gates

def test_gate_validation():
    with pytest.raises(ValidationError):
        sv.Gate("BOGUS", 0, (), 0.0)
    with pytest.raises(ValidationError):
        sv.Gate("PHASE", 0, (), 7.0)  # outside [-2pi, 2pi]
    with pytest.raises(ValidationError):
        sv.mcx([(0, True)], 0)  # control collides with target
    with pytest.raises(ValidationError):
        sv.mcx([(1, True), (1, False)], 0)


def test_hadamard_on_zero():
    state = apply_gate(basis_state(1, 0), sv.h(0))
    assert np.allclose(state.amplitudes, [1 / math.sqrt(2)] * 2)


def test_z_on_plus():
    state = apply_gate(basis_state(1, 0), sv.h(0))
    state = apply_gate(state, sv.z(0))
    r = 1 / math.sqrt(2)
    assert np.allclose(state.amplitudes, [r, -r])


def test_mcx_mixed_polarity():
    # controls (q1 positive, q2 negative), target q0, on |010> (q2 q1 q0)
    state = apply_gate(basis_state(3, 0b010),
                       sv.mcx([(1, True), (2, False)], 0))
    assert np.allclose(state.amplitudes[0b011], 1)


def test_empty_circuit_is_identity():
    state = random_state(4, 0)
    before = state.amplitudes.copy()
    apply_circuit(state, Circuit(4))
    assert np.array_equal(state.amplitudes, before)


def test_double_hadamard():
    state = basis_state(1, 0)
    circ = Circuit(1, [sv.h(0), sv.h(0)])
    apply_circuit(state, circ)
    assert abs(state.amplitudes[0] - 1) < 1e-12


def test_norm_drift_detection():
    state = basis_state(2, 0)
    state.amplitudes *= 2.0
    with pytest.raises(NormDriftError):
        state.check_norm()


# ---------------------------------------------------------------- QFT

def test_qft_of_zero_is_uniform():
    state = basis_state(3, 0)
    apply_circuit(state, build_qft(range(3)))
    assert np.allclose(state.amplitudes, np.full(8, 1 / math.sqrt(8)))


def test_inverse_qft_collapses_geometric_sequence():
    amps = np.exp(2j * np.pi * np.arange(8) * 2 / 8) / math.sqrt(8)
    state = StateVector(3, amps)
    apply_circuit(state, build_inverse_qft(range(3)))
    assert abs(abs(state.amplitudes[2]) - 1) < 1e-9


@pytest.mark.parametrize("k", range(8))
def test_qft_matches_dft_matrix(k):
    state = basis_state(3, k)
    apply_circuit(state, build_qft(range(3)))
    expected = np.exp(2j * np.pi * np.arange(8) * k / 8) / math.sqrt(8)
    assert np.allclose(state.amplitudes, expected, atol=1e-12)


def test_qft_inverse_roundtrip():
    state = random_state(5, 7)
    before = state.amplitudes.copy()
    apply_circuit(state, build_qft(range(5)))
    apply_circuit(state, build_inverse_qft(range(5)))
    assert np.max(np.abs(state.amplitudes - before)) < 1e-9


def test_qft_gate_budget():
    counts = gate_count(build_qft(range(5)))
    assert counts["H"] == 5
    assert counts["MCPHASE"] == 10  # M(M-1)/2


def test_qft_validation():
    with pytest.raises(ValidationError):
        build_qft([])
    with pytest.raises(ValidationError):
        build_qft([0, 0])


# ---------------------------------------------------------------- sampling

def test_sample_deterministic_state():
    assert sample(basis_state(3, 5), 100, seed=42) == {5: 100}


def test_sample_binomial_statistics():
    state = apply_gate(basis_state(1, 0), sv.h(0))
    counts = sample(state, 10**6, seed=1)
    sigma = math.sqrt(10**6 * 0.25)
    assert abs(counts[0] - 5 * 10**5) < 5 * sigma
    assert counts[0] + counts[1] == 10**6


def test_sample_seed_reproducible():
    state = random_state(4, 3)
    assert sample(state, 500, seed=9) == sample(state, 500, seed=9)
    assert sum(sample(state, 500, seed=9).values()) == 500


# ---------------------------------------------------------------- counting

def test_gate_count_direct():
    circ = Circuit(3, [sv.h(0), sv.h(1), sv.mcx([(0, True), (1, True)], 2)])
    assert gate_count(circ) == {"H": 2, "MCX": 1}


# ---------------------------------------------------------------- properties

_KIND = st.sampled_from(["X", "H", "Z", "PHASE", "RZ", "MCX", "MCZ", "MCPHASE"])


@st.composite
def _random_circuit(draw, num_qubits=4, max_gates=25):
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        kind = draw(_KIND)
        target = draw(st.integers(0, num_qubits - 1))
        theta = draw(st.floats(-math.pi, math.pi, allow_nan=False))
        if kind in ("X", "H", "Z"):
            gates.append(sv.Gate(kind, target, (), 0.0))
        elif kind in ("PHASE", "RZ"):
            gates.append(sv.Gate(kind, target, (), theta))
        else:
            others = [q for q in range(num_qubits) if q != target]
            ctrl_qubits = draw(st.sets(st.sampled_from(others), min_size=1))
            controls = tuple((q, draw(st.booleans())) for q in sorted(ctrl_qubits))
            angle = theta if kind == "MCPHASE" else 0.0
            gates.append(sv.Gate(kind, target, controls, angle))
    return Circuit(num_qubits, gates)


@settings(max_examples=40, deadline=None)
@given(circ=_random_circuit(), seed=st.integers(0, 1000))
def test_circuit_reversibility(circ, seed):
    state = random_state(4, seed)
    before = state.amplitudes.copy()
    apply_circuit(state, circ)
    assert abs(state.norm() - 1) < 1e-9
    apply_circuit(state, circ.inverse())
    assert np.max(np.abs(state.amplitudes - before)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 1000), polarity=st.booleans(),
       kind=st.sampled_from(["MCX", "MCZ", "MCPHASE"]))
def test_control_semantics(seed, polarity, kind):
    """Amplitudes on basis states failing a control are untouched exactly."""
    state = random_state(4, seed)
    before = state.amplitudes.copy()
    gate = sv.Gate(kind, 0, ((2, polarity),), 0.7 if kind == "MCPHASE" else 0.0)
    apply_gate(state, gate)
    bit = (np.arange(16) >> 2) & 1
    unmatched = bit != int(polarity)
    assert np.array_equal(state.amplitudes[unmatched], before[unmatched])


@settings(max_examples=30, deadline=None)
@given(circ=_random_circuit(num_qubits=3, max_gates=15), seed=st.integers(0, 100))
def test_plan_matches_gate_by_gate(circ, seed):
    """The fused execution plan agrees with per-gate application."""
    fast = random_state(3, seed)
    slow = fast.copy()
    apply_circuit(fast, circ)
    for gate in circ.gates:
        apply_gate(slow, gate)
    assert np.max(np.abs(fast.amplitudes - slow.amplitudes)) < 1e-9
