"""Cycle generator: exact amplitude amplification and the register gadgets."""

import math

import numpy as np
import pytest

from qtsp import (EncodingParams, HcgLayout, ValidationError, aam_params,
                  apply_circuit, build_aam, build_hcg, build_hcg_inverse,
                  build_match_module, build_release, build_set_value,
                  build_xor_zero, encode_tour, enumerate_hcs)

from conftest import basis_state


# ---------------------------------------------------------------- AAM

def test_aam_params_examples():
    p = aam_params(3, 3)  # f = 3/8
    assert p.iterations == 1
    assert abs(p.phi - 1.91063) < 1e-4

    p = aam_params(2, 2)  # f = 1/2
    assert p.iterations == 1
    assert abs(p.phi - math.pi / 2) < 1e-12

    p = aam_params(3, 2)  # f = 3/4
    assert p.iterations == 1
    assert abs(p.phi - 1.23096) < 1e-4


def test_aam_params_validation():
    with pytest.raises(ValidationError):
        aam_params(0, 3)
    with pytest.raises(ValidationError):
        aam_params(8, 3)


def _run_aam(m, lo, hi):
    state = basis_state(m + 1, 0)
    apply_circuit(state, build_aam(range(m), (lo, hi), m))
    return state


def _check_exact_range(state, m, lo, hi):
    probs = state.probabilities()
    members = probs[lo:hi + 1]
    assert abs(members.sum() - 1) < 1e-9
    assert np.max(np.abs(members - 1 / (hi - lo + 1))) < 1e-9
    # amplitudes equal as complex numbers, ancilla back to zero
    amps = state.amplitudes[lo:hi + 1]
    assert np.max(np.abs(amps - amps[0])) < 1e-7
    assert probs[1 << m:].sum() < 1e-9


def test_aam_three_of_eight():
    _check_exact_range(_run_aam(3, 2, 4), 3, 2, 4)


def test_aam_three_of_four():
    state = _run_aam(2, 1, 3)
    _check_exact_range(state, 2, 1, 3)
    assert state.probabilities()[0] < 1e-9


def test_aam_single_marked():
    _check_exact_range(_run_aam(2, 3, 3), 2, 3, 3)


def test_aam_range_validation():
    with pytest.raises(ValidationError):
        build_aam(range(2), (3, 1), 2)
    with pytest.raises(ValidationError):
        build_aam(range(2), (0, 4), 2)


# ---------------------------------------------------------------- gadgets
# layout for gadget tests: reg_a = 0..2, reg_b = 3..5, flags = 6..8, aux = 9

def _gadget_state(a, b, flags=0):
    return basis_state(10, a | (b << 3) | (flags << 6))


def _read(state):
    idx = int(np.argmax(state.probabilities()))
    assert abs(state.probabilities()[idx] - 1) < 1e-12
    return idx & 7, (idx >> 3) & 7, (idx >> 6) & 7


A, B, F = range(3), range(3, 6), range(6, 9)


def test_match_module_equal():
    state = _gadget_state(3, 3)
    apply_circuit(state, build_match_module(A, B, F, 10))
    assert _read(state) == (3, 3, 0b111)


def test_match_module_all_bits_differ():
    state = _gadget_state(3, 4)
    apply_circuit(state, build_match_module(A, B, F, 10))
    assert _read(state) == (3, 4, 0)


def test_match_module_partial():
    state = _gadget_state(2, 3)
    apply_circuit(state, build_match_module(A, B, F, 10))
    assert _read(state) == (2, 3, 0b110)  # high two bits agree


def test_xor_zero_fires_on_full_flags():
    state = _gadget_state(3, 3, flags=0b111)
    apply_circuit(state, build_xor_zero(A, B, F, 10))
    assert _read(state) == (3, 0, 0b111)


def test_xor_zero_idle_without_flags():
    state = _gadget_state(3, 4, flags=0)
    apply_circuit(state, build_xor_zero(A, B, F, 10))
    assert _read(state) == (3, 4, 0)


def test_xor_zero_requires_full_pattern():
    state = _gadget_state(2, 3, flags=0b110)
    apply_circuit(state, build_xor_zero(A, B, F, 10))
    assert _read(state) == (2, 3, 0b110)


def test_release_matched_branch():
    state = _gadget_state(3, 0, flags=0b111)
    apply_circuit(state, build_release(A, B, F, 10))
    assert _read(state) == (3, 0, 0)


def test_release_unmatched_branch():
    state = _gadget_state(3, 4, flags=0)
    apply_circuit(state, build_release(A, B, F, 10))
    assert _read(state) == (3, 4, 0)


def test_release_disentangles_superposition():
    """A;B;C+repeat over matched and unmatched branches leaves flags at zero."""
    amps = np.zeros(1 << 10, dtype=np.complex128)
    for a, b in [(3, 3), (3, 4), (5, 2), (2, 2)]:
        amps[a | (b << 3)] = 0.5
    from qtsp.statevec import StateVector
    state = StateVector(10, amps)
    circ = build_match_module(A, B, F, 10)
    circ.extend(build_xor_zero(A, B, F, 10))
    circ.extend(build_release(A, B, F, 10))
    apply_circuit(state, circ)
    probs = state.probabilities().reshape(16, 64)  # (aux+flags, registers)
    assert abs(probs[0].sum() - 1) < 1e-9  # flags+aux exactly |0>


def test_set_value_examples():
    state = _gadget_state(0, 0)
    apply_circuit(state, build_set_value(A, 1, 9, 10))
    assert _read(state) == (1, 0, 0)

    state = _gadget_state(4, 0)
    apply_circuit(state, build_set_value(A, 1, 9, 10))
    assert _read(state) == (4, 0, 0)

    assert len(build_set_value(range(2), 0, 2)) == 0  # v=0 is the identity


def test_set_value_validation():
    with pytest.raises(ValidationError):
        build_set_value(range(2), 4, 2)


def test_gadget_disjointness_check():
    with pytest.raises(ValidationError):
        build_match_module(range(3), range(2, 5), range(6, 9))


# ---------------------------------------------------------------- full HCg

def _hcg_state(n, value_bits):
    params = EncodingParams(n, value_bits)
    layout = HcgLayout.default(params)
    state = basis_state(params.total_qubits, 0)
    apply_circuit(state, build_hcg(layout))
    return state, params, layout


def test_hcg_n4_support_and_uniformity():
    state, params, _ = _hcg_state(4, 5)
    expected = {encode_tour(t, params) for t in enumerate_hcs(4)}
    probs = state.probabilities()
    support = set(np.flatnonzero(probs > 1e-9).tolist())
    assert support == expected
    amps = state.amplitudes[sorted(expected)]
    assert np.max(np.abs(np.abs(amps) - 1 / math.sqrt(6))) < 1e-9
    assert np.max(np.abs(amps - amps[0])) < 1e-7  # single global phase


def test_hcg_n5_support():
    state, params, _ = _hcg_state(5, 5)
    expected = {encode_tour(t, params) for t in enumerate_hcs(5)}
    probs = state.probabilities()
    support = set(np.flatnonzero(probs > 1e-9).tolist())
    assert support == expected
    amps = state.amplitudes[sorted(expected)]
    assert np.max(np.abs(amps - amps[0])) < 1e-7


def test_hcg_ancilla_cleanliness():
    state, params, _ = _hcg_state(4, 5)
    probs = state.probabilities().reshape(1 << params.value_bits, -1)
    assert abs(probs[0].sum() - 1) < 1e-9


def test_hcg_inverse_roundtrip():
    params = EncodingParams(4, 5)
    layout = HcgLayout.default(params)
    state = basis_state(params.total_qubits, 0)
    apply_circuit(state, build_hcg(layout))
    apply_circuit(state, build_hcg_inverse(layout))
    assert abs(abs(state.amplitudes[0]) - 1) < 1e-9


def test_hcg_layout_validation():
    params = EncodingParams(4, 5)
    with pytest.raises(ValidationError):
        HcgLayout(params, (0, 1), 8)  # flags outside the value register
    with pytest.raises(ValidationError):
        HcgLayout(params, (8, 9, 10), 11)  # too many flags for m=2
