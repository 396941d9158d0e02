"""Value-register arithmetic: geometric phase loading and weight encoding.

An integer k is written into the M-bit value register without quantum
adders: starting from the uniform superposition, single-qubit phase gates
imprint the geometric sequence e^{i j theta} with theta = 2 pi k / 2^M, and
an inverse QFT collapses it to |k mod 2^M>.  Edge weights enter as
controlled versions of that phase loading, one block per (register, node)
pair, so the loaded integer is the tour weight minus the threshold.
"""

from __future__ import annotations

import math

from . import statevec as sv
from .statevec import Circuit, build_inverse_qft, build_qft
from .tsp import EncodingParams, Graph


def build_ug(value_register, theta: float, num_qubits: int | None = None) -> Circuit:
    """Phase e^{i j theta} on |j> of the little-endian register; no interactions."""
    reg = list(value_register)
    width = num_qubits if num_qubits is not None else max(reg) + 1
    circ = Circuit(width)
    for b, q in enumerate(reg):
        circ.append(sv.phase(q, (1 << b) * theta))
    return circ


def _controlled_ug(value_reg, controls, theta: float, width: int) -> Circuit:
    circ = Circuit(width)
    for b, q in enumerate(value_reg):
        circ.append(sv.mcphase(controls, q, (1 << b) * theta))
    return circ


def build_weight_sum(graph: Graph, params: EncodingParams) -> Circuit:
    """U_{w-C_T}: phase-accumulate every edge weight, then subtract the threshold.

    For each index register i and candidate successor c there is one block of
    controlled phase gates (controls matching c's bit pattern), N^2 blocks in
    all, plus one uncontrolled block for -C_T.  Diagonal in the computational
    basis.
    """
    params.validate_for_graph(graph)
    n, m = params.n, params.m
    value_reg = params.value_register()
    width = params.total_qubits
    unit = 2 * math.pi / (1 << params.value_bits)
    circ = Circuit(width)
    for i in range(n):
        reg = params.index_register(i)
        for c in range(n):
            controls = [(reg[b], bool((c >> b) & 1)) for b in range(m)]
            circ.extend(_controlled_ug(value_reg, controls, graph.weights[i][c] * unit, width))
    circ.extend(build_ug(value_reg, -params.threshold * unit, width))
    return circ


def build_value_encode(graph: Graph, params: EncodingParams) -> Circuit:
    """H^{xM}; U_{w-C_T}; QFT^dag - writes (w_sigma - C_T) mod 2^M per branch."""
    width = params.total_qubits
    value_reg = params.value_register()
    circ = Circuit(width)
    for q in value_reg:
        circ.append(sv.h(q))
    circ.extend(build_weight_sum(graph, params))
    circ.extend(build_inverse_qft(value_reg, width))
    return circ


def build_value_decode(graph: Graph, params: EncodingParams) -> Circuit:
    """Exact adjoint of the encode pipeline; returns the value register to zero."""
    return build_value_encode(graph, params).inverse()


def build_sign_oracle(params: EncodingParams) -> Circuit:
    """Z on the sign bit: branches with a negative encoded value pick up -1."""
    circ = Circuit(params.total_qubits)
    circ.append(sv.z(params.sign_qubit))
    return circ
