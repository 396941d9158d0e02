"""Hamiltonian-cycle superposition generator (HCg) and its building blocks.

The generator starts from the 2-cycle on the two highest nodes and inserts
each remaining vertex v (from N-3 down to 0) in superposition: an exact
amplitude amplification puts register v into the uniform superposition over
{v+1..N-1}, then per-register gadgets (match / conditional-XOR / flag
release / zero-to-v rewrite) splice v into the cycle wherever register v's
value matches an existing successor.  Applied to the all-zeros state the
full circuit leaves the index registers in the uniform superposition over
all (N-1)! cycle encodings, with every borrowed ancilla returned to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import statevec as sv
from .errors import ValidationError
from .statevec import Circuit
from .tsp import EncodingParams


@dataclass(frozen=True)
class AamParams:
    """Iteration count and phase of the zero-failure amplitude amplification."""

    marked_count: int
    m: int
    iterations: int
    phi: float

    @property
    def fraction(self) -> float:
        return self.marked_count / (1 << self.m)


def aam_params(marked_count: int, m: int) -> AamParams:
    """Closed-form (n, phi) for exactly amplifying t of 2**m basis states."""
    if not 1 <= marked_count < (1 << m):
        raise ValidationError(f"marked_count={marked_count} outside [1, 2^{m})")
    f = marked_count / (1 << m)
    beta = math.asin(math.sqrt(f))
    n = max(1, math.ceil(math.pi / (4 * beta) - 0.5))
    phi = 2 * math.asin(math.sin(math.pi / (4 * n + 2)) / math.sqrt(f))
    return AamParams(marked_count, m, n, phi)


def _aligned_blocks(lo: int, hi: int) -> list[tuple[int, int]]:
    """Disjoint power-of-two aligned blocks (start, log2size) covering [lo, hi]."""
    blocks = []
    a = lo
    while a <= hi:
        s = 0
        while a % (1 << (s + 1)) == 0 and a + (1 << (s + 1)) - 1 <= hi:
            s += 1
        blocks.append((a, s))
        a += 1 << s
    return blocks


def _range_comparator(reg: list[int], lo: int, hi: int, anc: int, width: int) -> Circuit:
    """Toggle ``anc`` exactly on basis states whose register value is in [lo, hi]."""
    m = len(reg)
    circ = Circuit(width)
    for start, s in _aligned_blocks(lo, hi):
        controls = [(reg[b], bool((start >> b) & 1)) for b in range(s, m)]
        circ.append(sv.mcx(controls, anc))
    return circ


def build_aam(target_register, target_set: tuple[int, int], ancilla: int,
              num_qubits: int | None = None) -> Circuit:
    """Exact amplification of a contiguous integer range from the zero state.

    Applied to |0^m>|0>, leaves the register in the uniform superposition
    over {lo..hi} (up to one global phase) with the ancilla back at |0>.
    Each iteration is H S_0(phi) H S_chi(phi); S_chi phases the range via a
    comparator kicked back through the ancilla, S_0 phases the zero state.
    """
    reg = list(target_register)
    m = len(reg)
    lo, hi = target_set
    if lo > hi:
        raise ValidationError(f"empty target range [{lo}, {hi}]")
    if lo < 0 or hi >= (1 << m):
        raise ValidationError(f"range [{lo}, {hi}] outside [0, 2^{m})")
    width = num_qubits if num_qubits is not None else max(reg + [ancilla]) + 1
    params = aam_params(hi - lo + 1, m)
    comparator = _range_comparator(reg, lo, hi, ancilla, width)

    circ = Circuit(width)
    for q in reg:
        circ.append(sv.h(q))
    for _ in range(params.iterations):
        # S_chi(phi): e^{i phi} on range members, via ancilla kickback
        circ.extend(comparator)
        circ.append(sv.phase(ancilla, params.phi))
        circ.extend(comparator)
        for q in reg:
            circ.append(sv.h(q))
        # S_0(phi): e^{i phi} on |0^m>, X-conjugated phase with negative controls
        circ.append(sv.x(reg[0]))
        circ.append(sv.mcphase([(q, False) for q in reg[1:]], reg[0], params.phi))
        circ.append(sv.x(reg[0]))
        for q in reg:
            circ.append(sv.h(q))
    return circ


def _check_disjoint(*registers) -> None:
    flat = [q for reg in registers for q in reg]
    if len(set(flat)) != len(flat):
        raise ValidationError(f"register qubit sets overlap: {registers}")


def build_match_module(reg_a, reg_b, flags, num_qubits: int | None = None) -> Circuit:
    """Module A: flag bit j records whether bit j of the two registers agree."""
    reg_a, reg_b, flags = list(reg_a), list(reg_b), list(flags)
    if not len(reg_a) == len(reg_b) == len(flags):
        raise ValidationError("registers and flags must have equal width")
    _check_disjoint(reg_a, reg_b, flags)
    width = num_qubits if num_qubits is not None else max(reg_a + reg_b + flags) + 1
    circ = Circuit(width)
    for j in range(len(flags)):
        circ.append(sv.mcx([(reg_a[j], True), (reg_b[j], True)], flags[j]))
        circ.append(sv.mcx([(reg_a[j], False), (reg_b[j], False)], flags[j]))
    return circ


def build_xor_zero(reg_a, reg_b, flags, num_qubits: int | None = None) -> Circuit:
    """Module B: when all flags are set (registers equal), XOR reg_b to zero."""
    reg_a, reg_b, flags = list(reg_a), list(reg_b), list(flags)
    _check_disjoint(reg_a, reg_b, flags)
    width = num_qubits if num_qubits is not None else max(reg_a + reg_b + flags) + 1
    circ = Circuit(width)
    all_flags = [(f, True) for f in flags]
    for j in range(len(reg_b)):
        circ.append(sv.mcx(all_flags + [(reg_a[j], True)], reg_b[j]))
    return circ


def build_release(reg_a, reg_b, flags, num_qubits: int | None = None) -> Circuit:
    """Module C plus the repeat-gate: return the flags to zero on every branch.

    On unmatched branches the repeated match module undoes module A exactly.
    On the matched branch reg_b is now all-zero, so the repeat only clears
    flag bits where reg_a's bit is 0; the module-C gates (gated on reg_b
    being all-zero) clear the bits where reg_a's bit is 1.  Exactly one of
    the two fires per flag qubit per branch.
    """
    reg_a, reg_b, flags = list(reg_a), list(reg_b), list(flags)
    _check_disjoint(reg_a, reg_b, flags)
    width = num_qubits if num_qubits is not None else max(reg_a + reg_b + flags) + 1
    circ = Circuit(width)
    b_zero = [(q, False) for q in reg_b]
    for j in range(len(flags)):
        circ.append(sv.mcx([(reg_a[j], True)] + b_zero, flags[j]))
    circ.extend(build_match_module(reg_a, reg_b, flags, width))
    return circ


def build_set_value(reg, v: int, aux: int, num_qubits: int | None = None) -> Circuit:
    """Module D: rewrite the zero sentinel |0^m> to |v>; other values untouched.

    The aux qubit records "register is zero", the bits of v are written under
    its control, and it is uncomputed against the pattern v.  Safe because no
    in-support branch holds v in this register before the rewrite.
    """
    reg = list(reg)
    m = len(reg)
    if v >= (1 << m):
        raise ValidationError(f"value {v} does not fit in {m} bits")
    width = num_qubits if num_qubits is not None else max(reg + [aux]) + 1
    circ = Circuit(width)
    if v == 0:
        return circ
    circ.append(sv.mcx([(q, False) for q in reg], aux))
    for b in range(m):
        if (v >> b) & 1:
            circ.append(sv.mcx([(aux, True)], reg[b]))
    circ.append(sv.mcx([(reg[b], bool((v >> b) & 1)) for b in range(m)], aux))
    return circ


@dataclass(frozen=True)
class HcgLayout:
    """Qubit assignment for the generator: index registers plus borrowed ancillas.

    Flags and the aux wire are borrowed from the value register, which is
    all-zero whenever the generator (or its inverse) runs.
    """

    params: EncodingParams
    flag_qubits: tuple[int, ...]
    aux_qubit: int

    def __post_init__(self):
        p = self.params
        value = set(p.value_register())
        borrowed = set(self.flag_qubits) | {self.aux_qubit}
        if len(self.flag_qubits) != p.m:
            raise ValidationError(f"need {p.m} flag qubits, got {len(self.flag_qubits)}")
        if len(borrowed) != p.m + 1 or not borrowed <= value:
            raise ValidationError(
                f"borrowed qubits {sorted(borrowed)} must be {p.m + 1} distinct "
                f"value-register qubits {sorted(value)}"
            )

    @staticmethod
    def default(params: EncodingParams) -> "HcgLayout":
        base = params.n * params.m
        return HcgLayout(params, tuple(range(base, base + params.m)), base + params.m)


def build_hcg(layout: HcgLayout) -> Circuit:
    """Full-width circuit preparing the uniform superposition over all HCs."""
    p = layout.params
    n, m, width = p.n, p.m, p.total_qubits
    flags = list(layout.flag_qubits)
    aux = layout.aux_qubit
    reg = p.index_register

    circ = Circuit(width)
    # 2-cycle seed: register N-2 holds N-1, register N-1 holds N-2
    for b in range(m):
        if ((n - 1) >> b) & 1:
            circ.append(sv.x(reg(n - 2)[b]))
        if ((n - 2) >> b) & 1:
            circ.append(sv.x(reg(n - 1)[b]))
    for v in range(n - 3, -1, -1):
        circ.extend(build_aam(reg(v), (v + 1, n - 1), aux, width))
        for i in range(v + 1, n):
            circ.extend(build_match_module(reg(v), reg(i), flags, width))
            circ.extend(build_xor_zero(reg(v), reg(i), flags, width))
            circ.extend(build_release(reg(v), reg(i), flags, width))
            circ.extend(build_set_value(reg(i), v, aux, width))
    return circ


def build_hcg_inverse(layout: HcgLayout) -> Circuit:
    return build_hcg(layout).inverse()
