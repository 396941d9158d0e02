"""Dense statevector simulator with a small primitive gate set.

Conventions used throughout the package:

* Qubit ``q`` is bit ``q`` of the basis-state integer (qubit 0 is least
  significant).
* Multi-qubit registers are passed as ordered qubit lists where entry ``b``
  carries bit ``b`` of the register value (little-endian lists).
* Controls carry a polarity: ``(qubit, True)`` fires on :math:`|1\\rangle`,
  ``(qubit, False)`` fires on :math:`|0\\rangle`.

Multi-controlled gates are applied natively on the statevector (no Toffoli
decomposition), so each counts as one gate in tallies.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, NormDriftError, ValidationError

try:  # numba accelerates the amplitude kernels; numpy views remain the fallback
    from . import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

if os.environ.get("QTSP_NO_NUMBA"):
    _kernels = None

HARD_QUBIT_CAP = 32

_SQRT2_INV = 1.0 / math.sqrt(2.0)

# kinds that take an angle parameter
_ANGLED = {"PHASE", "RZ", "MCPHASE"}
_KINDS = {"X", "H", "Z", "PHASE", "RZ", "MCX", "MCZ", "MCPHASE"}


def max_qubits() -> int:
    """Current qubit capacity: the hard cap, optionally lowered via env.

    The environment variable ``QTSP_MAX_QUBITS`` may lower (never raise)
    the cap.
    """
    cap = HARD_QUBIT_CAP
    env = os.environ.get("QTSP_MAX_QUBITS")
    if env is not None:
        try:
            cap = min(cap, int(env))
        except ValueError:
            raise ValidationError(f"QTSP_MAX_QUBITS is not an integer: {env!r}")
    return cap


@dataclass(frozen=True)
class Gate:
    """One primitive gate: a kind, one target, optional polarized controls."""

    kind: str
    target: int
    controls: tuple[tuple[int, bool], ...] = ()
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ANGLED and not -2 * math.pi <= self.theta <= 2 * math.pi:
            raise ValidationError(f"angle {self.theta} outside [-2pi, 2pi]")
        qubits = [self.target] + [q for q, _ in self.controls]
        if len(set(qubits)) != len(qubits):
            raise ValidationError(f"target/control qubits collide: {qubits}")
        if any(q < 0 for q in qubits):
            raise ValidationError(f"negative qubit index in {qubits}")

    def validate(self, num_qubits: int) -> None:
        top = max([self.target] + [q for q, _ in self.controls])
        if top >= num_qubits:
            raise ValidationError(
                f"gate touches qubit {top} but state has {num_qubits} qubits"
            )

    def inverse(self) -> "Gate":
        if self.kind in _ANGLED:
            return Gate(self.kind, self.target, self.controls, -self.theta)
        return self  # X, H, Z, MCX, MCZ are self-inverse


def _ctrls(controls) -> tuple[tuple[int, bool], ...]:
    return tuple((int(q), bool(p)) for q, p in controls)


def x(target: int) -> Gate:
    return Gate("X", target)


def h(target: int) -> Gate:
    return Gate("H", target)


def z(target: int) -> Gate:
    return Gate("Z", target)


def phase(target: int, theta: float) -> Gate:
    return Gate("PHASE", target, theta=_wrap_angle(theta))


def rz(target: int, theta: float) -> Gate:
    return Gate("RZ", target, theta=_wrap_angle(theta))


def mcx(controls, target: int) -> Gate:
    c = _ctrls(controls)
    return Gate("MCX", target, c) if c else Gate("X", target)


def mcz(controls, target: int) -> Gate:
    c = _ctrls(controls)
    return Gate("MCZ", target, c) if c else Gate("Z", target)


def mcphase(controls, target: int, theta: float) -> Gate:
    c = _ctrls(controls)
    theta = _wrap_angle(theta)
    if not c:
        return Gate("PHASE", target, theta=theta)
    return Gate("MCPHASE", target, c, theta)


def _wrap_angle(theta: float) -> float:
    """Reduce an angle into (-pi, pi]; phase gates are 2pi-periodic."""
    t = math.fmod(theta, 2 * math.pi)
    if t > math.pi:
        t -= 2 * math.pi
    elif t <= -math.pi:
        t += 2 * math.pi
    return t


@dataclass
class Circuit:
    """An ordered gate list over a fixed number of wires."""

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            g.validate(self.num_qubits)

    def append(self, gate: Gate) -> None:
        gate.validate(self.num_qubits)
        self.gates.append(gate)

    def extend(self, other: "Circuit") -> None:
        if other.num_qubits > self.num_qubits:
            raise ValidationError(
                f"cannot extend width-{self.num_qubits} circuit with "
                f"width-{other.num_qubits} circuit"
            )
        self.gates.extend(other.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        width = max(self.num_qubits, other.num_qubits)
        return Circuit(width, self.gates + other.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)])

    def resized(self, num_qubits: int) -> "Circuit":
        """Same gates on a wider (or exactly fitting) wire count."""
        return Circuit(num_qubits, list(self.gates))

    def __len__(self) -> int:
        return len(self.gates)


def gate_count(circuit: Circuit) -> dict[str, int]:
    """Per-kind gate tally; a multi-controlled gate counts as one gate."""
    counts: dict[str, int] = {}
    for g in circuit.gates:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    return counts


class StateVector:
    """Dense complex amplitude array over all 2**num_qubits basis states."""

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def check_norm(self, tol: float = 1e-9) -> None:
        n = self.norm()
        if abs(n - 1.0) > tol:
            raise NormDriftError(f"statevector norm drifted to {n}")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def new_state(num_qubits: int) -> StateVector:
    """The all-zeros computational basis state on ``num_qubits`` wires."""
    cap = max_qubits()
    if not 1 <= num_qubits <= cap:
        raise CapacityError(f"num_qubits={num_qubits} outside [1, {cap}]")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def _control_index(num_qubits: int, controls) -> list:
    idx = [slice(None)] * num_qubits
    for q, pol in controls:
        idx[num_qubits - 1 - q] = 1 if pol else 0
    return idx


def _apply_gate_fast(state: StateVector, gate: Gate) -> StateVector:
    """Gray-code kernel path: one index update per touched amplitude."""
    q = state.num_qubits
    gate.validate(q)
    a = state.amplitudes
    tmask = 1 << gate.target
    fixed = tmask
    base = 0
    for cq, pol in gate.controls:
        fixed |= 1 << cq
        if pol:
            base |= 1 << cq
    free = np.array([1 << b for b in range(q) if not (fixed >> b) & 1],
                    dtype=np.int64)
    kind = gate.kind
    if kind in ("X", "MCX"):
        _kernels.swap_pairs(a, free, base, tmask)
    elif kind == "H":
        _kernels.hadamard(a, free, base, tmask)
    elif kind in ("Z", "MCZ"):
        _kernels.scale(a, free, base | tmask, -1.0 + 0.0j)
    elif kind in ("PHASE", "MCPHASE"):
        _kernels.scale(a, free, base | tmask, np.exp(1j * gate.theta))
    elif kind == "RZ":
        half = np.exp(0.5j * gate.theta)
        _kernels.scale_pair(a, free, base, tmask, half.conjugate(), half)
    else:  # pragma: no cover
        raise ValidationError(f"unknown gate kind {kind!r}")
    return state


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the state."""
    if _kernels is not None:
        return _apply_gate_fast(state, gate)
    q = state.num_qubits
    gate.validate(q)
    view = state.amplitudes.reshape((2,) * q)
    idx = _control_index(q, gate.controls)
    tax = q - 1 - gate.target
    i0 = list(idx)
    i0[tax] = 0
    i1 = list(idx)
    i1[tax] = 1
    i0, i1 = tuple(i0), tuple(i1)

    kind = gate.kind
    if kind in ("X", "MCX"):
        tmp = view[i0].copy()
        view[i0] = view[i1]
        view[i1] = tmp
    elif kind == "H":
        a = view[i0].copy()
        b = view[i1].copy()
        view[i0] = (a + b) * _SQRT2_INV
        view[i1] = (a - b) * _SQRT2_INV
    elif kind in ("Z", "MCZ"):
        view[i1] *= -1.0
    elif kind in ("PHASE", "MCPHASE"):
        view[i1] *= np.exp(1j * gate.theta)
    elif kind == "RZ":
        half = np.exp(1j * gate.theta / 2.0)
        view[i0] *= half.conjugate()
        view[i1] *= half
    else:  # pragma: no cover - guarded by Gate.__post_init__
        raise ValidationError(f"unknown gate kind {kind!r}")
    return state


_DIAG_KINDS = {"Z", "PHASE", "RZ", "MCZ", "MCPHASE"}
_DIAG_FUSE_MIN = 16    # shorter runs are cheaper gate by gate
_DIAG_FUSE_MAX_Q = 25  # beyond this a full diagonal buffer is too large


class _DiagStep:
    """A fused run of diagonal gates; the buffer is built on first use."""

    def __init__(self, gates: list[Gate]):
        self.gates = gates
        self.buffer: np.ndarray | None = None

    def materialize(self, num_qubits: int) -> np.ndarray:
        if self.buffer is None:
            expo = np.zeros(1 << num_qubits, dtype=np.float64)
            for g in self.gates:
                base, free = _masks(num_qubits, g)
                tmask = 1 << g.target
                if g.kind in ("Z", "MCZ"):
                    _kernels.accumulate_phase(expo, free, base | tmask, math.pi)
                elif g.kind in ("PHASE", "MCPHASE"):
                    _kernels.accumulate_phase(expo, free, base | tmask, g.theta)
                else:  # RZ
                    _kernels.accumulate_phase(expo, free, base | tmask, g.theta / 2)
                    _kernels.accumulate_phase(expo, free, base, -g.theta / 2)
            self.buffer = np.exp(1j * expo)
        return self.buffer


def _masks(num_qubits: int, gate: Gate) -> tuple[int, np.ndarray]:
    """(positive-control base, free single-bit masks) for a gate's subset."""
    fixed = 1 << gate.target
    base = 0
    for cq, pol in gate.controls:
        fixed |= 1 << cq
        if pol:
            base |= 1 << cq
    free = np.array([1 << b for b in range(num_qubits) if not (fixed >> b) & 1],
                    dtype=np.int64)
    return base, free


def _build_plan(circuit: Circuit) -> list:
    """Group the gate list into fused execution steps.

    Contiguous uncontrolled X gates collapse to one XOR-mask permutation,
    contiguous uncontrolled H gates on distinct qubits to one Walsh sweep,
    and long diagonal runs to a precomputed diagonal.  Unitary-equivalent to
    gate-by-gate application.
    """
    steps: list = []
    gates = circuit.gates
    q = circuit.num_qubits
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind == "X" and not g.controls:
            xmask = 0
            while i < len(gates) and gates[i].kind == "X" and not gates[i].controls:
                xmask ^= 1 << gates[i].target
                i += 1
            if xmask:
                steps.append(("xor", xmask))
            continue
        if g.kind == "H" and not g.controls:
            hbits: list[int] = []
            while (i < len(gates) and gates[i].kind == "H"
                   and not gates[i].controls and gates[i].target not in hbits):
                hbits.append(gates[i].target)
                i += 1
            offsets = np.zeros(1 << len(hbits), dtype=np.int64)
            for l in range(1, 1 << len(hbits)):
                offsets[l] = offsets[l & (l - 1)] | (1 << hbits[_lowest_set(l)])
            free = np.array([1 << b for b in range(q) if b not in hbits],
                            dtype=np.int64)
            steps.append(("walsh", free, offsets))
            continue
        if g.kind in _DIAG_KINDS:
            j = i
            while j < len(gates) and gates[j].kind in _DIAG_KINDS:
                j += 1
            if j - i >= _DIAG_FUSE_MIN and q <= _DIAG_FUSE_MAX_Q:
                steps.append(("diag", _DiagStep(gates[i:j])))
            else:
                steps.extend(("gate", gg) for gg in gates[i:j])
            i = j
            continue
        steps.append(("gate", g))
        i += 1
    return steps


def _lowest_set(v: int) -> int:
    return (v & -v).bit_length() - 1


def apply_circuit(state: StateVector, circuit: Circuit, check: bool = True) -> StateVector:
    """Apply a circuit's gates in order; verifies the norm afterwards."""
    if circuit.num_qubits != state.num_qubits:
        raise ValidationError(
            f"circuit width {circuit.num_qubits} != state width {state.num_qubits}"
        )
    if _kernels is None:
        for g in circuit.gates:
            apply_gate(state, g)
    else:
        plan = getattr(circuit, "_plan", None)
        if plan is None or plan[0] != len(circuit.gates):
            plan = (len(circuit.gates), _build_plan(circuit))
            circuit._plan = plan
        a = state.amplitudes
        for step in plan[1]:
            if step[0] == "gate":
                _apply_gate_fast(state, step[1])
            elif step[0] == "xor":
                free = np.array(
                    [1 << b for b in range(state.num_qubits)
                     if (1 << b) != (step[1] & -step[1])], dtype=np.int64)
                _kernels.xor_swap(a, free, step[1])
            elif step[0] == "walsh":
                _kernels.walsh(a, step[1], step[2])
            else:  # diag
                a *= step[1].materialize(state.num_qubits)
    if check:
        state.check_norm()
    return state


def build_qft(qubits, num_qubits: int | None = None) -> Circuit:
    """Exact quantum Fourier transform on the given little-endian register.

    ``qubits[b]`` carries bit ``b`` of the transformed integer.  The circuit
    is the standard Hadamard/controlled-phase cascade plus the bit-reversal
    network (each swap as three CNOTs), so the unitary is exactly
    :math:`F|x\\rangle = 2^{-M/2}\\sum_k e^{2\\pi i xk/2^M}|k\\rangle`.
    """
    qs = list(qubits)
    if not qs:
        raise ValidationError("QFT needs at least one qubit")
    if len(set(qs)) != len(qs):
        raise ValidationError(f"duplicate qubits in QFT register: {qs}")
    m = len(qs)
    width = num_qubits if num_qubits is not None else max(qs) + 1
    circ = Circuit(width)
    # bit reversal first, then the cascade starting from the low wire; the
    # composite equals the unreversed QFT (cascade alone is F up to reversal)
    for b in range(m // 2):
        a, c = qs[b], qs[m - 1 - b]
        circ.append(mcx([(a, True)], c))
        circ.append(mcx([(c, True)], a))
        circ.append(mcx([(a, True)], c))
    for i in range(m):
        circ.append(h(qs[i]))
        for d in range(1, m - i):
            circ.append(mcphase([(qs[i + d], True)], qs[i], 2 * math.pi / (1 << (d + 1))))
    return circ


def build_inverse_qft(qubits, num_qubits: int | None = None) -> Circuit:
    """Exact adjoint of :func:`build_qft` on the same register."""
    return build_qft(qubits, num_qubits).inverse()


def sample(state: StateVector, shots: int, seed: int) -> dict[int, int]:
    """Draw basis-state indices from the measurement distribution.

    Deterministic for a fixed seed; the returned counts sum to ``shots``.
    """
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    cdf = np.cumsum(probs)
    cdf[-1] = max(cdf[-1], 1.0)  # guard the top edge against rounding
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    values, counts = np.unique(draws, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}
