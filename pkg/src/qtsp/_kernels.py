"""Numba amplitude kernels.

Each kernel walks the subset of basis indices whose control bits match, in
Gray-code order so the running index is updated by a single XOR per step.
``free_bits`` holds the single-bit masks of the unconstrained qubits and
``base`` the OR of the positively-controlled bits (plus the target bit for
the diagonal kernels, which only touch target=1 amplitudes).
"""

import numba
import numpy as np

_SIG = numba.void(numba.complex128[::1], numba.int64[::1], numba.int64, numba.int64)
_SQRT2_INV = 1.0 / np.sqrt(2.0)


@numba.njit(numba.int64(numba.int64), inline="always", cache=True)
def _low_bit(p):
    b = 0
    while not (p >> b) & 1:
        b += 1
    return b


@numba.njit(_SIG, cache=True)
def swap_pairs(a, free_bits, base, tmask):
    idx = base
    t = a[idx]
    a[idx] = a[idx | tmask]
    a[idx | tmask] = t
    for p in range(1, 1 << len(free_bits)):
        idx ^= free_bits[_low_bit(p)]
        t = a[idx]
        a[idx] = a[idx | tmask]
        a[idx | tmask] = t


@numba.njit(_SIG, cache=True)
def hadamard(a, free_bits, base, tmask):
    idx = base
    for p in range(1 << len(free_bits)):
        if p:
            idx ^= free_bits[_low_bit(p)]
        j = idx | tmask
        x = a[idx]
        y = a[j]
        a[idx] = (x + y) * _SQRT2_INV
        a[j] = (x - y) * _SQRT2_INV


@numba.njit(numba.void(numba.complex128[::1], numba.int64[::1], numba.int64,
                       numba.complex128), cache=True)
def scale(a, free_bits, base, factor):
    idx = base
    a[idx] *= factor
    for p in range(1, 1 << len(free_bits)):
        idx ^= free_bits[_low_bit(p)]
        a[idx] *= factor


@numba.njit(numba.void(numba.complex128[::1], numba.int64[::1], numba.int64,
                       numba.int64, numba.complex128, numba.complex128), cache=True)
def scale_pair(a, free_bits, base, tmask, f0, f1):
    idx = base
    for p in range(1 << len(free_bits)):
        if p:
            idx ^= free_bits[_low_bit(p)]
        a[idx] *= f0
        a[idx | tmask] *= f1


@numba.njit(numba.void(numba.float64[::1], numba.int64[::1], numba.int64,
                       numba.float64), cache=True)
def accumulate_phase(expo, free_bits, base, theta):
    """Add theta to the phase exponent on the control-matched subset."""
    idx = base
    expo[idx] += theta
    for p in range(1, 1 << len(free_bits)):
        idx ^= free_bits[_low_bit(p)]
        expo[idx] += theta


@numba.njit(numba.void(numba.complex128[::1], numba.int64[::1], numba.int64),
            cache=True)
def xor_swap(a, free_bits, xmask):
    """Permutation a[i] <-> a[i ^ xmask]: a run of uncontrolled X gates."""
    idx = 0
    t = a[idx]
    a[idx] = a[idx ^ xmask]
    a[idx ^ xmask] = t
    for p in range(1, 1 << len(free_bits)):
        idx ^= free_bits[_low_bit(p)]
        t = a[idx]
        a[idx] = a[idx ^ xmask]
        a[idx ^ xmask] = t


@numba.njit(numba.void(numba.complex128[::1], numba.int64[::1], numba.int64[::1]),
            cache=True)
def walsh(a, free_bits, offsets):
    """Hadamard on several qubits at once, in a single memory sweep.

    ``offsets[l]`` deposits the bits of l onto the transformed qubits; the
    in-group transform is a fast Walsh-Hadamard.
    """
    k2 = len(offsets)
    buf = np.empty(k2, dtype=np.complex128)
    norm = 1.0 / np.sqrt(k2)
    idx = 0
    for p in range(1 << len(free_bits)):
        if p:
            idx ^= free_bits[_low_bit(p)]
        for l in range(k2):
            buf[l] = a[idx | offsets[l]]
        h = 1
        while h < k2:
            for s in range(0, k2, h * 2):
                for t in range(s, s + h):
                    x = buf[t]
                    y = buf[t + h]
                    buf[t] = x + y
                    buf[t + h] = x - y
            h *= 2
        for l in range(k2):
            a[idx | offsets[l]] = buf[l] * norm
