"""TSP instances, register encoding, and the classical brute-force oracle.

A tour is stored as a successor array: ``successor[i]`` is the node visited
after node ``i``.  Feasible tours are exactly the permutations whose cycle
decomposition is a single N-cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError, ValidationError

ENUMERATION_CAP = 10  # (n-1)! blows up quickly; hard stop for the oracle


@dataclass(frozen=True)
class Graph:
    """Complete graph with symmetric non-negative integer weights."""

    n: int
    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        w = self.weights
        if self.n < 2 or len(w) != self.n or any(len(row) != self.n for row in w):
            raise ValidationError(f"weights must be a {self.n}x{self.n} matrix")
        for i in range(self.n):
            if w[i][i] != 0:
                raise ValidationError(f"nonzero diagonal at ({i},{i})")
            for j in range(self.n):
                if w[i][j] < 0:
                    raise ValidationError(f"negative weight at ({i},{j})")
                if w[i][j] != w[j][i]:
                    raise ValidationError(f"asymmetric weights at ({i},{j})")

    @staticmethod
    def from_matrix(matrix) -> "Graph":
        rows = tuple(tuple(int(v) for v in row) for row in matrix)
        return Graph(len(rows), rows)

    @property
    def max_tour_weight(self) -> int:
        return self.n * max(max(row) for row in self.weights)


def parse_graph(text: str) -> Graph:
    """Parse the plain-text format: line 1 is N, then N adjacency rows."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty graph file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValidationError(f"first line must be the node count, got {lines[0]!r}")
    if len(lines) != n + 1:
        raise ValidationError(f"expected {n} adjacency rows, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        try:
            rows.append([int(v) for v in ln.split()])
        except ValueError:
            raise ValidationError(f"non-integer entry in row {ln!r}")
    return Graph.from_matrix(rows)


def load_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


@dataclass(frozen=True)
class EncodingParams:
    """Register scheme: N index registers of m bits plus an M-bit value register.

    The value register holds ``tour weight - threshold`` in complement code;
    its top bit (the globally most significant qubit) is the sign bit.
    """

    n: int
    value_bits: int
    threshold: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"need at least 2 nodes, got {self.n}")
        if self.value_bits < self.m + 1:
            raise ValidationError(
                f"value_bits={self.value_bits} < m+1={self.m + 1}; the HC "
                "generator borrows m+1 ancillas from the value register"
            )

    @property
    def m(self) -> int:
        return max(1, math.ceil(math.log2(self.n)))

    @property
    def total_qubits(self) -> int:
        return self.n * self.m + self.value_bits

    def index_register(self, i: int) -> list[int]:
        """Little-endian qubit list of index register ``i``."""
        return list(range(i * self.m, (i + 1) * self.m))

    def value_register(self) -> list[int]:
        return list(range(self.n * self.m, self.total_qubits))

    @property
    def sign_qubit(self) -> int:
        return self.total_qubits - 1

    def validate_for_graph(self, graph: Graph) -> None:
        """Reject configurations where some tour difference would wrap."""
        if graph.n != self.n:
            raise ValidationError(f"graph has {graph.n} nodes, params expect {self.n}")
        # exact check over the actual tours; the loose N*max(w) bound would
        # reject workable reference configurations
        lo, hi = -(1 << (self.value_bits - 1)), (1 << (self.value_bits - 1))
        for tour in enumerate_hcs(self.n):
            d = tour_weight(graph, tour) - self.threshold
            if not lo <= d < hi:
                raise ValidationError(
                    f"weight difference {d} for tour {tour} wraps outside "
                    f"[{lo}, {hi})"
                )

    @staticmethod
    def for_graph(graph: Graph, value_bits: int, threshold: int) -> "EncodingParams":
        params = EncodingParams(graph.n, value_bits, threshold)
        params.validate_for_graph(graph)
        return params


Tour = tuple[int, ...]  # successor array


@dataclass(frozen=True)
class TourResult:
    tour: Tour
    weight: int


def is_hamiltonian_cycle(values) -> bool:
    """True iff ``values`` is a permutation forming one N-cycle."""
    n = len(values)
    if sorted(values) != list(range(n)):
        return False
    seen = 1
    node = values[0]
    while node != 0 and seen <= n:
        node = values[node]
        seen += 1
    return seen == n


def _cycles_on(vertices: list[int]) -> list[dict[int, int]]:
    """All single cycles on a sorted vertex set, by recursive edge insertion.

    Starting from the 2-cycle on the two largest vertices, each smaller
    vertex v is inserted into every edge u -> s(u) of every shorter cycle,
    replacing it with u -> v and v -> s(u).
    """
    if len(vertices) == 2:
        a, b = vertices
        return [{a: b, b: a}]
    v, rest = vertices[0], vertices[1:]
    cycles = []
    for cyc in _cycles_on(rest):
        for u in rest:
            child = dict(cyc)
            child[v] = child[u]
            child[u] = v
            cycles.append(child)
    return cycles


def enumerate_hcs(n: int) -> list[Tour]:
    """All (n-1)! Hamiltonian cycles on nodes 0..n-1."""
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    if n > ENUMERATION_CAP:
        raise CapacityError(f"refusing to enumerate {n}! cycles (cap {ENUMERATION_CAP})")
    return [tuple(c[i] for i in range(n)) for c in _cycles_on(list(range(n)))]


def tour_weight(graph: Graph, tour: Tour) -> int:
    return sum(graph.weights[i][tour[i]] for i in range(graph.n))


def optimal_tours(graph: Graph) -> tuple[int, list[Tour]]:
    """Minimum tour weight and every tour attaining it, by brute force."""
    best = None
    winners: list[Tour] = []
    for tour in enumerate_hcs(graph.n):
        w = tour_weight(graph, tour)
        if best is None or w < best:
            best, winners = w, [tour]
        elif w == best:
            winners.append(tour)
    return best, winners


def random_hc(n: int, rng: np.random.Generator) -> Tour:
    """One uniformly random Hamiltonian cycle (no enumeration)."""
    order = [0] + [int(v) for v in rng.permutation(np.arange(1, n))]
    succ = [0] * n
    for k in range(n):
        succ[order[k]] = order[(k + 1) % n]
    return tuple(succ)


def encode_tour(tour: Tour, params: EncodingParams) -> int:
    """Basis index with index register i holding tour[i]; value bits zero."""
    if len(tour) != params.n or not is_hamiltonian_cycle(list(tour)):
        raise ValidationError(f"{tour} is not a Hamiltonian cycle on {params.n} nodes")
    index = 0
    for i, succ in enumerate(tour):
        index |= succ << (i * params.m)
    return index


def decode_basis(index: int, params: EncodingParams) -> tuple[tuple[int, ...], int]:
    """Split a basis integer into register values and the signed value field."""
    if not 0 <= index < (1 << params.total_qubits):
        raise ValidationError(f"basis index {index} out of range")
    mask = (1 << params.m) - 1
    registers = tuple((index >> (i * params.m)) & mask for i in range(params.n))
    raw = (index >> (params.n * params.m)) & ((1 << params.value_bits) - 1)
    if raw >= 1 << (params.value_bits - 1):
        raw -= 1 << params.value_bits
    return registers, raw
