"""Pipeline assembly and search drivers.

``build_encoding`` prepares the superposition of all cycles with their
threshold-shifted weights; ``build_searching_module`` is one Grover
iteration whose oracle is a single Z on the sign bit and whose diffusion is
the cycle generator conjugating a reflection about zero.  ``run_fixed``
executes a caller-chosen iteration count; ``run_min_search`` drives the
threshold-descent exponential search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import statevec as sv
from .errors import CapacityError, ValidationError
from .hcg import HcgLayout, build_hcg, build_hcg_inverse
from .statevec import Circuit, StateVector, apply_circuit, gate_count, new_state
from .tsp import (EncodingParams, Graph, Tour, TourResult, is_hamiltonian_cycle,
                  optimal_tours, random_hc, tour_weight)
from .weights import build_sign_oracle, build_value_decode, build_value_encode

LARGE_STATE_QUBITS = 24  # beyond this, simulation needs an explicit opt-in


def default_value_bits(n: int) -> int:
    """Value-register width used for the reference instances: 5, or 6 at n=8."""
    return 6 if n >= 8 else 5


def check_capacity(total_qubits: int, allow_large: bool) -> None:
    if total_qubits >= LARGE_STATE_QUBITS and not allow_large:
        raise CapacityError(
            f"{total_qubits} qubits needs allow_large "
            f"(2^{total_qubits} amplitudes)"
        )


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the search drivers; lambda controls the schedule growth."""

    iterations: int = 0
    shots: int = 1000
    seed: int = 0
    lam: float = 6 / 5
    cutoff_factor: float = 22.5
    allow_large: bool = False

    def __post_init__(self):
        if not 1 < self.lam < 4 / 3:
            raise ValidationError(f"lambda={self.lam} outside (1, 4/3)")
        if self.iterations < 0 or self.shots < 1:
            raise ValidationError("iterations must be >= 0 and shots >= 1")


@dataclass
class RunReport:
    histogram: dict[Tour, int]
    optimal_fraction: float
    gate_counts: dict[str, int]
    iterations_used: int
    invalid_shots: int = 0


def build_encoding(graph: Graph, params: EncodingParams) -> Circuit:
    """HCg; H^{xM}; U_{w-C_T}; QFT^dag - the full state-preparation circuit."""
    circ = build_hcg(HcgLayout.default(params))
    circ.extend(build_value_encode(graph, params))
    return circ


def build_searching_module(graph: Graph, params: EncodingParams) -> Circuit:
    """One Grover iteration on the encoded subspace.

    Sign-bit oracle, value uncompute, inverse generator, reflection about
    the all-zeros index state, generator, value recompute.
    """
    layout = HcgLayout.default(params)
    index_qubits = list(range(params.n * params.m))
    circ = build_sign_oracle(params)
    circ.extend(build_value_decode(graph, params))
    circ.extend(build_hcg_inverse(layout))
    for q in index_qubits:
        circ.append(sv.x(q))
    circ.append(sv.mcz([(q, True) for q in index_qubits[1:]], index_qubits[0]))
    for q in index_qubits:
        circ.append(sv.x(q))
    circ.extend(build_hcg(layout))
    circ.extend(build_value_encode(graph, params))
    return circ


def index_marginal(state: StateVector, params: EncodingParams) -> np.ndarray:
    """Measurement distribution of the index registers alone."""
    probs = state.probabilities()
    return probs.reshape(1 << params.value_bits, -1).sum(axis=0)


def decode_index_part(index_value: int, params: EncodingParams) -> Tour:
    mask = (1 << params.m) - 1
    return tuple((index_value >> (i * params.m)) & mask for i in range(params.n))


def run_fixed(graph: Graph, params: EncodingParams, config: SearchConfig) -> RunReport:
    """Encode, run a fixed number of searching modules, sample, and score."""
    params.validate_for_graph(graph)
    check_capacity(params.total_qubits, config.allow_large)
    encoding = build_encoding(graph, params)
    module = build_searching_module(graph, params)
    state = new_state(params.total_qubits)
    apply_circuit(state, encoding)
    for _ in range(config.iterations):
        apply_circuit(state, module)
    counts = sv.sample(state, config.shots, config.seed)

    _, optima = optimal_tours(graph)
    optimal_set = set(optima)
    index_mask = (1 << (params.n * params.m)) - 1
    histogram: dict[Tour, int] = {}
    good = 0
    invalid = 0
    for basis, c in counts.items():
        tour = decode_index_part(basis & index_mask, params)
        histogram[tour] = histogram.get(tour, 0) + c
        if tour in optimal_set:
            good += c
        if not is_hamiltonian_cycle(list(tour)):
            invalid += c

    total_counts = gate_count(encoding)
    for kind, c in gate_count(module).items():
        total_counts[kind] = total_counts.get(kind, 0) + c * config.iterations
    return RunReport(
        histogram=histogram,
        optimal_fraction=good / config.shots,
        gate_counts=total_counts,
        iterations_used=config.iterations,
        invalid_shots=invalid,
    )


class _ThresholdSim:
    """Lazily advanced simulation for one threshold value.

    The state after the encoding plus j searching modules is a pure function
    of (graph, params, j), so the index-register distributions are computed
    once per j and reused across measurement rounds and trials.
    """

    def __init__(self, graph: Graph, params: EncodingParams):
        self.params = params
        self.module = build_searching_module(graph, params)
        self.state = new_state(params.total_qubits)
        apply_circuit(self.state, build_encoding(graph, params))
        self.marginals = [index_marginal(self.state, params)]

    def marginal(self, j: int) -> np.ndarray:
        while len(self.marginals) <= j:
            apply_circuit(self.state, self.module)
            self.marginals.append(index_marginal(self.state, self.params))
        return self.marginals[j]


@dataclass
class MinSearchResult:
    tour: Tour
    weight: int
    modules_used: int
    thresholds: list[int] = field(default_factory=list)
    invalid_measurements: int = 0

    def as_tour_result(self) -> TourResult:
        return TourResult(self.tour, self.weight)


def run_min_search(graph: Graph, value_bits: int, config: SearchConfig,
                   sim_cache: dict | None = None) -> MinSearchResult:
    """Threshold-descent minimum search with the exponential schedule.

    Starts from the weight of one random cycle, runs j ~ Uniform[0, l)
    searching modules per round, accepts strictly better measured weights as
    the new threshold, grows l by lambda, and stops once the cumulative
    module count exceeds the budget.  ``sim_cache`` (keyed by threshold) may
    be shared across seeded trials on the same graph.
    """
    n = graph.n
    params_probe = EncodingParams(n, value_bits)
    check_capacity(params_probe.total_qubits, config.allow_large)
    rng = np.random.default_rng(config.seed)
    sqrt_space = math.sqrt(math.factorial(n - 1))
    budget = config.cutoff_factor * sqrt_space

    best_tour = random_hc(n, rng)
    best_weight = tour_weight(graph, best_tour)
    threshold = best_weight
    thresholds = [threshold]
    if sim_cache is None:
        sim_cache = {}

    l = 1.0
    modules_used = 0
    invalid = 0
    while modules_used <= budget:
        j = int(rng.random() * l)
        if threshold not in sim_cache:
            sim_cache[threshold] = _ThresholdSim(
                graph, EncodingParams.for_graph(graph, value_bits, threshold))
        marginal = sim_cache[threshold].marginal(j)
        modules_used += j
        cdf = np.cumsum(marginal)
        draw = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        draw = min(draw, len(marginal) - 1)
        tour = decode_index_part(draw, params_probe)
        if not is_hamiltonian_cycle(list(tour)):
            invalid += 1  # floating-point leakage; counted, never retried
        else:
            w = tour_weight(graph, tour)
            if w < threshold:
                threshold = w
                thresholds.append(w)
                best_tour, best_weight = tour, w
        l = min(config.lam * l, sqrt_space)
    return MinSearchResult(best_tour, best_weight, modules_used, thresholds, invalid)


@dataclass(frozen=True)
class ComplexityRow:
    n: int
    qubits: int
    hcg_gates: int
    encoding_gates: int
    searching_gates: int
    marked_fraction: float


def complexity_report(graphs: list[Graph], value_bits=None) -> list[ComplexityRow]:
    """Structural resource figures per instance; circuits are built, not run."""
    rows = []
    for graph in graphs:
        n = graph.n
        bits = value_bits if value_bits is not None else default_value_bits(n)
        best, optima = optimal_tours(graph)
        params = EncodingParams.for_graph(graph, bits, best + 1)
        hcg_total = len(build_hcg(HcgLayout.default(params)))
        enc_total = len(build_encoding(graph, params))
        search_total = len(build_searching_module(graph, params))
        rows.append(ComplexityRow(
            n=n,
            qubits=params.total_qubits,
            hcg_gates=hcg_total,
            encoding_gates=enc_total,
            searching_gates=search_total,
            marked_fraction=len(optima) / math.factorial(n - 1),
        ))
    return rows
