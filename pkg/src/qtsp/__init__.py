"""Quantum TSP pipeline on an exact statevector simulator.

Prepares the uniform superposition over all Hamiltonian cycles with
polynomially many gates, phase-encodes tour weights through a QFT shortcut,
and extracts minimum-weight tours with Grover iterations.
"""

from importlib import resources

from .engine import (MinSearchResult, RunReport, SearchConfig, build_encoding,
                     build_searching_module, complexity_report,
                     default_value_bits, run_fixed, run_min_search)
from .errors import CapacityError, NormDriftError, ValidationError
from .hcg import (AamParams, HcgLayout, aam_params, build_aam, build_hcg,
                  build_hcg_inverse, build_match_module, build_release,
                  build_set_value, build_xor_zero)
from .statevec import (Circuit, Gate, StateVector, apply_circuit, apply_gate,
                       build_inverse_qft, build_qft, gate_count, new_state,
                       sample)
from .tsp import (EncodingParams, Graph, Tour, TourResult, decode_basis,
                  encode_tour, enumerate_hcs, is_hamiltonian_cycle, load_graph,
                  optimal_tours, parse_graph, random_hc, tour_weight)
from .weights import (build_sign_oracle, build_ug, build_value_decode,
                      build_value_encode, build_weight_sum)

FIXTURE_NAMES = ("x1", "x2", "x3", "x4", "x5", "x6", "x7")


def fixture_graph(name: str) -> Graph:
    """One of the bundled reference instances x1..x7."""
    if name not in FIXTURE_NAMES:
        raise ValidationError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")
    text = resources.files("qtsp.data").joinpath(f"{name}.txt").read_text()
    return parse_graph(text)
