"""Command-line driver: load a graph, run one pipeline mode, emit CSV.

Modes: ``hcg-only`` (cycle generator support check + histogram), ``encode``
(adds the value-register arithmetic check), ``fixed`` (j searching modules,
histogram + optimal fraction), ``minsearch`` (threshold-descent minimum
search), ``report`` (structural resource table, no simulation).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import statevec as sv
from .engine import (SearchConfig, build_encoding, build_searching_module,
                     check_capacity, complexity_report, default_value_bits,
                     run_min_search)
from .errors import CapacityError, NormDriftError, ValidationError
from .hcg import HcgLayout, build_hcg
from .statevec import apply_circuit, new_state, sample
from .tsp import (EncodingParams, Graph, decode_basis, enumerate_hcs,
                  is_hamiltonian_cycle, load_graph, optimal_tours, tour_weight)

SUPPORT_EPS = 1e-9  # probability below this counts as numerically zero

REPORT_FIXTURES = ("x1", "x3", "x5", "x6", "x7")  # one instance per N=4..8


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qtsp",
        description="Quantum TSP pipeline on an exact statevector simulator.")
    p.add_argument("--mode", required=True,
                   choices=["hcg-only", "encode", "fixed", "minsearch", "report"])
    p.add_argument("--graph", help="graph file (line 1: N, then N weight rows) "
                                   "or a bundled fixture name x1..x7")
    p.add_argument("--value-bits", type=int, default=None,
                   help="value register width M (default: 5, or 6 for N >= 8)")
    p.add_argument("--threshold", type=int, default=None,
                   help="cost threshold C_T (default: optimal weight + 1)")
    p.add_argument("--iterations", type=int, default=0,
                   help="searching-module count for --mode fixed")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-large", action="store_true",
                   help="permit simulations of 24+ qubits")
    p.add_argument("--output", help="CSV output path (histogram or report)")
    return p


def _resolve_graph(spec: str) -> Graph:
    path = Path(spec)
    if path.exists():
        return load_graph(path)
    from . import FIXTURE_NAMES, fixture_graph
    name = path.stem
    if name in FIXTURE_NAMES:
        return fixture_graph(name)
    raise ValidationError(f"graph file {spec!r} not found")


def _write_histogram(path: str | None, counts: dict[int, int],
                     graph: Graph, params: EncodingParams) -> None:
    """Histogram CSV: basis_index, successor_array, is_hc, weight, count."""
    rows = []
    for basis, c in counts.items():
        registers, _ = decode_basis(basis, params)
        valid = is_hamiltonian_cycle(list(registers))
        weight = tour_weight(graph, registers) if valid else -1
        rows.append((basis, ",".join(str(v) for v in registers),
                     int(valid), weight, c))
    rows.sort(key=lambda r: (-r[4], r[0]))
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["basis_index", "successor_array", "is_hc", "weight",
                         "count"])
        writer.writerows(rows)
    finally:
        if path:
            out.close()


def _support(state) -> set[int]:
    probs = state.probabilities()
    return set(np.flatnonzero(probs > SUPPORT_EPS).tolist())


def _run_state(graph: Graph, params: EncodingParams, circuit,
               iterations: int = 0):
    state = new_state(params.total_qubits)
    apply_circuit(state, circuit)
    if iterations:
        module = build_searching_module(graph, params)
        for _ in range(iterations):
            apply_circuit(state, module)
    return state


def _check_hcg_support(state, params: EncodingParams) -> None:
    from .tsp import encode_tour
    expected = {encode_tour(t, params) for t in enumerate_hcs(params.n)}
    got = _support(state)
    if got != expected:
        missing = len(expected - got)
        extra = len(got - expected)
        raise ValidationError(
            f"cycle-generator support mismatch: {missing} missing, "
            f"{extra} infeasible states")


def _check_encoding_values(state, graph: Graph, params: EncodingParams) -> None:
    for basis in _support(state):
        registers, value = decode_basis(basis, params)
        if not is_hamiltonian_cycle(list(registers)):
            raise ValidationError(f"infeasible state {registers} in encoding")
        expected = tour_weight(graph, registers) - params.threshold
        if value != expected:
            raise ValidationError(
                f"value register holds {value} for tour {registers}, "
                f"expected {expected}")


def _report(graphs: list[Graph], value_bits, path: str | None) -> None:
    rows = complexity_report(graphs, value_bits)
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "qubits", "hcg_gates", "encoding_gates",
                         "searching_gates", "marked_fraction"])
        for r in rows:
            writer.writerow([r.n, r.qubits, r.hcg_gates, r.encoding_gates,
                             r.searching_gates, f"{r.marked_fraction:.6f}"])
    finally:
        if path:
            out.close()


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ValidationError, CapacityError, NormDriftError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.mode == "report":
        if args.graph:
            graphs = [_resolve_graph(args.graph)]
        else:
            from . import fixture_graph
            graphs = [fixture_graph(name) for name in REPORT_FIXTURES]
        _report(graphs, args.value_bits, args.output)
        return 0

    if not args.graph:
        raise ValidationError(f"--mode {args.mode} requires --graph")
    graph = _resolve_graph(args.graph)
    value_bits = args.value_bits or default_value_bits(graph.n)

    if args.mode == "minsearch":
        config = SearchConfig(shots=args.shots, seed=args.seed,
                              allow_large=args.allow_large)
        result = run_min_search(graph, value_bits, config)
        print(f"best tour: {result.tour}")
        print(f"best weight: {result.weight}")
        print(f"modules used: {result.modules_used}")
        print(f"thresholds: {result.thresholds}")
        return 0

    if args.mode == "hcg-only":
        params = EncodingParams(graph.n, value_bits)
        check_capacity(params.total_qubits, args.allow_large)
        state = _run_state(graph, params, build_hcg(HcgLayout.default(params)))
        _check_hcg_support(state, params)
        counts = sample(state, args.shots, args.seed)
        _write_histogram(args.output, counts, graph, params)
        print(f"support: {len(enumerate_hcs(graph.n))} cycles, all feasible")
        return 0

    threshold = args.threshold
    if threshold is None:
        best, _ = optimal_tours(graph)
        threshold = best + 1
    params = EncodingParams.for_graph(graph, value_bits, threshold)
    check_capacity(params.total_qubits, args.allow_large)

    if args.mode == "encode":
        state = _run_state(graph, params, build_encoding(graph, params))
        _check_hcg_support_registers(state, params)
        _check_encoding_values(state, graph, params)
        counts = sample(state, args.shots, args.seed)
        _write_histogram(args.output, counts, graph, params)
        print(f"encoding verified for {len(enumerate_hcs(graph.n))} cycles "
              f"at threshold {threshold}")
        return 0

    # fixed
    state = _run_state(graph, params, build_encoding(graph, params),
                       iterations=args.iterations)
    counts = sample(state, args.shots, args.seed)
    _write_histogram(args.output, counts, graph, params)
    _, optima = optimal_tours(graph)
    optimal_set = set(optima)
    good = 0
    for basis, c in counts.items():
        registers, _ = decode_basis(basis, params)
        if registers in optimal_set:
            good += c
    print(f"optimal_fraction: {good / args.shots:.4f}")
    return 0


def _check_hcg_support_registers(state, params: EncodingParams) -> None:
    """Support check on the index registers only (value bits may be set)."""
    expected = {t for t in enumerate_hcs(params.n)}
    got = {decode_basis(b, params)[0] for b in _support(state)}
    if got != expected:
        raise ValidationError(
            f"encoded support covers {len(got)} register patterns, "
            f"expected {len(expected)} cycles")


if __name__ == "__main__":
    sys.exit(main())
