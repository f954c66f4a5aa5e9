#!/usr/bin/env python3
"""
Tests for the exhaustive SWAP search and the RCM lower bound
"""

import itertools
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

import pytest

from oracles.exhaustive_search import (ExhaustiveConfig, ExhaustiveSearch, SearchBudgetExceeded,
                                       exhaustive_min_swaps, initial_maps, iter_swap_sequences)
from oracles.lower_bound import heuristic_lower_bound, profile, rcm_order
from qaoa import MaxCutInstance, QaoaParams, qaoa_circuit, random_regular_graph
from scheduler import Strategy, StrategyKind, strategy_best_of
from topology import ConnectivityGraph

K4 = MaxCutInstance(num_nodes=4, edges=tuple(itertools.combinations(range(4), 2)), k=3)


def path_instance(order):
    return MaxCutInstance(num_nodes=len(order), edges=tuple(zip(order, order[1:])), k=2)


def test_k4_needs_three_swaps():
    assert exhaustive_min_swaps(K4, ExhaustiveConfig(max_swaps=6)) == 3


def test_k4_with_parallel_shards():
    assert exhaustive_min_swaps(K4, ExhaustiveConfig(max_swaps=6, workers=2)) == 3


def test_path_needs_no_swaps():
    shuffled = path_instance([3, 0, 4, 1, 2])
    assert exhaustive_min_swaps(shuffled, ExhaustiveConfig(max_swaps=3)) == 0
    fixed = exhaustive_min_swaps(shuffled, ExhaustiveConfig(max_swaps=6, enumerate_maps=False))
    assert fixed is not None and fixed > 0


def test_edgeless_instance():
    empty = MaxCutInstance(num_nodes=3, edges=(), k=0)
    assert exhaustive_min_swaps(empty, ExhaustiveConfig(max_swaps=0)) == 0


def test_too_small_limit_returns_none():
    assert exhaustive_min_swaps(K4, ExhaustiveConfig(max_swaps=2)) is None


@pytest.mark.parametrize("n,length", [(4, 1), (4, 3), (5, 2), (6, 4), (3, 5)])
def test_sequence_count(n, length):
    sequences = list(iter_swap_sequences(n, length))
    assert len(sequences) == (n - 1) * (n - 2) ** (length - 1)
    assert len(set(sequences)) == len(sequences)
    assert sequences == sorted(sequences)
    assert all(a != b for s in sequences for a, b in zip(s, s[1:]))


def test_initial_maps_skip_mirrors():
    maps = list(initial_maps(5))
    assert len(maps) == 60
    assert not any(tuple(reversed(m)) in set(maps) for m in maps)
    assert list(initial_maps(4, enumerate_maps=False)) == [(0, 1, 2, 3)]


def test_search_statistics():
    search = ExhaustiveSearch(K4, ExhaustiveConfig(max_swaps=6))
    assert search.run() == 3
    assert search.stats.maps_visited > 0
    assert search.stats.sequences_visited > 0
    assert search.stats.elapsed >= 0


def test_time_budget():
    instance = random_regular_graph(10, 3, seed=1)
    with pytest.raises(SearchBudgetExceeded):
        exhaustive_min_swaps(instance, ExhaustiveConfig(max_swaps=20, time_budget=1e-9))


@pytest.mark.parametrize("workers", [1, 2])
def test_time_budget_stops_a_long_search(workers):
    instance = random_regular_graph(10, 3, seed=1)
    search = ExhaustiveSearch(instance, ExhaustiveConfig(max_swaps=20, time_budget=0.5, workers=workers))
    started = time.monotonic()
    with pytest.raises(SearchBudgetExceeded):
        search.run()
    assert time.monotonic() - started < 3.0


@pytest.mark.parametrize("seed", range(3))
def test_scheduler_never_beats_exhaustive(seed):
    instance = random_regular_graph(6, 3, seed=seed)
    best = exhaustive_min_swaps(instance, ExhaustiveConfig(max_swaps=8))
    assert best is not None
    circuit = qaoa_circuit(instance, QaoaParams(depth=1), include_mixer=False)
    for kind in StrategyKind:
        pdpt = strategy_best_of(circuit, ConnectivityGraph.line(6), Strategy(kind, repetitions=8, rng_seed=seed))
        assert pdpt.swap_count >= best


def test_rcm_bound_on_k4():
    report = heuristic_lower_bound(K4)
    assert report.profile == 10
    assert report.swap_bound == Fraction(1, 2)
    assert report.swap_bound_ceil == 1
    assert report.total_gate_bound == Fraction(13, 2)
    assert report.to_document()["swap_bound_float"] == 0.5


def test_rcm_recovers_a_shuffled_path():
    instance = path_instance([3, 0, 4, 1, 2])
    order = rcm_order(instance)
    assert sorted(order) == list(range(5))
    assert profile(instance, order) == 5
    assert heuristic_lower_bound(instance).swap_bound == 0


@pytest.mark.parametrize("seed", range(5))
def test_rcm_beats_identity_ordering(seed):
    instance = random_regular_graph(30, 3, seed=seed)
    order = rcm_order(instance)
    assert sorted(order) == list(range(30))
    assert profile(instance, order) <= profile(instance, range(30))


def test_bound_below_exhaustive_on_k4():
    assert heuristic_lower_bound(K4).swap_bound_ceil <= exhaustive_min_swaps(K4, ExhaustiveConfig(max_swaps=6))
