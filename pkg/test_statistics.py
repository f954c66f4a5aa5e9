#!/usr/bin/env python3
"""
Statistical checks of SWAP counts and growth trends for QAOA on a line.
Slow; run with: pytest -m slow test_statistics.py
"""

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

import numpy as np
import pytest

from bench.benchmark import BenchConfig, run_benchmark
from oracles.exhaustive_search import ExhaustiveConfig, exhaustive_min_swaps
from oracles.lower_bound import heuristic_lower_bound
from qaoa import random_regular_graph
from scheduler import StrategyKind
from seeds import derive_seed

MASTER_SEED = 2021
pytestmark = pytest.mark.slow


def instances(n, count):
    return [random_regular_graph(n, 3, derive_seed(MASTER_SEED, n, m)) for m in range(count)]


def mean_swaps(report, strategy):
    (summary,) = [s for s in report.summaries if s.strategy == strategy.value]
    return summary.mean_swaps


def test_exhaustive_six_nodes():
    results = [exhaustive_min_swaps(i, ExhaustiveConfig(max_swaps=9, workers=4)) for i in instances(6, 150)]
    assert None not in results
    assert 4.9 <= np.mean(results) <= 5.3


def test_exhaustive_eight_nodes_reduced_sample():
    results = [exhaustive_min_swaps(i, ExhaustiveConfig(max_swaps=9, workers=4)) for i in instances(8, 30)]
    assert None not in results
    assert 6.5 <= np.mean(results) <= 8.5


def test_six_node_strategies():
    config = BenchConfig(sizes=(6,), instances=150, strategies=(StrategyKind.GREEDY, StrategyKind.LONG_PATH),
                         repetitions=500, master_seed=MASTER_SEED, workers=4)
    report = run_benchmark(config)
    assert abs(mean_swaps(report, StrategyKind.GREEDY) - 5.96) <= 0.5
    assert abs(mean_swaps(report, StrategyKind.LONG_PATH) - 6.11) <= 0.5


@pytest.mark.parametrize("n,greedy,long_path", [(10, 14.51, 12.44), (12, 21.51, 17.45)])
def test_long_path_beats_greedy(n, greedy, long_path):
    config = BenchConfig(sizes=(n,), instances=150, strategies=(StrategyKind.GREEDY, StrategyKind.LONG_PATH),
                         repetitions=500, master_seed=MASTER_SEED, workers=4)
    report = run_benchmark(config)
    measured_greedy = mean_swaps(report, StrategyKind.GREEDY)
    measured_long_path = mean_swaps(report, StrategyKind.LONG_PATH)
    assert abs(measured_greedy - greedy) <= 0.15 * greedy
    assert abs(measured_long_path - long_path) <= 0.15 * long_path
    assert measured_long_path < measured_greedy


def test_growth_with_size():
    sizes = (10, 20, 30, 40, 60, 80, 100)
    config = BenchConfig(sizes=sizes, instances=100, master_seed=MASTER_SEED, workers=4)
    report = run_benchmark(config)
    for kind in StrategyKind:
        rows = [s for s in report.summaries if s.strategy == kind.value]
        n = np.array([s.n for s in rows], dtype=float)
        gates = np.array([s.mean_gates for s in rows])
        depth = np.array([s.mean_depth for s in rows])
        assert r_squared(n, gates, 2) >= 0.99
        assert r_squared(n, depth, 1) >= 0.99

    by_key = {(s.n, s.strategy): s.mean_gates for s in report.summaries}
    for n in sizes:
        if n >= 20:
            assert by_key[(n, "long-path")] <= by_key[(n, "greedy")] <= by_key[(n, "baseline")]

    for n in (20, 40, 60, 80, 100):
        bounds = [float(heuristic_lower_bound(i).total_gate_bound) for i in instances(n, 100)]
        assert np.mean(bounds) < by_key[(n, "long-path")]


def r_squared(x, y, degree):
    fitted = np.polyval(np.polyfit(x, y, degree), x)
    residual = np.sum((y - fitted) ** 2)
    total = np.sum((y - np.mean(y)) ** 2)
    return 1 - residual / total
