#!/usr/bin/env python3
"""
Tests for the QAOA benchmark driver and its report files
"""

import csv
import json
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

import pytest

from bench.benchmark import BenchConfig, BenchRow, run_benchmark, run_cell, summarize
from bench.report import PLOT_COLUMNS, emit_report, load_rows_csv, load_summary_csv
from qaoa import QaoaParams, qaoa_circuit, random_regular_graph
from scheduler import Strategy, StrategyKind, strategy_best_of
from seeds import derive_seed
from topology import ConnectivityGraph


def small_config(**overrides):
    settings = dict(sizes=(4,), instances=4, repetitions=8, master_seed=7)
    settings.update(overrides)
    return BenchConfig(**settings)


def test_four_node_instances_need_three_swaps():
    report = run_benchmark(small_config())
    assert len(report.rows) == 4 * 3
    for summary in report.summaries:
        assert summary.count == 4
        assert summary.mean_swaps == 3.0 and summary.std_swaps == 0.0
        assert summary.mean_gates == 9.0


def test_no_instances_gives_empty_report():
    report = run_benchmark(small_config(instances=0))
    assert report.rows == []
    assert report.summaries == []


def test_cells_are_reproducible():
    config = small_config(sizes=(8,), instances=1)
    assert run_cell(config, 8, 0, StrategyKind.GREEDY) == run_cell(config, 8, 0, StrategyKind.GREEDY)
    assert run_cell(config, 8, 0, StrategyKind.GREEDY).edges == 12


def test_depth_counts_the_mixer_column():
    config = small_config(sizes=(6,), instances=1)
    row = run_cell(config, 6, 0, StrategyKind.LONG_PATH)
    instance = random_regular_graph(6, 3, derive_seed(config.master_seed, 6, 0))
    circuit = qaoa_circuit(instance, QaoaParams(depth=1), include_mixer=False)
    strategy = Strategy(StrategyKind.LONG_PATH, 8, derive_seed(config.master_seed, 6, 0, StrategyKind.LONG_PATH.code))
    assert row.depth == strategy_best_of(circuit, ConnectivityGraph.line(6), strategy).depth + 1


def test_parallel_run_matches_serial():
    config = small_config(sizes=(4, 6), instances=2)
    parallel = run_benchmark(small_config(sizes=(4, 6), instances=2, workers=2))
    assert parallel.rows == run_benchmark(config).rows


def test_infeasible_sizes_are_recorded_not_raised():
    report = run_benchmark(small_config(sizes=(5,), instances=1, strategies=(StrategyKind.BASELINE,)))
    assert len(report.rows) == 1 and report.rows[0].error
    assert report.summaries == []


def test_summary_statistics():
    rows = [
        BenchRow(n=6, instance=i, strategy="greedy", seed=0, edges=9, swaps=s, gates=9 + s, depth=d)
        for i, (s, d) in enumerate([(4, 8), (6, 10), (5, 9)])
    ]
    (summary,) = summarize(rows)
    assert summary.count == 3
    assert summary.mean_swaps == pytest.approx(5.0)
    assert summary.std_swaps == pytest.approx(1.0)
    assert summary.mean_gates == pytest.approx(14.0)
    (single,) = summarize(rows[:1])
    assert single.std_depth == 0.0


def test_csv_report_roundtrip(tmp_path):
    report = run_benchmark(small_config(sizes=(4, 6), instances=3))
    written = emit_report(report, tmp_path / "bench.csv")
    assert [p.name for p in written] == ["bench.csv", "bench_plot.csv"]

    rows = load_rows_csv(written[0])
    assert rows == report.rows
    assert summarize(rows) == report.summaries

    summaries = load_summary_csv(written[0])
    assert len(summaries) == len(report.summaries)
    with open(written[1], newline='') as f:
        plot = list(csv.DictReader(f))
    assert list(plot[0]) == PLOT_COLUMNS
    assert plot == summaries


def test_json_report(tmp_path):
    report = run_benchmark(small_config(instances=2, strategies=(StrategyKind.LONG_PATH,)))
    (path,) = emit_report(report, tmp_path / "bench.json", fmt="json")
    document = json.loads(path.read_text())
    assert document["config"]["strategies"] == ["long-path"]
    assert len(document["rows"]) == 2
    assert document["summary"][0]["mean_swaps"] == "3.000000"


def test_unknown_report_format(tmp_path):
    with pytest.raises(ValueError):
        emit_report(run_benchmark(small_config(instances=0)), tmp_path / "bench.xml", fmt="xml")
