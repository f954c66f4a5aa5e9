"""
QSched - Benchmark report output
CSV with one row per instance plus summary rows, a plot-ready columnar CSV, or JSON
"""

import csv
import json
from dataclasses import asdict, fields
from pathlib import Path
from typing import List, Union

from loguru import logger

from bench.benchmark import BenchReport, BenchRow, SummaryRow

COLUMNS = [
    "record", "n", "strategy", "instance", "seed", "edges", "swaps", "gates", "depth",
    "count", "mean_gates", "std_gates", "mean_depth", "std_depth", "mean_swaps", "std_swaps", "error",
]
PLOT_COLUMNS = ["n", "strategy", "count", "mean_gates", "std_gates", "mean_depth", "std_depth", "mean_swaps", "std_swaps"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _summary_record(summary: SummaryRow) -> dict:
    return {name: _fmt(value) for name, value in asdict(summary).items()}


def emit_report(report: BenchReport, path: Union[str, Path], fmt: str = "csv") -> List[Path]:
    """Write the report; CSV output also writes <stem>_plot.csv. Returns the written paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    summaries = report.summaries

    if fmt == "json":
        document = {
            "config": report.config_document(),
            "rows": [asdict(r) for r in report.rows],
            "summary": [_summary_record(s) for s in summaries],
        }
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f, indent=2)
        logger.info(f"Benchmark report written to {path}")
        return [path]
    if fmt != "csv":
        raise ValueError(f"Unknown report format '{fmt}' (expected csv or json)")

    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=COLUMNS, restval="")
        writer.writeheader()
        for row in report.rows:
            writer.writerow({"record": "instance", **{k: _fmt(v) for k, v in asdict(row).items()}})
        for summary in summaries:
            writer.writerow({"record": "summary", **_summary_record(summary)})

    plot_path = path.with_name(f"{path.stem}_plot.csv")
    with open(plot_path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=PLOT_COLUMNS)
        writer.writeheader()
        for summary in summaries:
            writer.writerow(_summary_record(summary))

    logger.info(f"Benchmark report written to {path} and {plot_path}")
    return [path, plot_path]


def load_rows_csv(path: Union[str, Path]) -> List[BenchRow]:
    """Read back the per-instance rows of a CSV report"""
    int_fields = {f.name for f in fields(BenchRow) if f.type is int}
    rows = []
    with open(path, 'r', encoding='utf-8', newline='') as f:
        for record in csv.DictReader(f):
            if record.get("record") != "instance":
                continue
            rows.append(BenchRow(**{
                col.name: int(record[col.name]) if col.name in int_fields else record[col.name] or ""
                for col in fields(BenchRow)
            }))
    return rows


def load_summary_csv(path: Union[str, Path]) -> List[dict]:
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return [
            {k: record[k] for k in PLOT_COLUMNS}
            for record in csv.DictReader(f) if record.get("record") == "summary"
        ]
