"""
QSched - Command line application
"""

import copy
import json
import os
import sys
from pathlib import Path
from typing import List, Optional

import psutil
import typer
import yaml
from dotenv import load_dotenv
from loguru import logger
from rich.console import Console
from rich.table import Table

from bench.benchmark import BenchConfig, run_benchmark
from bench.report import emit_report
from circuit_ir import CircuitFormatError, load_circuit, save_circuit
from ldpg import CycleError, prioritized_ldpg
from oracles.exhaustive_search import ExhaustiveConfig, ExhaustiveSearch, SearchBudgetExceeded
from oracles.lower_bound import heuristic_lower_bound
from qaoa import InfeasibleInstanceError, QaoaParams, load_instance, qaoa_circuit, random_regular_graph, save_instance
from scheduler import (SchedulingError, Scheduler, Strategy, StrategyKind, load_pdpt, save_pdpt,
                       verify_schedule)
from topology import TopologyError, load_topology

app = typer.Typer(help="QSched - two-step scheduling of quantum circuits on restricted connectivity")
console = Console()

DOMAIN_ERRORS = (CircuitFormatError, TopologyError, CycleError, SchedulingError,
                 InfeasibleInstanceError, SearchBudgetExceeded, ValueError, OSError)


class QSchedApp:
    """Configuration and logging shared by every subcommand"""

    def __init__(self, config_path: Optional[str] = None, log_level: Optional[str] = None):
        load_dotenv()
        config_path = config_path or os.getenv("QSCHED_CONFIG", "config/config.yaml")
        self.config = self._load_config(config_path)
        level = log_level or os.getenv("QSCHED_LOG_LEVEL")
        if level:
            self.config['logging']['level'] = level.upper()
        self._setup_logging()

    def _load_config(self, config_path: str) -> dict:
        config = self._get_default_config()
        try:
            config_file = Path(config_path)
            if not config_file.exists():
                return config
            with open(config_file, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}
            return _merge(config, loaded)
        except Exception as e:
            logger.warning(f"Failed to load config {config_path}, using defaults: {e}")
            return config

    def _get_default_config(self) -> dict:
        return {
            "logging": {"level": "INFO", "file": "logs/qsched.log"},
            "latencies": {"x": 1, "zz": 1, "swap": 1},
            "scheduler": {"swap_latency": 1, "greedy_cap_factor": 4, "default_strategy": "baseline"},
            "benchmark": {
                "sizes": [4, 6, 8, 10],
                "instances": 150,
                "strategies": ["baseline", "greedy", "long-path"],
                "repetitions": "4N",
                "master_seed": 2021,
                "degree": 3,
                "workers": 1,
            },
            "exhaustive": {"max_swaps": 12, "budget_seconds": None, "workers": 1},
        }

    def _setup_logging(self):
        log_config = self.config.get('logging', {})
        logger.remove()
        logger.add(sys.stderr, level=log_config.get('level', 'INFO'))

        log_file = log_config.get('file')
        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            logger.add(log_file, rotation="1 day", retention="7 days", level=log_config.get('level', 'INFO'))


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


state = {}


def _app() -> QSchedApp:
    if "app" not in state:
        state["app"] = QSchedApp()
    return state["app"]


def _fail(message: str):
    logger.error(message)
    console.print(f"[bold red]error:[/bold red] {message}")
    raise typer.Exit(code=1)


def _strategy_kind(name: str) -> StrategyKind:
    try:
        return StrategyKind(name)
    except ValueError:
        _fail(f"Unknown strategy '{name}' (expected baseline, greedy or long-path)")


def _workers(value) -> int:
    if str(value).lower() == "auto":
        return psutil.cpu_count(logical=False) or 1
    return max(1, int(value))


def _print_totals(title: str, totals: dict):
    table = Table(title=title)
    table.add_column("metric")
    table.add_column("value", justify="right")
    for key, value in totals.items():
        table.add_row(key, str(value))
    console.print(table)


@app.callback()
def configure(
    config: Optional[str] = typer.Option(None, "--config", help="Config file (default config/config.yaml)"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override the configured log level"),
):
    state["app"] = QSchedApp(config, log_level)


@app.command()
def schedule(
    circuit: Path = typer.Option(..., "--circuit", help="Circuit document (JSON or YAML)"),
    topology: str = typer.Option(..., "--topology", help="Topology file, line:N or complete:N"),
    strategy: Optional[str] = typer.Option(None, "--strategy", help="baseline, greedy or long-path"),
    reps: int = typer.Option(1, "--reps", help="Seeded runs for stochastic strategies"),
    seed: int = typer.Option(0, "--seed", help="Master RNG seed"),
    swap_latency: Optional[int] = typer.Option(None, "--swap-latency"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the PDPT document here"),
):
    """Schedule a circuit onto a topology and write the PDPT"""
    config = _app().config
    kind = _strategy_kind(strategy or config['scheduler']['default_strategy'])
    try:
        logical = load_circuit(circuit)
        hardware = load_topology(topology)
        scheduler = Scheduler(
            logical, hardware,
            swap_latency=swap_latency or config['scheduler']['swap_latency'],
            pairing_cap_factor=config['scheduler']['greedy_cap_factor'],
        )
        pdpt = scheduler.best_of(Strategy(kind, reps, seed))
        verdict = verify_schedule(pdpt, logical, hardware)
    except DOMAIN_ERRORS as e:
        _fail(str(e))

    logger.info(f"Scheduled {circuit} on {topology} with {kind.value}: {pdpt.totals()}")
    if out:
        save_pdpt(pdpt, out)
        console.print(f"PDPT written to {out}")
    _print_totals(f"{circuit.name} on {topology} ({kind.value})", pdpt.totals())
    if not verdict.ok:
        _fail(f"Schedule failed verification: {[v.message for v in verdict.violations]}")


@app.command()
def verify(
    pdpt: Path = typer.Option(..., "--pdpt", help="PDPT document"),
    circuit: Path = typer.Option(..., "--circuit"),
    topology: str = typer.Option(..., "--topology"),
):
    """Check a PDPT against its circuit and topology"""
    _app()
    try:
        verdict = verify_schedule(load_pdpt(pdpt), load_circuit(circuit), load_topology(topology))
    except DOMAIN_ERRORS as e:
        _fail(str(e))
    if verdict.ok:
        console.print("[bold green]ok[/bold green] schedule is valid")
        return
    table = Table(title=f"{len(verdict.violations)} violations")
    for column in ("kind", "column", "op", "message"):
        table.add_column(column)
    for v in verdict.violations:
        table.add_row(v.kind.value, str(v.column if v.column is not None else "-"),
                      str(v.op_id if v.op_id is not None else "-"), v.message)
    console.print(table)
    raise typer.Exit(code=1)


@app.command()
def ldpg(
    circuit: Path = typer.Option(..., "--circuit"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Export the prioritized dependency graph as an edge list"""
    _app()
    try:
        text = prioritized_ldpg(load_circuit(circuit)).export_edge_list()
    except DOMAIN_ERRORS as e:
        _fail(str(e))
    if out:
        out.write_text(text, encoding='utf-8')
        console.print(f"LDPG written to {out}")
    else:
        console.print(text, end="")


@app.command("lower-bound")
def lower_bound(
    instance: Path = typer.Option(..., "--instance", help="MaxCut instance document"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Heuristic SWAP lower bound from the reverse Cuthill-McKee profile"""
    _app()
    try:
        report = heuristic_lower_bound(load_instance(instance))
    except DOMAIN_ERRORS as e:
        _fail(str(e))
    logger.info(f"Lower bound for {instance}: {report.swap_bound} swaps")
    if out:
        out.write_text(json.dumps(report.to_document(), indent=2), encoding='utf-8')
    _print_totals(f"RCM bound for {instance.name}", {
        "profile W": report.profile,
        "swap bound": f"{report.swap_bound} ({float(report.swap_bound):.3f})",
        "total gate bound": f"{float(report.total_gate_bound):.3f}",
    })


@app.command()
def exhaustive(
    instance: Path = typer.Option(..., "--instance"),
    max_swaps: Optional[int] = typer.Option(None, "--max-swaps"),
    budget: Optional[float] = typer.Option(None, "--budget", help="Time budget in seconds"),
    fixed_map: bool = typer.Option(False, "--fixed-map", help="Only search from the identity map"),
    workers: Optional[int] = typer.Option(None, "--workers"),
):
    """Exact minimum SWAP count on a line by exhaustive search"""
    settings = _app().config['exhaustive']
    config = ExhaustiveConfig(
        max_swaps=max_swaps if max_swaps is not None else settings['max_swaps'],
        enumerate_maps=not fixed_map,
        time_budget=budget if budget is not None else settings.get('budget_seconds'),
        workers=workers or _workers(settings.get("workers", 1)),
    )
    try:
        search = ExhaustiveSearch(load_instance(instance), config)
        result = search.run()
    except SearchBudgetExceeded as e:
        logger.warning(str(e))
        _fail(f"{e} after {search.stats.sequences_visited} sequences")
    except DOMAIN_ERRORS as e:
        _fail(str(e))
    logger.info(f"Exhaustive search on {instance}: {result}")
    _print_totals(f"Exhaustive search {instance.name}", {
        "min swaps": "none within limit" if result is None else result,
        "sequences visited": search.stats.sequences_visited,
        "skips": search.stats.skips,
        "seconds": f"{search.stats.elapsed:.2f}",
    })


@app.command("gen-instance")
def gen_instance(
    n: int = typer.Option(..., "--n"),
    k: int = typer.Option(3, "--k"),
    seed: int = typer.Option(0, "--seed"),
    out: Path = typer.Option(..., "--out"),
    circuit_out: Optional[Path] = typer.Option(None, "--circuit-out", help="Also write the QAOA circuit"),
    depth: int = typer.Option(1, "--depth", help="QAOA layers for --circuit-out"),
):
    """Sample a random k-regular MaxCut instance"""
    latencies = _app().config['latencies']
    try:
        instance = random_regular_graph(n, k, seed)
        save_instance(instance, out)
        if circuit_out:
            params = QaoaParams(depth=depth, t_x=latencies['x'], t_zz=latencies['zz'])
            save_circuit(qaoa_circuit(instance, params), circuit_out)
    except DOMAIN_ERRORS as e:
        _fail(str(e))
    logger.info(f"Instance n={n} k={k} seed={seed} written to {out} (connected={instance.connected})")
    console.print(f"{len(instance.edges)} edges written to {out}")


@app.command("qaoa-bench")
def qaoa_bench(
    sizes: Optional[List[int]] = typer.Option(None, "--sizes"),
    instances: Optional[int] = typer.Option(None, "--instances"),
    strategies: Optional[List[str]] = typer.Option(None, "--strategies"),
    reps: Optional[int] = typer.Option(None, "--reps", help="Runs per stochastic strategy (default 4N)"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    latencies: Optional[str] = typer.Option(None, "--latencies", help="t_x,t_zz,t_swap"),
    workers: Optional[int] = typer.Option(None, "--workers"),
    out: Path = typer.Option(Path("results/qaoa_bench.csv"), "--out"),
    fmt: str = typer.Option("csv", "--format", help="csv or json"),
):
    """Benchmark every strategy on random 3-regular QAOA instances on a line"""
    config = _app().config
    settings = config['benchmark']
    t_x, t_zz, t_swap = config['latencies']['x'], config['latencies']['zz'], config['latencies']['swap']
    if latencies:
        try:
            t_x, t_zz, t_swap = (int(v) for v in latencies.split(","))
        except ValueError:
            _fail(f"--latencies expects three integers, got '{latencies}'")
    configured_reps = settings.get('repetitions', '4N')
    bench = BenchConfig(
        sizes=tuple(sizes or settings['sizes']),
        instances=instances if instances is not None else settings['instances'],
        strategies=tuple(_strategy_kind(s) for s in (strategies or settings['strategies'])),
        repetitions=reps if reps is not None else (None if str(configured_reps).upper() == "4N" else int(configured_reps)),
        t_x=t_x, t_zz=t_zz, t_swap=t_swap,
        master_seed=seed if seed is not None else settings['master_seed'],
        degree=settings.get('degree', 3),
        workers=workers or _workers(settings.get("workers", 1)),
    )
    try:
        report = run_benchmark(bench)
        written = emit_report(report, out, fmt)
    except DOMAIN_ERRORS as e:
        _fail(str(e))

    table = Table(title="QAOA cost-layer benchmark (line topology)")
    for column in ("N", "strategy", "count", "gates", "depth", "swaps"):
        table.add_column(column, justify="right")
    for s in report.summaries:
        table.add_row(str(s.n), s.strategy, str(s.count), f"{s.mean_gates:.2f} ± {s.std_gates:.2f}",
                      f"{s.mean_depth:.2f} ± {s.std_depth:.2f}", f"{s.mean_swaps:.2f} ± {s.std_swaps:.2f}")
    console.print(table)
    console.print(f"Report written to {', '.join(str(p) for p in written)}")
    if any(r.error for r in report.rows):
        _fail("Some benchmark cells failed; see the error column")


def main():
    app()


if __name__ == "__main__":
    main()
