"""
QSched - QAOA benchmark driver
Schedules the cost layer of random 3-regular MaxCut instances on a line with every
strategy and aggregates gate counts and depths per size and strategy.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from qaoa import InfeasibleInstanceError, QaoaParams, qaoa_circuit, random_regular_graph
from scheduler import SchedulingError, Strategy, StrategyKind, strategy_best_of
from seeds import derive_seed
from topology import ConnectivityGraph


@dataclass
class BenchConfig:
    sizes: Tuple[int, ...] = (4, 6, 8, 10)
    instances: int = 150
    strategies: Tuple[StrategyKind, ...] = (StrategyKind.BASELINE, StrategyKind.GREEDY, StrategyKind.LONG_PATH)
    repetitions: Optional[int] = None      # None: 4 * N
    t_x: int = 1
    t_zz: int = 1
    t_swap: int = 1
    master_seed: int = 2021
    degree: int = 3
    workers: int = 1

    def repetitions_for(self, n: int) -> int:
        return self.repetitions if self.repetitions is not None else 4 * n


@dataclass(frozen=True)
class BenchRow:
    n: int
    instance: int
    strategy: str
    seed: int
    edges: int
    swaps: int
    gates: int          # two-qubit gates: ZZ plus SWAP
    depth: int
    error: str = ""


@dataclass(frozen=True)
class SummaryRow:
    n: int
    strategy: str
    count: int
    mean_gates: float
    std_gates: float
    mean_depth: float
    std_depth: float
    mean_swaps: float
    std_swaps: float


@dataclass
class BenchReport:
    config: BenchConfig
    rows: List[BenchRow] = field(default_factory=list)

    @property
    def summaries(self) -> List[SummaryRow]:
        return summarize(self.rows)

    def config_document(self) -> Dict:
        document = asdict(self.config)
        document["strategies"] = [s.value for s in self.config.strategies]
        document["sizes"] = list(self.config.sizes)
        return document


def _mean_std(values: Sequence[int]) -> Tuple[float, float]:
    data = np.asarray(values, dtype=float)
    std = float(np.std(data, ddof=1)) if len(data) > 1 else 0.0
    return float(np.mean(data)), std


def summarize(rows: Sequence[BenchRow]) -> List[SummaryRow]:
    """Mean and sample standard deviation per (N, strategy), failed rows excluded"""
    groups: Dict[Tuple[int, str], List[BenchRow]] = {}
    for row in rows:
        if not row.error:
            groups.setdefault((row.n, row.strategy), []).append(row)
    summaries = []
    for (n, strategy), members in groups.items():
        gates = _mean_std([r.gates for r in members])
        depth = _mean_std([r.depth for r in members])
        swaps = _mean_std([r.swaps for r in members])
        summaries.append(SummaryRow(n, strategy, len(members), *gates, *depth, *swaps))
    order = {s.value: i for i, s in enumerate(StrategyKind)}
    return sorted(summaries, key=lambda s: (s.n, order.get(s.strategy, len(order)), s.strategy))


def run_cell(config: BenchConfig, n: int, instance_index: int, kind: StrategyKind) -> BenchRow:
    """One instance, one strategy; the instance depends only on (master seed, N, index)"""
    instance_seed = derive_seed(config.master_seed, n, instance_index)
    strategy_seed = derive_seed(config.master_seed, n, instance_index, kind.code)
    try:
        instance = random_regular_graph(n, config.degree, instance_seed)
        circuit = qaoa_circuit(instance, QaoaParams(depth=1, t_x=config.t_x, t_zz=config.t_zz), include_mixer=False)
        pdpt = strategy_best_of(
            circuit, ConnectivityGraph.line(n),
            Strategy(kind, config.repetitions_for(n), strategy_seed),
            swap_latency=config.t_swap,
        )
    except (InfeasibleInstanceError, SchedulingError) as e:
        logger.error(f"Benchmark cell N={n} #{instance_index} {kind.value} failed: {e}")
        return BenchRow(n, instance_index, kind.value, strategy_seed, 0, 0, 0, 0, error=str(e))
    return BenchRow(
        n=n, instance=instance_index, strategy=kind.value, seed=strategy_seed,
        edges=len(instance.edges), swaps=pdpt.swap_count, gates=pdpt.two_qubit_count,
        depth=pdpt.depth + config.t_x,  # V(beta) runs in one extra column after U(gamma)
    )


def _run_task(task: Tuple[BenchConfig, int, int, StrategyKind]) -> BenchRow:
    return run_cell(*task)


def run_benchmark(config: BenchConfig) -> BenchReport:
    tasks = [
        (config, n, m, kind)
        for n in config.sizes
        for m in range(config.instances)
        for kind in config.strategies
    ]
    logger.info(f"Benchmark: {len(tasks)} cells over sizes {list(config.sizes)} with {config.workers} workers")
    if config.workers > 1 and tasks:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * config.workers))))
    else:
        rows = [_run_task(task) for task in tasks]

    order = {kind.value: i for i, kind in enumerate(config.strategies)}
    rows.sort(key=lambda r: (r.n, r.instance, order[r.strategy]))
    failures = sum(1 for r in rows if r.error)
    if failures:
        logger.warning(f"Benchmark finished with {failures} failed cells")
    return BenchReport(config=config, rows=rows)
