"""
QSched - Two-step scheduler
Rounds of equal priority are split into qubit-disjoint classes by edge coloring, each
class is routed by color pairing, and every operation is placed as soon as possible
into the physical-qubit x time table (PDPT). Includes the independent schedule verifier.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from circuit_ir import Circuit, Gate
from ldpg import Ldpg, prioritized_ldpg
from routing.color_pairing import ColorPairingError, NodeColoring, greedy_color_pairing, left_accumulation
from routing.edge_coloring import (EdgeColoring, edge_color_baseline, edge_color_greedy,
                                   long_path_coloring)
from seeds import derive_seed
from topology import ConnectivityGraph, LtpMap, interaction_graph, physical_order


class SchedulingError(RuntimeError):
    """Raised when a circuit cannot be scheduled on a topology"""


class StrategyKind(Enum):
    BASELINE = "baseline"
    GREEDY = "greedy"
    LONG_PATH = "long-path"

    @property
    def code(self) -> int:
        return {"baseline": 0, "greedy": 1, "long-path": 2}[self.value]


@dataclass(frozen=True)
class Strategy:
    kind: StrategyKind = StrategyKind.BASELINE
    repetitions: int = 1
    rng_seed: int = 0


class OpRole(Enum):
    LOGICAL_GATE = "LOGICAL_GATE"
    SWAP = "SWAP"
    IDLE = "IDLE"


@dataclass(frozen=True)
class ScheduledOp:
    op_id: int
    role: OpRole
    physical: Tuple[int, ...]
    logical: Tuple[Optional[int], ...]      # logical qubits on the physical ones at start
    start: int
    duration: int
    gate_id: Optional[int] = None

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class PdptCell:
    logical: Optional[int]
    op_id: Optional[int]
    role: OpRole


@dataclass
class Pdpt:
    """Physical-qubit x time-slot table, stored as its operations; cells are derived"""
    num_physical: int
    initial_map: LtpMap
    final_map: LtpMap
    operations: List[ScheduledOp] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return max((op.end for op in self.operations), default=0)

    @property
    def swap_count(self) -> int:
        return sum(1 for op in self.operations if op.role is OpRole.SWAP)

    @property
    def gate_count(self) -> int:
        """All operations: logical gates plus SWAPs"""
        return len(self.operations)

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for op in self.operations if len(op.physical) == 2)

    def totals(self) -> Dict[str, int]:
        return {
            "gates": self.gate_count,
            "swaps": self.swap_count,
            "two_qubit_gates": self.two_qubit_count,
            "depth": self.depth,
        }

    def cells(self) -> List[List[PdptCell]]:
        """Columns of cells; idle cells carry the logical qubit resting there"""
        reverse = list(self.initial_map.reverse)
        active: Dict[int, List[ScheduledOp]] = {}
        for op in self.operations:
            for t in range(op.start, op.end):
                active.setdefault(t, []).append(op)
        swaps_ending: Dict[int, List[ScheduledOp]] = {}
        for op in self.operations:
            if op.role is OpRole.SWAP:
                swaps_ending.setdefault(op.end - 1, []).append(op)

        columns = []
        for t in range(self.depth):
            column = [PdptCell(logical=reverse[p], op_id=None, role=OpRole.IDLE) for p in range(self.num_physical)]
            for op in active.get(t, []):
                for p, logical in zip(op.physical, op.logical):
                    column[p] = PdptCell(logical=logical, op_id=op.op_id, role=op.role)
            columns.append(column)
            for op in swaps_ending.get(t, []):
                a, b = op.physical
                reverse[a], reverse[b] = reverse[b], reverse[a]
        return columns

    def to_document(self) -> Dict[str, Any]:
        return {
            "num_physical": self.num_physical,
            "initial_map": list(self.initial_map.forward),
            "final_map": list(self.final_map.forward),
            "operations": [
                {
                    "op": op.op_id,
                    "role": op.role.value,
                    "gate": op.gate_id,
                    "physical": list(op.physical),
                    "logical": list(op.logical),
                    "start": op.start,
                    "duration": op.duration,
                }
                for op in self.operations
            ],
            "columns": [
                [{"qubit": p, "logical": c.logical, "op": c.op_id, "role": c.role.value} for p, c in enumerate(col)]
                for col in self.cells()
            ],
            "totals": self.totals(),
        }

    @classmethod
    def from_document(cls, document: Mapping[str, Any]) -> "Pdpt":
        try:
            num_physical = int(document["num_physical"])
            operations = [
                ScheduledOp(
                    op_id=int(entry["op"]),
                    role=OpRole(entry["role"]),
                    physical=tuple(int(p) for p in entry["physical"]),
                    logical=tuple(None if q is None else int(q) for q in entry["logical"]),
                    start=int(entry["start"]),
                    duration=int(entry["duration"]),
                    gate_id=None if entry.get("gate") is None else int(entry["gate"]),
                )
                for entry in document["operations"]
            ]
            return cls(
                num_physical=num_physical,
                initial_map=LtpMap.from_forward(document["initial_map"], num_physical),
                final_map=LtpMap.from_forward(document["final_map"], num_physical),
                operations=operations,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchedulingError(f"Malformed PDPT document: {e}")


def save_pdpt(pdpt: Pdpt, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(pdpt.to_document(), f, indent=2)


def load_pdpt(path: Union[str, Path]) -> Pdpt:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SchedulingError(f"Cannot read PDPT {path}: {e}")
    return Pdpt.from_document(document)


@dataclass
class RoundPlan:
    priority: int
    classes: List[List[Gate]]
    path: Tuple[int, ...] = ()


def _gate_key(gate: Gate) -> Tuple[str, Tuple[int, ...]]:
    return gate.kind.name, tuple(sorted(gate.qubits))


class _Placer:
    """Mutable working state: current map, per-qubit busy time and emitted operations"""

    def __init__(self, circuit: Circuit, topology: ConnectivityGraph, ldpg: Ldpg,
                 initial: LtpMap, swap_latency: int):
        self.circuit = circuit
        self.topology = topology
        self.ldpg = ldpg
        self.swap_latency = swap_latency
        self.l2p = list(initial.forward)
        self.p2l = list(initial.reverse)
        self.busy = [0] * topology.num_physical
        self.gate_end: Dict[int, int] = {}
        self.operations: List[ScheduledOp] = []
        self.next_swap_id = len(circuit.gates)

    def swap(self, a: int, b: int):
        if not self.topology.has_edge(a, b):
            raise SchedulingError(f"Routing produced a SWAP on non-adjacent qubits ({a},{b})")
        start = max(self.busy[a], self.busy[b])
        self.operations.append(ScheduledOp(
            op_id=self.next_swap_id, role=OpRole.SWAP, physical=(a, b),
            logical=(self.p2l[a], self.p2l[b]), start=start, duration=self.swap_latency,
        ))
        self.next_swap_id += 1
        self.busy[a] = self.busy[b] = start + self.swap_latency
        self.p2l[a], self.p2l[b] = self.p2l[b], self.p2l[a]
        for p in (a, b):
            if self.p2l[p] is not None:
                self.l2p[self.p2l[p]] = p

    def place(self, gate: Gate):
        physical = tuple(self.l2p[q] for q in gate.qubits)
        if gate.is_two_qubit and not self.topology.has_edge(*physical):
            raise SchedulingError(f"Gate {gate.id} is not adjacent after routing: {physical}")
        if not gate.is_two_qubit and not self.topology.supports_single(physical[0]):
            raise SchedulingError(f"Gate {gate.id} landed on qubit {physical[0]} without 1-qubit support")
        start = max([self.busy[p] for p in physical] + [self.gate_end[par] for par in self.ldpg.parents(gate.id)])
        self.operations.append(ScheduledOp(
            op_id=gate.id, role=OpRole.LOGICAL_GATE, physical=physical,
            logical=tuple(gate.qubits), start=start, duration=gate.latency, gate_id=gate.id,
        ))
        end = start + gate.latency
        self.gate_end[gate.id] = end
        for p in physical:
            self.busy[p] = end

    def route_single(self, logical: int):
        """Walk a logical qubit to the nearest physical qubit with 1-qubit support"""
        here = self.l2p[logical]
        if self.topology.supports_single(here):
            return
        dist = self.topology.distances[here]
        sites = [q for q in sorted(self.topology.self_loops) if q in dist]
        if not sites:
            raise SchedulingError(f"No reachable 1-qubit site from physical qubit {here}")
        target = min(sites, key=lambda q: (dist[q], q))
        route = nx.shortest_path(self.topology.graph, here, target)
        for a, b in zip(route, route[1:]):
            self.swap(a, b)

    def current_map(self) -> LtpMap:
        return LtpMap(forward=tuple(self.l2p), reverse=tuple(self.p2l))


class Scheduler:
    """Schedules one circuit on one topology; the prioritized LDPG is built once"""

    def __init__(self, circuit: Circuit, topology: ConnectivityGraph, swap_latency: int = 1,
                 pairing_cap_factor: int = 4):
        if circuit.num_qubits > topology.num_physical:
            raise SchedulingError(
                f"Circuit needs {circuit.num_qubits} qubits, topology has {topology.num_physical}"
            )
        if not topology.is_connected():
            raise SchedulingError("Topology is not connected")
        if swap_latency < 1:
            raise SchedulingError(f"SWAP latency must be >= 1, got {swap_latency}")
        self.circuit = circuit
        self.topology = topology
        self.swap_latency = swap_latency
        self.pairing_cap = pairing_cap_factor * topology.num_physical ** 2
        self.ldpg = prioritized_ldpg(circuit)
        self.rounds = self.ldpg.priority_rounds()

    def _color(self, gates: List[Gate], kind: StrategyKind, seed: int) -> EdgeColoring:
        graph = interaction_graph(gates, self.circuit.num_qubits)
        if kind is StrategyKind.GREEDY:
            return edge_color_greedy(graph, seed)
        if kind is StrategyKind.LONG_PATH:
            return long_path_coloring(graph, seed)
        return edge_color_baseline(graph)

    def plan(self, strategy: Strategy, rng: np.random.Generator) -> List[RoundPlan]:
        """Split every round into classes; repeated rounds reuse their classes in alternating order"""
        cache: Dict[Tuple, Tuple[List[List[Tuple]], Tuple[int, ...]]] = {}
        uses: Dict[Tuple, int] = {}
        plans = []
        for priority, ids in self.rounds:
            gates = [self.circuit.gates[i] for i in ids]
            graph = interaction_graph(gates, self.circuit.num_qubits)
            if not graph.shares_qubits():
                plans.append(RoundPlan(priority=priority, classes=[gates]))
                continue
            signature = tuple(sorted(_gate_key(g) for g in gates))
            if signature in cache:
                key_classes, path = cache[signature]
                uses[signature] += 1
                pool: Dict[Tuple, List[Gate]] = {}
                for g in gates:
                    pool.setdefault(_gate_key(g), []).append(g)
                classes = [[pool[key].pop(0) for key in keys] for keys in key_classes]
                classes = [sorted(c, key=lambda g: g.id) for c in classes]
                if uses[signature] % 2 == 1:
                    classes.reverse()
                plans.append(RoundPlan(priority=priority, classes=classes, path=path))
                continue
            coloring = self._color(gates, strategy.kind, int(rng.integers(2 ** 32)))
            classes = [[self.circuit.gates[g] for g in c] for c in coloring.classes()]
            cache[signature] = ([[_gate_key(g) for g in c] for c in classes], coloring.path)
            uses[signature] = 0
            plans.append(RoundPlan(priority=priority, classes=classes, path=coloring.path))
        return plans

    def initial_map(self, plans: Sequence[RoundPlan], strategy: Strategy) -> LtpMap:
        """Lay the first class with 2-qubit gates (or the long path) onto adjacent hardware"""
        n, size = self.circuit.num_qubits, self.topology.num_physical
        order = physical_order(self.topology)
        for plan in plans:
            first = next((c for c in plan.classes if any(g.is_two_qubit for g in c)), None)
            if first is None:
                continue
            forward: List[Optional[int]] = [None] * n
            taken = set()
            if strategy.kind is StrategyKind.LONG_PATH and plan.path:
                for logical, physical in zip(plan.path, order):
                    forward[logical] = physical
                    taken.add(physical)
            else:
                slots = [(a, b) for a, b in zip(order, order[1:]) if self.topology.has_edge(a, b)]
                slots += [e for e in self.topology.sorted_edges if e not in slots and e[::-1] not in slots]
                for gate in (g for g in first if g.is_two_qubit):
                    slot = next(((a, b) for a, b in slots if a not in taken and b not in taken), None)
                    if slot is None:
                        break
                    for logical, physical in zip(gate.qubits, slot):
                        forward[logical] = physical
                        taken.add(physical)
            spare = iter(p for p in order if p not in taken)
            for logical in range(n):
                if forward[logical] is None:
                    forward[logical] = next(spare)
            return LtpMap.from_forward(forward, size)
        return LtpMap.identity(n, size)

    def run(self, strategy: Strategy) -> Pdpt:
        rng = np.random.default_rng(strategy.rng_seed)
        plans = self.plan(strategy, rng)
        initial = self.initial_map(plans, strategy)
        placer = _Placer(self.circuit, self.topology, self.ldpg, initial, self.swap_latency)
        on_line = self.topology.is_line()

        for plan in plans:
            for gates in plan.classes:
                for gate in (g for g in gates if not g.is_two_qubit):
                    placer.route_single(gate.qubits[0])
                    placer.place(gate)
                doubles = [g for g in gates if g.is_two_qubit]
                if not doubles:
                    continue
                coloring = NodeColoring.from_pairs(
                    [(placer.l2p[a], placer.l2p[b]) for a, b in (g.qubits for g in doubles)],
                    self.topology.num_physical,
                )
                try:
                    if on_line:
                        swaps = left_accumulation(coloring)
                    else:
                        swaps = greedy_color_pairing(coloring, self.topology, int(rng.integers(2 ** 32)),
                                                     cap=self.pairing_cap)
                except ColorPairingError as e:
                    raise SchedulingError(
                        f"Routing failed in priority round {plan.priority} with {strategy.kind.value}: {e}"
                    ) from e
                for a, b in swaps:
                    placer.swap(a, b)
                for gate in doubles:
                    placer.place(gate)

        operations = sorted(placer.operations, key=lambda op: (op.start, op.op_id))
        pdpt = Pdpt(num_physical=self.topology.num_physical, initial_map=initial,
                    final_map=placer.current_map(), operations=operations)
        logger.debug(
            f"Scheduled {len(self.circuit.gates)} gates with {strategy.kind.value}: "
            f"{pdpt.swap_count} swaps, depth {pdpt.depth}"
        )
        return pdpt

    def best_of(self, strategy: Strategy, repetitions: Optional[int] = None) -> Pdpt:
        """Minimum total gate count over the baseline run and the strategy's seeded runs"""
        repetitions = strategy.repetitions if repetitions is None else repetitions
        if repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {repetitions}")
        best = self.run(Strategy(StrategyKind.BASELINE, 1, strategy.rng_seed))
        if strategy.kind is StrategyKind.BASELINE:
            return best
        for rep in range(1, repetitions + 1):
            candidate = self.run(Strategy(strategy.kind, 1, derive_seed(strategy.rng_seed, rep)))
            if (candidate.gate_count, candidate.depth) < (best.gate_count, best.depth):
                best = candidate
        logger.debug(f"Best of {repetitions} {strategy.kind.value} runs: {best.swap_count} swaps")
        return best


def schedule(circuit: Circuit, topology: ConnectivityGraph, strategy: Strategy,
             swap_latency: int = 1, pairing_cap_factor: int = 4) -> Pdpt:
    return Scheduler(circuit, topology, swap_latency, pairing_cap_factor).run(strategy)


def strategy_best_of(circuit: Circuit, topology: ConnectivityGraph, strategy: Strategy,
                     repetitions: Optional[int] = None, swap_latency: int = 1) -> Pdpt:
    return Scheduler(circuit, topology, swap_latency).best_of(strategy, repetitions)


class ViolationKind(Enum):
    MISSING_GATE = "MISSING_GATE"
    DUPLICATE_GATE = "DUPLICATE_GATE"
    UNKNOWN_GATE = "UNKNOWN_GATE"
    WRONG_QUBITS = "WRONG_QUBITS"
    CONNECTIVITY = "CONNECTIVITY"
    SINGLE_QUBIT_SITE = "SINGLE_QUBIT_SITE"
    EXCLUSIVE_ACTIVATION = "EXCLUSIVE_ACTIVATION"
    DEPENDENCY = "DEPENDENCY"
    LATENCY = "LATENCY"
    FINAL_MAP = "FINAL_MAP"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str
    column: Optional[int] = None
    op_id: Optional[int] = None


@dataclass
class Verdict:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> List[ViolationKind]:
        return sorted({v.kind for v in self.violations}, key=lambda k: k.value)


def verify_schedule(pdpt: Pdpt, circuit: Circuit, topology: ConnectivityGraph) -> Verdict:
    """Replay a PDPT against the circuit and topology and report every violated rule"""
    verdict = Verdict()
    report = verdict.violations.append

    occupancy: Dict[Tuple[int, int], int] = {}
    for op in pdpt.operations:
        for t in range(op.start, op.end):
            for p in op.physical:
                other = occupancy.get((p, t))
                if other is not None:
                    report(Violation(ViolationKind.EXCLUSIVE_ACTIVATION,
                                     f"ops {other} and {op.op_id} both use qubit {p}", t, op.op_id))
                occupancy[(p, t)] = op.op_id

    l2p = list(pdpt.initial_map.forward)
    p2l = list(pdpt.initial_map.reverse)
    if len(l2p) != circuit.num_qubits:
        report(Violation(ViolationKind.WRONG_QUBITS,
                         f"initial map covers {len(l2p)} logical qubits, circuit has {circuit.num_qubits}"))
        return verdict

    seen: Dict[int, ScheduledOp] = {}
    for op in sorted(pdpt.operations, key=lambda o: (o.start, o.op_id)):
        if len(op.physical) == 2 and not topology.has_edge(*op.physical):
            report(Violation(ViolationKind.CONNECTIVITY,
                             f"op {op.op_id} acts on non-adjacent qubits {list(op.physical)}", op.start, op.op_id))
        if op.role is OpRole.SWAP:
            a, b = op.physical
            p2l[a], p2l[b] = p2l[b], p2l[a]
            for p in (a, b):
                if p2l[p] is not None:
                    l2p[p2l[p]] = p
            continue
        if op.gate_id is None or not 0 <= op.gate_id < len(circuit.gates):
            report(Violation(ViolationKind.UNKNOWN_GATE, f"op {op.op_id} names no circuit gate", op.start, op.op_id))
            continue
        gate = circuit.gates[op.gate_id]
        if op.gate_id in seen:
            report(Violation(ViolationKind.DUPLICATE_GATE, f"gate {gate.id} scheduled twice", op.start, op.op_id))
            continue
        seen[op.gate_id] = op
        expected = tuple(l2p[q] for q in gate.qubits)
        if tuple(op.physical) != expected:
            report(Violation(ViolationKind.WRONG_QUBITS,
                             f"gate {gate.id} placed on {list(op.physical)}, its qubits sit on {list(expected)}",
                             op.start, op.op_id))
        if len(op.physical) == 1 and not topology.supports_single(op.physical[0]):
            report(Violation(ViolationKind.SINGLE_QUBIT_SITE,
                             f"gate {gate.id} on qubit {op.physical[0]} without 1-qubit support", op.start, op.op_id))
        if op.duration != gate.latency:
            report(Violation(ViolationKind.LATENCY,
                             f"gate {gate.id} lasts {op.duration}, latency is {gate.latency}", op.start, op.op_id))

    for gate in circuit.gates:
        if gate.id not in seen:
            report(Violation(ViolationKind.MISSING_GATE, f"gate {gate.id} is never scheduled"))

    ldpg = prioritized_ldpg(circuit)
    for parent, child in ldpg.edges():
        if parent in seen and child in seen and seen[child].start < seen[parent].end:
            report(Violation(ViolationKind.DEPENDENCY,
                             f"gate {child} starts at {seen[child].start} before parent {parent} ends at {seen[parent].end}",
                             seen[child].start, child))

    if tuple(l2p) != tuple(pdpt.final_map.forward):
        report(Violation(ViolationKind.FINAL_MAP, f"replayed final map {l2p} differs from {list(pdpt.final_map.forward)}"))

    if verdict.ok:
        logger.debug(f"Schedule verified: {pdpt.gate_count} ops, depth {pdpt.depth}")
    else:
        logger.warning(f"Schedule has {len(verdict.violations)} violations: {[k.value for k in verdict.kinds()]}")
    return verdict
