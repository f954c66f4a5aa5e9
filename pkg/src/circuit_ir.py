"""
QSched - Circuit IR
Gate kinds, gates and circuits, the rule-based commutation check and the circuit document parser
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import yaml
from loguru import logger


class CircuitFormatError(ValueError):
    """Raised for malformed circuit documents and invalid gates"""


class CommutationClass(Enum):
    Z_DIAGONAL = "Z_DIAGONAL"
    X_AXIS = "X_AXIS"
    GENERIC = "GENERIC"
    SWAP = "SWAP"


@dataclass(frozen=True)
class GateKind:
    """A kind of gate; the commutation class is fixed per kind"""
    name: str
    arity: int
    commutation_class: CommutationClass
    default_latency: int = 1

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise CircuitFormatError(f"Gate kind '{self.name}' has arity {self.arity}, expected 1 or 2")
        if self.commutation_class is CommutationClass.SWAP and self.arity != 2:
            raise CircuitFormatError(f"SWAP kind '{self.name}' must have arity 2")
        if self.default_latency < 1:
            raise CircuitFormatError(f"Gate kind '{self.name}' has non-positive latency {self.default_latency}")


SWAP_KIND = GateKind("swap", 2, CommutationClass.SWAP)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    qubits: Tuple[int, ...]
    params: Tuple[float, ...] = ()
    latency: int = 1

    @property
    def arity(self) -> int:
        return self.kind.arity

    @property
    def is_two_qubit(self) -> bool:
        return self.kind.arity == 2


# kind-name pair -> forced commutation verdict for qubit-sharing gates
OverrideTable = Mapping[FrozenSet[str], bool]


def commutes(a: Gate, b: Gate, overrides: Optional[OverrideTable] = None) -> bool:
    """Rule-based commutation: disjoint supports, or both Z-diagonal, or both X-axis"""
    if not set(a.qubits) & set(b.qubits):
        return True
    if overrides:
        verdict = overrides.get(frozenset((a.kind.name, b.kind.name)))
        if verdict is not None:
            return verdict
    ca, cb = a.kind.commutation_class, b.kind.commutation_class
    return ca == cb and ca in (CommutationClass.Z_DIAGONAL, CommutationClass.X_AXIS)


@dataclass(frozen=True)
class Circuit:
    """A validated logical program; gate order is program order"""
    num_qubits: int
    gates: Tuple[Gate, ...]
    commutation_overrides: Dict[FrozenSet[str], bool] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitFormatError(f"num_qubits must be >= 1, got {self.num_qubits}")
        for index, gate in enumerate(self.gates):
            if gate.id != index:
                raise CircuitFormatError(f"Gate ids must be dense in program order: position {index} holds id {gate.id}")
            _validate_gate(gate, self.num_qubits)

    def commutes(self, a: Gate, b: Gate) -> bool:
        return commutes(a, b, self.commutation_overrides)

    @property
    def two_qubit_gates(self) -> List[Gate]:
        return [g for g in self.gates if g.is_two_qubit]

    def total_latency(self) -> int:
        return sum(g.latency for g in self.gates)

    def to_document(self) -> Dict[str, Any]:
        kinds: Dict[str, GateKind] = {}
        for gate in self.gates:
            kinds.setdefault(gate.kind.name, gate.kind)
        document = {
            "num_qubits": self.num_qubits,
            "gate_kinds": [
                {
                    "name": kind.name,
                    "arity": kind.arity,
                    "commutation_class": kind.commutation_class.value,
                    "default_latency": kind.default_latency,
                }
                for kind in kinds.values()
            ],
            "gates": [
                {"kind": g.kind.name, "qubits": list(g.qubits), "params": list(g.params), "latency": g.latency}
                for g in self.gates
            ],
        }
        if self.commutation_overrides:
            document["commutation_overrides"] = []
            for pair, verdict in sorted(self.commutation_overrides.items(), key=lambda item: sorted(item[0])):
                names = sorted(pair)
                if len(names) == 1:
                    names = names * 2
                document["commutation_overrides"].append([names[0], names[1], verdict])
        return document


def _validate_gate(gate: Gate, num_qubits: int):
    if len(gate.qubits) != gate.kind.arity:
        raise CircuitFormatError(
            f"Gate {gate.id} ({gate.kind.name}) has {len(gate.qubits)} operands, expected {gate.kind.arity}"
        )
    if len(set(gate.qubits)) != len(gate.qubits):
        raise CircuitFormatError(f"Gate {gate.id} ({gate.kind.name}) repeats a qubit: {list(gate.qubits)}")
    for q in gate.qubits:
        if not 0 <= q < num_qubits:
            raise CircuitFormatError(f"Gate {gate.id} references qubit {q} outside 0..{num_qubits - 1}")
    if gate.latency < 1:
        raise CircuitFormatError(f"Gate {gate.id} has non-positive latency {gate.latency}")


def build_circuit(num_qubits: int, operations: Sequence[Tuple[GateKind, Sequence[int]]],
                  overrides: Optional[Dict[FrozenSet[str], bool]] = None) -> Circuit:
    """Build a circuit from (kind, qubits) pairs using default latencies"""
    gates = tuple(
        Gate(id=i, kind=kind, qubits=tuple(qubits), latency=kind.default_latency)
        for i, (kind, qubits) in enumerate(operations)
    )
    return Circuit(num_qubits=num_qubits, gates=gates, commutation_overrides=dict(overrides or {}))


def _require(mapping: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(mapping, Mapping) or key not in mapping:
        raise CircuitFormatError(f"Missing field '{key}' in {where}")
    return mapping[key]


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CircuitFormatError(f"Expected an integer for {where}, got {value!r}")
    return value


def _parse_kind(entry: Mapping[str, Any], index: int) -> GateKind:
    where = f"gate_kinds[{index}]"
    name = _require(entry, "name", where)
    if not isinstance(name, str) or not name:
        raise CircuitFormatError(f"{where}.name must be a non-empty string")
    raw_class = _require(entry, "commutation_class", where)
    try:
        commutation_class = CommutationClass(str(raw_class).upper())
    except ValueError:
        raise CircuitFormatError(f"{where} has unknown commutation_class {raw_class!r}")
    if commutation_class is CommutationClass.SWAP or name.lower() == SWAP_KIND.name:
        raise CircuitFormatError(f"{where}: SWAP is reserved for the scheduler and cannot appear in input")
    return GateKind(
        name=name,
        arity=_as_int(_require(entry, "arity", where), f"{where}.arity"),
        commutation_class=commutation_class,
        default_latency=_as_int(entry.get("default_latency", 1), f"{where}.default_latency"),
    )


def parse_circuit(document: Union[str, Mapping[str, Any]]) -> Circuit:
    """Parse and validate a circuit document (mapping or JSON/YAML text)"""
    if isinstance(document, str):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as e:
            raise CircuitFormatError(f"Circuit document is not valid JSON/YAML: {e}")
    if not isinstance(document, Mapping):
        raise CircuitFormatError("Circuit document must be a mapping")

    num_qubits = _as_int(_require(document, "num_qubits", "circuit"), "num_qubits")
    raw_kinds = document.get("gate_kinds", [])
    if not isinstance(raw_kinds, list):
        raise CircuitFormatError("gate_kinds must be a list")
    kinds: Dict[str, GateKind] = {}
    for index, entry in enumerate(raw_kinds):
        kind = _parse_kind(entry, index)
        if kind.name in kinds:
            raise CircuitFormatError(f"Gate kind '{kind.name}' declared twice")
        kinds[kind.name] = kind

    overrides: Dict[FrozenSet[str], bool] = {}
    for index, entry in enumerate(document.get("commutation_overrides", []) or []):
        if not isinstance(entry, (list, tuple)) or len(entry) != 3 or not isinstance(entry[2], bool):
            raise CircuitFormatError(f"commutation_overrides[{index}] must be [kindA, kindB, bool]")
        for name in entry[:2]:
            if name not in kinds:
                raise CircuitFormatError(f"commutation_overrides[{index}] names unknown kind {name!r}")
        overrides[frozenset(entry[:2])] = entry[2]

    raw_gates = _require(document, "gates", "circuit")
    if not isinstance(raw_gates, list):
        raise CircuitFormatError("gates must be a list")
    gates: List[Gate] = []
    for index, entry in enumerate(raw_gates):
        where = f"gates[{index}]"
        kind_name = _require(entry, "kind", where)
        if kind_name not in kinds:
            raise CircuitFormatError(f"{where} uses unknown gate kind {kind_name!r}")
        kind = kinds[kind_name]
        qubits = _require(entry, "qubits", where)
        if not isinstance(qubits, list):
            raise CircuitFormatError(f"{where}.qubits must be a list")
        params = entry.get("params", []) or []
        try:
            params = tuple(float(p) for p in params)
        except (TypeError, ValueError):
            raise CircuitFormatError(f"{where}.params must be numbers")
        latency = entry.get("latency")
        gates.append(Gate(
            id=index,
            kind=kind,
            qubits=tuple(_as_int(q, f"{where}.qubits") for q in qubits),
            params=params,
            latency=kind.default_latency if latency is None else _as_int(latency, f"{where}.latency"),
        ))

    circuit = Circuit(num_qubits=num_qubits, gates=tuple(gates), commutation_overrides=overrides)
    logger.debug(f"Parsed circuit: {num_qubits} qubits, {len(gates)} gates, {len(kinds)} kinds")
    return circuit


def load_circuit(path: Union[str, Path]) -> Circuit:
    """Read a circuit document from a JSON or YAML file"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise CircuitFormatError(f"Cannot read circuit file {path}: {e}")
    return parse_circuit(text)


def save_circuit(circuit: Circuit, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(circuit.to_document(), f, indent=2)
