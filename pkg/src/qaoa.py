"""
QSched - QAOA MaxCut workloads
Random k-regular instances from the configuration model and the QAOA circuits built on them
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from circuit_ir import Circuit, CommutationClass, Gate, GateKind


class InfeasibleInstanceError(ValueError):
    """Raised when no k-regular graph on n nodes exists"""


@dataclass(frozen=True)
class MaxCutInstance:
    num_nodes: int
    edges: Tuple[Tuple[int, int], ...]
    k: int
    seed: Optional[int] = None

    def __post_init__(self):
        normalized = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        if len(set(normalized)) != len(normalized):
            raise ValueError("MaxCut instance has repeated edges")
        for a, b in normalized:
            if a == b or not 0 <= a < self.num_nodes or not 0 <= b < self.num_nodes:
                raise ValueError(f"Invalid edge ({a},{b}) for {self.num_nodes} nodes")
        object.__setattr__(self, 'edges', normalized)

    @property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        g.add_edges_from(self.edges)
        return g

    @property
    def connected(self) -> bool:
        return self.num_nodes > 0 and nx.is_connected(self.graph)

    def to_document(self) -> Dict[str, Any]:
        return {
            "n": self.num_nodes,
            "k": self.k,
            "seed": self.seed,
            "edges": [list(e) for e in self.edges],
            "connected": self.connected,
        }

    @classmethod
    def from_document(cls, document: Mapping[str, Any]) -> "MaxCutInstance":
        try:
            return cls(
                num_nodes=int(document["n"]),
                edges=tuple((int(a), int(b)) for a, b in document["edges"]),
                k=int(document.get("k", 0)),
                seed=document.get("seed"),
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed instance document: {e}")


def save_instance(instance: MaxCutInstance, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(instance.to_document(), f, indent=2)


def load_instance(path: Union[str, Path]) -> MaxCutInstance:
    with open(path, 'r', encoding='utf-8') as f:
        return MaxCutInstance.from_document(json.load(f))


def random_regular_graph(n: int, k: int, seed: int, max_attempts: int = 100_000) -> MaxCutInstance:
    """Uniform simple k-regular graph by the configuration model with full rejection.

    Each node gets k half-edges, the half-edges are paired by a random permutation and the
    whole pairing is rejected on a self-loop or a repeated edge. Connectivity is reported,
    not enforced.
    """
    if n < 1 or k < 0 or k >= n or (n * k) % 2:
        raise InfeasibleInstanceError(f"No simple {k}-regular graph on {n} nodes")
    if k == 0:
        return MaxCutInstance(num_nodes=n, edges=(), k=k, seed=seed)

    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), k)
    for attempt in range(1, max_attempts + 1):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {(int(min(a, b)), int(max(a, b))) for a, b in pairs}
        if len(edges) != len(pairs):
            continue
        instance = MaxCutInstance(num_nodes=n, edges=tuple(sorted(edges)), k=k, seed=seed)
        logger.debug(f"Sampled {k}-regular graph on {n} nodes after {attempt} attempts")
        return instance
    raise RuntimeError(f"Configuration model found no simple {k}-regular graph on {n} nodes in {max_attempts} attempts")


@dataclass(frozen=True)
class QaoaParams:
    """QAOA depth, angles and gate latencies"""
    depth: int = 1
    gammas: Tuple[float, ...] = field(default=())
    betas: Tuple[float, ...] = field(default=())
    t_x: int = 1
    t_zz: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"QAOA depth must be >= 1, got {self.depth}")
        if not self.gammas:
            object.__setattr__(self, 'gammas', tuple([0.5] * self.depth))
        if not self.betas:
            object.__setattr__(self, 'betas', tuple([0.5] * self.depth))
        if len(self.gammas) != self.depth or len(self.betas) != self.depth:
            raise ValueError("Need one gamma and one beta per QAOA layer")
        if self.t_x < 1 or self.t_zz < 1:
            raise ValueError("Gate latencies must be >= 1")


def qaoa_circuit(instance: MaxCutInstance, params: QaoaParams, include_mixer: bool = True) -> Circuit:
    """Per layer: one ZZ gate per edge in sorted edge order, then one X rotation per qubit"""
    zz = GateKind("zz", 2, CommutationClass.Z_DIAGONAL, params.t_zz)
    rx = GateKind("rx", 1, CommutationClass.X_AXIS, params.t_x)
    gates: List[Gate] = []
    for layer in range(params.depth):
        for a, b in instance.edges:
            gates.append(Gate(id=len(gates), kind=zz, qubits=(a, b), params=(params.gammas[layer],), latency=params.t_zz))
        if include_mixer:
            for q in range(instance.num_nodes):
                gates.append(Gate(id=len(gates), kind=rx, qubits=(q,), params=(2 * params.betas[layer],), latency=params.t_x))
    return Circuit(num_qubits=max(instance.num_nodes, 1), gates=tuple(gates))
