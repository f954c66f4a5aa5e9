"""
QSched - Hardware topology and qubit maps
Connectivity graph, per-round interaction graph and the logical-to-physical map
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import yaml
from loguru import logger

from circuit_ir import Gate


class TopologyError(ValueError):
    """Raised for invalid connectivity graphs or illegal qubit moves"""


def _pair(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ConnectivityGraph:
    """Physical qubits and the undirected edges that admit 2-qubit gates.

    An empty self_loops set means every physical qubit supports 1-qubit gates.
    """
    num_physical: int
    edges: FrozenSet[Tuple[int, int]]
    self_loops: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if self.num_physical < 1:
            raise TopologyError(f"num_physical must be >= 1, got {self.num_physical}")
        normalized = set()
        for a, b in self.edges:
            if a == b:
                raise TopologyError(f"Edge ({a},{b}) is a loop; declare 1-qubit sites as self_loops")
            for q in (a, b):
                if not 0 <= q < self.num_physical:
                    raise TopologyError(f"Edge ({a},{b}) references qubit outside 0..{self.num_physical - 1}")
            normalized.add(_pair(a, b))
        for q in self.self_loops:
            if not 0 <= q < self.num_physical:
                raise TopologyError(f"Self-loop on qubit {q} outside 0..{self.num_physical - 1}")
        object.__setattr__(self, 'edges', frozenset(normalized))
        object.__setattr__(self, 'self_loops', frozenset(self.self_loops))

    @classmethod
    def line(cls, n: int) -> "ConnectivityGraph":
        return cls(num_physical=n, edges=frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def complete(cls, n: int) -> "ConnectivityGraph":
        return cls(num_physical=n, edges=frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_physical))
        g.add_edges_from(sorted(self.edges))
        return g

    @cached_property
    def distances(self) -> Dict[int, Dict[int, int]]:
        """All-pairs shortest path lengths, computed once per topology"""
        return dict(nx.all_pairs_shortest_path_length(self.graph))

    @cached_property
    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)

    def has_edge(self, a: int, b: int) -> bool:
        return _pair(a, b) in self.edges

    def distance(self, a: int, b: int) -> int:
        try:
            return self.distances[a][b]
        except KeyError:
            raise TopologyError(f"Physical qubits {a} and {b} are not connected")

    def is_connected(self) -> bool:
        return nx.is_connected(self.graph)

    def is_line(self) -> bool:
        """True iff the edges are exactly (i, i+1) in the canonical numbering"""
        return self.edges == frozenset((i, i + 1) for i in range(self.num_physical - 1))

    def supports_single(self, q: int) -> bool:
        return not self.self_loops or q in self.self_loops

    def to_document(self) -> Dict[str, Any]:
        return {
            "num_physical": self.num_physical,
            "edges": [list(e) for e in self.sorted_edges],
            "self_loops": sorted(self.self_loops),
        }


def parse_topology(document: Mapping[str, Any]) -> ConnectivityGraph:
    if not isinstance(document, Mapping) or "num_physical" not in document:
        raise TopologyError("Topology document needs 'num_physical'")
    edges = document.get("edges", []) or []
    if not all(isinstance(e, (list, tuple)) and len(e) == 2 for e in edges):
        raise TopologyError("Topology edges must be pairs")
    return ConnectivityGraph(
        num_physical=int(document["num_physical"]),
        edges=frozenset((int(a), int(b)) for a, b in edges),
        self_loops=frozenset(int(q) for q in document.get("self_loops", []) or []),
    )


def load_topology(source: Union[str, Path]) -> ConnectivityGraph:
    """Resolve 'line:N', 'complete:N' or a JSON/YAML topology file"""
    text = str(source)
    if ":" in text and not Path(text).exists():
        shape, _, size = text.partition(":")
        try:
            n = int(size)
        except ValueError:
            raise TopologyError(f"Invalid topology size in '{text}'")
        builders = {"line": ConnectivityGraph.line, "complete": ConnectivityGraph.complete}
        if shape not in builders:
            raise TopologyError(f"Unknown topology shape '{shape}' (expected line or complete)")
        return builders[shape](n)
    try:
        with open(text, 'r', encoding='utf-8') as f:
            document = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise TopologyError(f"Cannot read topology {text}: {e}")
    topology = parse_topology(document)
    logger.debug(f"Loaded topology from {text}: {topology.num_physical} qubits, {len(topology.edges)} edges")
    return topology


@dataclass(frozen=True)
class InteractionGraph:
    """Logical qubits of one priority round; 2-qubit gates are edges, 1-qubit gates self-loops"""
    num_logical: int
    edges: Tuple[Tuple[int, int, int], ...] = ()       # (gate_id, a, b) with a < b
    self_loops: Tuple[Tuple[int, int], ...] = ()       # (gate_id, q)

    def degree(self, q: int) -> int:
        return sum(1 for _, a, b in self.edges if q in (a, b)) + sum(1 for _, s in self.self_loops if s == q)

    def max_degree(self) -> int:
        degrees = [0] * self.num_logical
        for _, a, b in self.edges:
            degrees[a] += 1
            degrees[b] += 1
        for _, q in self.self_loops:
            degrees[q] += 1
        return max(degrees, default=0)

    def is_simple(self) -> bool:
        pairs = [(a, b) for _, a, b in self.edges]
        return len(pairs) == len(set(pairs))

    def shares_qubits(self) -> bool:
        """True iff some qubit is touched by two gates of the round"""
        return self.max_degree() > 1

    def gate_ids(self) -> List[int]:
        return sorted([g for g, _, _ in self.edges] + [g for g, _ in self.self_loops])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_logical))
        for gate_id, a, b in self.edges:
            if not g.has_edge(a, b):
                g.add_edge(a, b, gate=gate_id)
        return g


def interaction_graph(gates: Iterable[Gate], num_logical: int) -> InteractionGraph:
    edges, loops = [], []
    for gate in gates:
        if gate.is_two_qubit:
            a, b = _pair(*gate.qubits)
            edges.append((gate.id, a, b))
        else:
            loops.append((gate.id, gate.qubits[0]))
    return InteractionGraph(num_logical=num_logical, edges=tuple(edges), self_loops=tuple(loops))


@dataclass(frozen=True)
class LtpMap:
    """Injective logical-to-physical map; reverse[p] is None on idle hardware"""
    forward: Tuple[int, ...]
    reverse: Tuple[Optional[int], ...] = field(default=())

    def __post_init__(self):
        if not self.reverse:
            raise TopologyError("LtpMap needs num_physical; use LtpMap.from_forward")
        for logical, physical in enumerate(self.forward):
            if not 0 <= physical < len(self.reverse) or self.reverse[physical] != logical:
                raise TopologyError(f"LtpMap is inconsistent at logical qubit {logical}")
        if sum(1 for r in self.reverse if r is not None) != len(self.forward):
            raise TopologyError("LtpMap reverse holds logical qubits missing from forward")

    @classmethod
    def from_forward(cls, forward: Sequence[int], num_physical: int) -> "LtpMap":
        if len(forward) > num_physical:
            raise TopologyError(f"{len(forward)} logical qubits do not fit on {num_physical} physical qubits")
        reverse: List[Optional[int]] = [None] * num_physical
        for logical, physical in enumerate(forward):
            if not 0 <= physical < num_physical or reverse[physical] is not None:
                raise TopologyError(f"LtpMap is not injective at logical qubit {logical} -> {physical}")
            reverse[physical] = logical
        return cls(forward=tuple(forward), reverse=tuple(reverse))

    @classmethod
    def identity(cls, num_logical: int, num_physical: int) -> "LtpMap":
        return cls.from_forward(range(num_logical), num_physical)

    @property
    def num_logical(self) -> int:
        return len(self.forward)

    @property
    def num_physical(self) -> int:
        return len(self.reverse)

    def physical(self, logical: int) -> int:
        return self.forward[logical]

    def logical(self, physical: int) -> Optional[int]:
        return self.reverse[physical]

    def swapped(self, a: int, b: int) -> "LtpMap":
        """Exchange the contents of physical qubits a and b without adjacency checks"""
        reverse = list(self.reverse)
        reverse[a], reverse[b] = reverse[b], reverse[a]
        forward = list(self.forward)
        for p in (a, b):
            if reverse[p] is not None:
                forward[reverse[p]] = p
        return LtpMap(forward=tuple(forward), reverse=tuple(reverse))

    def line_order(self) -> List[Optional[int]]:
        return list(self.reverse)


def apply_swap(ltp: LtpMap, a: int, b: int, topology: ConnectivityGraph) -> LtpMap:
    if not topology.has_edge(a, b):
        raise TopologyError(f"SWAP on non-adjacent physical qubits ({a},{b})")
    return ltp.swapped(a, b)


def longest_walk(graph: nx.Graph, start: int) -> List[int]:
    """Walk from start, always stepping to the unvisited neighbour with fewest unvisited neighbours"""
    walk, visited = [start], {start}
    while True:
        candidates = [n for n in graph.neighbors(walk[-1]) if n not in visited]
        if not candidates:
            break
        nxt = min(candidates, key=lambda n: (sum(1 for m in graph.neighbors(n) if m not in visited), n))
        walk.append(nxt)
        visited.add(nxt)
    return walk


def physical_order(topology: ConnectivityGraph) -> List[int]:
    """Physical qubits in an order where consecutive entries are adjacent as far as possible"""
    if topology.is_line():
        return list(range(topology.num_physical))
    start = min(range(topology.num_physical), key=lambda q: (topology.graph.degree(q), q))
    walk = longest_walk(topology.graph, start)
    seen = set(walk)
    return walk + [q for q in range(topology.num_physical) if q not in seen]