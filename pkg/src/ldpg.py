"""
QSched - Logical Dependency Graph
Builds the dependency DAG of a circuit under the commutation rules and assigns
priorities as the latency-weighted longest chain to a leaf
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import networkx as nx
from loguru import logger

from circuit_ir import Circuit


class CycleError(RuntimeError):
    """Raised when a dependency graph is not acyclic"""


@dataclass
class Ldpg:
    """Dependency DAG over gate ids; edges run from parent to child"""
    num_gates: int
    graph: nx.DiGraph = field(default_factory=nx.DiGraph)
    priorities: Dict[int, int] = field(default_factory=dict)

    def parents(self, gate_id: int) -> List[int]:
        return sorted(self.graph.predecessors(gate_id))

    def children(self, gate_id: int) -> List[int]:
        return sorted(self.graph.successors(gate_id))

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.graph.edges())

    def leaves(self) -> List[int]:
        return [n for n in range(self.num_gates) if self.graph.out_degree(n) == 0]

    def priority(self, gate_id: int) -> int:
        if gate_id not in self.priorities:
            raise KeyError(f"Priority of gate {gate_id} not assigned")
        return self.priorities[gate_id]

    def priority_rounds(self) -> List[Tuple[int, List[int]]]:
        """Gate ids grouped by priority, highest priority first, program order inside"""
        rounds: Dict[int, List[int]] = {}
        for gate_id in range(self.num_gates):
            rounds.setdefault(self.priority(gate_id), []).append(gate_id)
        return sorted(rounds.items(), key=lambda item: -item[0])

    def export_edge_list(self) -> str:
        """Text export: one 'parent child' line per edge, then 'gate priority' lines"""
        lines = [f"# {self.num_gates} gates, {self.graph.number_of_edges()} edges"]
        lines += [f"{a} {b}" for a, b in self.edges()]
        if self.priorities:
            lines.append("# priorities")
            lines += [f"{g} {self.priorities[g]}" for g in sorted(self.priorities)]
        return "\n".join(lines) + "\n"


def build_ldpg(circuit: Circuit) -> Ldpg:
    """Build the dependency DAG.

    For each gate c and each of its qubits, earlier gates on that qubit are scanned
    backwards. A gate commuting with c is skipped. A non-commuting gate g becomes a
    parent when every gate between g and c on that qubit commutes with c or with g.
    """
    ldpg = Ldpg(num_gates=len(circuit.gates))
    ldpg.graph.add_nodes_from(range(len(circuit.gates)))
    wires: List[List[int]] = [[] for _ in range(circuit.num_qubits)]
    exact_scan = bool(circuit.commutation_overrides)

    for gate in circuit.gates:
        for q in gate.qubits:
            blockers = []  # gates between candidate and c that do not commute with c
            for earlier_id in reversed(wires[q]):
                earlier = circuit.gates[earlier_id]
                if circuit.commutes(earlier, gate):
                    continue
                if all(circuit.commutes(earlier, b) for b in blockers):
                    ldpg.graph.add_edge(earlier_id, gate.id)
                elif not exact_scan:
                    # class-based commutation is transitive on a shared qubit
                    break
                blockers.append(earlier)
            wires[q].append(gate.id)

    logger.debug(f"LDPG built: {ldpg.num_gates} gates, {ldpg.graph.number_of_edges()} edges")
    return ldpg


def assign_priorities(ldpg: Ldpg, circuit: Circuit) -> Ldpg:
    """priority(leaf) = latency(leaf); priority(n) = latency(n) + max priority of its children"""
    try:
        order = list(nx.topological_sort(ldpg.graph))
    except nx.NetworkXUnfeasible:
        raise CycleError("Dependency graph contains a cycle")

    priorities: Dict[int, int] = {}
    for gate_id in reversed(order):
        below = [priorities[c] for c in ldpg.graph.successors(gate_id)]
        priorities[gate_id] = circuit.gates[gate_id].latency + max(below, default=0)

    return Ldpg(num_gates=ldpg.num_gates, graph=ldpg.graph, priorities=priorities)


def prioritized_ldpg(circuit: Circuit) -> Ldpg:
    return assign_priorities(build_ldpg(circuit), circuit)
