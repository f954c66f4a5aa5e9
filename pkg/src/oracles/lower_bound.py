"""
QSched - Heuristic SWAP lower bound
Profile of the reverse Cuthill-McKee ordering, turned into a bound on SWAPs and gates
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Dict, List, Sequence

import networkx as nx
from loguru import logger

from qaoa import MaxCutInstance


@dataclass(frozen=True)
class LowerBoundReport:
    profile: int                 # W, sum over nodes of the widest neighbour distance
    permutation: List[int]
    swap_bound: Fraction
    total_gate_bound: Fraction

    @property
    def swap_bound_ceil(self) -> int:
        return ceil(self.swap_bound)

    def to_document(self) -> Dict:
        return {
            "profile": self.profile,
            "permutation": self.permutation,
            "swap_bound": str(self.swap_bound),
            "swap_bound_float": float(self.swap_bound),
            "total_gate_bound": str(self.total_gate_bound),
            "total_gate_bound_float": float(self.total_gate_bound),
        }


def _pseudo_peripheral_node(graph: nx.Graph):
    """George-Liu: restart from the farthest minimum-degree node while the eccentricity grows"""
    node = min(graph, key=lambda n: (graph.degree(n), n))
    eccentricity = -1
    while True:
        lengths = nx.single_source_shortest_path_length(graph, node)
        reach = max(lengths.values())
        if reach <= eccentricity:
            return node
        eccentricity = reach
        farthest = [n for n, d in lengths.items() if d == reach]
        node = min(farthest, key=lambda n: (graph.degree(n), n))


def rcm_order(instance: MaxCutInstance) -> List[int]:
    """Reverse Cuthill-McKee permutation, component by component"""
    graph = instance.graph
    if graph.number_of_nodes() == 0:
        return []
    return list(nx.utils.reverse_cuthill_mckee_ordering(graph, heuristic=_pseudo_peripheral_node))


def profile(instance: MaxCutInstance, order: Sequence[int]) -> int:
    position = {node: i for i, node in enumerate(order)}
    graph = instance.graph
    total = 0
    for node in graph:
        spans = [abs(position[node] - position[m]) for m in graph.neighbors(node)]
        total += max(spans, default=0)
    return total


def heuristic_lower_bound(instance: MaxCutInstance) -> LowerBoundReport:
    """swap_bound = (W - N) / (4k) for the RCM ordering; total = swap_bound + |E|"""
    order = rcm_order(instance)
    width = profile(instance, order)
    degree = instance.k or max((d for _, d in instance.graph.degree()), default=0)
    swap_bound = Fraction(width - instance.num_nodes, 4 * degree) if degree else Fraction(0)
    report = LowerBoundReport(
        profile=width,
        permutation=order,
        swap_bound=swap_bound,
        total_gate_bound=swap_bound + len(instance.edges),
    )
    logger.debug(f"RCM bound for n={instance.num_nodes}: W={width}, swaps >= {float(swap_bound):.3f}")
    return report
