"""
QSched - Edge coloring
Splits a priority round into classes of qubit-disjoint gates.

- baseline: Misra-Gries, at most max_degree + 1 colors, then the top color is emptied when
  its edges fit into lower colors; deterministic
- greedy: smallest free color over a seeded random edge order
- long path: a long path gets the two lowest colors, the rest is colored greedily
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Set, Tuple

import numpy as np
from loguru import logger

from topology import InteractionGraph


@dataclass
class EdgeColoring:
    """Color per gate id; colors are consecutive from 0"""
    colors: Dict[int, int]
    path: Tuple[int, ...] = ()          # logical qubits of the long path, if any

    @property
    def num_colors(self) -> int:
        return max(self.colors.values(), default=-1) + 1

    def classes(self) -> List[List[int]]:
        """Gate ids per color in ascending color order, ids sorted inside"""
        buckets: List[List[int]] = [[] for _ in range(self.num_colors)]
        for gate_id, color in self.colors.items():
            buckets[color].append(gate_id)
        return [sorted(b) for b in buckets if b]


def validate_edge_coloring(graph: InteractionGraph, coloring: EdgeColoring) -> List[str]:
    """Return conflicts: gates sharing a qubit with equal colors, or gates left uncolored"""
    problems = []
    used: Dict[Tuple[int, int], int] = {}
    members = [(g, (a, b)) for g, a, b in graph.edges] + [(g, (q,)) for g, q in graph.self_loops]
    for gate_id, qubits in members:
        if gate_id not in coloring.colors:
            problems.append(f"gate {gate_id} has no color")
            continue
        color = coloring.colors[gate_id]
        for q in qubits:
            other = used.get((q, color))
            if other is not None:
                problems.append(f"gates {other} and {gate_id} share qubit {q} and color {color}")
            used[(q, color)] = gate_id
    return problems


def _incidences(graph: InteractionGraph) -> List[Tuple[int, Tuple[int, ...]]]:
    return [(g, (a, b)) for g, a, b in graph.edges] + [(g, (q,)) for g, q in graph.self_loops]


def _greedy_fill(items: Sequence[Tuple[int, Tuple[int, ...]]], colors: Dict[int, int],
                 used: Dict[int, Set[int]], min_color: int = 0):
    for gate_id, qubits in items:
        color = min_color
        while any(color in used[q] for q in qubits):
            color += 1
        colors[gate_id] = color
        for q in qubits:
            used[q].add(color)


def _compact(colors: Dict[int, int]) -> Dict[int, int]:
    """Relabel colors to 0..k-1 keeping their relative order"""
    ranks = {c: i for i, c in enumerate(sorted(set(colors.values())))}
    return {g: ranks[c] for g, c in colors.items()}


class _MisraGries:
    """Misra-Gries edge coloring of a simple graph with at most max_degree + 1 colors"""

    def __init__(self, edges: Sequence[Tuple[int, int]]):
        self.adj: Dict[int, List[int]] = defaultdict(list)
        for u, v in edges:
            self.adj[u].append(v)
            self.adj[v].append(u)
        for u in self.adj:
            self.adj[u].sort()
        self.edges = list(edges)
        self.color: Dict[Tuple[int, int], int] = {}
        self.at: Dict[int, Dict[int, int]] = defaultdict(dict)   # vertex -> color -> neighbour
        self.palette = max((len(n) for n in self.adj.values()), default=0) + 1

    @staticmethod
    def _key(u: int, v: int) -> Tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def _free(self, v: int, c: int) -> bool:
        return c not in self.at[v]

    def _first_free(self, v: int) -> int:
        return next(c for c in range(self.palette) if c not in self.at[v])

    def _set(self, u: int, v: int, c: int):
        self.color[self._key(u, v)] = c
        self.at[u][c] = v
        self.at[v][c] = u

    def _unset(self, u: int, v: int):
        c = self.color.pop(self._key(u, v))
        del self.at[u][c]
        del self.at[v][c]

    def _fan(self, u: int, v: int) -> List[int]:
        fan, members = [v], {v}
        extended = True
        while extended:
            extended = False
            for x in self.adj[u]:
                if x in members:
                    continue
                c = self.color.get(self._key(u, x))
                if c is not None and self._free(fan[-1], c):
                    fan.append(x)
                    members.add(x)
                    extended = True
                    break
        return fan

    def _invert_path(self, u: int, c: int, d: int):
        """Swap c and d along the maximal path from u alternating d, c, d, ..."""
        path, cur, want = [], u, d
        while want in self.at[cur]:
            nxt = self.at[cur][want]
            path.append((cur, nxt, want))
            cur = nxt
            want = c if want == d else d
        for a, b, _ in path:
            self._unset(a, b)
        for a, b, old in path:
            self._set(a, b, c if old == d else d)

    def _color_edge(self, u: int, v: int):
        fan = self._fan(u, v)
        c = self._first_free(u)
        d = self._first_free(fan[-1])
        if c != d:
            self._invert_path(u, c, d)
        w = None
        for i, x in enumerate(fan):
            if i > 0 and not self._free(fan[i - 1], self.color.get(self._key(u, x), -1)):
                break
            if self._free(x, d):
                w = i
                break
        if w is None:
            raise RuntimeError(f"Misra-Gries found no rotation point for edge ({u},{v})")
        shifted = [self.color[self._key(u, fan[j + 1])] for j in range(w)]
        for j in range(1, w + 1):
            self._unset(u, fan[j])
        for j in range(w):
            self._set(u, fan[j], shifted[j])
        self._set(u, fan[w], d)

    def run(self) -> Dict[Tuple[int, int], int]:
        for u, v in self.edges:
            self._color_edge(u, v)
        return dict(self.color)


def _drop_top_color(pair_colors: Dict[Tuple[int, int], int]) -> Dict[Tuple[int, int], int]:
    """Move every edge of the highest color to a lower color free at both ends, while that succeeds"""
    colors = dict(pair_colors)
    while colors:
        top = max(colors.values())
        used: Dict[int, Set[int]] = defaultdict(set)
        for (u, v), c in colors.items():
            if c != top:
                used[u].add(c)
                used[v].add(c)
        moved = {}
        for (u, v), c in sorted(colors.items()):
            if c != top:
                continue
            free = [d for d in range(top) if d not in used[u] and d not in used[v]]
            if not free:
                return colors
            moved[(u, v)] = free[0]
            used[u].add(free[0])
            used[v].add(free[0])
        colors.update(moved)
    return colors


def edge_color_baseline(graph: InteractionGraph) -> EdgeColoring:
    """Deterministic Misra-Gries coloring; 1-qubit gates become pendant edges to virtual nodes"""
    if not graph.is_simple():
        logger.warning("Interaction graph has parallel edges, baseline falls back to index-order greedy")
        colors: Dict[int, int] = {}
        _greedy_fill(_incidences(graph), colors, defaultdict(set))
        return EdgeColoring(colors=_compact(colors))

    by_pair: Dict[Tuple[int, int], int] = {}
    for gate_id, a, b in sorted(graph.edges, key=lambda e: (e[1], e[2], e[0])):
        by_pair[(a, b)] = gate_id
    for offset, (gate_id, q) in enumerate(sorted(graph.self_loops, key=lambda s: (s[1], s[0]))):
        by_pair[(q, graph.num_logical + offset)] = gate_id

    pair_colors = _drop_top_color(_MisraGries(list(by_pair)).run())
    colors = {by_pair[pair]: c for pair, c in pair_colors.items()}
    coloring = EdgeColoring(colors=_compact(colors))
    logger.debug(f"Baseline coloring: {coloring.num_colors} colors, max degree {graph.max_degree()}")
    return coloring


def edge_color_greedy(graph: InteractionGraph, rng_seed: int) -> EdgeColoring:
    rng = np.random.default_rng(rng_seed)
    items = _incidences(graph)
    order = rng.permutation(len(items))
    colors: Dict[int, int] = {}
    _greedy_fill([items[i] for i in order], colors, defaultdict(set))
    return EdgeColoring(colors=_compact(colors))


def long_path(graph: InteractionGraph, rng: np.random.Generator) -> List[int]:
    """Start at a random max-degree node; step to the unvisited neighbour with fewest unvisited neighbours"""
    g = graph.to_networkx()
    if g.number_of_edges() == 0:
        return []
    top = max(d for _, d in g.degree())
    starts = sorted(n for n, d in g.degree() if d == top)
    path = [starts[int(rng.integers(len(starts)))]]
    visited = {path[0]}
    while True:
        candidates = sorted(n for n in g.neighbors(path[-1]) if n not in visited)
        if not candidates:
            break
        reach = {n: sum(1 for m in g.neighbors(n) if m not in visited) for n in candidates}
        best = min(reach.values())
        ties = [n for n in candidates if reach[n] == best]
        nxt = ties[int(rng.integers(len(ties)))]
        path.append(nxt)
        visited.add(nxt)
    return path


def long_path_coloring(graph: InteractionGraph, rng_seed: int) -> EdgeColoring:
    """Path edges alternate colors 0 and 1; every other gate gets a color of at least 2"""
    rng = np.random.default_rng(rng_seed)
    path = long_path(graph, rng)
    gate_of: Dict[Tuple[int, int], int] = {}
    for gate_id, a, b in graph.edges:
        gate_of.setdefault((a, b), gate_id)

    colors: Dict[int, int] = {}
    used: Dict[int, Set[int]] = defaultdict(set)
    for i, (a, b) in enumerate(zip(path, path[1:])):
        gate_id = gate_of[(min(a, b), max(a, b))]
        colors[gate_id] = i % 2
        used[a].add(i % 2)
        used[b].add(i % 2)

    rest = [item for item in _incidences(graph) if item[0] not in colors]
    order = rng.permutation(len(rest))
    _greedy_fill([rest[i] for i in order], colors, used, min_color=2 if path else 0)
    coloring = EdgeColoring(colors=_compact(colors), path=tuple(path))
    logger.debug(f"Long-path coloring: path of {len(path)} nodes, {coloring.num_colors} colors")
    return coloring
