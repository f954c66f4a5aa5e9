"""
QSched - Color pairing
Moves each pair of equally colored physical qubits next to each other with SWAPs.
Left accumulation is exact on lines; the delta-greedy walk handles general graphs.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from topology import ConnectivityGraph

Swap = Tuple[int, int]


class ColorPairingError(RuntimeError):
    """Raised for invalid node colorings or when pairing does not terminate"""


@dataclass(frozen=True)
class NodeColoring:
    """Color per physical qubit; every color is used exactly twice, None means uncolored"""
    colors: Tuple[Optional[Hashable], ...]

    def __post_init__(self):
        counts: Dict[Hashable, int] = {}
        for c in self.colors:
            if c is not None:
                counts[c] = counts.get(c, 0) + 1
        odd = sorted(repr(c) for c, n in counts.items() if n != 2)
        if odd:
            raise ColorPairingError(f"Colors not used exactly twice: {', '.join(odd)}")

    @classmethod
    def from_sequence(cls, colors: Sequence[Optional[Hashable]]) -> "NodeColoring":
        """Normalize: colors used once become uncolored, colors used more than twice are rejected"""
        counts: Dict[Hashable, int] = {}
        for c in colors:
            if c is not None:
                counts[c] = counts.get(c, 0) + 1
        crowded = [c for c, n in counts.items() if n > 2]
        if crowded:
            raise ColorPairingError(f"Colors used more than twice: {crowded}")
        return cls(tuple(c if c is not None and counts[c] == 2 else None for c in colors))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[int, int]], num_physical: int) -> "NodeColoring":
        colors: List[Optional[int]] = [None] * num_physical
        for color, (a, b) in enumerate(pairs):
            if colors[a] is not None or colors[b] is not None:
                raise ColorPairingError(f"Physical qubit colored twice by pair ({a},{b})")
            colors[a] = colors[b] = color
        return cls(tuple(colors))

    def pairs(self) -> Dict[Hashable, Tuple[int, int]]:
        seen: Dict[Hashable, List[int]] = {}
        for q, c in enumerate(self.colors):
            if c is not None:
                seen.setdefault(c, []).append(q)
        return {c: (qs[0], qs[1]) for c, qs in seen.items()}

    def __len__(self):
        return len(self.colors)


def _checked(coloring: NodeColoring, graph: ConnectivityGraph):
    if len(coloring) != graph.num_physical:
        raise ColorPairingError(
            f"Coloring covers {len(coloring)} qubits, topology has {graph.num_physical}"
        )


def color_pair_distance(coloring: NodeColoring, graph: ConnectivityGraph) -> int:
    """D = sum over color pairs of (shortest path length - 1)"""
    _checked(coloring, graph)
    total = 0
    for color, (a, b) in coloring.pairs().items():
        d = graph.distances.get(a, {}).get(b)
        if d is None:
            raise ColorPairingError(f"Color {color!r} spans disconnected qubits {a} and {b}")
        total += d - 1
    return total


def swap_lower_bound(distance: int) -> int:
    """A single SWAP lowers D by at most 2"""
    return -(-distance // 2)


def _require_line(coloring: NodeColoring, graph: Optional[ConnectivityGraph]):
    if graph is not None:
        _checked(coloring, graph)
        if not graph.is_line():
            raise ColorPairingError("Accumulation requires a line topology in canonical numbering")


def left_accumulation(coloring: NodeColoring, graph: Optional[ConnectivityGraph] = None) -> List[Swap]:
    """Scan left to right; pull the partner of each colored node next to it, one SWAP per step.

    The SWAP count equals the minimum for the coloring on a line.
    """
    _require_line(coloring, graph)
    colors = list(coloring.colors)
    swaps: List[Swap] = []
    n = 0
    while n < len(colors):
        if colors[n] is None:
            n += 1
            continue
        m = colors.index(colors[n], n + 1)
        for k in range(m - 1, n, -1):
            swaps.append((k, k + 1))
            colors[k], colors[k + 1] = colors[k + 1], colors[k]
        n += 2
    return swaps


def right_accumulation(coloring: NodeColoring, graph: Optional[ConnectivityGraph] = None) -> List[Swap]:
    """Mirror image of left accumulation, scanning right to left"""
    _require_line(coloring, graph)
    last = len(coloring) - 1
    mirrored = left_accumulation(NodeColoring(tuple(reversed(coloring.colors))))
    return [(last - k - 1, last - k) for k, _ in mirrored]


class MoveType(IntEnum):
    """Outcome of one SWAP on a line, by change in color-pair distance"""
    ONE_CLOSER = 1        # one colored node, moves towards its partner
    ONE_FARTHER = 2       # one colored node, moves away
    SAME_COLOR = 3        # both nodes share a color, or both are uncolored
    BOTH_CLOSER = 4
    ONE_EACH_WAY = 5
    BOTH_FARTHER = 6

    @property
    def delta(self) -> int:
        return {1: -1, 2: 1, 3: 0, 4: -2, 5: 0, 6: 2}[self.value]


def classify_move(coloring: NodeColoring, swap: Swap) -> MoveType:
    a, b = swap
    if abs(a - b) != 1:
        raise ColorPairingError(f"SWAP ({a},{b}) is not a line edge")
    colors = coloring.colors
    if colors[a] == colors[b]:
        return MoveType.SAME_COLOR

    def step(src: int, dst: int) -> int:
        color = colors[src]
        partner = next(q for q, c in enumerate(colors) if c == color and q != src)
        return abs(dst - partner) - abs(src - partner)

    moved = [step(src, dst) for src, dst in ((a, b), (b, a)) if colors[src] is not None]
    if len(moved) == 1:
        return MoveType.ONE_CLOSER if moved[0] < 0 else MoveType.ONE_FARTHER
    total = sum(moved)
    return {-2: MoveType.BOTH_CLOSER, 0: MoveType.ONE_EACH_WAY, 2: MoveType.BOTH_FARTHER}[total]


def apply_swaps(coloring: NodeColoring, swaps: Sequence[Swap]) -> NodeColoring:
    colors = list(coloring.colors)
    for a, b in swaps:
        colors[a], colors[b] = colors[b], colors[a]
    return NodeColoring(tuple(colors))


def greedy_color_pairing(coloring: NodeColoring, graph: ConnectivityGraph, rng_seed: int,
                         cap: Optional[int] = None) -> List[Swap]:
    """Repeatedly take a SWAP with the best change in D.

    Preference is delta -2, then -1, then a delta 0 SWAP that shortens some pair.
    Ties are broken by the seeded generator. Raises ColorPairingError past the cap
    (4 * N^2 SWAPs by default).
    """
    _checked(coloring, graph)
    dist = graph.distances
    colors = list(coloring.colors)
    where: Dict[Hashable, List[int]] = {}
    for q, c in enumerate(colors):
        if c is not None:
            where.setdefault(c, []).append(q)
    remaining = color_pair_distance(coloring, graph)
    cap = cap if cap is not None else 4 * graph.num_physical ** 2
    rng = np.random.default_rng(rng_seed)
    swaps: List[Swap] = []

    def partner_of(q: int) -> int:
        first, second = where[colors[q]]
        return second if first == q else first

    while remaining > 0:
        if len(swaps) >= cap:
            raise ColorPairingError(f"Greedy color pairing exceeded {cap} SWAPs with D={remaining}")
        buckets: Dict[int, List[Swap]] = {-2: [], -1: [], 0: []}
        for a, b in graph.sorted_edges:
            ca, cb = colors[a], colors[b]
            if ca == cb:
                continue
            delta, shortens = 0, False
            for src, dst in ((a, b), (b, a)):
                if colors[src] is None:
                    continue
                partner = partner_of(src)
                change = dist[dst][partner] - dist[src][partner]
                delta += change
                shortens = shortens or change < 0
            if delta < 0 or (delta == 0 and shortens):
                buckets[delta].append((a, b))
        delta = next((d for d in (-2, -1, 0) if buckets[d]), None)
        if delta is None:
            raise ColorPairingError(f"Greedy color pairing is stuck at D={remaining}")
        options = buckets[delta]
        a, b = options[int(rng.integers(len(options)))]
        for src, dst in ((a, b), (b, a)):
            if colors[src] is not None:
                pos = where[colors[src]]
                pos[pos.index(src)] = dst
        colors[a], colors[b] = colors[b], colors[a]
        remaining += delta
        swaps.append((a, b))

    logger.debug(f"Greedy color pairing: {len(swaps)} swaps, D={color_pair_distance(coloring, graph)}")
    return swaps
