"""
QSched - Brute-force color pairing
Breadth-first search over SWAP sequences; the reference minimum for small colorings
"""

from collections import deque
from typing import Hashable, Optional, Tuple

from routing.color_pairing import ColorPairingError, NodeColoring
from topology import ConnectivityGraph


class BruteForceCapExceeded(RuntimeError):
    """Raised when the search visits more states than allowed"""


def _paired(colors: Tuple[Optional[Hashable], ...], graph: ConnectivityGraph) -> bool:
    seen = {}
    for q, c in enumerate(colors):
        if c is None:
            continue
        if c in seen and not graph.has_edge(seen[c], q):
            return False
        seen[c] = q
    return True


def brute_force_color_pairing(coloring: NodeColoring, graph: ConnectivityGraph,
                              state_cap: int = 1_000_000) -> int:
    """Minimum number of SWAPs after which every color pair is adjacent"""
    start = coloring.colors
    if _paired(start, graph):
        return 0
    edges = graph.sorted_edges
    depth = {start: 0}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for a, b in edges:
            if state[a] == state[b]:
                continue
            nxt = list(state)
            nxt[a], nxt[b] = nxt[b], nxt[a]
            nxt = tuple(nxt)
            if nxt in depth:
                continue
            depth[nxt] = depth[state] + 1
            if _paired(nxt, graph):
                return depth[nxt]
            if len(depth) > state_cap:
                raise BruteForceCapExceeded(f"Brute-force pairing visited more than {state_cap} states")
            queue.append(nxt)
    raise ColorPairingError("No SWAP sequence makes every color pair adjacent")
