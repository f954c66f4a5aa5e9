#!/usr/bin/env python3
"""
Tests for color pairing: distance, left/right accumulation, move types and the greedy walk
"""

import itertools
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent / "src"))

import pytest

from oracles.brute_force import brute_force_color_pairing
from routing.color_pairing import (ColorPairingError, MoveType, NodeColoring, apply_swaps, classify_move,
                                   color_pair_distance, greedy_color_pairing, left_accumulation,
                                   right_accumulation, swap_lower_bound)
from topology import ConnectivityGraph

B, R = "B", "R"


def line_colorings(n, max_pairs):
    """Every coloring of an n-line with up to max_pairs pairs, colors named in first-use order"""
    seen = set()
    for pairs in range(max_pairs + 1):
        for slots in itertools.combinations(range(n), 2 * pairs):
            for arrangement in itertools.permutations(range(pairs * 2)):
                colors = [None] * n
                for slot, tag in zip(slots, arrangement):
                    colors[slot] = tag // 2
                names, canonical = {}, []
                for c in colors:
                    if c is not None and c not in names:
                        names[c] = len(names)
                    canonical.append(None if c is None else names[c])
                key = tuple(canonical)
                if key not in seen:
                    seen.add(key)
                    yield NodeColoring(key)


def is_compatible(coloring):
    return all(abs(a - b) == 1 for a, b in coloring.pairs().values())


def test_distance_examples():
    line = ConnectivityGraph.line(4)
    test_cases = [
        ((B, None, None, B), 2),
        ((B, R, R, B), 2),
        ((B, B, R, R), 0),
    ]
    for colors, expected in test_cases:
        assert color_pair_distance(NodeColoring(colors), line) == expected


def test_swap_lower_bound():
    assert [swap_lower_bound(d) for d in (0, 2, 5)] == [0, 1, 3]


def test_single_use_colors_are_dropped():
    assert NodeColoring.from_sequence([B, None, R, B]).colors == (B, None, None, B)
    with pytest.raises(ColorPairingError):
        NodeColoring.from_sequence([B, B, B, None])
    with pytest.raises(ColorPairingError):
        NodeColoring((B, None))


def test_left_accumulation_examples():
    line = ConnectivityGraph.line(4)
    assert left_accumulation(NodeColoring((B, None, None, B)), line) == [(2, 3), (1, 2)]
    swaps = left_accumulation(NodeColoring((B, R, R, B)), line)
    assert swaps == [(2, 3), (1, 2)]
    assert apply_swaps(NodeColoring((B, R, R, B)), swaps).colors == (B, B, R, R)
    assert left_accumulation(NodeColoring((B, B, R, R)), line) == []


def test_left_accumulation_requires_a_line():
    with pytest.raises(ColorPairingError):
        left_accumulation(NodeColoring((B, None, B, None)), ConnectivityGraph.complete(4))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_left_accumulation_is_optimal_on_small_lines(n):
    line = ConnectivityGraph.line(n)
    for coloring in line_colorings(n, min(3, n // 2)):
        swaps = left_accumulation(coloring, line)
        assert is_compatible(apply_swaps(coloring, swaps))
        assert len(swaps) == brute_force_color_pairing(coloring, line), coloring.colors
        assert len(swaps) >= swap_lower_bound(color_pair_distance(coloring, line))


def test_left_accumulation_never_makes_wasteful_moves():
    wasteful = {MoveType.ONE_FARTHER, MoveType.SAME_COLOR, MoveType.BOTH_FARTHER}
    for coloring in line_colorings(7, 3):
        current = coloring
        for swap in left_accumulation(coloring):
            assert classify_move(current, swap) not in wasteful
            current = apply_swaps(current, [swap])


def test_right_accumulation_matches_left_count():
    for coloring in line_colorings(6, 3):
        right = right_accumulation(coloring)
        assert len(right) == len(left_accumulation(coloring))
        assert is_compatible(apply_swaps(coloring, right))


def test_move_classification():
    test_cases = [
        ((B, None, None, B), (0, 1), MoveType.ONE_CLOSER),
        ((None, B, None, B), (0, 1), MoveType.ONE_FARTHER),
        ((B, B, None, None), (0, 1), MoveType.SAME_COLOR),
        ((B, R, B, R), (1, 2), MoveType.BOTH_CLOSER),
        ((B, R, R, B), (2, 3), MoveType.ONE_EACH_WAY),
        ((B, B, R, R), (1, 2), MoveType.BOTH_FARTHER),
    ]
    for colors, swap, expected in test_cases:
        move = classify_move(NodeColoring(colors), swap)
        assert move is expected, colors
        before = color_pair_distance(NodeColoring(colors), ConnectivityGraph.line(4))
        after = color_pair_distance(apply_swaps(NodeColoring(colors), [swap]), ConnectivityGraph.line(4))
        assert after - before == move.delta


def test_greedy_pairing_on_lines_is_never_below_optimum():
    line = ConnectivityGraph.line(6)
    for seed, coloring in enumerate(line_colorings(6, 3)):
        swaps = greedy_color_pairing(coloring, line, rng_seed=seed)
        assert is_compatible(apply_swaps(coloring, swaps))
        assert len(swaps) >= brute_force_color_pairing(coloring, line)


def test_greedy_pairing_with_pairs_crossing_at_a_hub():
    spider = ConnectivityGraph(num_physical=5, edges=frozenset({(0, 1), (1, 2), (0, 3), (3, 4)}))
    coloring = NodeColoring((None, R, B, R, B))
    for seed in range(20):
        swaps = greedy_color_pairing(coloring, spider, rng_seed=seed)
        result = apply_swaps(coloring, swaps)
        assert color_pair_distance(result, spider) == 0
        assert len(swaps) >= brute_force_color_pairing(coloring, spider)


def test_two_pairs_on_a_star_cannot_both_be_adjacent():
    star = ConnectivityGraph(num_physical=5, edges=frozenset({(0, 1), (0, 2), (0, 3), (0, 4)}))
    coloring = NodeColoring((None, B, R, B, R))
    with pytest.raises(ColorPairingError):
        brute_force_color_pairing(coloring, star)
    with pytest.raises(ColorPairingError):
        greedy_color_pairing(coloring, star, rng_seed=0)


def test_greedy_pairing_trivial_inputs():
    grid = ConnectivityGraph(num_physical=4, edges=frozenset({(0, 1), (1, 3), (3, 2), (2, 0)}))
    assert greedy_color_pairing(NodeColoring((B, B, None, None)), grid, rng_seed=0) == []


def test_greedy_pairing_is_deterministic_per_seed():
    ring = ConnectivityGraph(num_physical=8, edges=frozenset({(i, (i + 1) % 8) for i in range(8)}))
    coloring = NodeColoring((B, R, 2, None, B, R, 2, None))
    assert greedy_color_pairing(coloring, ring, 5) == greedy_color_pairing(coloring, ring, 5)


def test_greedy_pairing_cap():
    line = ConnectivityGraph.line(6)
    with pytest.raises(ColorPairingError):
        greedy_color_pairing(NodeColoring((B, None, None, None, None, B)), line, rng_seed=0, cap=2)


def test_brute_force_examples():
    line = ConnectivityGraph.line(4)
    assert brute_force_color_pairing(NodeColoring((B, None, None, B)), line) == 2
    assert brute_force_color_pairing(NodeColoring((B, R, R, B)), line) == 2
    assert brute_force_color_pairing(NodeColoring((B, B, None, None)), line) == 0
