"""
QSched - Exhaustive SWAP search
Minimum number of SWAPs on a line so that every edge of a MaxCut instance is adjacent
at some step. Searches S = 0, 1, 2, ... over initial maps (up to reversal) and SWAP
sequences without immediate repeats, with skip-ahead pruning.
"""

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from qaoa import MaxCutInstance


class SearchBudgetExceeded(RuntimeError):
    """Raised when the exhaustive search runs past its time budget"""


@dataclass
class ExhaustiveConfig:
    max_swaps: int
    enumerate_maps: bool = True          # False: only the identity initial map
    time_budget: Optional[float] = None  # seconds
    workers: int = 1


@dataclass
class SearchStats:
    maps_visited: int = 0
    sequences_visited: int = 0
    skips: int = 0
    elapsed: float = 0.0


def _first_sequence(length: int) -> List[int]:
    return [i % 2 for i in range(length)]


def _advance(digits: List[int], position: int, base: int) -> int:
    """Increment digits[position] and reset the tail to its smallest valid value.

    Digits are SWAP positions 0..base-1 with no digit equal to its predecessor.
    Returns the lowest changed index, or -1 once the sequence space is exhausted.
    """
    while position >= 0:
        value = digits[position] + 1
        if position > 0 and value == digits[position - 1]:
            value += 1
        if value < base:
            digits[position] = value
            for i in range(position + 1, len(digits)):
                digits[i] = 0 if digits[i - 1] != 0 else 1
            return position
        position -= 1
    return -1


def iter_swap_sequences(num_qubits: int, length: int) -> Iterator[Tuple[int, ...]]:
    """All SWAP sequences of the given length on a line, in odometer order"""
    base = num_qubits - 1
    if length == 0:
        yield ()
        return
    if base < 1 or (base < 2 and length > 1):
        return
    digits = _first_sequence(length)
    while True:
        yield tuple(digits)
        if _advance(digits, length - 1, base) < 0:
            return


def initial_maps(num_qubits: int, enumerate_maps: bool = True) -> Iterator[Tuple[int, ...]]:
    """Line orders of logical qubits, one of each mirror pair"""
    if not enumerate_maps:
        yield tuple(range(num_qubits))
        return
    for perm in itertools.permutations(range(num_qubits)):
        if num_qubits < 2 or perm[0] < perm[-1]:
            yield perm


class ExhaustiveSearch:
    def __init__(self, instance: MaxCutInstance, config: ExhaustiveConfig, deadline: Optional[float] = None):
        self.instance = instance
        self.config = config
        self.n = instance.num_nodes
        self.stats = SearchStats()
        self.edge_bit = {}
        for index, (a, b) in enumerate(instance.edges):
            self.edge_bit[(a, b)] = 1 << index
            self.edge_bit[(b, a)] = 1 << index
        self.full = (1 << len(instance.edges)) - 1
        self._deadline = deadline

    def _pair_bit(self, order: Sequence[int], i: int) -> int:
        if 0 <= i < self.n - 1:
            return self.edge_bit.get((order[i], order[i + 1]), 0)
        return 0

    def _coverage(self, order: Sequence[int]) -> int:
        mask = 0
        for i in range(self.n - 1):
            mask |= self._pair_bit(order, i)
        return mask

    def _check_budget(self):
        if self._deadline is not None and time.time() > self._deadline:
            raise SearchBudgetExceeded(f"Exhaustive search exceeded {self.config.time_budget}s")

    def covers_with(self, start: Tuple[int, ...], length: int) -> bool:
        """True iff some sequence of exactly `length` SWAPs from `start` covers every edge"""
        self.stats.maps_visited += 1
        base_mask = self._coverage(start)
        if length == 0:
            self.stats.sequences_visited += 1
            return base_mask == self.full
        if bin(self.full & ~base_mask).count("1") > 2 * length:
            self.stats.skips += 1
            return False
        base = self.n - 1
        if base < 1 or (base < 2 and length > 1):
            return False

        digits = _first_sequence(length)
        states: List[List[int]] = [list(start)] + [None] * length
        masks = [base_mask] + [0] * length
        changed = 0
        while True:
            self.stats.sequences_visited += 1
            if self.stats.sequences_visited % 4096 == 0:
                self._check_budget()
            for i in range(changed, length):
                order = list(states[i])
                k = digits[i]
                order[k], order[k + 1] = order[k + 1], order[k]
                states[i + 1] = order
                masks[i + 1] = masks[i] | self._pair_bit(order, k - 1) | self._pair_bit(order, k + 1)
            uncovered = bin(self.full & ~masks[length]).count("1")
            if uncovered == 0:
                return True
            # at least ceil(r/2) trailing SWAPs must change
            position = length - (uncovered + 1) // 2
            if position < 0:
                self.stats.skips += 1
                return False
            if position < length - 1:
                self.stats.skips += 1
            changed = _advance(digits, position, base)
            if changed < 0:
                return False

    def search_length(self, length: int, shard: int = 0, shards: int = 1) -> bool:
        for index, start in enumerate(initial_maps(self.n, self.config.enumerate_maps)):
            if index % shards != shard:
                continue
            self._check_budget()
            if self.covers_with(start, length):
                return True
        return False

    def run(self) -> Optional[int]:
        """Least S <= max_swaps that covers every edge, or None"""
        started = time.monotonic()
        if self.config.time_budget is not None:
            # wall clock, shared with the shard processes
            self._deadline = time.time() + self.config.time_budget
        try:
            if not self.instance.edges:
                return 0
            for length in range(self.config.max_swaps + 1):
                self._check_budget()
                if self.config.workers > 1:
                    found = _parallel_search(self.instance, self.config, length, self._deadline)
                else:
                    found = self.search_length(length)
                if found:
                    logger.debug(f"Exhaustive search: {length} swaps for n={self.n}, "
                                 f"{self.stats.sequences_visited} sequences")
                    return length
            return None
        finally:
            self.stats.elapsed = time.monotonic() - started


def _search_shard(args: Tuple[MaxCutInstance, ExhaustiveConfig, int, int, int, Optional[float]]) -> bool:
    instance, config, length, shard, shards, deadline = args
    return ExhaustiveSearch(instance, config, deadline).search_length(length, shard, shards)


def _parallel_search(instance: MaxCutInstance, config: ExhaustiveConfig, length: int,
                     deadline: Optional[float] = None) -> bool:
    shards = config.workers
    tasks = [(instance, config, length, shard, shards, deadline) for shard in range(shards)]
    with ProcessPoolExecutor(max_workers=shards) as pool:
        return any(pool.map(_search_shard, tasks))


def exhaustive_min_swaps(instance: MaxCutInstance, config: ExhaustiveConfig) -> Optional[int]:
    return ExhaustiveSearch(instance, config).run()
