"""Whole-state-space sweeps: the firefly map tabulated over all n^|V| configurations.

Configuration codes are radix-n integers with vertex 0 as the most significant
digit, so increasing code order is lexicographic order on state vectors.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .dynamics import blinking_state
from .graph import Graph

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


def encode(states, n: int) -> int:
    code = 0
    for s in states:
        code = code * n + int(s)
    return code


def decode(code: int, n: int, vertex_count: int) -> tuple[int, ...]:
    out = []
    for _ in range(vertex_count):
        code, s = divmod(code, n)
        out.append(s)
    return tuple(reversed(out))


def all_states(n: int, vertex_count: int) -> np.ndarray:
    """(n^V, V) array of every configuration in code order."""
    size = n ** vertex_count
    codes = np.arange(size, dtype=np.int64)
    powers = n ** np.arange(vertex_count - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] // powers[None, :]) % n).astype(np.int16)


def step_all(states: np.ndarray, adjacency_matrix: np.ndarray, n: int) -> np.ndarray:
    b = blinking_state(n)
    blinking = (states == b).astype(np.int64)
    has_blinking_nbr = (blinking @ adjacency_matrix) > 0
    held = (states > b) & has_blinking_nbr
    return np.where(held, states, (states + 1) % n).astype(states.dtype)


class StateSpace:
    """Functional graph of the firefly map on one (graph, period) pair."""

    def __init__(self, g: Graph, n: int, budget: int = DEFAULT_BUDGET):
        if n < 3:
            raise ValueError("period must be >= 3")
        size = n ** g.vertex_count
        if size > budget:
            raise BudgetExceeded(f"{n}^{g.vertex_count} = {size} configurations exceeds budget {budget}")
        self.graph = g
        self.n = n
        self.b = blinking_state(n)
        self.size = size
        self.states = all_states(n, g.vertex_count)
        self._adj = g.adjacency_matrix()
        powers = n ** np.arange(g.vertex_count - 1, -1, -1, dtype=np.int64)
        self.succ = step_all(self.states, self._adj, n).astype(np.int64) @ powers

    def code(self, states) -> int:
        return encode(states, self.n)

    def config(self, code: int) -> tuple[int, ...]:
        return tuple(int(s) for s in self.states[code])

    @cached_property
    def is_constant(self) -> np.ndarray:
        return np.all(self.states == self.states[:, :1], axis=1)

    @cached_property
    def sync_time(self) -> np.ndarray:
        """Steps until the first constant configuration, -1 when never reached."""
        t = np.full(self.size, -1, dtype=np.int64)
        t[self.is_constant] = 0
        k = 0
        while True:
            frontier = (t == -1) & (t[self.succ] == k)
            if not frontier.any():
                break
            k += 1
            t[frontier] = k
        return t

    @cached_property
    def synchronizes(self) -> np.ndarray:
        return self.sync_time >= 0

    def _doublings(self) -> int:
        return max(1, int(self.size - 1).bit_length())

    @cached_property
    def cycle_entry(self) -> np.ndarray:
        """succ^(2^K)(x) with 2^K >= size: a state on x's limit cycle."""
        g = self.succ.copy()
        for _ in range(self._doublings()):
            g = g[g]
        return g

    @cached_property
    def on_cycle(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[self.cycle_entry] = True
        return mask

    def _cycle_or(self, bits: np.ndarray) -> np.ndarray:
        """OR of ``bits`` over one full pass of each state's limit cycle."""
        acc = bits.copy()
        g = self.succ.copy()
        for _ in range(self._doublings()):
            acc = acc | acc[g]
            g = g[g]
        return acc[self.cycle_entry]

    @cached_property
    def blink_bits(self) -> np.ndarray:
        weights = np.int64(1) << np.arange(self.graph.vertex_count, dtype=np.int64)
        return ((self.states == self.b).astype(np.int64) * weights).sum(axis=1)

    @cached_property
    def cycle_blinkers(self) -> np.ndarray:
        """Bitmask per state of the vertices that blink on its limit cycle."""
        return self._cycle_or(self.blink_bits)

    @cached_property
    def all_blink(self) -> np.ndarray:
        full = (np.int64(1) << self.graph.vertex_count) - 1
        return self.cycle_blinkers == full

    def blinks_in_cycle(self, v: int) -> np.ndarray:
        return (self.cycle_blinkers >> v) & 1 == 1

    @cached_property
    def cycle_representative(self) -> np.ndarray:
        """Smallest code on each state's limit cycle (identifies the cycle)."""
        acc = np.arange(self.size, dtype=np.int64)
        g = self.succ.copy()
        for _ in range(self._doublings()):
            acc = np.minimum(acc, acc[g])
            g = g[g]
        return acc[self.cycle_entry]

    @cached_property
    def width(self) -> np.ndarray:
        s = np.sort(self.states, axis=1).astype(np.int64)
        gaps = np.diff(s, axis=1)
        wrap = s[:, :1] + self.n - s[:, -1:]
        biggest = np.concatenate([gaps, wrap], axis=1).max(axis=1)
        w = self.n - biggest
        w[self.is_constant] = 0
        return w

    def pull_census(self) -> tuple[int, int]:
        """(pull events, inhibitory-window violations) over every state's next step."""
        n, b = self.n, self.b
        total = violations = 0
        for u, v in self.graph.edges:
            for src, dst in ((u, v), (v, u)):
                pulled = (self.states[:, src] == b) & (self.states[:, dst] > b)
                delta = (self.states[:, dst].astype(np.int64) - self.states[:, src]) % n
                ok = (delta >= 1) & (delta <= n // 2)
                total += int(pulled.sum())
                violations += int((pulled & ~ok).sum())
        return total, violations
