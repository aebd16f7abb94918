"""Deterministic firefly dynamics: transition maps, orbits, widths and restriction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph, induced_subgraph


class DynamicsError(ValueError):
    pass


class TruncatedOrbitError(DynamicsError):
    """Raised when a query needs the limit cycle of an orbit that hit its cap."""


def blinking_state(n: int) -> int:
    if n < 3:
        raise DynamicsError(f"period must be >= 3, got {n}")
    return (n - 1) // 2


@dataclass(frozen=True)
class Configuration:
    n: int
    states: tuple[int, ...]

    def __post_init__(self):
        if self.n < 3:
            raise DynamicsError(f"period must be >= 3, got {self.n}")
        states = tuple(int(s) for s in self.states)
        for s in states:
            if not 0 <= s < self.n:
                raise DynamicsError(f"state {s} out of range for n={self.n}")
        object.__setattr__(self, "states", states)

    @property
    def b(self) -> int:
        return blinking_state(self.n)

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, v: int) -> int:
        return self.states[v]

    def is_constant(self) -> bool:
        return len(set(self.states)) <= 1

    @classmethod
    def parse(cls, text: str, n: int) -> Configuration:
        """Parse a literal like ``"2,5,5,5"``."""
        try:
            states = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
        except ValueError as exc:
            raise DynamicsError(f"malformed configuration literal {text!r}") from exc
        return cls(n, states)

    def __str__(self) -> str:
        return ",".join(map(str, self.states))


@dataclass(frozen=True)
class RelativeConfiguration:
    n: int
    activator_state: int
    states: tuple[int, ...]

    def __post_init__(self):
        if self.n < 3:
            raise DynamicsError(f"period must be >= 3, got {self.n}")
        states = tuple(int(s) for s in self.states)
        for s in (*states, self.activator_state):
            if not 0 <= s < self.n:
                raise DynamicsError(f"state {s} out of range for n={self.n}")
        object.__setattr__(self, "states", states)

    def is_blinking(self, v: int) -> bool:
        return self.states[v] == self.activator_state


PullEvent = tuple[int, int, int]  # (t, puller u, pulled v)


def _check(g: Graph, x: Configuration) -> None:
    if len(x.states) != g.vertex_count:
        raise DynamicsError(
            f"configuration has {len(x.states)} states but graph has {g.vertex_count} vertices"
        )


def _step_states(adjacency, states: Sequence[int], n: int, b: int, t: int = 0,
                 pulls: list | None = None) -> tuple[int, ...]:
    out = []
    for v, s in enumerate(states):
        if s > b:
            held = False
            for u in adjacency[v]:
                if states[u] == b:
                    held = True
                    if pulls is None:
                        break
                    pulls.append((t, u, v))
            if held:
                out.append(s)
                continue
        out.append(s + 1 if s + 1 < n else 0)
    return tuple(out)


def step(g: Graph, x: Configuration, t: int = 0) -> tuple[Configuration, list[PullEvent]]:
    """One firefly transition; also returns the pull events stamped with time ``t``."""
    _check(g, x)
    pulls: list[PullEvent] = []
    nxt = _step_states(g.adjacency, x.states, x.n, x.b, t, pulls)
    return Configuration(x.n, nxt), pulls


def step_relative(g: Graph, y: RelativeConfiguration) -> RelativeConfiguration:
    """Relative transition: the activator and every pulled vertex move back by one.

    v is pulled iff it has a blinking neighbour u with
    ``1 <= (y[v] - y[u]) mod n <= n // 2``.
    """
    if len(y.states) != g.vertex_count:
        raise DynamicsError("relative configuration does not match graph")
    n, a = y.n, y.activator_state
    half = n // 2
    out = []
    for v, s in enumerate(y.states):
        pulled = any(y.states[u] == a and 1 <= (s - a) % n <= half for u in g.adjacency[v])
        out.append((s - 1) % n if pulled else s)
    return RelativeConfiguration(n, (a - 1) % n, tuple(out))


def step_relative_literal(g: Graph, y: RelativeConfiguration) -> RelativeConfiguration:
    """The same map with the pull window read as ``(y[v] - y[u]) mod n <= n/2``, zero included.

    Kept only as a diagnostic target for :func:`relative_reading_discrepancy`.
    """
    n, a = y.n, y.activator_state
    out = []
    for v, s in enumerate(y.states):
        pulled = any(y.states[u] == a and (s - a) % n <= n / 2 for u in g.adjacency[v])
        out.append((s - 1) % n if pulled else s)
    return RelativeConfiguration(n, (a - 1) % n, tuple(out))


def relative_reading_discrepancy(g: Graph, y: RelativeConfiguration) -> list[int]:
    """Vertices whose next relative state differs between the two pull-window readings."""
    exact = step_relative(g, y).states
    literal = step_relative_literal(g, y).states
    return [v for v in range(g.vertex_count) if exact[v] != literal[v]]


def to_relative(x: Configuration, t: int) -> RelativeConfiguration:
    n = x.n
    return RelativeConfiguration(n, (x.b - t) % n, tuple((s - t) % n for s in x.states))


def from_relative(y: RelativeConfiguration, t: int) -> Configuration:
    n = y.n
    return Configuration(n, tuple((s + t) % n for s in y.states))


def displacement(x: Configuration, u: int, v: int) -> int:
    """Clockwise displacement of v from u: ``(x[v] - x[u]) mod n``."""
    return (x.states[v] - x.states[u]) % x.n


def is_clockwise(x: Configuration, u: int, v: int) -> bool:
    """True when v is clockwise to u (displacement strictly below n/2)."""
    return displacement(x, u, v) < x.n / 2


def is_opposite(x: Configuration, u: int, v: int) -> bool:
    return x.n % 2 == 0 and displacement(x, u, v) == x.n // 2


def width_of_states(states: Iterable[int], n: int) -> int:
    """Length of the shortest arc of Z_n covering every given state."""
    present = sorted(set(states))
    if not present:
        raise DynamicsError("width of an empty vertex set")
    if len(present) == 1:
        return 0
    # the covering arc leaves out the largest gap between consecutive states
    gaps = [present[i + 1] - present[i] for i in range(len(present) - 1)]
    gaps.append(present[0] + n - present[-1])
    return n - max(gaps)


def width(x: Configuration, subset: Iterable[int] | None = None) -> int:
    """min over v of max over u of the clockwise displacement, on ``subset``."""
    verts = range(len(x.states)) if subset is None else list(subset)
    if not verts:
        raise DynamicsError("width of an empty vertex set")
    return width_of_states((x.states[v] for v in verts), x.n)


# --- orbits ------------------------------------------------------------------

@dataclass
class Orbit:
    initial: Configuration
    transient_length: int | None
    cycle_length: int | None
    trajectory: list[tuple[int, ...]]
    sync_time: int | None
    blink_times: dict[int, list[int]]
    pull_events: list[PullEvent] = field(repr=False)
    truncated: bool = False

    @property
    def n(self) -> int:
        return self.initial.n

    @property
    def window(self) -> range:
        """Time indices of one pass around the limit cycle."""
        self._require_complete()
        return range(self.transient_length, self.transient_length + self.cycle_length)

    def _require_complete(self) -> None:
        if self.truncated:
            raise TruncatedOrbitError("orbit was truncated before a repeat was found")

    def at(self, t: int) -> tuple[int, ...]:
        """State tuple X_t for any t >= 0, using periodicity past the stored prefix."""
        if t < len(self.trajectory):
            return self.trajectory[t]
        self._require_complete()
        rho, pi = self.transient_length, self.cycle_length
        return self.trajectory[rho + (t - rho) % pi]

    def config(self, t: int) -> Configuration:
        return Configuration(self.n, self.at(t))

    @property
    def synchronizes(self) -> bool:
        self._require_complete()
        return self.sync_time is not None


def default_cap(vertex_count: int, n: int) -> int:
    if vertex_count * math.log2(n) > 40:
        raise DynamicsError(
            f"state space n^|V| = {n}^{vertex_count} too large for a default cap; pass cap explicitly"
        )
    return n ** vertex_count + 1


def compute_orbit(g: Graph, x0: Configuration, cap: int | None = None) -> Orbit:
    """Iterate until the first repeated configuration and split into transient and cycle."""
    _check(g, x0)
    n, b = x0.n, x0.b
    if cap is None:
        cap = default_cap(g.vertex_count, n)
    adjacency = g.adjacency
    seen: dict[tuple[int, ...], int] = {}
    trajectory: list[tuple[int, ...]] = []
    pulls: list[PullEvent] = []
    cur = x0.states
    t = 0
    while cur not in seen:
        if t >= cap:
            return _finish(x0, trajectory, pulls, None, None)
        seen[cur] = t
        trajectory.append(cur)
        cur = _step_states(adjacency, cur, n, b, t, pulls)
        t += 1
    rho = seen[cur]
    pi = t - rho
    # pulls recorded at t = rho+pi-1 lead back into the cycle; keep all with t < rho+pi
    return _finish(x0, trajectory, pulls, rho, pi)


def _finish(x0, trajectory, pulls, rho, pi) -> Orbit:
    b = x0.b
    blink_times: dict[int, list[int]] = {v: [] for v in range(len(x0.states))}
    for t, cfg in enumerate(trajectory):
        for v, s in enumerate(cfg):
            if s == b:
                blink_times[v].append(t)
    sync_time = None
    if rho is not None:
        for t, cfg in enumerate(trajectory):
            if len(set(cfg)) <= 1:
                sync_time = t
                break
    return Orbit(
        initial=x0,
        transient_length=rho,
        cycle_length=pi,
        trajectory=trajectory,
        sync_time=sync_time,
        blink_times=blink_times,
        pull_events=pulls,
        truncated=rho is None,
    )


def blinks_infinitely(orbit: Orbit, v: int) -> bool:
    """Whether v blinks somewhere on the limit cycle."""
    window = orbit.window
    return any(t in window for t in orbit.blink_times[v])


def all_blink_infinitely(orbit: Orbit) -> bool:
    return all(blinks_infinitely(orbit, v) for v in range(len(orbit.initial)))


# --- restriction -------------------------------------------------------------

@dataclass(frozen=True)
class SubgraphWindow:
    graph: Graph
    vertices: tuple[int, ...]
    subgraph: Graph
    remap: dict[int, int]

    @classmethod
    def of(cls, g: Graph, vertices: Iterable[int]) -> SubgraphWindow:
        verts = tuple(sorted(set(vertices)))
        if not verts:
            raise DynamicsError("subgraph window needs at least one vertex")
        sub, remap = induced_subgraph(g, verts)
        return cls(g, verts, sub, remap)


def restriction_holds_at(g: Graph, h: SubgraphWindow, states: tuple[int, ...], n: int) -> bool:
    """Does tau_G(X)|_H equal tau_H(X|_H) for this single configuration?"""
    b = blinking_state(n)
    full = _step_states(g.adjacency, states, n, b)
    local = tuple(states[v] for v in h.vertices)
    sub = _step_states(h.subgraph.adjacency, local, n, b)
    return all(full[v] == sub[i] for i, v in enumerate(h.vertices))


@dataclass(frozen=True)
class RestrictionResult:
    holds: bool
    r: int | None


def restricts_on(g: Graph, x0: Configuration | Orbit, h: SubgraphWindow | Iterable[int],
                 mode: str = "eventually") -> RestrictionResult:
    """Check whether the dynamic restricts on the induced subgraph ``h``.

    ``from_start`` tests the commutation identity at every t; ``eventually``
    returns the smallest r after which it always holds.
    """
    if not isinstance(h, SubgraphWindow):
        h = SubgraphWindow.of(g, h)
    orbit = x0 if isinstance(x0, Orbit) else compute_orbit(g, x0)
    orbit._require_complete()
    n = orbit.n
    end = orbit.transient_length + orbit.cycle_length
    failures = [t for t in range(end) if not restriction_holds_at(g, h, orbit.trajectory[t], n)]
    if mode == "from_start":
        return RestrictionResult(not failures, 0 if not failures else None)
    if mode != "eventually":
        raise DynamicsError(f"unknown restriction mode {mode!r}")
    if not failures:
        return RestrictionResult(True, 0)
    last = failures[-1]
    if last >= orbit.transient_length:
        return RestrictionResult(False, None)
    return RestrictionResult(True, last + 1)
