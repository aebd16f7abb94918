"""Exhaustive and structural analysis of firefly networks on small graphs."""

from __future__ import annotations

import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import (
    Configuration,
    Orbit,
    SubgraphWindow,
    blinking_state,
    blinks_infinitely,
    compute_orbit,
    restriction_holds_at,
    restricts_on,
    width_of_states,
)
from .graph import (
    Graph,
    GraphError,
    Star,
    build_family,
    connected_induced_subsets,
    delete_vertices,
    find_stars_and_branches,
    is_connected,
    max_degree,
    structural_queries,
    trees_up_to,
)
from .statespace import DEFAULT_BUDGET, StateSpace

log = logging.getLogger(__name__)


class AnalysisError(ValueError):
    pass


class PreconditionError(AnalysisError):
    pass


class WitnessNotFound(AnalysisError):
    """An exhaustive search found no configuration with the requested property."""


def _require_connected(g: Graph) -> None:
    if not is_connected(g):
        raise GraphError("analysis requires a connected graph")


# --- synchronization sweeps --------------------------------------------------

@dataclass
class SyncReport:
    graph: Graph
    n: int
    is_n_synchronizing: bool
    witness: Configuration | None
    configs_checked: int
    max_sync_time: int | None
    argmax: Configuration | None
    pull_events: int = 0
    pull_violations: int = 0

    def to_json(self) -> dict:
        return {
            "vertices": self.graph.vertex_count,
            "edges": [list(e) for e in self.graph.sorted_edges()],
            "n": self.n,
            "is_n_synchronizing": self.is_n_synchronizing,
            "witness": None if self.witness is None else list(self.witness.states),
            "configs_checked": self.configs_checked,
            "max_sync_time": self.max_sync_time,
            "argmax": None if self.argmax is None else list(self.argmax.states),
            "pull_events": self.pull_events,
            "pull_violations": self.pull_violations,
        }


def sync_report(space: StateSpace) -> SyncReport:
    n = space.n
    sync = space.synchronizes
    ok = bool(sync.all())
    witness = None if ok else Configuration(n, space.config(int(np.flatnonzero(~sync)[0])))
    max_t = argmax = None
    if ok:
        max_t = int(space.sync_time.max())
        argmax = Configuration(n, space.config(int(np.flatnonzero(space.sync_time == max_t)[0])))
    pulls, violations = space.pull_census()
    return SyncReport(space.graph, n, ok, witness, space.size, max_t, argmax, pulls, violations)


def is_n_synchronizing(g: Graph, n: int, budget: int = DEFAULT_BUDGET) -> SyncReport:
    """Decide n-synchronization by sweeping all n^|V| configurations."""
    _require_connected(g)
    return sync_report(StateSpace(g, n, budget))


@dataclass
class PathBound:
    n: int
    m: int
    T: int
    argmax: Configuration
    lower_bound: Fraction
    upper_bound: Fraction
    pull_violations: int = 0

    @property
    def within_upper(self) -> bool:
        return self.T <= self.upper_bound

    @property
    def meets_lower(self) -> bool:
        return self.T >= self.lower_bound


def path_bounds(n: int, m: int) -> tuple[Fraction, Fraction]:
    """(lower, upper) linear bounds on the maximum sync time of an m-vertex path."""
    half_n = Fraction(n, 2)
    lower = n * (half_n - 1 + m)
    upper = (m - 1) * (Fraction(n * n, 2) + 2 * n - 2)
    return lower, upper


def max_sync_time_path(n: int, m: int, budget: int = DEFAULT_BUDGET) -> PathBound:
    report = is_n_synchronizing(build_family("path", m), n, budget)
    if not report.is_n_synchronizing:
        raise AnalysisError(f"path({m}) is not {n}-synchronizing: witness {report.witness}")
    lower, upper = path_bounds(n, m)
    return PathBound(n, m, report.max_sync_time, report.argmax, lower, upper, report.pull_violations)


def slow_path_configuration(n: int, m: int) -> Configuration:
    """One end at the blinking state, every other vertex at n-1."""
    return Configuration(n, (blinking_state(n),) + (n - 1,) * (m - 1))


@dataclass
class SlowPathReport:
    n: int
    m: int
    sync_time: int | None
    formula: Fraction

    @property
    def matches_formula(self) -> bool:
        return self.sync_time == self.formula


def slow_path_report(n: int, m: int) -> SlowPathReport:
    orbit = compute_orbit(build_family("path", m), slow_path_configuration(n, m))
    return SlowPathReport(n, m, orbit.sync_time, n * (Fraction(n, 2) - 1 + m))


# --- tree theorems -----------------------------------------------------------

@dataclass
class TreeRow:
    tree: Graph
    n: int
    max_degree: int
    synchronizing: bool
    max_sync_time: int | None
    witness: Configuration | None

    @property
    def agrees(self) -> bool:
        return self.synchronizing == (self.max_degree < self.n)


@dataclass
class TreeTheoremReport:
    n: int
    max_vertices: int
    rows: list[TreeRow]

    @property
    def exceptions(self) -> list[TreeRow]:
        return [r for r in self.rows if not r.agrees]

    @property
    def passed(self) -> bool:
        return not self.exceptions


def _tree_row(args) -> TreeRow:
    tree, n, budget = args
    rep = is_n_synchronizing(tree, n, budget)
    return TreeRow(tree, n, max_degree(tree), rep.is_n_synchronizing, rep.max_sync_time, rep.witness)


def verify_tree_theorem(n: int, max_vertices: int, budget: int = DEFAULT_BUDGET,
                        jobs: int = 1, min_vertices: int = 1) -> TreeTheoremReport:
    """For every tree up to ``max_vertices``: n-synchronizing iff max degree < n."""
    trees = trees_up_to(max_vertices, min_vertices)
    for t in trees:
        if n ** t.vertex_count > budget:
            raise AnalysisError(f"{n}^{t.vertex_count} exceeds budget {budget}")
    work = [(t, n, budget) for t in trees]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_tree_row, work))
    else:
        rows = [_tree_row(w) for w in work]
    return TreeTheoremReport(n, max_vertices, rows)


@dataclass
class BlinkingReport:
    tree: Graph
    n: int
    configs_checked: int
    sync_count: int
    all_blink_count: int
    violations: int
    witness: Configuration | None
    never_blink_witness: Configuration | None

    @property
    def passed(self) -> bool:
        return self.violations == 0


def verify_blinking_theorem(n: int, tree: Graph, budget: int = DEFAULT_BUDGET,
                            require_tree: bool = True) -> BlinkingReport:
    """Over all configurations: synchronizes iff every vertex blinks on the limit cycle."""
    if require_tree and not structural_queries(tree)["is_tree"]:
        raise GraphError("blinking theorem check needs a tree")
    space = StateSpace(tree, n, budget)
    sync, blink = space.synchronizes, space.all_blink
    bad = np.flatnonzero(sync != blink)
    never = np.flatnonzero(~blink)
    return BlinkingReport(
        tree=tree,
        n=n,
        configs_checked=space.size,
        sync_count=int(sync.sum()),
        all_blink_count=int(blink.sum()),
        violations=int(bad.size),
        witness=Configuration(n, space.config(int(bad[0]))) if bad.size else None,
        never_blink_witness=Configuration(n, space.config(int(never[0]))) if never.size else None,
    )


@dataclass
class DegreeLemmaReport:
    vertex: int
    n: int
    configs_checked: int
    failures: int
    witness: Configuration | None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def verify_degree_lemma(g: Graph, n: int, u: int, budget: int = DEFAULT_BUDGET,
                        samples: int | None = None, seed: int = 0) -> DegreeLemmaReport:
    """A vertex of degree < n blinks on every limit cycle.

    Exhaustive by default; with ``samples`` set, checks that many seeded random
    configurations orbit-by-orbit instead.
    """
    if g.degree(u) >= n:
        raise PreconditionError(f"deg({u}) = {g.degree(u)} is not below n = {n}")
    if samples is None:
        space = StateSpace(g, n, budget)
        ok = space.blinks_in_cycle(u)
        bad = np.flatnonzero(~ok)
        witness = Configuration(n, space.config(int(bad[0]))) if bad.size else None
        return DegreeLemmaReport(u, n, space.size, int(bad.size), witness)
    rng = np.random.default_rng(seed)
    failures = 0
    witness = None
    for _ in range(samples):
        x0 = Configuration(n, tuple(int(s) for s in rng.integers(0, n, g.vertex_count)))
        if not blinks_infinitely(compute_orbit(g, x0, cap=max(10_000, 50 * n * n * g.vertex_count)), u):
            failures += 1
            witness = witness or x0
    return DegreeLemmaReport(u, n, samples, failures, witness)


# --- Poincare return map -----------------------------------------------------

@dataclass(frozen=True)
class LocalSnapshot:
    center: int
    neighborhood: tuple[int, ...]
    relative_states: tuple[int, ...]
    activator_state: int
    standard_states: tuple[int, ...]
    time: int
    in_cycle: bool
    is_opposite: bool
    has_duplicate_leaf_states: bool
    single_leaf_state: bool
    small_width: bool

    @property
    def key(self) -> tuple[int, ...]:
        """Local configuration up to rotation: the standard states at the blink."""
        return self.standard_states


@dataclass
class ReturnMapReport:
    center: int
    leaves: tuple[int, ...]
    snapshots: list[LocalSnapshot]
    classification: dict[tuple[int, ...], str]

    @property
    def never_blinks(self) -> bool:
        return not self.snapshots

    def recurrent(self) -> list[tuple[int, ...]]:
        return [k for k, c in self.classification.items() if c == "recurrent"]


def _snapshot(g: Graph, orbit: Orbit, v: int, t: int, leaves: tuple[int, ...]) -> LocalSnapshot:
    n = orbit.n
    x = orbit.at(t)
    hood = (v, *g.neighbors(v))
    leaf_states = [x[u] for u in leaves]
    half = n // 2
    return LocalSnapshot(
        center=v,
        neighborhood=hood,
        relative_states=tuple((x[u] - t) % n for u in hood),
        activator_state=(blinking_state(n) - t) % n,
        standard_states=tuple(x[u] for u in hood),
        time=t,
        in_cycle=t >= orbit.transient_length,
        is_opposite=any((x[v] - x[u]) % n == half for u in leaves),
        has_duplicate_leaf_states=len(set(leaf_states)) < len(leaf_states),
        single_leaf_state=len(leaves) > 0 and len(set(leaf_states)) == 1,
        small_width=bool(leaves) and width_of_states([x[v], *leaf_states], n) < n / 2 - 1,
    )


def return_map(g: Graph, x0: Configuration | Orbit, v: int) -> ReturnMapReport:
    """Snapshots of N(v) + v at every blink of v up to the end of the first cycle pass."""
    if not 0 <= v < g.vertex_count:
        raise GraphError(f"vertex {v} out of range")
    orbit = x0 if isinstance(x0, Orbit) else compute_orbit(g, x0)
    orbit._require_complete()
    leaves = tuple(u for u in g.neighbors(v) if g.degree(u) == 1)
    end = orbit.transient_length + orbit.cycle_length
    snaps = [_snapshot(g, orbit, v, t, leaves) for t in orbit.blink_times[v] if t < end]
    recurrent = {s.key for s in snaps if s.in_cycle}
    classification = {s.key: ("recurrent" if s.key in recurrent else "transient") for s in snaps}
    return ReturnMapReport(v, leaves, snaps, classification)


# --- irreducibility ----------------------------------------------------------

@dataclass
class IrreducibilityResult:
    irreducible: bool
    reducing_subgraph: tuple[int, ...] | None
    r: int | None
    subgraphs_checked: int


def is_irreducible(g: Graph, x0: Configuration | Orbit, max_vertices: int = 12) -> IrreducibilityResult:
    """Irreducible iff the dynamic never, even eventually, restricts on a proper
    connected induced subgraph with at least two vertices."""
    if g.vertex_count < 2:
        raise AnalysisError("irreducibility needs at least 2 vertices")
    if g.vertex_count > max_vertices:
        raise AnalysisError(f"2^{g.vertex_count} subgraph enumeration exceeds budget")
    orbit = x0 if isinstance(x0, Orbit) else compute_orbit(g, x0)
    subsets = connected_induced_subsets(g, min_size=2, proper=True)
    for i, subset in enumerate(subsets, 1):
        res = restricts_on(g, orbit, subset, mode="eventually")
        if res.holds:
            return IrreducibilityResult(False, subset, res.r, i)
    return IrreducibilityResult(True, None, None, len(subsets))


def _cycle_is_irreducible(g: Graph, cycle_states: list[tuple[int, ...]], n: int) -> bool:
    """Irreducibility depends only on the limit cycle: check each subgraph on it."""
    for subset in connected_induced_subsets(g, min_size=2, proper=True):
        h = SubgraphWindow.of(g, subset)
        if all(restriction_holds_at(g, h, s, n) for s in cycle_states):
            return False
    return True


# --- two-state quotient ------------------------------------------------------

class QuotientError(AnalysisError):
    pass


@dataclass
class Quotient:
    path: Graph
    class_of: dict[int, int]
    path_config: Configuration
    classes: list[tuple[int, ...]]


def two_state_quotient(g: Graph, x0: Configuration) -> Quotient:
    """Collapse a two-state configuration onto a path of distance-from-interface classes."""
    _require_connected(g)
    values = sorted(set(x0.states))
    if len(values) != 2:
        raise QuotientError(f"expected exactly two states, found {len(values)}")
    a, b = values

    def layers(own: int) -> list[list[int]]:
        mine = {v for v in range(g.vertex_count) if x0[v] == own}
        first = sorted(v for v in mine if any(x0[u] != own for u in g.neighbors(v)))
        level = {v: 0 for v in first}
        queue = deque(first)
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if u in mine and u not in level:
                    level[u] = level[v] + 1
                    queue.append(u)
        out: list[list[int]] = [[] for _ in range(1 + max(level.values()))]
        for v, k in level.items():
            out[k].append(v)
        return [sorted(c) for c in out]

    a_layers, b_layers = layers(a), layers(b)
    classes = [tuple(c) for c in reversed(a_layers)] + [tuple(c) for c in b_layers]
    class_of = {v: i for i, c in enumerate(classes) for v in c}
    for u, v in g.edges:
        if abs(class_of[u] - class_of[v]) > 1:
            raise QuotientError(f"edge ({u},{v}) joins non-adjacent classes")
    k = len(classes)
    path = build_family("path", k)
    cfg = Configuration(x0.n, tuple([a] * len(a_layers) + [b] * len(b_layers)))
    return Quotient(path, class_of, cfg, classes)


def quotient_tracks(g: Graph, x0: Configuration) -> tuple[bool, int | None]:
    """Simulate G and its quotient path side by side.

    Returns (classwise agreement at every step up to both limit cycles, first
    disagreement time or None).
    """
    q = two_state_quotient(g, x0)
    full = compute_orbit(g, x0)
    small = compute_orbit(q.path, q.path_config)
    horizon = max(len(full.trajectory), len(small.trajectory)) + full.cycle_length * small.cycle_length
    for t in range(horizon):
        xs, ps = full.at(t), small.at(t)
        if any(xs[v] != ps[c] for v, c in q.class_of.items()):
            return False, t
    return True, None


# --- branch width lemma ------------------------------------------------------

@dataclass
class BranchWidthReport:
    initial_width: int
    r: int | None
    claim_i: bool
    claim_ii: bool
    claim_iii: bool
    failures: dict[str, list[int]] = field(default_factory=dict)
    restriction_time: int | None = None
    pruning_bound: Fraction | None = None
    pruning_bound_ok: bool | None = None

    @property
    def passed(self) -> bool:
        ok = self.claim_i and self.claim_ii and self.claim_iii
        return ok and self.pruning_bound_ok is not False


def center_trails_leaves(states: tuple[int, ...], branch: Star, n: int) -> bool:
    """Every leaf sits less than half a turn ahead of (or level with) the center,
    so no leaf can pull it."""
    c = states[branch.center]
    return all((states[l] - c) % n < n / 2 for l in branch.leaves)


def verify_branch_width(g: Graph, branch: Star, x0: Configuration) -> BranchWidthReport:
    """Check the branch-width claims along the orbit of x0.

    (i) the center trails all leaves by r <= n(w0+1) with width not grown;
    (ii) afterwards it keeps trailing and the branch width never exceeds w0+1;
    (iii) from r on the dynamic restricts on G minus the leaves.
    """
    if branch.root is None:
        raise AnalysisError("branch has no root")
    _validate_star(g, branch)
    n = x0.n
    bverts = branch.vertices
    w0 = width_of_states([x0[v] for v in bverts], n)
    if not w0 < n / 2 - 1:
        raise PreconditionError(f"branch width {w0} is not below n/2 - 1 = {n / 2 - 1}")
    orbit = compute_orbit(g, x0)
    rho, pi = orbit.transient_length, orbit.cycle_length
    end = rho + pi
    failures: dict[str, list[int]] = {}

    def wb(t):
        s = orbit.at(t)
        return width_of_states([s[v] for v in bverts], n)

    r = next((t for t in range(end) if center_trails_leaves(orbit.at(t), branch, n)), None)
    claim_i = r is not None and r <= n * (w0 + 1) and wb(r) <= w0
    if not claim_i:
        failures["i"] = [] if r is None else [r]

    claim_ii = True
    if r is not None:
        later = range(r, max(r, rho) + pi)
        bad = [t for t in later if not center_trails_leaves(orbit.at(t), branch, n)]
        bad += [t for t in range(end) if wb(t) > w0 + 1]
        if bad:
            claim_ii = False
            failures["ii"] = sorted(set(bad))
    else:
        claim_ii = False

    claim_iii = False
    h_vertices = [v for v in range(g.vertex_count) if v not in branch.leaves]
    h = SubgraphWindow.of(g, h_vertices)
    if r is not None:
        bad = [t for t in range(r, max(r, rho) + pi) if not restriction_holds_at(g, h, orbit.at(t), n)]
        claim_iii = not bad
        if bad:
            failures["iii"] = bad
    report = BranchWidthReport(w0, r, claim_i, claim_ii, claim_iii, failures)
    if branch.k == 1:
        res = restricts_on(g, orbit, h, mode="eventually")
        report.restriction_time = res.r
        report.pruning_bound = Fraction(n * n, 2) + 2 * n - 2
        report.pruning_bound_ok = res.holds and res.r <= report.pruning_bound
    return report


def _validate_star(g: Graph, s: Star) -> None:
    for l in s.leaves:
        if s.center not in g.neighbors(l) or g.degree(l) != 1:
            raise GraphError(f"{l} is not a leaf of center {s.center}")
    if s.root is not None:
        outside = set(g.neighbors(s.center)) - set(s.leaves)
        if outside != {s.root}:
            raise GraphError(f"center {s.center} has outside neighbours {sorted(outside)}, not just the root")


@dataclass
class PruningReport:
    n: int
    configs_checked: int
    never_restricts: int
    max_restriction_time: int
    restriction_bound: Fraction
    sub_max_sync_time: int | None
    max_sync_time: int | None

    @property
    def sync_bound(self) -> Fraction | None:
        if self.sub_max_sync_time is None:
            return None
        return self.restriction_bound + self.sub_max_sync_time

    @property
    def passed(self) -> bool:
        if self.never_restricts:
            return False
        if self.sync_bound is None:
            return True
        return self.max_sync_time is not None and self.max_sync_time <= self.sync_bound


def verify_one_branch_pruning(g: Graph, branch: Star, n: int, budget: int = 200_000) -> PruningReport:
    """Exhaustively check that G restricts eventually on G - leaf and, when G - leaf
    synchronizes everything in N_H steps, that G does so within n^2/2 + 2n - 2 + N_H."""
    if branch.k != 1 or branch.root is None:
        raise AnalysisError("need a 1-branch")
    _validate_star(g, branch)
    (leaf,) = branch.leaves
    sub, _ = delete_vertices(g, [leaf])
    space = StateSpace(g, n, budget)
    h = SubgraphWindow.of(g, [v for v in range(g.vertex_count) if v != leaf])
    never = 0
    worst = 0
    for code in range(space.size):
        orbit = compute_orbit(g, Configuration(n, space.config(code)))
        res = restricts_on(g, orbit, h, mode="eventually")
        if not res.holds:
            never += 1
        else:
            worst = max(worst, res.r)
    sub_rep = sync_report(StateSpace(sub, n, budget))
    full_rep = sync_report(space)
    return PruningReport(
        n=n,
        configs_checked=space.size,
        never_restricts=never,
        max_restriction_time=worst,
        restriction_bound=Fraction(n * n, 2) + 2 * n - 2,
        sub_max_sync_time=sub_rep.max_sync_time,
        max_sync_time=full_rep.max_sync_time,
    )


# --- counterexamples ---------------------------------------------------------

def high_degree_counterexample(tree: Graph, n: int, center: int | None = None,
                               center_state: int | None = None) -> tuple[Graph, Configuration]:
    """Give every component of T - v its own constant state so v is pulled forever."""
    if center is None:
        center = next((v for v in range(tree.vertex_count) if tree.degree(v) >= n), None)
        if center is None:
            raise PreconditionError(f"tree has no vertex of degree >= {n}")
    elif tree.degree(center) < n:
        raise PreconditionError(f"deg({center}) = {tree.degree(center)} < {n}")
    if center_state is None:
        center_state = n // 2 + 1
    if not center_state > n / 2 or center_state >= n:
        raise PreconditionError(f"center state must exceed n/2, got {center_state}")
    states = [0] * tree.vertex_count
    states[center] = center_state
    for i, nbr in enumerate(tree.neighbors(center)):
        stack, seen = [nbr], {center, nbr}
        while stack:
            v = stack.pop()
            states[v] = i % n
            for u in tree.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return tree, Configuration(n, tuple(states))


def k3_three_states(q: int) -> tuple[Graph, Configuration]:
    if q < 2:
        raise PreconditionError("q must be >= 2")
    return build_family("complete", 3), Configuration(2 * q + 1, (0, q, 2 * q))


def n7_star_search(n: int = 7, k: int = 4) -> tuple[Graph, Configuration]:
    """Least configuration on star(k) where every vertex blinks yet nothing synchronizes."""
    g = build_family("star", k)
    space = StateSpace(g, n)
    hits = np.flatnonzero(space.all_blink & ~space.synchronizes)
    if hits.size == 0:
        raise WitnessNotFound(f"no all-blinking non-synchronizing configuration on star({k}) for n={n}")
    return g, Configuration(n, space.config(int(hits[0])))


def gen_counterexample(kind: str, **params) -> tuple[Graph, Configuration]:
    if kind == "high_degree_tree":
        n = params.get("n", 6)
        tree = params.get("tree") or build_family("star", n)
        return high_degree_counterexample(tree, n, params.get("center"), params.get("center_state"))
    if kind == "k3_three_states":
        return k3_three_states(params.get("q", 2))
    if kind == "n7_star_search":
        return n7_star_search(params.get("n", 7), params.get("k", 4))
    raise AnalysisError(f"unknown counterexample kind {kind!r}")


# --- recurrent local configurations on irreducible orbits --------------------

@dataclass
class CycleCensus:
    """Distinct limit cycles of a state space that are non-synchronizing, all-blinking
    and irreducible, each given by its state list starting at its least code."""

    graph: Graph
    n: int
    cycles: list[list[tuple[int, ...]]]
    candidate_cycles: int


def irreducible_blinking_cycles(g: Graph, n: int, budget: int = DEFAULT_BUDGET,
                                require_all_blink: bool = True) -> CycleCensus:
    space = StateSpace(g, n, budget)
    mask = ~space.synchronizes
    if require_all_blink:
        mask &= space.all_blink
    reps = sorted(set(int(c) for c in space.cycle_representative[mask]))
    cycles = []
    for rep in reps:
        states = [space.config(rep)]
        nxt = int(space.succ[rep])
        while nxt != rep:
            states.append(space.config(nxt))
            nxt = int(space.succ[nxt])
        if _cycle_is_irreducible(g, states, n):
            cycles.append(states)
    return CycleCensus(g, n, cycles, len(reps))


def cycle_orbit(g: Graph, cycle: list[tuple[int, ...]], n: int) -> Orbit:
    return compute_orbit(g, Configuration(n, cycle[0]))


@dataclass
class CertificateCheck:
    irreducible_cycles: int
    snapshots_checked: int
    violations: list[tuple[str, Graph, tuple[int, ...], int]]

    @property
    def vacuous(self) -> bool:
        return self.snapshots_checked == 0


def transience_certificates(graphs, n: int, require_all_blink: bool = False) -> CertificateCheck:
    """On irreducible limit cycles, no blink snapshot at a star center may carry a
    duplicate leaf state or an opposite leaf; at branch centers none may use a
    single leaf state or have star width below n/2 - 1."""
    violations = []
    irreducible = checked = 0
    for g in graphs:
        stars = find_stars_and_branches(g)
        if not stars or g.vertex_count < 2:
            continue
        census = irreducible_blinking_cycles(g, n, require_all_blink=require_all_blink)
        for cyc in census.cycles:
            irreducible += 1
            orbit = cycle_orbit(g, cyc, n)
            for s in stars:
                rm = return_map(g, orbit, s.center)
                for snap in rm.snapshots:
                    if not snap.in_cycle:
                        continue
                    checked += 1
                    flags = [("duplicate", snap.has_duplicate_leaf_states), ("opposite", snap.is_opposite)]
                    if s.is_branch:
                        flags += [("single", snap.single_leaf_state), ("small_width", snap.small_width)]
                    for name, hit in flags:
                        if hit:
                            violations.append((name, g, cyc[0], s.center))
    return CertificateCheck(irreducible, checked, violations)


# period-8 local dynamic on a 2-branch and its root for n = 4: (center, leaves, root)
N4_BRANCH_SEQUENCE: list[tuple[int, tuple[int, int], int | None]] = [
    (1, (0, 1), 3),
    (2, (1, 2), 3),
    (2, (2, 3), 0),
    (3, (0, 3), 1),
    (3, (0, 1), 2),
    (3, (1, 2), None),
    (3, (2, 3), None),
    (0, (0, 3), None),
]


def matches_n4_branch_sequence(cycle: list[tuple[int, ...]], branch: Star) -> bool:
    """Does the cycle, read on (center, leaves, root), repeat the period-8 pattern
    from some phase?"""
    if branch.k != 2 or branch.root is None:
        return False
    pat = N4_BRANCH_SEQUENCE
    horizon = math.lcm(len(cycle), 8)
    for phase in range(8):
        ok = True
        for t in range(horizon):
            s = cycle[t % len(cycle)]
            c, leaves, root = pat[(t + phase) % 8]
            if s[branch.center] != c or tuple(sorted(s[l] for l in branch.leaves)) != leaves:
                ok = False
                break
            if root is not None and s[branch.root] != root:
                ok = False
                break
        if ok:
            return True
    return False


@dataclass
class N4StarCheck:
    irreducible_cycles: int
    stars_checked: int
    snapshot_violations: list
    branches_checked: int
    sequence_violations: list
    root_degree_violations: list
    twin_branch_violations: list

    @property
    def vacuous(self) -> bool:
        return self.stars_checked == 0

    @property
    def passed(self) -> bool:
        return not (self.snapshot_violations or self.sequence_violations
                    or self.root_degree_violations or self.twin_branch_violations)


def check_n4_recurrent_structure(graphs) -> N4StarCheck:
    """For irreducible all-blinking 4-periodic cycles: every k-star with k >= 2 has
    k = 2 with leaves {0, 1} at each blink of its center; a 2-branch follows the
    period-8 pattern, its root has >= 3 neighbours outside the branch, and no
    root carries two branches."""
    n = 4
    snap_bad, seq_bad, root_bad, twin_bad = [], [], [], []
    irreducible = stars_checked = branches_checked = 0
    for g in graphs:
        stars = [s for s in find_stars_and_branches(g) if s.k >= 2]
        if not stars:
            continue
        census = irreducible_blinking_cycles(g, n)
        for cyc in census.cycles:
            irreducible += 1
            orbit = cycle_orbit(g, cyc, n)
            for s in stars:
                stars_checked += 1
                if s.k != 2:
                    snap_bad.append((g, cyc[0], s.center, "k"))
                    continue
                rm = return_map(g, orbit, s.center)
                for snap in rm.snapshots:
                    if snap.in_cycle:
                        leaf_states = tuple(sorted(orbit.at(snap.time)[l] for l in s.leaves))
                        if leaf_states != (0, 1):
                            snap_bad.append((g, cyc[0], s.center, leaf_states))
                if s.is_branch:
                    branches_checked += 1
                    if not matches_n4_branch_sequence(cyc, s):
                        seq_bad.append((g, cyc[0], s.center))
                    if g.degree(s.root) - 1 < 3:
                        root_bad.append((g, cyc[0], s.root))
            roots = [s.root for s in stars if s.is_branch]
            if len(roots) != len(set(roots)):
                twin_bad.append((g, cyc[0]))
    return N4StarCheck(irreducible, stars_checked, snap_bad, branches_checked, seq_bad, root_bad, twin_bad)


@dataclass
class BranchPruning5Check:
    graphs_with_branch: int
    irreducible_cycles: list

    @property
    def passed(self) -> bool:
        return not self.irreducible_cycles


def check_n5_branch_pruning(graphs) -> BranchPruning5Check:
    """No graph with a k-branch admits an irreducible all-blinking 5-configuration."""
    found = []
    count = 0
    for g in graphs:
        if not any(s.is_branch for s in find_stars_and_branches(g)):
            continue
        count += 1
        census = irreducible_blinking_cycles(g, 5)
        found += [(g, c[0]) for c in census.cycles]
    return BranchPruning5Check(count, found)


def orbit_flags(orbit: Orbit) -> dict:
    return {
        "synchronizes": orbit.sync_time is not None,
        "all_blink": all(blinks_infinitely(orbit, v) for v in range(len(orbit.initial))),
    }


def opposite_leaf_recurrences(space: StateSpace) -> list[tuple[int, int, int]]:
    """On-cycle states where a center blinks with a leaf at displacement n//2 behind it.

    Returns (code, center, leaf) triples; any hit is a recurrent opposite snapshot.
    """
    g, n, b = space.graph, space.n, space.b
    hits = []
    for v in range(g.vertex_count):
        for u in g.neighbors(v):
            if g.degree(u) != 1:
                continue
            mask = space.on_cycle & (space.states[:, v] == b)
            mask &= (space.states[:, v].astype(np.int64) - space.states[:, u]) % n == n // 2
            hits += [(int(c), v, u) for c in np.flatnonzero(mask)]
    return hits
