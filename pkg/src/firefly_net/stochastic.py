"""Randomized firefly networks: per-step random edge or vertex presence.

Monte Carlo runs draw presence masks from seeded PCG64 streams; the exact
absorbing chain sums over every mask.
"""

from __future__ import annotations

import itertools
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .dynamics import Configuration, blinking_state
from .graph import Graph, GraphError, is_connected
from .statespace import all_states, step_all

EDGE_RECEPTION = "edge_reception"
VERTEX_EMISSION = "vertex_emission"

CHAIN_STATE_BUDGET = 20_000
CHAIN_MASK_BUDGET = 1 << 16
DENSE_SOLVE_LIMIT = 4_000


class StochasticError(ValueError):
    pass


class NotAbsorbingError(StochasticError):
    """Some state cannot reach sync: the lumped chain is not absorbing."""

    def __init__(self, message: str, report: ChainReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class NoiseModel:
    mode: str
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if self.mode not in (EDGE_RECEPTION, VERTEX_EMISSION):
            raise StochasticError(f"unknown noise mode {self.mode!r}")
        probs = tuple(float(p) for p in self.probabilities)
        for p in probs:
            if not 0.0 < p < 1.0:
                raise StochasticError(f"presence probability {p} not strictly inside (0, 1)")
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def uniform(cls, g: Graph, p: float, mode: str = EDGE_RECEPTION) -> NoiseModel:
        count = len(g.edges) if mode == EDGE_RECEPTION else g.vertex_count
        return cls(mode, (p,) * count)

    def check(self, g: Graph) -> None:
        expected = len(g.edges) if self.mode == EDGE_RECEPTION else g.vertex_count
        if len(self.probabilities) != expected:
            raise StochasticError(
                f"{self.mode} needs {expected} probabilities, got {len(self.probabilities)}"
            )


@dataclass(frozen=True)
class AbsorptionResult:
    absorbed: bool
    steps_to_sync: int | None
    seed: int
    cap: int


def _masked_step(g: Graph, edge_order, states: Sequence[int], n: int, b: int,
                 mode: str, mask: Sequence[bool]) -> tuple[int, ...]:
    if mode == EDGE_RECEPTION:
        visible = [[] for _ in range(g.vertex_count)]
        for (u, v), present in zip(edge_order, mask):
            if present:
                visible[u].append(v)
                visible[v].append(u)
    else:
        visible = [[u for u in g.adjacency[v] if mask[u]] for v in range(g.vertex_count)]
    out = []
    for v, s in enumerate(states):
        if s > b and any(states[u] == b for u in visible[v]):
            out.append(s)
        else:
            out.append(s + 1 if s + 1 < n else 0)
    return tuple(out)


def step_stochastic(g: Graph, x: Configuration, noise: NoiseModel, mask: Sequence[bool]) -> Configuration:
    """Apply the firefly map with only the masked-present edges (or emitting vertices).

    Edge masks follow ``g.sorted_edges()`` order.
    """
    noise.check(g)
    if len(mask) != len(noise.probabilities):
        raise StochasticError(f"mask has {len(mask)} entries, expected {len(noise.probabilities)}")
    if len(x.states) != g.vertex_count:
        raise StochasticError("configuration does not match graph")
    nxt = _masked_step(g, g.sorted_edges(), x.states, x.n, x.b, noise.mode, [bool(m) for m in mask])
    return Configuration(x.n, nxt)


def derive_seed(base_seed: int, run_index: int) -> int:
    """Per-run seed: a SeedSequence hash of (base_seed, run_index)."""
    ss = np.random.SeedSequence([base_seed, run_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def mc_run(g: Graph, x0: Configuration, noise: NoiseModel, seed: int, cap: int) -> AbsorptionResult:
    """Run until the first constant configuration or ``cap`` steps."""
    if cap < 1:
        raise StochasticError("cap must be >= 1")
    if not is_connected(g):
        raise GraphError("Monte Carlo runs need a connected graph")
    noise.check(g)
    rng = np.random.default_rng(seed)
    probs = np.asarray(noise.probabilities)
    edge_order = g.sorted_edges()
    n, b = x0.n, blinking_state(x0.n)
    cur = x0.states
    for t in range(cap + 1):
        if len(set(cur)) <= 1:
            return AbsorptionResult(True, t, seed, cap)
        if t == cap:
            break
        mask = (rng.random(probs.size) < probs).tolist()
        cur = _masked_step(g, edge_order, cur, n, b, noise.mode, mask)
    return AbsorptionResult(False, None, seed, cap)


@dataclass
class EnsembleReport:
    runs: int
    absorbed: int
    mean_steps: float | None
    std_steps: float | None
    max_steps: int | None
    base_seed: int
    cap: int
    seeds: list[int] = field(repr=False)
    steps: list[int | None] = field(repr=False)

    @property
    def fraction_absorbed(self) -> float:
        return self.absorbed / self.runs

    @property
    def standard_error(self) -> float | None:
        if self.std_steps is None or self.absorbed < 2:
            return None
        return self.std_steps / np.sqrt(self.absorbed)

    def to_json(self) -> dict:
        return {
            "runs": self.runs,
            "absorbed": self.absorbed,
            "mean_steps": None if self.mean_steps is None else round(self.mean_steps, 9),
            "max_steps": self.max_steps,
            "base_seed": self.base_seed,
            "cap": self.cap,
        }


def _run_chunk(args) -> list[int | None]:
    g, starts, noise, base_seed, cap, indices = args
    out = []
    for i in indices:
        x0 = starts[i % len(starts)]
        out.append(mc_run(g, x0, noise, derive_seed(base_seed, i), cap).steps_to_sync)
    return out


def mc_ensemble(g: Graph, x0: Configuration | Sequence[Configuration], noise: NoiseModel,
                runs: int, base_seed: int, cap: int, jobs: int = 1) -> EnsembleReport:
    """Independent seeded runs; run i starts from ``x0[i % len(x0)]`` when given a list.

    Results are identical for any ``jobs``: run i always uses
    ``derive_seed(base_seed, i)`` and aggregation is in run order.
    """
    if runs < 1:
        raise StochasticError("runs must be >= 1")
    starts = [x0] if isinstance(x0, Configuration) else list(x0)
    indices = list(range(runs))
    if jobs > 1:
        chunks = [indices[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, [(g, starts, noise, base_seed, cap, c) for c in chunks]))
        steps: list[int | None] = [None] * runs
        for chunk, part in zip(chunks, parts):
            for i, s in zip(chunk, part):
                steps[i] = s
    else:
        steps = _run_chunk((g, starts, noise, base_seed, cap, indices))
    done = np.array([s for s in steps if s is not None], dtype=np.float64)
    return EnsembleReport(
        runs=runs,
        absorbed=int(done.size),
        mean_steps=float(done.mean()) if done.size else None,
        std_steps=float(done.std(ddof=1)) if done.size > 1 else None,
        max_steps=int(done.max()) if done.size else None,
        base_seed=base_seed,
        cap=cap,
        seeds=[derive_seed(base_seed, i) for i in indices],
        steps=steps,
    )


# --- exact absorbing chain ---------------------------------------------------

@dataclass
class ChainReport:
    n: int
    state_count: int
    absorbing_states: list[str | int]
    reaches_sync_from_all: bool
    expected_absorption: dict[int, float]
    solver_residual: float
    max_row_sum_error: float
    transition: scipy.sparse.csr_matrix = field(repr=False)
    labels: list[str | int] = field(repr=False)

    @property
    def sync_unique_absorbing(self) -> bool:
        return self.absorbing_states == ["sync"]

    def expected_time(self, x: Configuration | Sequence[int]) -> float:
        from .statespace import encode
        states = x.states if isinstance(x, Configuration) else tuple(x)
        if len(set(states)) <= 1:
            return 0.0
        return self.expected_absorption[encode(states, self.n)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "state_count": self.state_count,
            "absorbing_states": self.absorbing_states,
            "reaches_sync_from_all": self.reaches_sync_from_all,
            "solver_residual": float(f"{self.solver_residual:.3e}"),
            "expected_absorption": {str(k): round(v, 9) for k, v in sorted(self.expected_absorption.items())},
        }


def _masks(count: int):
    return itertools.product((False, True), repeat=count)


def transition_successors(g: Graph, n: int, noise: NoiseModel):
    """Yield (probability, successor codes for every configuration) per presence mask."""
    noise.check(g)
    states = all_states(n, g.vertex_count)
    powers = n ** np.arange(g.vertex_count - 1, -1, -1, dtype=np.int64)
    edge_order = g.sorted_edges()
    probs = np.asarray(noise.probabilities)
    b = blinking_state(n)
    for mask in _masks(probs.size):
        m = np.asarray(mask)
        weight = float(np.prod(np.where(m, probs, 1.0 - probs)))
        if noise.mode == EDGE_RECEPTION:
            adj = np.zeros((g.vertex_count, g.vertex_count), dtype=np.int64)
            for (u, v), present in zip(edge_order, mask):
                if present:
                    adj[u, v] = adj[v, u] = 1
            nxt = step_all(states, adj, n)
        else:
            # absent vertices still advance but their blinks go unseen
            blinking = ((states == b) & m[None, :]).astype(np.int64)
            seen = (blinking @ g.adjacency_matrix()) > 0
            held = (states > b) & seen
            nxt = np.where(held, states, (states + 1) % n)
        yield weight, nxt.astype(np.int64) @ powers


def build_and_analyze_chain(g: Graph, n: int, noise: NoiseModel,
                            state_budget: int = CHAIN_STATE_BUDGET,
                            mask_budget: int = CHAIN_MASK_BUDGET) -> ChainReport:
    """Exact lumped chain over non-constant configurations plus ``sync``.

    Expected absorption times solve (I - Q) t = 1 by LU with partial pivoting.
    """
    if not is_connected(g):
        raise GraphError("chain analysis needs a connected graph")
    size = n ** g.vertex_count
    if size > state_budget:
        raise StochasticError(f"{size} configurations exceeds chain budget {state_budget}")
    if 2 ** len(noise.probabilities) > mask_budget:
        raise StochasticError(f"2^{len(noise.probabilities)} masks exceeds budget {mask_budget}")
    states = all_states(n, g.vertex_count)
    constant = np.all(states == states[:, :1], axis=1)
    transient_codes = np.flatnonzero(~constant)
    k = transient_codes.size
    sync = k
    index = np.full(size, sync, dtype=np.int64)
    index[transient_codes] = np.arange(k)

    rows, cols, vals = [], [], []
    for weight, succ in transition_successors(g, n, noise):
        if weight == 0.0:
            continue
        rows.append(np.arange(k))
        cols.append(index[succ[transient_codes]])
        vals.append(np.full(k, weight))
    rows.append(np.array([sync]))
    cols.append(np.array([sync]))
    vals.append(np.array([1.0]))
    P = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(k + 1, k + 1)
    ).tocsr()
    P.sum_duplicates()

    row_err = float(np.abs(np.asarray(P.sum(axis=1)).ravel() - 1.0).max())
    diag = P.diagonal()
    absorbing_idx = [i for i in range(k + 1) if abs(diag[i] - 1.0) <= 1e-12]
    labels: list[str | int] = [int(c) for c in transient_codes] + ["sync"]
    absorbing = [labels[i] for i in absorbing_idx]
    absorbing.sort(key=lambda lab: (lab != "sync", str(lab)))

    reach = _reaches(P, sync)
    reaches_all = bool(reach.all())
    report = ChainReport(
        n=n,
        state_count=k + 1,
        absorbing_states=absorbing,
        reaches_sync_from_all=reaches_all,
        expected_absorption={},
        solver_residual=float("nan"),
        max_row_sum_error=row_err,
        transition=P,
        labels=labels,
    )
    if not reaches_all:
        stuck = [labels[i] for i in np.flatnonzero(~reach)[:5]]
        raise NotAbsorbingError(f"sync unreachable from {int((~reach).sum())} states, e.g. {stuck}", report)
    if k == 0:
        report.solver_residual = 0.0
        return report
    Q = P[:k, :k]
    A = scipy.sparse.identity(k, format="csc") - Q.tocsc()
    ones = np.ones(k)
    if k <= DENSE_SOLVE_LIMIT:
        t = scipy.linalg.solve(A.toarray(), ones)
    else:
        t = scipy.sparse.linalg.splu(A).solve(ones)
    report.solver_residual = float(np.abs(A @ t - ones).max())
    report.expected_absorption = {int(c): float(v) for c, v in zip(transient_codes, t)}
    return report


def _reaches(P: scipy.sparse.csr_matrix, target: int) -> np.ndarray:
    """States with a positive-probability path to ``target``."""
    back = P.T.tocsr()
    seen = np.zeros(P.shape[0], dtype=bool)
    seen[target] = True
    queue = deque([target])
    while queue:
        j = queue.popleft()
        for i in back.indices[back.indptr[j]:back.indptr[j + 1]]:
            if not seen[i]:
                seen[i] = True
                queue.append(i)
    return seen
