"""Finite simple graphs on dense integer vertices, family generators and surgery."""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np


class GraphError(ValueError):
    """Invalid graph construction or query."""


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> Graph:
        if vertex_count < 0:
            raise GraphError(f"negative vertex count {vertex_count}")
        normalized = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError(f"edge ({u},{v}) out of range for {vertex_count} vertices")
            normalized.add((min(u, v), max(u, v)))
        nbrs: list[list[int]] = [[] for _ in range(vertex_count)]
        for u, v in normalized:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adjacency = tuple(tuple(sorted(ns)) for ns in nbrs)
        return cls(vertex_count, frozenset(normalized), adjacency)

    def __len__(self) -> int:
        return self.vertex_count

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> Graph:
        order = sorted(g.nodes())
        index = {v: i for i, v in enumerate(order)}
        return cls.from_edges(len(order), [(index[u], index[v]) for u, v in g.edges()])

    def without_edge(self, u: int, v: int) -> Graph:
        e = (min(u, v), max(u, v))
        if e not in self.edges:
            raise GraphError(f"no edge {e}")
        return Graph.from_edges(self.vertex_count, self.edges - {e})

    def spanning_subgraph(self, keep: Iterable[tuple[int, int]]) -> Graph:
        keep = {(min(u, v), max(u, v)) for u, v in keep}
        if not keep <= self.edges:
            raise GraphError("spanning subgraph uses edges not in the graph")
        return Graph.from_edges(self.vertex_count, keep)


@dataclass(frozen=True)
class Star:
    """A center with its degree-1 neighbours; ``root`` is set for branches."""

    center: int
    leaves: frozenset[int]
    root: int | None = None

    @property
    def k(self) -> int:
        return len(self.leaves)

    @property
    def is_branch(self) -> bool:
        return self.root is not None

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.center, *sorted(self.leaves))


def build_family(family: str, params) -> Graph:
    """Build a named graph family.

    ``params`` is an int (or 1-element list) for path/cycle/star/complete and an
    edge list for ``tree_from_edges``. ``star(k)`` is K_{1,k} with center 0.
    """
    if family == "tree_from_edges":
        return tree_from_edges(params)
    if isinstance(params, (list, tuple)):
        if len(params) != 1:
            raise GraphError(f"{family} takes a single size parameter")
        params = params[0]
    size = int(params)
    if family == "path":
        if size < 1:
            raise GraphError("path needs at least 1 vertex")
        return Graph.from_edges(size, [(i, i + 1) for i in range(size - 1)])
    if family == "cycle":
        if size < 3:
            raise GraphError("cycle needs at least 3 vertices")
        return Graph.from_edges(size, [(i, (i + 1) % size) for i in range(size)])
    if family == "star":
        if size < 1:
            raise GraphError("star needs at least 1 leaf")
        return Graph.from_edges(size + 1, [(0, i) for i in range(1, size + 1)])
    if family == "complete":
        if size < 1:
            raise GraphError("complete graph needs at least 1 vertex")
        return Graph.from_edges(size, itertools.combinations(range(size), 2))
    raise GraphError(f"unknown family {family!r}")


def tree_from_edges(edges: Iterable[Sequence[int]]) -> Graph:
    edges = [(int(u), int(v)) for u, v in edges]
    m = 1 + max((max(u, v) for u, v in edges), default=0)
    g = Graph.from_edges(m, edges)
    if len(g.edges) != len(edges):
        raise GraphError("duplicate edges in tree edge list")
    if not is_connected(g) or len(g.edges) != m - 1:
        raise GraphError("edge list is not a tree (cycle or disconnected)")
    return g


def is_connected(g: Graph) -> bool:
    if g.vertex_count == 0:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == g.vertex_count


def structural_queries(g: Graph) -> dict:
    connected = is_connected(g)
    return {
        "is_connected": connected,
        "is_tree": connected and len(g.edges) == g.vertex_count - 1,
        "max_degree": max((g.degree(v) for v in range(g.vertex_count)), default=0),
    }


def is_tree(g: Graph) -> bool:
    return structural_queries(g)["is_tree"]


def max_degree(g: Graph) -> int:
    return max((g.degree(v) for v in range(g.vertex_count)), default=0)


def find_stars_and_branches(g: Graph) -> list[Star]:
    """Every maximal k-star (k >= 1), with the root filled in for branches.

    A vertex whose only neighbour is itself a leaf (the K2 component) is
    reported once, centred at the smaller index.
    """
    stars = []
    for v in range(g.vertex_count):
        leaves = [u for u in g.adjacency[v] if g.degree(u) == 1]
        if not leaves:
            continue
        if g.degree(v) == 1 and v > leaves[0]:
            continue
        others = [u for u in g.adjacency[v] if g.degree(u) != 1]
        root = others[0] if len(others) == 1 else None
        stars.append(Star(v, frozenset(leaves), root))
    return stars


def delete_vertices(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Induced subgraph on V minus ``s`` and the old->new index map."""
    s = set(s)
    for v in s:
        if not 0 <= v < g.vertex_count:
            raise GraphError(f"vertex {v} out of range")
    keep = [v for v in range(g.vertex_count) if v not in s]
    return induced_subgraph(g, keep)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    keep = sorted(set(vertices))
    for v in keep:
        if not 0 <= v < g.vertex_count:
            raise GraphError(f"vertex {v} out of range")
    remap = {old: new for new, old in enumerate(keep)}
    edges = [(remap[u], remap[v]) for u, v in g.edges if u in remap and v in remap]
    return Graph.from_edges(len(keep), edges), remap


def connected_induced_subsets(g: Graph, min_size: int = 2, proper: bool = True) -> list[tuple[int, ...]]:
    """All vertex subsets inducing a connected subgraph, ordered by size then lexicographically."""
    out = []
    top = g.vertex_count - 1 if proper else g.vertex_count
    for size in range(min_size, top + 1):
        for combo in itertools.combinations(range(g.vertex_count), size):
            sub, _ = induced_subgraph(g, combo)
            if is_connected(sub):
                out.append(combo)
    return out


# --- enumeration -------------------------------------------------------------

def nonisomorphic_trees(order: int) -> list[Graph]:
    """All trees on ``order`` vertices up to isomorphism, in a fixed order."""
    if order < 1:
        return []
    if order == 1:
        return [Graph.from_edges(1, [])]
    if order == 2:
        return [Graph.from_edges(2, [(0, 1)])]
    trees = [Graph.from_networkx(t) for t in nx.nonisomorphic_trees(order)]
    return sorted(trees, key=tree_canonical_code)


def trees_up_to(max_vertices: int, min_vertices: int = 1) -> list[Graph]:
    return [t for m in range(min_vertices, max_vertices + 1) for t in nonisomorphic_trees(m)]


def tree_canonical_code(g: Graph) -> str:
    """AHU-style canonical string of a tree, rooted at its center(s).

    Two trees are isomorphic iff their codes are equal.
    """
    if g.vertex_count == 0:
        return ""
    centers = _tree_centers(g)

    def encode(v: int, parent: int) -> str:
        kids = sorted(encode(u, v) for u in g.adjacency[v] if u != parent)
        return "(" + "".join(kids) + ")"

    return min(encode(c, -1) for c in centers)


def _tree_centers(g: Graph) -> list[int]:
    degree = [g.degree(v) for v in range(g.vertex_count)]
    remaining = g.vertex_count
    layer = [v for v in range(g.vertex_count) if degree[v] <= 1]
    removed = set()
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            removed.add(v)
            for u in g.adjacency[v]:
                if u not in removed:
                    degree[u] -= 1
                    if degree[u] == 1:
                        nxt.append(u)
        layer = nxt
    return [v for v in range(g.vertex_count) if v not in removed]


def small_graphs(max_vertices: int, connected_only: bool = True, min_vertices: int = 1) -> list[Graph]:
    """All graphs with ``min_vertices..max_vertices`` vertices up to isomorphism (max 7)."""
    if max_vertices > 7:
        raise GraphError("graph atlas covers at most 7 vertices")
    out = []
    for h in nx.graph_atlas_g():
        m = h.number_of_nodes()
        if m < min_vertices or m > max_vertices:
            continue
        if connected_only and not nx.is_connected(h):
            continue
        out.append(Graph.from_networkx(h))
    return out


def random_connected_graph(rng: np.random.Generator, vertex_count: int, extra_edge_prob: float = 0.3) -> Graph:
    """Random spanning tree (uniform attachment) plus independent extra edges."""
    edges = set()
    for v in range(1, vertex_count):
        u = int(rng.integers(v))
        edges.add((u, v))
    for u, v in itertools.combinations(range(vertex_count), 2):
        if (u, v) not in edges and rng.random() < extra_edge_prob:
            edges.add((u, v))
    return Graph.from_edges(vertex_count, edges)


def random_tree(rng: np.random.Generator, vertex_count: int) -> Graph:
    return random_connected_graph(rng, vertex_count, extra_edge_prob=0.0)


# --- I/O ---------------------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse "u v" lines; '#' comments and blank lines are ignored.

    A header line ``n <count>`` fixes the vertex count, otherwise it is one more
    than the largest index seen.
    """
    count = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2:
            count = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer vertex in {raw!r}") from None
    if count is None:
        count = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(count, edges)


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.vertex_count}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> dict:
    return {"vertices": g.vertex_count, "edges": [list(e) for e in g.sorted_edges()]}


def graph_from_json(data: dict | str) -> Graph:
    if isinstance(data, str):
        data = json.loads(data)
    return Graph.from_edges(int(data["vertices"]), data["edges"])


def to_dot(g: Graph, labels: Sequence[object] | None = None, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.vertex_count):
        label = v if labels is None else labels[v]
        lines.append(f'  {v} [label="{label}"];')
    for u, v in g.sorted_edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path) -> Graph:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return graph_from_json(text)
    return parse_edge_list(text)
