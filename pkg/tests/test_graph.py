from __future__ import annotations

import itertools
import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firefly_net.graph import (
    Graph,
    GraphError,
    build_family,
    delete_vertices,
    find_stars_and_branches,
    format_edge_list,
    graph_from_json,
    graph_to_json,
    connected_induced_subsets,
    is_connected,
    load_graph,
    nonisomorphic_trees,
    parse_edge_list,
    random_connected_graph,
    random_tree,
    small_graphs,
    structural_queries,
    to_dot,
    tree_canonical_code,
    trees_up_to,
)


def test_families():
    assert build_family("path", 2).edges == frozenset({(0, 1)})
    star = build_family("star", 4)
    assert star.vertex_count == 5 and star.degree(0) == 4
    k3 = build_family("complete", 3)
    assert len(k3.edges) == 3
    assert len(build_family("cycle", 5).edges) == 5
    t = build_family("tree_from_edges", [(0, 1), (1, 2), (1, 3)])
    assert t.degree(1) == 3


@pytest.mark.parametrize("family,param", [("path", 0), ("cycle", 2), ("star", 0), ("complete", 0)])
def test_bad_family_params(family, param):
    with pytest.raises(GraphError):
        build_family(family, param)


def test_tree_from_edges_rejects_cycles():
    with pytest.raises(GraphError):
        build_family("tree_from_edges", [(0, 1), (1, 2), (2, 0)])


def test_from_edges_validation():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 2)])


def test_structural_queries():
    assert structural_queries(build_family("path", 5)) == {"is_connected": True, "is_tree": True, "max_degree": 2}
    assert structural_queries(build_family("complete", 3)) == {"is_connected": True, "is_tree": False, "max_degree": 2}
    assert structural_queries(build_family("star", 4)) == {"is_connected": True, "is_tree": True, "max_degree": 4}


def _star_tuples(g):
    return sorted((s.center, tuple(sorted(s.leaves)), s.root) for s in find_stars_and_branches(g))


def test_stars_and_branches():
    assert _star_tuples(build_family("path", 3)) == [(1, (0, 2), None)]
    assert _star_tuples(build_family("path", 4)) == [(1, (0,), 2), (2, (3,), 1)]
    assert _star_tuples(build_family("star", 4)) == [(0, (1, 2, 3, 4), None)]
    assert _star_tuples(build_family("path", 2)) == [(0, (1,), None)]
    assert find_stars_and_branches(build_family("complete", 3)) == []


def test_delete_vertices_examples():
    g, remap = delete_vertices(build_family("path", 4), {3})
    assert g == build_family("path", 3) and remap == {0: 0, 1: 1, 2: 2}
    g, _ = delete_vertices(build_family("complete", 3), {0})
    assert g.edges == frozenset({(0, 1)})
    g, _ = delete_vertices(build_family("star", 4), {0})
    assert g.vertex_count == 4 and not g.edges and not is_connected(g)
    with pytest.raises(GraphError):
        delete_vertices(build_family("path", 2), {5})


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**31 - 1), st.data())
def test_delete_vertices_commutes(v, seed, data):
    g = random_connected_graph(np.random.default_rng(seed), v)
    a = data.draw(st.sets(st.integers(0, v - 1), max_size=v))
    b = data.draw(st.sets(st.integers(0, v - 1), max_size=v))
    # deleting a then b (after remapping) equals deleting a | b at once
    g1, r1 = delete_vertices(g, a)
    g2, _ = delete_vertices(g1, {r1[x] for x in b if x in r1})
    g3, _ = delete_vertices(g, a | b)
    assert g2 == g3


def test_connected_induced_subsets_path():
    subsets = connected_induced_subsets(build_family("path", 4))
    assert subsets == [(0, 1), (1, 2), (2, 3), (0, 1, 2), (1, 2, 3)]


def test_tree_counts():
    # unlabeled tree counts 1, 1, 1, 2, 3, 6, 11, 23, 47
    assert [len(nonisomorphic_trees(k)) for k in range(1, 10)] == [1, 1, 1, 2, 3, 6, 11, 23, 47]


def _labeled_trees(m):
    """Every labeled tree on m vertices via Pruefer decoding."""
    for seq in itertools.product(range(m), repeat=m - 2):
        yield Graph.from_networkx(nx.from_prufer_sequence(list(seq)))


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_tree_enumeration_against_pruefer_classes(m):
    # isomorphism classes of all labeled trees, split with networkx's isomorphism test
    reps: list[nx.Graph] = []
    for t in _labeled_trees(m):
        h = t.to_networkx()
        if not any(nx.is_isomorphic(h, r) for r in reps):
            reps.append(h)
    ours = nonisomorphic_trees(m)
    assert len(ours) == len(reps)
    for r in reps:
        assert sum(nx.is_isomorphic(r, t.to_networkx()) for t in ours) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**31 - 1), st.integers(0, 2**31 - 1))
def test_canonical_code_matches_isomorphism(m, s1, s2):
    a = random_tree(np.random.default_rng(s1), m)
    b = random_tree(np.random.default_rng(s2), m)
    same = nx.is_isomorphic(a.to_networkx(), b.to_networkx())
    assert (tree_canonical_code(a) == tree_canonical_code(b)) == same


def test_trees_up_to_ordering_is_stable():
    first = [t.sorted_edges() for t in trees_up_to(6)]
    again = [t.sorted_edges() for t in trees_up_to(6)]
    assert first == again
    assert len(first) == 1 + 1 + 1 + 2 + 3 + 6


def test_small_graphs_counts():
    # connected graphs on 1..5 vertices: 1, 1, 2, 6, 21
    counts = [len(small_graphs(k, min_vertices=k)) for k in range(1, 6)]
    assert counts == [1, 1, 2, 6, 21]
    assert all(is_connected(g) for g in small_graphs(5))


def test_random_graphs_connected():
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = int(rng.integers(1, 9))
        assert is_connected(random_connected_graph(rng, v))
        t = random_tree(rng, v)
        assert len(t.edges) == v - 1 and is_connected(t)


def test_edge_list_round_trip(tmp_path):
    g = build_family("star", 3)
    text = format_edge_list(g)
    assert parse_edge_list(text) == g
    assert parse_edge_list("# comment\n0 1\n1 2\n") == build_family("path", 3)
    assert parse_edge_list("n 4\n0 1\n").vertex_count == 4
    p = tmp_path / "g.txt"
    p.write_text(text)
    assert load_graph(p) == g
    with pytest.raises(GraphError):
        parse_edge_list("0 x\n")


def test_json_round_trip(tmp_path):
    g = build_family("cycle", 5)
    data = graph_to_json(g)
    assert graph_from_json(data) == g
    assert graph_from_json(json.dumps(data)) == g
    p = tmp_path / "g.json"
    p.write_text(json.dumps(data))
    assert load_graph(p) == g


def test_dot_output():
    dot = to_dot(build_family("path", 2), labels=["0:2", "1:5"])
    assert "0 -- 1" in dot and '"0:2"' in dot


def test_networkx_round_trip():
    g = build_family("complete", 4)
    assert Graph.from_networkx(g.to_networkx()) == g
    assert g.without_edge(0, 1).edges == g.edges - {(0, 1)}
