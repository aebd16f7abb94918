from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firefly_net.dynamics import (
    Configuration,
    DynamicsError,
    RelativeConfiguration,
    TruncatedOrbitError,
    all_blink_infinitely,
    blinking_state,
    blinks_infinitely,
    compute_orbit,
    displacement,
    from_relative,
    is_clockwise,
    is_opposite,
    relative_reading_discrepancy,
    restricts_on,
    step,
    step_relative,
    to_relative,
    width,
    width_of_states,
)
from firefly_net.graph import Graph, build_family, random_connected_graph
from firefly_net.statespace import StateSpace


def cfg(n, *states):
    return Configuration(n, states)


@st.composite
def instances(draw, max_vertices=7, max_n=9):
    v = draw(st.integers(1, max_vertices))
    n = draw(st.integers(3, max_n))
    g = random_connected_graph(np.random.default_rng(draw(st.integers(0, 2**31 - 1))), v)
    states = draw(st.lists(st.integers(0, n - 1), min_size=v, max_size=v))
    return g, Configuration(n, tuple(states))


def test_blinking_state():
    assert [blinking_state(n) for n in range(3, 9)] == [1, 1, 2, 2, 3, 3]
    with pytest.raises(DynamicsError):
        blinking_state(2)


def test_configuration_validation():
    with pytest.raises(DynamicsError):
        Configuration(6, (2, 6))
    with pytest.raises(DynamicsError):
        Configuration(2, (0, 1))
    assert Configuration.parse("2, 5", 6).states == (2, 5)
    with pytest.raises(DynamicsError):
        Configuration.parse("2,a", 6)


def test_step_examples():
    p2 = build_family("path", 2)
    nxt, pulls = step(p2, cfg(6, 2, 5))
    assert nxt.states == (3, 5)
    assert pulls == [(0, 0, 1)]
    for s in range(6):
        assert step(build_family("complete", 4), cfg(6, s, s, s, s))[0].states == ((s + 1) % 6,) * 4
    assert step(Graph.from_edges(1, []), cfg(4, 3))[0].states == (0,)
    with pytest.raises(DynamicsError):
        step(p2, cfg(6, 1, 2, 3))


def test_relative_examples():
    p2 = build_family("path", 2)
    y = RelativeConfiguration(6, 2, (2, 5))
    nxt = step_relative(p2, y)
    assert nxt.states == (2, 4) and nxt.activator_state == 1
    assert nxt == to_relative(step(p2, from_relative(y, 0))[0], 1)
    for s in range(6):
        z = step_relative(build_family("complete", 3), RelativeConfiguration(6, s, (s, s, s)))
        assert z.states == (s, s, s) and z.activator_state == (s - 1) % 6
    lone = step_relative(Graph.from_edges(1, []), RelativeConfiguration(5, 0, (3,)))
    assert lone.states == (3,) and lone.activator_state == 4


def test_to_relative_examples():
    x = cfg(6, 2, 5)
    assert to_relative(x, 0) == RelativeConfiguration(6, 2, (2, 5))
    assert to_relative(x, 7).states[1] == 4
    assert from_relative(to_relative(x, 7), 7) == x


def test_literal_reading_diagnostic():
    # zero displacement: the literal reading would drag a co-blinking neighbour back
    p2 = build_family("path", 2)
    assert relative_reading_discrepancy(p2, RelativeConfiguration(6, 2, (2, 2))) == [0, 1]
    assert relative_reading_discrepancy(p2, RelativeConfiguration(6, 2, (2, 5))) == []


def test_displacement_examples():
    x = cfg(6, 2, 5)
    assert displacement(x, 0, 1) == 3 and is_opposite(x, 0, 1) and not is_clockwise(x, 0, 1)
    y = cfg(5, 4, 1)
    assert displacement(y, 0, 1) == 2 and is_clockwise(y, 0, 1)


def _width_oracle(states, n):
    # shortest covering arc: best starting point among occupied states
    return min(max((s - s0) % n for s in states) for s0 in set(states))


def test_width_examples():
    assert width(cfg(6, 0, 1, 3)) == 3
    assert width(cfg(6, 4, 4, 4)) == 0
    assert width(cfg(6, 2, 5)) == 3
    assert width(cfg(6, 0, 1, 3, 5), subset=[0, 1]) == 1


@settings(max_examples=300, deadline=None)
@given(st.integers(3, 12).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=1, max_size=9))))
def test_width_matches_oracle(case):
    n, states = case
    assert width_of_states(states, n) == _width_oracle(states, n)


def test_orbit_examples():
    o = compute_orbit(build_family("path", 2), cfg(6, 2, 5))
    assert o.sync_time == 13 and o.synchronizes
    assert o.at(13) == (3, 3)
    k3 = compute_orbit(build_family("complete", 3), cfg(5, 0, 2, 4))
    assert (k3.transient_length, k3.cycle_length, k3.sync_time) == (0, 6, None)
    assert k3.trajectory == [(0, 2, 4), (1, 3, 4), (2, 4, 0), (3, 4, 1), (4, 0, 2), (4, 1, 3)]
    assert all_blink_infinitely(k3)
    const = compute_orbit(build_family("star", 3), cfg(7, 5, 5, 5, 5))
    assert (const.sync_time, const.cycle_length) == (0, 7)


def test_orbit_periodic_extension():
    o = compute_orbit(build_family("complete", 3), cfg(5, 0, 2, 4))
    assert o.at(6) == o.at(0) and o.at(100) == o.at(100 % 6)
    assert o.blink_times[0] == [2]


def test_truncated_orbit():
    o = compute_orbit(build_family("path", 2), cfg(6, 2, 5), cap=5)
    assert o.truncated and o.sync_time is None and o.transient_length is None
    assert o.at(3) == o.trajectory[3]
    with pytest.raises(TruncatedOrbitError):
        o.at(50)
    with pytest.raises(TruncatedOrbitError):
        o.synchronizes


def test_high_degree_center_never_blinks():
    g = build_family("star", 6)
    o = compute_orbit(g, cfg(6, 4, 0, 1, 2, 3, 4, 5))
    assert o.sync_time is None
    assert not blinks_infinitely(o, 0)
    assert all(blinks_infinitely(o, v) for v in range(1, 7))


def test_restricts_on_examples():
    g = build_family("path", 4)
    x0 = cfg(6, 2, 5, 1, 0)
    assert restricts_on(g, x0, range(4), "from_start").holds
    o = compute_orbit(g, x0)
    for h in ([0, 1], [1, 2, 3], [2]):
        res = restricts_on(g, o, h, "eventually")
        assert res.holds and res.r <= o.sync_time
    with pytest.raises(DynamicsError):
        restricts_on(g, o, [0, 1], "sometimes")


def test_restriction_fails_on_k3_cycle():
    o = compute_orbit(build_family("complete", 3), cfg(5, 0, 2, 4))
    assert not restricts_on(build_family("complete", 3), o, [0, 1]).holds


# --- property suite ----------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(instances(), st.data())
def test_local_dependence(inst, data):
    g, x = inst
    v = data.draw(st.integers(0, len(x) - 1))
    far = [u for u in range(len(x)) if u != v and u not in g.adjacency[v]]
    if not far:
        return
    u = data.draw(st.sampled_from(far))
    s = list(x.states)
    s[u] = data.draw(st.integers(0, x.n - 1))
    assert step(g, x)[0][v] == step(g, Configuration(x.n, tuple(s)))[0][v]


@settings(max_examples=200, deadline=None)
@given(instances())
def test_pulse_coupling_and_window(inst):
    g, x = inst
    nxt, pulls = step(g, x)
    pulled = {v for _, _, v in pulls}
    for v in range(len(x)):
        if v in pulled:
            assert nxt[v] == x[v] > x.b
        else:
            assert nxt[v] == (x[v] + 1) % x.n
    for _, u, v in pulls:
        assert x[u] == x.b
        assert 1 <= displacement(x, u, v) <= x.n // 2


@settings(max_examples=200, deadline=None)
@given(instances())
def test_relative_equivalence(inst):
    g, x = inst
    y = to_relative(x, 0)
    cur = x
    for t in range(1, 3 * x.n):
        cur = step(g, cur)[0]
        y = step_relative(g, y)
        assert y == to_relative(cur, t)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(3, 9), st.integers(0, 8), st.integers(0, 2**31 - 1))
def test_synchrony_absorbing(v, n, s, seed):
    g = random_connected_graph(np.random.default_rng(seed), v)
    x = Configuration(n, (s % n,) * v)
    for _ in range(n + 1):
        x = step(g, x)[0]
        assert x.is_constant


@pytest.mark.parametrize("family,param,n", [("path", 4, 4), ("star", 3, 5), ("complete", 3, 4), ("cycle", 4, 3)])
def test_orbit_agrees_with_state_space(family, param, n):
    g = build_family(family, param)
    space = StateSpace(g, n)
    for code in range(0, space.size, max(1, space.size // 97)):
        x = Configuration(n, space.config(code))
        o = compute_orbit(g, x)
        expect = int(space.sync_time[code])
        assert o.sync_time == (None if expect < 0 else expect)
        for v in range(g.vertex_count):
            assert blinks_infinitely(o, v) == bool(space.blinks_in_cycle(v)[code])
