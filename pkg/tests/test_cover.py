import random

import pytest

from helpers import naive_cover, random_lift
from semicover.cover import (
    CoverMap,
    CoverMapError,
    fold_number,
    is_degree_obedient,
    obedience_violations,
    parse_cover_map,
    serialize_cover_map,
    verify_cover,
)
from semicover.families import ONE, cycle, one_vertex, two_vertex
from semicover.graph import Graph, GraphFormatError


def _k2_on_semi():
    # K2 covers a single vertex with one semi-edge
    g = Graph.build(["a", "b"], edges=[("e", "a", "b")])
    h = one_vertex(1, 0)
    return g, h, CoverMap({"a": ONE, "b": ONE}, {"e": "s1"})


def test_edge_onto_semi_edge():
    g, h, f = _k2_on_semi()
    assert verify_cover(g, h, f).ok
    assert fold_number(g, h, f) == 2


def test_semi_edge_onto_semi_edge():
    g = Graph.build(["a"], semi_edges=[("s", "a")])
    assert verify_cover(g, one_vertex(1, 0), CoverMap({"a": ONE}, {"s": "s1"})).ok


def test_cycle_onto_loop():
    g = cycle(5)
    h = one_vertex(0, 1)
    f = CoverMap({v: ONE for v in g.vertices}, {e: "l1" for e in g.edges})
    assert verify_cover(g, h, f).ok


def test_loop_onto_loop_counts_twice():
    g = Graph.build(["a"], loops=[("x", "a")])
    assert verify_cover(g, one_vertex(0, 1), CoverMap({"a": ONE}, {"x": "l1"})).ok
    # a loop can never go to a semi-edge
    r = verify_cover(g, one_vertex(2, 0), CoverMap({"a": ONE}, {"x": "s1"}))
    assert [c for c, _, _ in r.violations][0] == 1


def test_each_condition_can_fail():
    g, h, _ = _k2_on_semi()
    # semi-edge needs semi-edge image
    gs = Graph.build(["a"], semi_edges=[("s", "a")])
    r = verify_cover(gs, one_vertex(0, 1), CoverMap({"a": ONE}, {"s": "l1"}))
    assert 2 in {c for c, _, _ in r.violations}
    # ordinary edge between different fibres mapped to a semi-edge
    w = two_vertex(1, 0, 1, 0, 1)
    gg = Graph.build(["a", "b"], edges=[("e", "a", "b")], semi_edges=[("s", "a"), ("t", "b")])
    r = verify_cover(gg, w, CoverMap({"a": "blue", "b": "red"}, {"e": "sb1", "s": "sb1", "t": "sr1"}))
    assert 4 in {c for c, _, _ in r.violations}
    # ordinary edge inside one fibre sent to a bar
    r = verify_cover(gg, w, CoverMap({"a": "blue", "b": "blue"}, {"e": "bar1", "s": "sb1", "t": "sb1"}))
    assert 5 in {c for c, _, _ in r.violations}
    # semi-edge at the wrong vertex
    r = verify_cover(gg, w, CoverMap({"a": "blue", "b": "red"}, {"e": "bar1", "s": "sr1", "t": "sr1"}))
    assert 3 in {c for c, _, _ in r.violations}
    # cycle with one edge on the loop twice at a vertex: not locally bijective
    r = verify_cover(cycle(3), one_vertex(2, 0), CoverMap({v: ONE for v in "012"}, {e: "s1" for e in cycle(3).edges}))
    assert 7 in {c for c, _, _ in r.violations}
    r = verify_cover(cycle(3), one_vertex(0, 2), CoverMap({v: ONE for v in "012"}, {"e0": "l1", "e1": "l1", "e2": "l2"}))
    assert 6 in {c for c, _, _ in r.violations}
    g2 = Graph.build(["a", "b", "c"], edges=[("e", "a", "b"), ("f", "a", "c")], semi_edges=[("s", "b"), ("t", "c")])
    r = verify_cover(g2, two_vertex(0, 0, 1, 0, 1), CoverMap({"a": "blue", "b": "red", "c": "red"}, {"e": "bar1", "f": "bar1", "s": "sr1", "t": "sr1"}))
    assert 8 in {c for c, _, _ in r.violations}


def test_partial_map_rejected():
    g, h, f = _k2_on_semi()
    with pytest.raises(CoverMapError):
        verify_cover(g, h, CoverMap({"a": ONE}, f.edge_map))
    with pytest.raises(CoverMapError):
        verify_cover(g, h, CoverMap(f.vertex_map, {"e": "nope"}))


def test_obedience():
    g = cycle(4)
    h = two_vertex(1, 0, 1, 0, 1)
    good = {"0": "blue", "1": "blue", "2": "red", "3": "red"}
    assert is_degree_obedient(g, h, good)
    bad = {"0": "blue", "1": "red", "2": "blue", "3": "red"}
    assert {c for c, _ in obedience_violations(g, h, bad)} == {1, 2}
    with pytest.raises(CoverMapError):
        is_degree_obedient(g, h, {"0": "blue"})


def test_obedience_is_necessary_on_random_lifts():
    rng = random.Random(5)
    h = two_vertex(1, 1, 2, 0, 1)
    for _ in range(10):
        g = random_lift(h, 3, rng)
        f = naive_cover(g, h, limit=10**6)
        assert f is not None
        assert is_degree_obedient(g, h, f.vertex_map)


def test_cover_map_text_roundtrip():
    _, _, f = _k2_on_semi()
    assert parse_cover_map(serialize_cover_map(f)) == f
    with pytest.raises(GraphFormatError):
        parse_cover_map("m x a b\n")
    with pytest.raises(GraphFormatError):
        parse_cover_map("m v a o\nm v a o\n")
