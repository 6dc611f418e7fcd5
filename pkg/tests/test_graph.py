import pytest

from semicover.families import complete, cycle, one_vertex, petersen, prism, two_vertex
from semicover.graph import (
    Graph,
    GraphBuilder,
    GraphError,
    GraphFormatError,
    bipartition,
    connected_components,
    degree,
    disjoint_union,
    is_connected,
    is_regular,
    parse_graph,
    read_graph,
    serialize_graph,
    tensor_k2,
    write_graph,
)

SAMPLE = """
# a vertex with everything
v a
v b
e x a b
e y a b
l z a
s w b
"""


def test_parse_counts_every_edge_family():
    g = parse_graph(SAMPLE)
    assert g.vertices == {"a", "b"}
    assert degree(g, "a").degree == 4
    assert degree(g, "b").degree == 3
    assert g.multiplicity("a", "b") == 2
    assert g.neighbors("a") == ["b", "b"]
    assert not g.is_simple()


def test_roundtrip(tmp_path):
    g = parse_graph(SAMPLE)
    assert parse_graph(serialize_graph(g)) == g
    p = tmp_path / "g.txt"
    write_graph(g, p)
    assert read_graph(p) == g


@pytest.mark.parametrize(
    "text",
    [
        "v a\nv a\n",
        "v a\ne x a a\n",
        "v a\ne x a b\n",
        "v a\nq x a\n",
        "v a\ns x a\nl x a\n",
        "v a\ns x\n",
        "v\n",
    ],
)
def test_malformed_text_rejected(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_format_error_reports_line():
    with pytest.raises(GraphFormatError, match="line 3"):
        parse_graph("v a\nv b\ne x a c\n")


def test_constructor_validates_incidence():
    with pytest.raises(GraphError):
        Graph.build(["a"], edges=[("e", "a", "a")])
    with pytest.raises(GraphError):
        Graph.build(["a"], semi_edges=[("s", "b")])
    with pytest.raises(GraphError):
        Graph.build(["a", "b"], edges=[("e", "a", "b")], loops=[("e", "a")])


def test_regularity_and_families():
    assert is_regular(petersen()) == 3
    assert is_regular(complete(5)) == 4
    assert is_regular(one_vertex(2, 3)) == 8
    assert is_regular(two_vertex(1, 0, 2, 0, 1)) == 3
    assert is_regular(two_vertex(1, 0, 2, 1, 1)) is None
    assert is_regular(prism(4)) == 3


def test_bipartition():
    assert bipartition(cycle(6)) is not None
    assert bipartition(cycle(5)) is None
    g = Graph.build(["a", "b"], edges=[("e", "a", "b")], loops=[("l", "a")])
    assert bipartition(g) is None
    # semi-edges do not spoil bipartiteness
    assert bipartition(Graph.build(["a"], semi_edges=[("s", "a")])) is not None


def test_components_and_union():
    c4 = cycle(4)
    g = disjoint_union(cycle(3), c4.relabel({v: f"q{v}" for v in c4.vertices}, {e: f"q{e}" for e in c4.edges}))
    comps = connected_components(g)
    assert sorted(len(c) for c in comps) == [3, 4]
    assert not is_connected(g)
    assert is_connected(cycle(5))
    with pytest.raises(GraphError):
        disjoint_union(cycle(3), cycle(3))


def test_tensor_k2_is_bipartite_double_cover():
    h = Graph.build(["a", "b"], edges=[("e", "a", "b")], loops=[("l", "a")], semi_edges=[("s", "b")])
    t = tensor_k2(h)
    assert len(t) == 4
    assert bipartition(t) is not None
    # every element doubles except a semi-edge, which becomes one ordinary edge
    assert len(t.ordinary_edges) == 2 + 2 + 1
    assert not t.semi_edges and not t.loops
    for v in h.vertices:
        for side in (0, 1):
            assert degree(t, f"{v}^{side}").degree == degree(h, v).degree


def test_subgraph_and_builder():
    b = GraphBuilder()
    b.add_vertices("abc")
    b.add_edge("a", "b")
    b.add_edge("b", "c")
    b.add_semi_edge("c")
    g = b.build()
    assert sorted(g.edges) == ["e0", "e1", "e2"]
    sub = g.subgraph(["b", "c"])
    assert sorted(sub.edges) == ["e1", "e2"]
    with pytest.raises(GraphError):
        g.subgraph(["a"], ["e1"])
    with pytest.raises(GraphError):
        g.subgraph(["z"])
