"""Named graphs used as inputs and targets.

Vertex ids are decimal strings unless stated otherwise.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Tuple

from .graph import Graph, GraphBuilder, GraphError

# vertex ids of the two-vertex target
BLUE = "blue"
RED = "red"
ONE = "o"


def empty_graph() -> Graph:
    return Graph.build()


def from_edge_list(n: int, pairs: Iterable[Tuple[int, int]]) -> Graph:
    b = GraphBuilder()
    b.add_vertices(str(i) for i in range(n))
    for u, v in pairs:
        b.add_edge(str(u), str(v))
    return b.build()


def cycle(n: int) -> Graph:
    """C_n; C_1 is a loop and C_2 a pair of parallel edges."""
    if n < 1:
        raise GraphError("cycle needs at least one vertex")
    if n == 1:
        return Graph.build(["0"], loops=[("e0", "0")])
    return from_edge_list(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    return from_edge_list(n, ((i, i + 1) for i in range(n - 1)))


def complete(n: int) -> Graph:
    return from_edge_list(n, combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return from_edge_list(a + b, ((i, a + j) for i in range(a) for j in range(b)))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return from_edge_list(10, outer + spokes + inner)


def hypercube(d: int) -> Graph:
    n = 1 << d
    return from_edge_list(n, ((u, u ^ (1 << i)) for u in range(n) for i in range(d) if u < u ^ (1 << i)))


def prism(n: int) -> Graph:
    """C_n x K_2."""
    pairs = [(i, (i + 1) % n) for i in range(n)]
    pairs += [(n + i, n + (i + 1) % n) for i in range(n)]
    pairs += [(i, n + i) for i in range(n)]
    return from_edge_list(2 * n, pairs)


def one_vertex(b: int, c: int) -> Graph:
    """F(b, c): one vertex carrying b semi-edges and c loops."""
    if b < 0 or c < 0:
        raise GraphError("F(b,c) needs non-negative parameters")
    return Graph.build(
        [ONE],
        loops=[(f"l{i}", ONE) for i in range(1, c + 1)],
        semi_edges=[(f"s{i}", ONE) for i in range(1, b + 1)],
    )


def two_vertex(k: int, m: int, l: int, p: int, q: int) -> Graph:
    """W(k, m, l, p, q).

    The ``blue`` vertex carries k semi-edges and m loops, the ``red`` vertex p
    loops and q semi-edges, and l parallel bars join them.
    """
    if min(k, m, l, p, q) < 0:
        raise GraphError("W parameters must be non-negative")
    if l < 1:
        raise GraphError("W(k,m,l,p,q) needs at least one bar (l >= 1)")
    return Graph.build(
        [BLUE, RED],
        edges=[(f"bar{i}", BLUE, RED) for i in range(1, l + 1)],
        loops=[(f"lb{i}", BLUE) for i in range(1, m + 1)] + [(f"lr{i}", RED) for i in range(1, p + 1)],
        semi_edges=[(f"sb{i}", BLUE) for i in range(1, k + 1)] + [(f"sr{i}", RED) for i in range(1, q + 1)],
    )


def with_semi_edge_everywhere(g: Graph, prefix: str = "h") -> Graph:
    """Attach one semi-edge to every vertex (e.g. K3 -> a semi-simple cubic graph)."""
    return Graph.build(
        g.vertices,
        ((e, *g.incidence[e]) for e in g.ordinary_edges),
        ((e, g.incidence[e]) for e in g.loops),
        [(e, g.incidence[e]) for e in g.semi_edges] + [(f"{prefix}{v}", v) for v in g.sorted_vertices()],
    )
