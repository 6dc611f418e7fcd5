"""Multigraphs with semi-edges: data model, structural predicates and text I/O.

A graph has three disjoint edge families. Ordinary edges join two distinct
vertices, loops and semi-edges hang on a single vertex. A loop adds two to the
degree of its vertex, a semi-edge adds one.

Text format (one declaration per line, ``#`` starts a comment)::

    v <vertex-id>
    e <edge-id> <u> <v>
    l <edge-id> <u>
    s <edge-id> <u>
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

SEMI = "semi"
ORDINARY = "ordinary"
LOOP = "loop"

Endpoints = Union[str, Tuple[str, str]]


class GraphError(ValueError):
    """Structurally invalid graph or unknown element."""


class GraphFormatError(GraphError):
    """Malformed graph text."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class DegreeProfile:
    semi: int
    ordinary: int
    loops: int

    @property
    def degree(self) -> int:
        return self.semi + self.ordinary + 2 * self.loops


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable multigraph with semi-edges.

    ``incidence`` maps ordinary edges to a sorted pair of distinct vertices and
    loops / semi-edges to their single vertex.
    """

    vertices: FrozenSet[str]
    semi_edges: FrozenSet[str]
    ordinary_edges: FrozenSet[str]
    loops: FrozenSet[str]
    incidence: Mapping[str, Endpoints] = field(repr=False)

    def __post_init__(self):
        sets = (self.semi_edges, self.ordinary_edges, self.loops)
        total = sum(len(s) for s in sets)
        union = self.semi_edges | self.ordinary_edges | self.loops
        if len(union) != total:
            raise GraphError("edge id used in more than one edge family")
        if union != set(self.incidence):
            raise GraphError("incidence domain differs from the edge set")
        for e in self.ordinary_edges:
            ends = self.incidence[e]
            if not isinstance(ends, tuple) or len(ends) != 2 or ends[0] == ends[1]:
                raise GraphError(f"ordinary edge {e!r} needs two distinct endpoints")
            if ends[0] not in self.vertices or ends[1] not in self.vertices:
                raise GraphError(f"edge {e!r} references a missing vertex")
        for e in self.semi_edges | self.loops:
            u = self.incidence[e]
            if not isinstance(u, str):
                raise GraphError(f"edge {e!r} needs exactly one endpoint")
            if u not in self.vertices:
                raise GraphError(f"edge {e!r} references a missing vertex")

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        vertices: Iterable[str] = (),
        edges: Iterable[Tuple[str, str, str]] = (),
        loops: Iterable[Tuple[str, str]] = (),
        semi_edges: Iterable[Tuple[str, str]] = (),
    ) -> "Graph":
        """Build from ``(id, u, v)`` edges and ``(id, u)`` loops / semi-edges."""
        vs = set(vertices)
        inc: Dict[str, Endpoints] = {}
        ords, lps, semis = set(), set(), set()

        def claim(eid):
            if eid in inc:
                raise GraphError(f"duplicate edge id {eid!r}")

        for eid, u, v in edges:
            claim(eid)
            inc[eid] = (u, v) if u <= v else (v, u)
            ords.add(eid)
        for eid, u in loops:
            claim(eid)
            inc[eid] = u
            lps.add(eid)
        for eid, u in semi_edges:
            claim(eid)
            inc[eid] = u
            semis.add(eid)
        return cls(frozenset(vs), frozenset(semis), frozenset(ords), frozenset(lps), dict(inc))

    # -- basic queries -----------------------------------------------------

    @property
    def edges(self) -> FrozenSet[str]:
        return self.semi_edges | self.ordinary_edges | self.loops

    def kind(self, e: str) -> str:
        if e in self.ordinary_edges:
            return ORDINARY
        if e in self.loops:
            return LOOP
        if e in self.semi_edges:
            return SEMI
        raise GraphError(f"unknown edge {e!r}")

    def ends(self, e: str) -> Tuple[str, ...]:
        """Endpoints of ``e`` as a tuple (length 2 for ordinary edges, else 1)."""
        inc = self.incidence[e]
        return inc if isinstance(inc, tuple) else (inc,)

    def other_end(self, e: str, u: str) -> str:
        a, b = self.incidence[e]
        return b if a == u else a

    @cached_property
    def _incident(self) -> Dict[str, Tuple[List[str], List[str], List[str]]]:
        table: Dict[str, Tuple[List[str], List[str], List[str]]] = {v: ([], [], []) for v in self.vertices}
        for e in sorted(self.semi_edges):
            table[self.incidence[e]][0].append(e)
        for e in sorted(self.ordinary_edges):
            u, v = self.incidence[e]
            table[u][1].append(e)
            table[v][1].append(e)
        for e in sorted(self.loops):
            table[self.incidence[e]][2].append(e)
        return table

    def semi_at(self, u: str) -> List[str]:
        return self._incident[u][0]

    def ordinary_at(self, u: str) -> List[str]:
        return self._incident[u][1]

    def loops_at(self, u: str) -> List[str]:
        return self._incident[u][2]

    def incident(self, u: str) -> List[str]:
        s, o, l = self._incident[u]
        return s + o + l

    def neighbors(self, u: str) -> List[str]:
        """Neighbours via ordinary edges, with multiplicity, sorted."""
        return sorted(self.other_end(e, u) for e in self.ordinary_at(u))

    def multiplicity(self, u: str, v: str) -> int:
        return sum(1 for e in self.ordinary_at(u) if self.other_end(e, u) == v)

    def sorted_vertices(self) -> List[str]:
        return sorted(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.semi_edges == other.semi_edges
            and self.ordinary_edges == other.ordinary_edges
            and self.loops == other.loops
            and dict(self.incidence) == dict(other.incidence)
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.semi_edges, self.ordinary_edges, self.loops))

    def __repr__(self) -> str:
        return (
            f"Graph(|V|={len(self.vertices)}, ordinary={len(self.ordinary_edges)}, "
            f"loops={len(self.loops)}, semi={len(self.semi_edges)})"
        )

    # -- derived graphs ------------------------------------------------------

    def subgraph(self, vertices: Iterable[str], edges: Optional[Iterable[str]] = None) -> "Graph":
        """Sub-multigraph on ``vertices``.

        Without ``edges`` it is the induced one: every edge whose endpoints all
        lie in ``vertices`` is kept, including semi-edges and loops.
        """
        vs = frozenset(vertices)
        if not vs <= self.vertices:
            raise GraphError("subgraph vertices must belong to the graph")
        if edges is None:
            keep = [e for e in self.incidence if all(x in vs for x in self.ends(e))]
        else:
            keep = list(edges)
            for e in keep:
                if e not in self.incidence or not all(x in vs for x in self.ends(e)):
                    raise GraphError(f"edge {e!r} does not lie inside the subgraph")
        inc = {e: self.incidence[e] for e in keep}
        ks = set(keep)
        return Graph(vs, self.semi_edges & ks, self.ordinary_edges & ks, self.loops & ks, inc)

    def is_simple(self) -> bool:
        if self.semi_edges or self.loops:
            return False
        pairs = [self.incidence[e] for e in self.ordinary_edges]
        return len(pairs) == len(set(pairs))

    def is_semi_simple(self) -> bool:
        if self.loops:
            return False
        if any(len(self.semi_at(v)) > 1 for v in self.vertices):
            return False
        pairs = [self.incidence[e] for e in self.ordinary_edges]
        return len(pairs) == len(set(pairs))

    def relabel(self, vmap: Mapping[str, str], emap: Optional[Mapping[str, str]] = None) -> "Graph":
        emap = emap or {}
        ed = lambda e: emap.get(e, e)  # noqa: E731
        return Graph.build(
            (vmap[v] for v in self.vertices),
            ((ed(e), vmap[self.incidence[e][0]], vmap[self.incidence[e][1]]) for e in self.ordinary_edges),
            ((ed(e), vmap[self.incidence[e]]) for e in self.loops),
            ((ed(e), vmap[self.incidence[e]]) for e in self.semi_edges),
        )


class GraphBuilder:
    """Incremental construction with automatic edge ids."""

    def __init__(self, edge_prefix: str = "e"):
        self._vertices: Dict[str, None] = {}
        self._edges: List[Tuple[str, str, str]] = []
        self._loops: List[Tuple[str, str]] = []
        self._semis: List[Tuple[str, str]] = []
        self._prefix = edge_prefix
        self._count = 0

    def _next_id(self, eid):
        if eid is None:
            eid = f"{self._prefix}{self._count}"
            self._count += 1
        return eid

    def add_vertex(self, v: str) -> str:
        self._vertices.setdefault(v, None)
        return v

    def add_vertices(self, vs: Iterable[str]) -> None:
        for v in vs:
            self.add_vertex(v)

    def add_edge(self, u: str, v: str, eid: Optional[str] = None) -> str:
        eid = self._next_id(eid)
        self._edges.append((eid, u, v))
        return eid

    def add_loop(self, u: str, eid: Optional[str] = None) -> str:
        eid = self._next_id(eid)
        self._loops.append((eid, u))
        return eid

    def add_semi_edge(self, u: str, eid: Optional[str] = None) -> str:
        eid = self._next_id(eid)
        self._semis.append((eid, u))
        return eid

    def remove_edge_between(self, u: str, v: str) -> str:
        """Drop one ordinary edge joining ``u`` and ``v``; returns its id."""
        for i, (eid, a, b) in enumerate(self._edges):
            if {a, b} == {u, v}:
                del self._edges[i]
                return eid
        raise GraphError(f"no edge between {u!r} and {v!r}")

    def has_edge(self, u: str, v: str) -> bool:
        return any({a, b} == {u, v} for _, a, b in self._edges)

    def build(self) -> Graph:
        return Graph.build(self._vertices, self._edges, self._loops, self._semis)


# -- operations ---------------------------------------------------------------


def degree(g: Graph, u: str) -> DegreeProfile:
    if u not in g.vertices:
        raise GraphError(f"unknown vertex {u!r}")
    return DegreeProfile(len(g.semi_at(u)), len(g.ordinary_at(u)), len(g.loops_at(u)))


def is_regular(g: Graph) -> Optional[int]:
    """Common degree of all vertices, or None (also for the empty graph)."""
    degrees = {degree(g, v).degree for v in g.vertices}
    if len(degrees) != 1:
        return None
    return degrees.pop()


def bipartition(g: Graph) -> Optional[Tuple[FrozenSet[str], FrozenSet[str]]]:
    """Proper 2-colouring of the ordinary-edge graph, if one exists.

    Semi-edges are ignored, any loop makes the graph non-bipartite. Each
    component is coloured by BFS from its smallest vertex id, which goes to the
    first class.
    """
    if g.loops:
        return None
    side: Dict[str, int] = {}
    for root in g.sorted_vertices():
        if root in side:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in side:
                    side[w] = 1 - side[u]
                    queue.append(w)
                elif side[w] == side[u]:
                    return None
    first = frozenset(v for v, s in side.items() if s == 0)
    return first, frozenset(g.vertices - first)


def connected_components(g: Graph) -> List[Graph]:
    """Maximal connected sub-multigraphs, ordered by smallest vertex id."""
    seen = set()
    out = []
    for root in g.sorted_vertices():
        if root in seen:
            continue
        comp = {root}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(g.subgraph(comp))
    return out


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1


def tensor_k2(h: Graph) -> Graph:
    """The product ``h x K2``: a bipartite double cover without semi-edges or loops.

    Vertex ``v`` gives ``v^0`` and ``v^1``. An ordinary edge ``e = uv`` gives
    ``u^0 v^1`` and ``u^1 v^0`` (ids ``e^0``, ``e^1``); a semi-edge at ``v``
    gives the single edge ``v^0 v^1``; a loop gives two parallel such edges.
    """
    b = GraphBuilder()
    for v in h.sorted_vertices():
        b.add_vertex(f"{v}^0")
        b.add_vertex(f"{v}^1")
    for e in sorted(h.ordinary_edges):
        u, v = h.incidence[e]
        b.add_edge(f"{u}^0", f"{v}^1", f"{e}^0")
        b.add_edge(f"{u}^1", f"{v}^0", f"{e}^1")
    for e in sorted(h.semi_edges):
        v = h.incidence[e]
        b.add_edge(f"{v}^0", f"{v}^1", e)
    for e in sorted(h.loops):
        v = h.incidence[e]
        b.add_edge(f"{v}^0", f"{v}^1", f"{e}^0")
        b.add_edge(f"{v}^0", f"{v}^1", f"{e}^1")
    return b.build()


def disjoint_union(*graphs: Graph) -> Graph:
    """Union of graphs whose vertex and edge ids are already disjoint."""
    vs, edges, lps, semis = [], [], [], []
    for g in graphs:
        vs.extend(g.vertices)
        edges.extend((e, *g.incidence[e]) for e in g.ordinary_edges)
        lps.extend((e, g.incidence[e]) for e in g.loops)
        semis.extend((e, g.incidence[e]) for e in g.semi_edges)
    if len(vs) != len(set(vs)):
        raise GraphError("vertex ids collide in disjoint union")
    return Graph.build(vs, edges, lps, semis)


# -- text format ---------------------------------------------------------------


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_graph(text: str) -> Graph:
    vertices: Dict[str, int] = {}
    seen_edges: Dict[str, int] = {}
    edges, loops, semis = [], [], []
    pending = []
    for lineno, tok in _tokens(text):
        tag = tok[0]
        if tag == "v":
            if len(tok) != 2:
                raise GraphFormatError("expected 'v <vertex-id>'", lineno)
            if tok[1] in vertices:
                raise GraphFormatError(f"duplicate vertex id {tok[1]!r}", lineno)
            vertices[tok[1]] = lineno
            continue
        if tag not in ("e", "l", "s"):
            raise GraphFormatError(f"unknown declaration {tag!r}", lineno)
        want = 4 if tag == "e" else 3
        if len(tok) != want:
            raise GraphFormatError(f"wrong number of fields for '{tag}' line", lineno)
        eid = tok[1]
        if eid in seen_edges:
            raise GraphFormatError(f"duplicate edge id {eid!r}", lineno)
        seen_edges[eid] = lineno
        if tag == "e":
            if tok[2] == tok[3]:
                raise GraphFormatError("ordinary edge needs distinct endpoints (use 'l' for loops)", lineno)
            edges.append((eid, tok[2], tok[3]))
        elif tag == "l":
            loops.append((eid, tok[2]))
        else:
            semis.append((eid, tok[2]))
        pending.append((lineno, tok[2:]))
    for lineno, ends in pending:
        for v in ends:
            if v not in vertices:
                raise GraphFormatError(f"undeclared vertex {v!r}", lineno)
    return Graph.build(vertices, edges, loops, semis)


def serialize_graph(g: Graph) -> str:
    lines = [f"v {v}" for v in sorted(g.vertices)]
    lines += [f"e {e} {g.incidence[e][0]} {g.incidence[e][1]}" for e in sorted(g.ordinary_edges)]
    lines += [f"l {e} {g.incidence[e]}" for e in sorted(g.loops)]
    lines += [f"s {e} {g.incidence[e]}" for e in sorted(g.semi_edges)]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_graph(g))
