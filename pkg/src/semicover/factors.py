"""Matchings, factors and edge colourings over the ordinary edges of a graph.

Semi-edges and loops never take part in a matching; two-factors may contain
loops (each counting twice towards the degree).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .graph import Graph, GraphBuilder, GraphError, GraphFormatError, bipartition

MATCHING = "matching"
TWO_FACTOR = "two-factor"
G_FACTOR = "g-factor"
COLOR_CLASS = "color-class"
ROLES = (MATCHING, TWO_FACTOR, G_FACTOR, COLOR_CLASS)


class FactorError(ValueError):
    """Input violates the precondition of a factor routine."""


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, nodes: int):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes


@dataclass(frozen=True)
class EdgeSubset:
    edges: FrozenSet[str]
    role: str = MATCHING

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def __len__(self) -> int:
        return len(self.edges)

    def sorted(self) -> List[str]:
        return sorted(self.edges)


def subset(edges: Iterable[str], role: str = MATCHING) -> EdgeSubset:
    return EdgeSubset(frozenset(edges), role)


# -- role invariants ------------------------------------------------------------


def is_matching(g: Graph, edges: Iterable[str]) -> bool:
    seen = set()
    for e in edges:
        if e not in g.ordinary_edges:
            return False
        for u in g.incidence[e]:
            if u in seen:
                return False
            seen.add(u)
    return True


def is_perfect_matching(g: Graph, edges: Iterable[str]) -> bool:
    edges = list(edges)
    return is_matching(g, edges) and 2 * len(edges) == len(g.vertices)


def factor_degrees(g: Graph, edges: Iterable[str]) -> Dict[str, int]:
    """Degree of every vertex in the spanning subgraph formed by ``edges``."""
    deg = {v: 0 for v in g.vertices}
    for e in edges:
        if e in g.loops:
            deg[g.incidence[e]] += 2
        else:
            for u in g.ends(e):
                deg[u] += 1
    return deg


def is_two_factor(g: Graph, edges: Iterable[str]) -> bool:
    edges = list(edges)
    if any(e in g.semi_edges for e in edges):
        return False
    return all(d == 2 for d in factor_degrees(g, edges).values())


def check_role(g: Graph, s: EdgeSubset, demand: Optional[Mapping[str, int]] = None) -> bool:
    """Machine check of the invariant belonging to ``s.role``."""
    if not s.edges <= g.edges:
        return False
    if s.role in (MATCHING, COLOR_CLASS):
        return is_matching(g, s.edges)
    if s.role == TWO_FACTOR:
        return is_two_factor(g, s.edges)
    if demand is None:
        return all(e in g.ordinary_edges for e in s.edges)
    deg = factor_degrees(g, s.edges)
    return all(e in g.ordinary_edges for e in s.edges) and all(deg[v] == demand.get(v, 0) for v in g.vertices)


# -- matchings ----------------------------------------------------------------------


def _simple_view(g: Graph, edges: Optional[Iterable[str]] = None):
    """Collapse parallel edges: networkx graph plus the sorted edge ids per pair."""
    pool = sorted(g.ordinary_edges if edges is None else edges)
    ids: Dict[Tuple[str, str], List[str]] = {}
    for e in pool:
        ids.setdefault(g.incidence[e], []).append(e)
    nxg = nx.Graph()
    nxg.add_nodes_from(g.sorted_vertices())
    nxg.add_edges_from(sorted(ids))
    return nxg, ids


def max_matching(g: Graph) -> EdgeSubset:
    """Maximum-cardinality matching on ordinary edges (general graphs, blossom)."""
    nxg, ids = _simple_view(g)
    pairs = nx.max_weight_matching(nxg, maxcardinality=True)
    chosen = [ids[(u, v) if u <= v else (v, u)][0] for u, v in pairs]
    return subset(chosen, MATCHING)


def perfect_matching(g: Graph) -> Optional[EdgeSubset]:
    if len(g.vertices) % 2:
        return None
    m = max_matching(g)
    return m if 2 * len(m) == len(g.vertices) else None


def _bipartite_perfect_matching(g: Graph, left: Sequence[str], edges: Iterable[str]) -> Optional[List[str]]:
    nxg, ids = _simple_view(g, edges)
    nxg.remove_nodes_from([v for v in list(nxg.nodes) if nxg.degree(v) == 0 and v not in left])
    mate = nx.bipartite.hopcroft_karp_matching(nxg, top_nodes=list(left))
    if any(u not in mate for u in left) or len(mate) != 2 * len(left):
        return None
    return [ids[(u, mate[u]) if u <= mate[u] else (mate[u], u)][0] for u in left]


# -- colourings -----------------------------------------------------------------------


def _sides(g: Graph) -> Tuple[List[str], List[str]]:
    part = bipartition(g)
    if part is None:
        raise FactorError("graph is not bipartite")
    return sorted(part[0]), sorted(part[1])


def bipartite_edge_coloring(g: Graph, k: int) -> List[EdgeSubset]:
    """Split a k-regular bipartite multigraph into k perfect matchings.

    Perfect matchings are peeled off one at a time; regularity guarantees
    that each one exists.
    """
    if g.loops:
        raise FactorError("loops make the graph non-bipartite")
    if any(len(g.ordinary_at(v)) != k for v in g.vertices):
        raise FactorError(f"every vertex must have exactly {k} ordinary edges")
    left, right = _sides(g)
    if len(left) != len(right):
        raise FactorError("regular bipartite graph with unequal sides")
    remaining = set(g.ordinary_edges)
    classes = []
    for _ in range(k):
        chosen = _bipartite_perfect_matching(g, left, remaining)
        if chosen is None:  # pragma: no cover - excluded by regularity
            raise FactorError("no perfect matching in a regular bipartite graph")
        remaining.difference_update(chosen)
        classes.append(subset(chosen, COLOR_CLASS))
    return classes


def proper_bipartite_coloring(g: Graph, k: int, edges: Optional[Iterable[str]] = None) -> List[EdgeSubset]:
    """k disjoint matchings covering ``edges`` when every vertex meets at most k of them.

    The subgraph is padded to a k-regular bipartite multigraph with dummy
    vertices and edges, coloured, and the padding is dropped again.
    """
    pool = sorted(g.ordinary_edges if edges is None else edges)
    if k == 0:
        if pool:
            raise FactorError("cannot colour edges with zero colours")
        return []
    sub = g.subgraph(g.vertices, pool)
    left, right = _sides(sub)
    deg = {v: len(sub.ordinary_at(v)) for v in sub.vertices}
    if any(d > k for d in deg.values()):
        raise FactorError(f"a vertex meets more than {k} edges")
    b = GraphBuilder(edge_prefix="~pad")
    b.add_vertices(sub.sorted_vertices())
    for e in pool:
        b.add_edge(*g.incidence[e], eid=e)
    for i in range(len(right) - len(left)):
        left.append(b.add_vertex(f"~L{i}"))
        deg[left[-1]] = 0
    for i in range(len(left) - len(right)):
        right.append(b.add_vertex(f"~R{i}"))
        deg[right[-1]] = 0
    stubs_l = [v for v in left for _ in range(k - deg[v])]
    stubs_r = [v for v in right for _ in range(k - deg[v])]
    for u, v in zip(stubs_l, stubs_r):
        b.add_edge(u, v)
    classes = bipartite_edge_coloring(b.build(), k)
    real = set(pool)
    return [subset((e for e in c.edges if e in real), COLOR_CLASS) for c in classes]


def _euler_orientation(g: Graph) -> List[Tuple[str, str, str]]:
    """Orient every ordinary edge and loop so that in-degree equals out-degree."""
    adj: Dict[str, List[str]] = {v: g.ordinary_at(v) + g.loops_at(v) for v in g.vertices}
    pos = {v: 0 for v in g.vertices}
    used = set()
    arcs = []
    for start in g.sorted_vertices():
        while True:
            # closed trail from start; every vertex has even degree so it returns
            cur = start
            moved = False
            while True:
                lst = adj[cur]
                while pos[cur] < len(lst) and lst[pos[cur]] in used:
                    pos[cur] += 1
                if pos[cur] == len(lst):
                    break
                e = lst[pos[cur]]
                used.add(e)
                nxt = cur if e in g.loops else g.other_end(e, cur)
                arcs.append((e, cur, nxt))
                cur = nxt
                moved = True
            if not moved:
                break
    return arcs


def two_factorization(g: Graph) -> List[EdgeSubset]:
    """Partition a 2c-regular multigraph without semi-edges into c two-factors.

    Edges are oriented along closed trails so that every vertex has c
    outgoing and c incoming arcs; the out/in split graph is c-regular
    bipartite and each of its perfect matchings is a two-factor.
    """
    if g.semi_edges:
        raise FactorError("two-factorization needs a graph without semi-edges")
    degs = {len(g.ordinary_at(v)) + 2 * len(g.loops_at(v)) for v in g.vertices}
    if not degs:
        return []
    if len(degs) != 1 or degs.copy().pop() % 2:
        raise FactorError("two-factorization needs a regular graph of even degree")
    c = degs.pop() // 2
    if c == 0:
        return []
    b = GraphBuilder()
    for v in g.sorted_vertices():
        b.add_vertex(f"+{v}")
        b.add_vertex(f"-{v}")
    for e, u, v in _euler_orientation(g):
        b.add_edge(f"+{u}", f"-{v}", eid=e)
    return [subset(cls.edges, TWO_FACTOR) for cls in bipartite_edge_coloring(b.build(), c)]


def g_factor(g: Graph, demand: Mapping[str, int]) -> Optional[EdgeSubset]:
    """Spanning subgraph of ordinary edges with prescribed degrees, via max-flow.

    Only bipartite graphs are supported; vertices missing from ``demand``
    get demand 0.
    """
    for v, d in demand.items():
        if v not in g.vertices:
            raise GraphError(f"unknown vertex {v!r}")
        if d < 0 or d > len(g.ordinary_at(v)):
            raise FactorError(f"demand {d} at {v!r} exceeds its {len(g.ordinary_at(v))} ordinary edges")
    left, right = _sides(g)
    want = {v: demand.get(v, 0) for v in g.vertices}
    if sum(want[v] for v in left) != sum(want[v] for v in right):
        return None
    total = sum(want[v] for v in left)
    if total == 0:
        return subset((), G_FACTOR)
    net = nx.DiGraph()
    src, snk = ("src",), ("snk",)
    lset = set(left)
    for v in left:
        net.add_edge(src, v, capacity=want[v])
    for v in right:
        net.add_edge(v, snk, capacity=want[v])
    pair_ids: Dict[Tuple[str, str], List[str]] = {}
    for e in sorted(g.ordinary_edges):
        a, b = g.incidence[e]
        u, v = (a, b) if a in lset else (b, a)
        pair_ids.setdefault((u, v), []).append(e)
    for (u, v), ids in sorted(pair_ids.items()):
        net.add_edge(u, v, capacity=len(ids))
    value, flow = nx.maximum_flow(net, src, snk)
    if value != total:
        return None
    chosen = []
    for (u, v), ids in sorted(pair_ids.items()):
        chosen.extend(ids[: flow[u][v]])
    return subset(chosen, G_FACTOR)


# -- k disjoint perfect matchings ------------------------------------------------------------


def _ordinary_degree_two(g: Graph) -> bool:
    return all(len(g.ordinary_at(v)) == 2 for v in g.vertices)


def _alternate_cycles(g: Graph) -> Optional[List[List[str]]]:
    first, second = [], []
    seen = set()
    for start in g.sorted_vertices():
        if start in seen:
            continue
        walk = []
        cur, prev_edge = start, None
        while True:
            seen.add(cur)
            nxt_edge = next(e for e in g.ordinary_at(cur) if e != prev_edge)
            walk.append(nxt_edge)
            cur, prev_edge = g.other_end(nxt_edge, cur), nxt_edge
            if cur == start:
                break
        if len(walk) % 2:
            return None
        first.extend(walk[0::2])
        second.extend(walk[1::2])
    return [first, second]


def _prune_by_articulation(vertices: Iterable[str], edges: Dict[str, Tuple[str, str]]) -> Optional[Dict[str, Tuple[str, str]]]:
    """Drop edges that lie in no perfect matching because of cut-vertex parity.

    If ``x`` is a cut vertex, a perfect matching matches ``x`` into the single
    odd component of ``G - x``; edges from ``x`` into even components are
    useless. Returns None when some component rules out a perfect matching.
    """
    edges = dict(edges)
    verts = sorted(vertices)
    while True:
        nxg = nx.Graph()
        nxg.add_nodes_from(verts)
        nxg.add_edges_from(edges.values())
        for comp in nx.connected_components(nxg):
            if len(comp) % 2:
                return None
        removed = False
        for x in sorted(nx.articulation_points(nxg)):
            rest = nxg.subgraph(set(nx.node_connected_component(nxg, x)) - {x})
            comps = list(nx.connected_components(rest))
            odd = [c for c in comps if len(c) % 2]
            if len(odd) != 1:
                return None
            even_side = set().union(*(c for c in comps if not len(c) % 2)) if len(comps) > 1 else set()
            drop = [e for e, (a, b) in edges.items() if (a == x and b in even_side) or (b == x and a in even_side)]
            for e in drop:
                del edges[e]
                removed = True
            if removed:
                break
        if not removed:
            return edges


class _MatchingSearch:
    """Backtracking for k edge-disjoint perfect matchings on one component."""

    def __init__(self, k: int, vertices: List[str], edges: Dict[str, Tuple[str, str]], counter):
        self.k = k
        self.vertices = vertices
        self.ends = edges
        self.at: Dict[str, List[str]] = {v: [] for v in vertices}
        for e in sorted(edges):
            a, b = edges[e]
            self.at[a].append(e)
            self.at[b].append(e)
        full = (1 << k) - 1
        self.missing = {v: full for v in vertices}
        self.color: Dict[str, int] = {}
        self.counter = counter

    def _other(self, e, v):
        a, b = self.ends[e]
        return b if a == v else a

    def _assign(self, e, h):
        a, b = self.ends[e]
        self.color[e] = h
        self.missing[a] &= ~(1 << h)
        self.missing[b] &= ~(1 << h)

    def _unassign(self, e):
        a, b = self.ends[e]
        h = self.color.pop(e)
        self.missing[a] |= 1 << h
        self.missing[b] |= 1 << h

    def _feasible(self) -> bool:
        for v in self.vertices:
            need = self.missing[v]
            if not need:
                continue
            supply = 0
            count = 0
            for e in self.at[v]:
                if e in self.color:
                    continue
                common = need & self.missing[self._other(e, v)]
                if common:
                    supply |= common
                    count += 1
            if supply != need or count < bin(need).count("1"):
                return False
        return True

    def _pick(self):
        best, best_key = None, None
        for v in self.vertices:
            if not self.missing[v]:
                continue
            free = sum(1 for e in self.at[v] if e not in self.color)
            key = (free - bin(self.missing[v]).count("1"), free)
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def solve(self) -> bool:
        self.counter()
        v = self._pick()
        if v is None:
            return True
        if not self.color:
            # colours are interchangeable until first used: give colour i to the
            # i-th chosen edge of the first vertex
            for combo in combinations(self.at[v], self.k):
                for h, e in enumerate(combo):
                    self._assign(e, h)
                if self._feasible() and self.solve():
                    return True
                for e in combo:
                    self._unassign(e)
            return False
        need = self.missing[v]
        h = (need & -need).bit_length() - 1
        for e in self.at[v]:
            if e in self.color or not (self.missing[self._other(e, v)] >> h) & 1:
                continue
            self._assign(e, h)
            if self._feasible() and self.solve():
                return True
            self._unassign(e)
        return False


def disjoint_perfect_matchings(
    g: Graph, k: int, max_nodes: Optional[int] = None, time_limit: Optional[float] = None
) -> Optional[List[EdgeSubset]]:
    """k pairwise edge-disjoint perfect matchings, or None when none exist.

    Exact: cut-vertex parity pruning, then an independent backtracking search
    per connected component. Raises ``SearchBudgetExceeded`` when the node or
    time budget runs out. Matchings come back sorted by their edge ids.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return []
    if len(g.vertices) % 2:
        return None
    if k == 1:
        m = perfect_matching(g)
        return None if m is None else [m]
    if any(len(g.ordinary_at(v)) < k for v in g.vertices):
        return None
    if k == 2 and _ordinary_degree_two(g):
        halves = _alternate_cycles(g)
        if halves is None:
            return None
        return _canonical([subset(h) for h in halves])

    edges = {e: g.incidence[e] for e in g.ordinary_edges}
    pruned = _prune_by_articulation(g.vertices, edges)
    if pruned is None:
        return None
    nodes = [0]
    deadline = None if time_limit is None else time.monotonic() + time_limit

    def counter():
        nodes[0] += 1
        if max_nodes is not None and nodes[0] > max_nodes:
            raise SearchBudgetExceeded(nodes[0])
        if deadline is not None and nodes[0] % 1024 == 0 and time.monotonic() > deadline:
            raise SearchBudgetExceeded(nodes[0])

    nxg = nx.Graph()
    nxg.add_nodes_from(g.sorted_vertices())
    nxg.add_edges_from(pruned.values())
    colour_sets: List[List[str]] = [[] for _ in range(k)]
    for comp in sorted(nx.connected_components(nxg), key=min):
        verts = sorted(comp)
        comp_edges = {e: p for e, p in pruned.items() if p[0] in comp}
        if any(sum(1 for p in comp_edges.values() if v in p) < k for v in verts):
            return None
        search = _MatchingSearch(k, verts, comp_edges, counter)
        if not search._feasible() or not search.solve():
            return None
        for e, h in search.color.items():
            colour_sets[h].append(e)
    return _canonical([subset(c) for c in colour_sets])


def _canonical(matchings: List[EdgeSubset]) -> List[EdgeSubset]:
    return sorted(matchings, key=lambda m: m.sorted())


# -- text format -------------------------------------------------------------------


def serialize_subsets(subsets: Iterable[EdgeSubset]) -> str:
    return "".join(f"f {s.role} {' '.join(s.sorted())}".rstrip() + "\n" for s in subsets)


def parse_subsets(text: str) -> List[EdgeSubset]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] != "f" or len(tok) < 2 or tok[1] not in ROLES:
            raise GraphFormatError("expected 'f <role> <edge-id> ...'", lineno)
        out.append(EdgeSubset(frozenset(tok[2:]), tok[1]))
    return out
