"""Exact search for covering projections and constrained colourings.

The search runs sequentially, so witnesses are reproducible. A budget that
runs out produces ``unknown`` rather than a guess.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from .coloring import TwoColoring, search_colorings
from .cover import CoverMap, verify_cover
from .factors import SearchBudgetExceeded, proper_bipartite_coloring
from .graph import Graph, connected_components

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

ORBIT_LIMIT = 8


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: Optional[int] = None
    time_limit: Optional[float] = None


@dataclass
class SolveResult:
    status: str
    witness: Optional[CoverMap] = None
    nodes: int = 0

    @property
    def yes(self) -> bool:
        return self.status == YES


class _Counter:
    def __init__(self, budget: SearchBudget):
        self.nodes = 0
        self.max_nodes = budget.max_nodes
        self.deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit

    def tick(self):
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise SearchBudgetExceeded(self.nodes)
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded(self.nodes)


def _profile(g: Graph, u: str) -> Tuple[int, int, int]:
    return len(g.semi_at(u)), len(g.ordinary_at(u)), len(g.loops_at(u))


def _orbit_representatives(h: Graph, candidates: List[str]) -> List[str]:
    """One candidate per automorphism orbit of h (small targets only)."""
    if len(h.vertices) > ORBIT_LIMIT or len(candidates) <= 1:
        return candidates
    m = nx.MultiGraph()
    for v in h.sorted_vertices():
        m.add_node(v, kind=(len(h.semi_at(v)), len(h.loops_at(v))))
    m.add_edges_from(h.incidence[e] for e in sorted(h.ordinary_edges))
    matcher = nx.isomorphism.MultiGraphMatcher(m, m, node_match=lambda a, b: a["kind"] == b["kind"])
    orbit: Dict[str, str] = {v: v for v in candidates}
    for auto in matcher.isomorphisms_iter():
        for v in candidates:
            w = auto[v]
            if w in orbit and orbit[w] > orbit[v]:
                orbit[w] = orbit[v]
    return sorted({orbit[v] for v in candidates})


# -- edge phase ---------------------------------------------------------------------------------


class _FibreCSP:
    """Map the edges inside one fibre component onto the semi-edges and loops at x.

    Slot (u, s) for a target semi-edge s must be hit exactly once, slot (u, l)
    for a target loop exactly twice (a source loop hits twice at once).
    Target semi-edges at x are interchangeable, and so are target loops.
    """

    def __init__(self, g: Graph, h: Graph, x: str, verts: List[str], elems: List[str], counter: _Counter):
        self.g = g
        self.semis = sorted(h.semi_at(x))
        self.loops = sorted(h.loops_at(x))
        self.elems = elems
        self.counter = counter
        self.used: Dict[Tuple[str, str], int] = {}
        self.assign: Dict[str, str] = {}
        self.value_use: Counter = Counter()
        self.verts = verts

    def _domain(self, e: str) -> List[str]:
        g, used = self.g, self.used
        ends = g.ends(e)
        if e in g.semi_edges:
            pool = [s for s in self.semis if not used.get((ends[0], s))]
        elif e in g.loops:
            pool = [l for l in self.loops if not used.get((ends[0], l))]
        else:
            u, w = ends
            pool = [s for s in self.semis if not used.get((u, s)) and not used.get((w, s))]
            pool += [l for l in self.loops if used.get((u, l), 0) < 2 and used.get((w, l), 0) < 2]
        # unused values of one kind are interchangeable: keep only the first
        out, fresh_semi, fresh_loop = [], False, False
        for v in pool:
            if self.value_use[v]:
                out.append(v)
            elif v in self.semis and not fresh_semi:
                out.append(v)
                fresh_semi = True
            elif v in self.loops and not fresh_loop:
                out.append(v)
                fresh_loop = True
        return out

    def _hit(self, e: str, v: str, sign: int):
        g = self.g
        if e in g.loops:
            self.used[(g.ends(e)[0], v)] = self.used.get((g.ends(e)[0], v), 0) + 2 * sign
        else:
            for u in g.ends(e):
                self.used[(u, v)] = self.used.get((u, v), 0) + sign
        self.value_use[v] += sign

    def solve(self) -> bool:
        self.counter.tick()
        best, best_dom = None, None
        for e in self.elems:
            if e in self.assign:
                continue
            dom = self._domain(e)
            if not dom:
                return False
            if best_dom is None or len(dom) < len(best_dom):
                best, best_dom = e, dom
                if len(dom) == 1:
                    break
        if best is None:
            return True
        for v in best_dom:
            self.assign[best] = v
            self._hit(best, v, 1)
            if self.solve():
                return True
            self._hit(best, v, -1)
            del self.assign[best]
        return False


def _edge_phase(g: Graph, h: Graph, fv: Dict[str, str], counter: _Counter) -> Optional[Dict[str, str]]:
    emap: Dict[str, str] = {}
    cross: Dict[Tuple[str, str], List[str]] = {}
    inner: Dict[str, List[str]] = {}
    for e in sorted(g.edges):
        ends = g.ends(e)
        images = sorted({fv[u] for u in ends})
        if len(images) == 2:
            cross.setdefault((images[0], images[1]), []).append(e)
        else:
            inner.setdefault(images[0], []).append(e)

    for (x, y), edges in sorted(cross.items()):
        bars = sorted(b for b in h.ordinary_at(x) if h.other_end(b, x) == y)
        classes = proper_bipartite_coloring(g, len(bars), edges)
        for bar, cls in zip(bars, classes):
            for e in cls.edges:
                emap[e] = bar

    for x, elems in sorted(inner.items()):
        sub = g.subgraph([u for u in g.vertices if fv[u] == x], elems)
        for comp in connected_components(sub):
            comp_elems = sorted(comp.edges)
            if not comp_elems:
                continue
            csp = _FibreCSP(g, h, x, comp.sorted_vertices(), comp_elems, counter)
            if not csp.solve():
                return None
            emap.update(csp.assign)
    return emap


# -- vertex phase -------------------------------------------------------------------------------


class _VertexSearch:
    def __init__(self, g: Graph, h: Graph, counter: _Counter):
        self.g, self.h = g, h
        self.counter = counter
        self.hprof = {x: _profile(h, x) for x in h.vertices}
        self.hdeg = {x: p[0] + p[1] + 2 * p[2] for x, p in self.hprof.items()}
        self.mult = {x: Counter(h.neighbors(x)) for x in h.vertices}
        self.fibre_cap = len(g.vertices) // len(h.vertices)
        self.gnbrs = {u: g.neighbors(u) for u in g.vertices}
        self.gself = {u: len(g.semi_at(u)) + 2 * len(g.loops_at(u)) for u in g.vertices}
        self.fv: Dict[str, str] = {}
        self.fibre_size: Counter = Counter()
        self.order = self._order()

    def _order(self) -> List[str]:
        g = self.g
        deg = {u: len(self.gnbrs[u]) + self.gself[u] for u in g.vertices}
        root = min(g.vertices, key=lambda u: (-deg[u], u))
        order, seen, i = [root], {root}, 0
        while i < len(order):
            u = order[i]
            i += 1
            for w in sorted(set(self.gnbrs[u]), key=lambda w: (-deg[w], w)):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        return order

    def _fits(self, u: str, x: str) -> bool:
        semi_h, _, loops_h = self.hprof[x]
        g = self.g
        if self.hdeg[x] != len(self.gnbrs[u]) + self.gself[u]:
            return False
        if len(g.semi_at(u)) > semi_h or len(g.loops_at(u)) > loops_h:
            return False
        return self.gself[u] <= semi_h + 2 * loops_h

    def _consistent(self, u: str) -> bool:
        """Partial obedience at u: neighbour counts towards each fibre stay within bounds."""
        x = self.fv[u]
        towards: Counter = Counter()
        pending = 0
        for w in self.gnbrs[u]:
            y = self.fv.get(w)
            if y is None:
                pending += 1
            else:
                towards[y] += 1
        semi_h, _, loops_h = self.hprof[x]
        slack = semi_h + 2 * loops_h - self.gself[u]
        for y, n in towards.items():
            cap = slack if y == x else self.mult[x][y]
            if n > cap:
                return False
        if pending == 0:
            if towards[x] != slack:
                return False
            if any(towards[y] != m for y, m in self.mult[x].items() if y != x):
                return False
        return True

    def candidates(self, u: str) -> List[str]:
        placed = [self.fv[w] for w in self.gnbrs[u] if w in self.fv]
        if placed:
            y = placed[0]
            pool = sorted({y} | set(self.mult[y]))
        else:
            pool = self.h.sorted_vertices()
            pool = _orbit_representatives(self.h, [x for x in pool if self._fits(u, x)])
        return [x for x in pool if self._fits(u, x) and self.fibre_size[x] < self.fibre_cap]

    def maps(self, idx: int = 0):
        self.counter.tick()
        if idx == len(self.order):
            yield dict(self.fv)
            return
        u = self.order[idx]
        for x in self.candidates(u):
            self.fv[u] = x
            self.fibre_size[x] += 1
            if self._consistent(u) and all(self._consistent(w) for w in set(self.gnbrs[u]) if w in self.fv):
                yield from self.maps(idx + 1)
            self.fibre_size[x] -= 1
            del self.fv[u]


def _solve_connected(g: Graph, h: Graph, counter: _Counter) -> Optional[CoverMap]:
    """g and h both connected and non-empty."""
    if len(g.vertices) % len(h.vertices):
        return None
    search = _VertexSearch(g, h, counter)
    for fv in search.maps():
        emap = _edge_phase(g, h, fv, counter)
        if emap is not None:
            return CoverMap(fv, emap)
    return None


def solve_cover(g: Graph, h: Graph, budget: SearchBudget = SearchBudget()) -> SolveResult:
    """Decide whether g covers h; a yes answer carries a verified CoverMap."""
    counter = _Counter(budget)
    if not g.vertices:
        return SolveResult(YES, CoverMap({}, {}), 0)
    if not h.vertices:
        return SolveResult(NO, None, 0)
    h_parts = connected_components(h)
    vmap: Dict[str, str] = {}
    emap: Dict[str, str] = {}
    try:
        for comp in connected_components(g):
            found = None
            for hc in h_parts:
                found = _solve_connected(comp, hc, counter)
                if found is not None:
                    break
            if found is None:
                return SolveResult(NO, None, counter.nodes)
            vmap.update(found.vertex_map)
            emap.update(found.edge_map)
    except SearchBudgetExceeded:
        return SolveResult(UNKNOWN, None, counter.nodes)
    witness = CoverMap(vmap, emap)
    report = verify_cover(g, h, witness)
    if not report.ok:  # pragma: no cover - would be an internal bug
        raise AssertionError(f"oracle produced an invalid cover:\n{report}")
    return SolveResult(YES, witness, counter.nodes)


def enumerate_colorings(
    g: Graph, b: int, c: int, frame: Optional[Iterable[str]] = None, budget: SearchBudget = SearchBudget()
) -> List[TwoColoring]:
    """Every colouring satisfying the (b, c) constraint on ``frame``.

    The default frame is the set of vertices of degree b+c. Raises
    ``SearchBudgetExceeded`` when the budget runs out.
    """
    return list(search_colorings(g, b, c, frame, budget.max_nodes, budget.time_limit))
