"""Independent brute-force oracles and random instance generators for the tests.

Nothing here reuses the search code under test; the oracles are deliberately
naive enumerations.
"""
from __future__ import annotations

import itertools
import random
from typing import Dict, List, Optional, Sequence

from semicover.cover import CoverMap, verify_cover
from semicover.graph import Graph, GraphBuilder


# -- brute-force oracles -----------------------------------------------------------------


def _edge_candidates(g: Graph, h: Graph, fv: Dict[str, str], e: str) -> List[str]:
    ends = g.ends(e)
    if e in g.semi_edges:
        return sorted(h.semi_at(fv[ends[0]]))
    if e in g.loops:
        return sorted(h.loops_at(fv[ends[0]]))
    x, y = fv[ends[0]], fv[ends[1]]
    if x == y:
        return sorted(h.semi_at(x) + h.loops_at(x))
    return sorted(b for b in h.ordinary_at(x) if h.other_end(b, x) == y)


def naive_cover(g: Graph, h: Graph, limit: int = 2_000_000) -> Optional[CoverMap]:
    """Try every vertex map and every type-compatible edge map; verify each with verify_cover."""
    gv, hv = g.sorted_vertices(), h.sorted_vertices()
    edges = sorted(g.edges)
    if not gv:
        return CoverMap({}, {})
    tried = 0
    for images in itertools.product(hv, repeat=len(gv)):
        fv = dict(zip(gv, images))
        cands = [_edge_candidates(g, h, fv, e) for e in edges]
        if any(not c for c in cands):
            continue
        for choice in itertools.product(*cands):
            tried += 1
            if tried > limit:
                raise RuntimeError("naive cover enumeration too large")
            f = CoverMap(fv, dict(zip(edges, choice)))
            if verify_cover(g, h, f).ok:
                return f
    return None


def naive_edge_colorable(g: Graph, k: int) -> bool:
    """Proper k-edge-colouring of the ordinary edges by plain DFS."""
    edges = sorted(g.ordinary_edges)
    color: Dict[str, int] = {}

    def ok(e, c):
        for u in g.incidence[e]:
            for f in g.ordinary_at(u):
                if f != e and color.get(f) == c:
                    return False
        return True

    def dfs(i):
        if i == len(edges):
            return True
        for c in range(k):
            if ok(edges[i], c):
                color[edges[i]] = c
                if dfs(i + 1):
                    return True
                del color[edges[i]]
        return False

    return dfs(0)


def all_perfect_matchings(g: Graph) -> List[frozenset]:
    out = []

    def rec(left, chosen):
        if not left:
            out.append(frozenset(chosen))
            return
        u = min(left)
        for e in g.ordinary_at(u):
            w = g.other_end(e, u)
            if w in left:
                rec(left - {u, w}, chosen + [e])

    rec(frozenset(g.vertices), [])
    return out


def naive_disjoint_pms(g: Graph, k: int) -> bool:
    pms = all_perfect_matchings(g)
    for combo in itertools.combinations(pms, k):
        if all(not (a & b) for a, b in itertools.combinations(combo, 2)):
            return True
    return k == 0


def naive_colorings(g: Graph, b: int, c: int, frame: Sequence[str]) -> List[Dict[str, str]]:
    vs = g.sorted_vertices()
    out = []
    for bits in itertools.product(("red", "blue"), repeat=len(vs)):
        col = dict(zip(vs, bits))
        good = True
        for u in frame:
            same = 2 * len(g.loops_at(u))
            other = 0
            for e in g.ordinary_at(u):
                if col[g.other_end(e, u)] == col[u]:
                    same += 1
                else:
                    other += 1
            if (same, other) != (b, c):
                good = False
                break
        if good:
            out.append(col)
    return out


# -- random instances ------------------------------------------------------------------


def random_lift(h: Graph, k: int, rng: random.Random) -> Graph:
    """Random k-fold permutation lift of h; it covers h by construction."""
    b = GraphBuilder()
    for x in h.sorted_vertices():
        for i in range(k):
            b.add_vertex(f"{x}.{i}")
    for e in sorted(h.ordinary_edges):
        x, y = h.incidence[e]
        perm = list(range(k))
        rng.shuffle(perm)
        for i in range(k):
            b.add_edge(f"{x}.{i}", f"{y}.{perm[i]}")
    for e in sorted(h.loops):
        x = h.incidence[e]
        perm = list(range(k))
        rng.shuffle(perm)
        for i in range(k):
            j = perm[i]
            if i == j:
                b.add_loop(f"{x}.{i}")
            else:
                b.add_edge(f"{x}.{i}", f"{x}.{j}")
    for e in sorted(h.semi_edges):
        x = h.incidence[e]
        idx = list(range(k))
        rng.shuffle(idx)
        while idx:
            i = idx.pop()
            if idx and rng.random() < 0.6:
                j = idx.pop()
                b.add_edge(f"{x}.{i}", f"{x}.{j}")
            else:
                b.add_semi_edge(f"{x}.{i}")
    return b.build()


def random_regular_multigraph(n: int, d: int, rng: random.Random, semi: bool = True, loops: bool = True) -> Graph:
    """Configuration-model multigraph in which every vertex has degree d.

    Without semi-edges n*d must be even. Without loops, unlucky pairings are
    simply redrawn.
    """
    if not semi and (n * d) % 2:
        raise ValueError("odd total degree needs semi-edges")
    for _ in range(1000):
        g = _configuration(n, d, rng, semi, loops)
        if g is not None:
            return g
    raise RuntimeError("could not draw a loopless pairing")


def _configuration(n, d, rng, semi, loops) -> Optional[Graph]:
    b = GraphBuilder()
    vs = [str(i) for i in range(n)]
    b.add_vertices(vs)
    stubs = [v for v in vs for _ in range(d)]
    rng.shuffle(stubs)
    while stubs:
        u = stubs.pop()
        if semi and (not stubs or rng.random() < 0.15):
            b.add_semi_edge(u)
            continue
        j = rng.randrange(len(stubs))
        w = stubs.pop(j)
        if w != u:
            b.add_edge(u, w)
        elif loops:
            b.add_loop(u)
        else:
            return None
    return b.build()


def random_regular_bipartite(n_half: int, k: int, rng: random.Random) -> Graph:
    """Union of k random perfect matchings between two sides: k-regular bipartite multigraph."""
    b = GraphBuilder()
    left = [f"a{i}" for i in range(n_half)]
    right = [f"b{i}" for i in range(n_half)]
    b.add_vertices(left + right)
    for _ in range(k):
        perm = list(range(n_half))
        rng.shuffle(perm)
        for i in range(n_half):
            b.add_edge(left[i], right[perm[i]])
    return b.build()


def random_cubic_simple(n: int, rng: random.Random) -> Optional[Graph]:
    import networkx as nx

    if n % 2 or n < 4:
        return None
    nxg = nx.random_regular_graph(3, n, seed=rng.randrange(1 << 30))
    b = GraphBuilder()
    b.add_vertices(str(v) for v in nxg.nodes)
    for u, v in sorted(nxg.edges):
        b.add_edge(str(u), str(v))
    return b.build()


def from_networkx(nxg) -> Graph:
    b = GraphBuilder()
    b.add_vertices(str(v) for v in nxg.nodes)
    for u, v in sorted(nxg.edges):
        b.add_edge(str(u), str(v))
    return b.build()
