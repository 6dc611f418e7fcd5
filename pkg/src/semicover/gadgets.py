"""Generators for the hardness gadgets and the reduction instances built from them.

Every generator returns a ``ReductionArtifact``: the instance, one provenance
label per vertex, the equivalence it is meant to witness and, when the
construction provides one, a witness that is verified before it is returned.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .coloring import BLUE as C_BLUE, RED as C_RED, TwoColoring, coloring_violations, flip
from .cover import CoverMap, verify_cover
from .deciders import decide_F
from .factors import (
    EdgeSubset,
    bipartite_edge_coloring,
    disjoint_perfect_matchings,
    is_perfect_matching,
    proper_bipartite_coloring,
    subset,
)
from .families import BLUE, RED, two_vertex
from .graph import Graph, GraphBuilder, GraphFormatError, bipartition, is_regular

Witness = Union[CoverMap, TwoColoring, List[EdgeSubset]]


class GadgetError(ValueError):
    """Parameters outside the range a construction is defined for."""


@dataclass
class ReductionArtifact:
    instance: Graph
    annotations: Dict[str, str]
    claim: str
    witness: Optional[Witness] = None
    target: Optional[Graph] = None  # cover witnesses are checked against this
    frame: Optional[FrozenSet[str]] = None  # colouring witnesses are checked on this

    def verify_witness(self) -> bool:
        w = self.witness
        if w is None:
            return True
        if isinstance(w, CoverMap):
            return self.target is not None and verify_cover(self.instance, self.target, w).ok
        if isinstance(w, TwoColoring):
            return not coloring_violations(self.instance, w, self.frame)
        seen = set()
        for m in w:
            if not is_perfect_matching(self.instance, m.edges) or seen & m.edges:
                return False
            seen |= m.edges
        return True

    def _finish(self) -> "ReductionArtifact":
        missing = self.instance.vertices - set(self.annotations)
        extra = set(self.annotations) - self.instance.vertices
        if missing or extra:  # pragma: no cover - generator bug
            raise AssertionError(f"annotation mismatch: missing {sorted(missing)[:3]}, extra {sorted(extra)[:3]}")
        if not self.verify_witness():  # pragma: no cover - generator bug
            raise AssertionError("generated witness does not verify")
        return self


class _Assembler:
    """GraphBuilder plus an annotation per vertex and prefixed edge ids."""

    def __init__(self):
        self.b = GraphBuilder()
        self.notes: Dict[str, str] = {}
        self._pair_ids: Dict[Tuple[str, str], List[str]] = {}

    def vertex(self, v: str, note: str) -> str:
        if v in self.notes:
            raise AssertionError(f"vertex {v} added twice")
        self.b.add_vertex(v)
        self.notes[v] = note
        return v

    def edge(self, u: str, v: str) -> str:
        e = self.b.add_edge(u, v)
        self._pair_ids.setdefault((min(u, v), max(u, v)), []).append(e)
        return e

    def edge_id(self, u: str, v: str) -> str:
        return self._pair_ids[(min(u, v), max(u, v))][0]

    def embed(self, g: Graph, name, note, rename: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
        """Copy g in; ``name(v)`` gives fresh vertex ids, ``rename`` merges vertices into existing ones."""
        rename = rename or {}
        vmap = {}
        for v in g.sorted_vertices():
            if v in rename:
                vmap[v] = rename[v]
            else:
                vmap[v] = self.vertex(name(v), note(v))
        for e in sorted(g.ordinary_edges):
            a, b = g.incidence[e]
            self.edge(vmap[a], vmap[b])
        if g.loops or g.semi_edges:
            raise GadgetError("gadget pieces must be simple graphs")
        return vmap

    def graph(self) -> Graph:
        return self.b.build()


def _degree_check(g: Graph, expected: Mapping[str, int]):
    for v, d in expected.items():
        got = len(g.ordinary_at(v))
        if got != d:  # pragma: no cover - generator bug
            raise AssertionError(f"vertex {v} has degree {got}, expected {d}")


def one_factorization(n: int) -> List[List[Tuple[int, int]]]:
    """Round-robin split of K_n (n even) into n-1 perfect matchings on 0..n-1."""
    if n < 2 or n % 2:
        raise GadgetError("one-factorization needs an even number of vertices")
    t = n - 1
    return [[(t, r)] + [((r - i) % t, (r + i) % t) for i in range(1, (t - 1) // 2 + 1)] for r in range(t)]


# -- one-vertex targets: disjoint perfect matchings -------------------------------------------


def _matchings_core(d: int):
    if d < 3:
        raise GadgetError("matchings gadget needs d >= 3")
    t = d + 1 if (d + 1) % 2 else d + 2
    classes = one_factorization(t + 1)
    last = (t + 1) // 2  # class holding the pair (0, 1)
    order = [0, 1] + [r for r in range(2, t) if r != last] + [last]
    ms = [classes[r] for r in order]
    x, y, z = t, 0, 1
    assert (x, y) in ms[0] and (x, z) in ms[1] and ((y, z) in ms[-1] or (z, y) in ms[-1])
    pairs = [p for m in ms[:d] for p in m if set(p) not in ({x, y}, {x, z})] + [(y, z)]
    return t, x, y, z, pairs, ms[2:d]


def build_matchings_gadget(d: int) -> ReductionArtifact:
    """Auxiliary graph with one vertex of degree d-2, the rest of degree d."""
    t, x, y, z, pairs, keep = _matchings_core(d)
    asm = _Assembler()
    role = {x: "x (degree d-2)", y: "y", z: "z"}
    for i in range(t + 1):
        asm.vertex(str(i), role.get(i, f"clique vertex {i}"))
    for a, b in pairs:
        asm.edge(str(a), str(b))
    g = asm.graph()
    _degree_check(g, {str(i): (d - 2 if i == x else d) for i in range(t + 1)})
    witness = [subset(asm.edge_id(str(a), str(b)) for a, b in m) for m in keep]
    return ReductionArtifact(
        g, asm.notes, f"H has {d - 2} pairwise disjoint perfect matchings; deg(x) = {d - 2}, other degrees {d}", witness
    )._finish()


def build_onevertex_instance(g: Graph, k: int, d: int) -> ReductionArtifact:
    """d-regular G' with k disjoint perfect matchings iff the (k+1)-regular g is (k+1)-edge-colourable."""
    if k < 1 or d < k + 2:
        raise GadgetError("need k >= 1 and d >= k+2")
    if not g.is_simple() or (g.vertices and is_regular(g) != k + 1):
        raise GadgetError(f"source graph must be simple and {k + 1}-regular")
    hart = build_matchings_gadget(d)
    h = hart.instance
    hx = next(v for v, note in hart.annotations.items() if note.startswith("x "))
    asm = _Assembler()
    copies = {}
    for j in (1, 2):
        copies[j] = asm.embed(g, lambda v, j=j: f"{j}:{v}", lambda v, j=j: f"copy-{j} of source vertex {v}")
    hmaps = {}
    for u in g.sorted_vertices():
        for i in range(1, d - k):
            hm = asm.embed(h, lambda v, u=u, i=i: f"H:{u}:{i}:{v}", lambda v, u=u, i=i: f"H_({u},{i}) vertex {v}" + (" (x)" if v == hx else ""))
            hmaps[(u, i)] = hm
            asm.edge(copies[1][u], hm[hx])
            asm.edge(copies[2][u], hm[hx])
    gp = asm.graph()
    if gp.vertices and is_regular(gp) != d:  # pragma: no cover
        raise AssertionError("instance is not d-regular")
    witness = None
    base = disjoint_perfect_matchings(g, k)
    if base is not None:
        classes: List[set] = [set() for _ in range(k)]
        for h_idx, m in enumerate(base):
            for e in m.edges:
                a, b = g.incidence[e]
                for j in (1, 2):
                    classes[h_idx].add(asm.edge_id(copies[j][a], copies[j][b]))
        for (u, i), hm in hmaps.items():
            for h_idx, m in enumerate(hart.witness[:k]):
                for e in m.edges:
                    a, b = h.incidence[e]
                    classes[h_idx].add(asm.edge_id(hm[a], hm[b]))
        witness = [subset(c) for c in classes]
    n = len(g.vertices)
    claim = (
        f"G' ({2 * n + n * (d - k - 1) * len(h.vertices)} vertices, {d}-regular) has {k} pairwise disjoint "
        f"perfect matchings iff the source graph is {k + 1}-edge-colourable"
    )
    return ReductionArtifact(gp, asm.notes, claim, witness)._finish()


# -- two-vertex targets with different degrees -----------------------------------------------------


def _smallest_even_above(n: int) -> int:
    return n + 1 if (n + 1) % 2 == 0 else n + 2


def _galb(asm: _Assembler, a: int, l: int, b: int, name, note, v_ids=None, w_ids=None):
    """Add G_{a,l,b}; existing vertices may stand in for the v and w connectors.

    Returns (x rows, y rows, kept x classes, kept y classes).
    """
    c = _smallest_even_above(max(a, b))
    classes = one_factorization(c)
    x_keep, y_keep = classes[:b], classes[:a]
    v = v_ids or [asm.vertex(name(f"v{j}"), note(f"connector v{j}")) for j in range(1, l + 1)]
    w = w_ids or [asm.vertex(name(f"w{j}"), note(f"connector w{j}")) for j in range(1, l + 1)]
    x = [[asm.vertex(name(f"x{j}_{i}"), note(f"x-clique {j} vertex {i}")) for i in range(1, c + 1)] for j in range(1, l + 1)]
    y = [[asm.vertex(name(f"y{j}_{i}"), note(f"y-clique {j} vertex {i}")) for i in range(1, c + 1)] for j in range(1, l + 1)]
    for j in range(l):
        for mm in x_keep:
            for s, t in mm:
                asm.edge(x[j][s], x[j][t])
        for mm in y_keep:
            for s, t in mm:
                asm.edge(y[j][s], y[j][t])
    for j in range(l):
        for jj in range(l):
            asm.edge(v[j], x[jj][0])
            asm.edge(w[j], y[jj][0])
            for i in range(1, c):
                asm.edge(x[j][i], y[jj][i])
    return x, y, x_keep, y_keep


def build_Galb(a: int, l: int, b: int) -> ReductionArtifact:
    if min(a, b) < 0 or l < 1:
        raise GadgetError("need a, b >= 0 and l >= 1")
    asm = _Assembler()
    x, y, _, _ = _galb(asm, a, l, b, lambda s: s, lambda s: s)
    c = _smallest_even_above(max(a, b))
    g = asm.graph()
    exp = {u: b + l for row in x for u in row}
    exp.update({u: a + l for row in y for u in row})
    exp.update({f"{z}{j}": l for z in "vw" for j in range(1, l + 1)})
    _degree_check(g, exp)
    claim = f"gadget G_({a},{l},{b}): x-cliques of inner degree {b}, y-cliques of inner degree {a}, c = {c}"
    return ReductionArtifact(g, asm.notes, claim)._finish()


def build_Gab(a: int, b: int) -> ReductionArtifact:
    return build_Galb(a, 1, b)


def circulant_bipartite(n: int, a: int) -> Graph:
    """a-regular bipartite graph on n vertices: i joins n/2 + (i+j mod n/2) for j < a."""
    if n % 2:
        raise GadgetError("companion graph needs an even number of vertices")
    half = n // 2
    if a > half:
        raise GadgetError(f"no simple {a}-regular bipartite graph on {n} vertices")
    b = GraphBuilder()
    b.add_vertices(str(i) for i in range(n))
    for i in range(half):
        for j in range(a):
            b.add_edge(str(i), str(half + (i + j) % half))
    return b.build()


def _classes_to_F(emap: Dict[str, str], classes: Sequence[Iterable[str]], k: int, m: int, semi: str, loop: str):
    """First k matchings go to semi-edges, consecutive pairs of the rest to loops."""
    if len(classes) != k + 2 * m:  # pragma: no cover
        raise AssertionError("wrong number of classes")
    for i in range(k):
        for e in classes[i]:
            emap[e] = f"{semi}{i + 1}"
    for j in range(m):
        for e in list(classes[k + 2 * j]) + list(classes[k + 2 * j + 1]):
            emap[e] = f"{loop}{j + 1}"


def build_nonregular_instance(g: Graph, k: int, m: int, l: int, p: int, q: int) -> ReductionArtifact:
    """G' covering W(k,m,l,p,q) iff the (2p+q)-regular g covers F(q,p)."""
    a, b = k + 2 * m, 2 * p + q
    if min(k, m, p, q) < 0 or l < 1:
        raise GadgetError("parameters must be non-negative with l >= 1")
    if a == b:
        raise GadgetError("the construction needs k+2m != 2p+q")
    n = len(g.vertices)
    if n == 0 or n % 2:
        raise GadgetError("source graph needs a positive even number of vertices")
    if is_regular(g) != b or not g.is_simple():
        raise GadgetError(f"source graph must be simple and {b}-regular")
    comp = circulant_bipartite(n, a)
    gverts = g.sorted_vertices()
    asm = _Assembler()
    tcopy, ucopy = [], []
    for j in range(1, l + 1):
        tcopy.append(asm.embed(g, lambda v, j=j: f"g{j}:{v}", lambda v, j=j: f"copy-{j} of source vertex {v}"))
        ucopy.append(asm.embed(comp, lambda v, j=j: f"u{j}:{v}", lambda v, j=j: f"companion copy-{j} vertex {v}"))
    gadgets = []
    for h in range(n):
        gadgets.append(
            _galb(
                asm, a, l, b,
                lambda z, h=h: f"G{h}:{z}",
                lambda z, h=h: f"gadget {h} {z}",
                v_ids=[ucopy[j][str(h)] for j in range(l)],
                w_ids=[tcopy[j][gverts[h]] for j in range(l)],
            )
        )
    gp = asm.graph()
    fv = {}
    for u in gp.vertices:
        d = len(gp.ordinary_at(u))
        fv[u] = BLUE if d == a + l else RED if d == b + l else None
        if fv[u] is None:  # pragma: no cover
            raise AssertionError(f"unexpected degree {d} at {u}")
    target = two_vertex(k, m, l, p, q)
    witness = None
    base = decide_F(g, q, p)
    if base.yes:
        emap: Dict[str, str] = {}
        cross = [e for e in gp.ordinary_edges if len({fv[z] for z in gp.incidence[e]}) == 2]
        for i, cls in enumerate(proper_bipartite_coloring(gp, l, cross)):
            for e in cls.edges:
                emap[e] = f"bar{i + 1}"
        for j in range(l):
            col = bipartite_edge_coloring(_copy_subgraph(gp, ucopy[j]), a) if a else []
            _classes_to_F(emap, [c.edges for c in col], k, m, "sb", "lb")
            for e, img in base.witness.edge_map.items():
                u_, v_ = g.incidence[e]
                kind = "sr" if img.startswith("s") else "lr"
                emap[asm.edge_id(tcopy[j][u_], tcopy[j][v_])] = kind + img[1:]
        for x_rows, y_rows, x_keep, y_keep in gadgets:
            for row in x_rows:
                _classes_to_F(emap, [[asm.edge_id(row[s], row[t]) for s, t in mm] for mm in x_keep], q, p, "sr", "lr")
            for row in y_rows:
                _classes_to_F(emap, [[asm.edge_id(row[s], row[t]) for s, t in mm] for mm in y_keep], k, m, "sb", "lb")
        witness = CoverMap(fv, emap)
    c = _smallest_even_above(max(a, b))
    claim = (
        f"G' ({2 * l * n + 2 * c * l * n} vertices) covers W({k},{m},{l},{p},{q}) iff the source graph covers F({q},{p})"
    )
    return ReductionArtifact(gp, asm.notes, claim, witness, target)._finish()


def _copy_subgraph(g: Graph, vmap: Mapping[str, str]) -> Graph:
    return g.subgraph(vmap.values())


# -- (b, c)-colouring bridges -----------------------------------------------------------------------


def build_bridge_general(b: int, c: int) -> ReductionArtifact:
    """Bridge for (b, c) with b >= c+2: two K_{b,b} joined by c matchings on each side, connectors x and t."""
    if c < 2 or b < c + 2:
        raise GadgetError("bridge needs c >= 2 and b >= c+2")
    asm, witness = _bridge_general_into(_Assembler(), b, c, lambda s: s, "")
    g = asm.graph()
    exp = {v: b + c for v in g.vertices if v not in ("x", "t")}
    exp.update({"x": 1, "t": 1})
    _degree_check(g, exp)
    col = TwoColoring(witness, b, c)
    claim = (
        f"in every colouring where each inner vertex has {b} own-colour and {c} other-colour neighbours, "
        "either x, y, s, t share a colour or x = s differs from y = t"
    )
    return ReductionArtifact(g, asm.notes, claim, col, frame=frozenset(exp.keys() - {"x", "t"}))._finish()


def _bridge_general_into(asm: _Assembler, b: int, c: int, name, prefix: str, x_id=None, t_id=None):
    parts = {}
    for side in "ABCD":
        parts[side] = [asm.vertex(name(f"{side.lower()}{i}"), f"{prefix}class {side} vertex {i}") for i in range(b)]
    A, B, C, D = parts["A"], parts["B"], parts["C"], parts["D"]
    y, s = A[0], B[0]
    for P, Q in ((A, B), (C, D)):
        for i in range(b):
            for j in range(b):
                if (P[i], Q[j]) != (y, s):
                    asm.edge(P[i], Q[j])
    for j in range(c):
        for i in range(b):
            asm.edge(A[i], C[(i + j) % b])
            asm.edge(B[i], D[(i + j) % b])
    x = x_id or asm.vertex(name("x"), f"{prefix}connector x")
    t = t_id or asm.vertex(name("t"), f"{prefix}connector t")
    asm.edge(x, y)
    asm.edge(s, t)
    asm.notes[y] += " (y)"
    asm.notes[s] += " (s)"
    col = {v: C_RED for v in A + B}
    col.update({v: C_BLUE for v in C + D})
    if x_id is None:
        col[x] = col[t] = C_RED
    return asm, col


def build_bridge_cplus1(c: int) -> ReductionArtifact:
    """Bridge for (c+1, c): inner vertices of degree 2c+1, connectors x and y of degree c."""
    if c < 2:
        raise GadgetError("bridge needs c >= 2")
    asm = _Assembler()
    col = _bridge_cplus1_into(asm, c, lambda s: s, "", C_RED)
    g = asm.graph()
    exp = {v: 2 * c + 1 for v in g.vertices if v not in ("x", "y")}
    exp.update({"x": c, "y": c})
    _degree_check(g, exp)
    col["x"] = col["y"] = C_RED
    claim = f"in every colouring where each inner vertex has {c + 1} own-colour neighbours, x, y and r_i, t_i (i <= {c}) share a colour"
    frame = frozenset(v for v in g.vertices if v not in ("x", "y"))
    return ReductionArtifact(g, asm.notes, claim, TwoColoring(col, c + 1, c), frame=frame)._finish()


def _bridge_cplus1_into(asm: _Assembler, c: int, name, prefix: str, colour: str, x_id=None, y_id=None) -> Dict[str, str]:
    idx = range(1, c + 2)
    fam = {f: {i: asm.vertex(name(f"{f}{i}"), f"{prefix}inner {f}{i}") for i in idx} for f in "rstw"}
    r, s, t, w = fam["r"], fam["s"], fam["t"], fam["w"]
    x = x_id or asm.vertex(name("x"), f"{prefix}connector x")
    y = y_id or asm.vertex(name("y"), f"{prefix}connector y")
    for i in range(1, c + 1):
        asm.edge(x, r[i])
        asm.edge(y, t[i])
    for i in idx:
        for j in idx:
            if not (i == j and i <= c):
                asm.edge(r[i], t[j])
            asm.edge(s[i], w[j])
            if i != j:
                asm.edge(r[i], s[j])
                asm.edge(t[i], w[j])
    col = {}
    for i in idx:
        col[r[i]] = col[t[i]] = colour
        col[s[i]] = col[w[i]] = flip(colour)
    return col


def build_F_gadget(b: int) -> ReductionArtifact:
    """Two K_{b,b} joined by two perfect matchings, with pendant u, v replacing the edge u'v'."""
    if b < 3:
        raise GadgetError("F gadget needs b >= 3")
    asm = _Assembler()
    col = _F_gadget_into(asm, b, lambda s: s, "")
    g = asm.graph()
    exp = {v: b + 1 for v in g.vertices if v not in ("u", "v")}
    exp.update({"u": 1, "v": 1})
    _degree_check(g, exp)
    claim = f"in every partial ({b},1)-colouring, u, v, u' and v' share a colour"
    frame = frozenset(v for v in g.vertices if v not in ("u", "v"))
    return ReductionArtifact(g, asm.notes, claim, TwoColoring(col, b, 1), frame=frame)._finish()


def _F_gadget_into(asm: _Assembler, b: int, name, prefix: str, u_id=None, v_id=None) -> Dict[str, str]:
    sets = {s: [asm.vertex(name(f"{s}_{i}"), f"{prefix}{s} vertex {i}") for i in range(b)] for s in ("A1", "B1", "A2", "B2")}
    A1, B1, A2, B2 = sets["A1"], sets["B1"], sets["A2"], sets["B2"]
    up, vp = A1[0], B1[0]
    for P, Q in ((A1, B1), (A2, B2)):
        for p_ in P:
            for q_ in Q:
                if (p_, q_) != (up, vp):
                    asm.edge(p_, q_)
    for i in range(b):
        asm.edge(A1[i], A2[i])
        asm.edge(B1[i], B2[i])
    u = u_id or asm.vertex(name("u"), f"{prefix}pendant u")
    v = v_id or asm.vertex(name("v"), f"{prefix}pendant v")
    asm.edge(u, up)
    asm.edge(v, vp)
    asm.notes[up] += " (u')"
    asm.notes[vp] += " (v')"
    col = {z: C_RED for z in A2 + B2}
    col.update({z: C_BLUE for z in A1 + B1})
    if u_id is None:
        col[u] = col[v] = C_BLUE
    return col


def _two_copies(asm: _Assembler, g: Graph):
    part = bipartition(g)
    if part is None or not g.is_simple():
        raise GadgetError("source graph must be simple and bipartite")
    return [asm.embed(g, lambda v, j=j: f"{j}:{v}", lambda v, j=j: f"copy-{j} of source vertex {v}") for j in (1, 2)]


def _lift_coloring(g: Graph, copies, own: int, other: int) -> Optional[Dict[str, str]]:
    from .coloring import find_bc_coloring

    base = find_bc_coloring(g, own, other)
    if base is None:
        return None
    col = {}
    for cp in copies:
        for v, z in cp.items():
            col[z] = base.color[v]
    return col, base


def build_bb1_instance(g: Graph, b: int, c: int) -> ReductionArtifact:
    """G' with a (b, c)-colouring iff the (1+c)-regular bipartite g has a (1, c)-colouring.

    For b >= c+2 every source vertex gets b-1 general bridges; for b = c+1
    it gets a single (c+1, c) bridge.
    """
    if c < 2 or b < c + 1:
        raise GadgetError("need c >= 2 and b >= c+1")
    if g.vertices and is_regular(g) != 1 + c:
        raise GadgetError(f"source graph must be {1 + c}-regular")
    asm = _Assembler()
    copies = _two_copies(asm, g)
    lifted = _lift_coloring(g, copies, 1, c)
    col: Dict[str, str] = dict(lifted[0]) if lifted else {}
    for u in g.sorted_vertices():
        u1, u2 = copies[0][u], copies[1][u]
        if b == c + 1:
            part = _bridge_cplus1_into(
                asm, c, lambda s, u=u: f"B:{u}:{s}", f"bridge-({u}) ", col.get(u1, C_RED), x_id=u1, y_id=u2
            )
            col.update(part)
        else:
            for i in range(1, b):
                _, part = _bridge_general_into(
                    asm, b, c, lambda s, u=u, i=i: f"B:{u}:{i}:{s}", f"bridge-({u},{i}) ", x_id=u1, t_id=u2
                )
                if lifted and col[u1] == C_BLUE:
                    part = {z: flip(k) for z, k in part.items()}
                col.update(part)
    gp = asm.graph()
    _degree_check(gp, {v: b + c for v in gp.vertices})
    witness = TwoColoring(col, b, c) if lifted else None
    claim = f"G' has a ({b},{c})-colouring iff the source graph has a (1,{c})-colouring"
    return ReductionArtifact(gp, asm.notes, claim, witness, frame=frozenset(gp.vertices))._finish()


def build_b1_instance(g: Graph, b: int) -> ReductionArtifact:
    """(b+1)-regular G' with a (b,1)-colouring iff the cubic bipartite g has a (2,1)-colouring."""
    if b < 3:
        raise GadgetError("need b >= 3")
    if g.vertices and is_regular(g) != 3:
        raise GadgetError("source graph must be cubic")
    asm = _Assembler()
    copies = _two_copies(asm, g)
    lifted = _lift_coloring(g, copies, 2, 1)
    col: Dict[str, str] = dict(lifted[0]) if lifted else {}
    for w in g.sorted_vertices():
        w1, w2 = copies[0][w], copies[1][w]
        for i in range(1, b - 1):
            part = _F_gadget_into(asm, b, lambda s, w=w, i=i: f"F:{w}:{i}:{s}", f"F-({w},{i}) ", u_id=w1, v_id=w2)
            if lifted and col[w1] == C_RED:
                part = {z: flip(k) for z, k in part.items()}
            col.update(part)
    gp = asm.graph()
    _degree_check(gp, {v: b + 1 for v in gp.vertices})
    witness = TwoColoring(col, b, 1) if lifted else None
    claim = f"G' has a ({b},1)-colouring iff the source graph has a (2,1)-colouring"
    return ReductionArtifact(gp, asm.notes, claim, witness, frame=frozenset(gp.vertices))._finish()


# -- (b, b)-colouring from (b-in-2b)-SAT ---------------------------------------------------------------


@dataclass(frozen=True)
class SatFormula:
    variables: FrozenSet[str]
    clauses: Tuple[Tuple[str, ...], ...]
    k: int
    q: int

    def __post_init__(self):
        for i, cl in enumerate(self.clauses):
            if len(cl) != 2 * self.k or len(set(cl)) != len(cl):
                raise GadgetError(f"clause {i + 1} must have {2 * self.k} distinct variables")
            if not set(cl) <= self.variables:
                raise GadgetError(f"clause {i + 1} uses undeclared variables")
        occ = Counter(v for cl in self.clauses for v in cl)
        bad = sorted(v for v in self.variables if occ[v] != self.q)
        if bad:
            raise GadgetError(f"variable {bad[0]!r} occurs {occ[bad[0]]} times, expected {self.q}")

    @classmethod
    def from_clauses(cls, clauses: Sequence[Sequence[str]], k: int, q: int) -> "SatFormula":
        cl = tuple(tuple(c) for c in clauses)
        return cls(frozenset(v for c in cl for v in c), cl, k, q)

    def satisfied_by(self, assignment: Mapping[str, bool]) -> bool:
        return all(sum(bool(assignment[v]) for v in cl) == self.k for cl in self.clauses)


def parse_formula(text: str) -> SatFormula:
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if header is None:
            if len(tok) != 4 or tok[:2] != ["p", "kin2k"]:
                raise GraphFormatError("expected header 'p kin2k <k> <q>'", lineno)
            try:
                header = (int(tok[2]), int(tok[3]))
            except ValueError:
                raise GraphFormatError("k and q must be integers", lineno) from None
            continue
        clauses.append(tok)
    if header is None:
        raise GraphFormatError("missing header 'p kin2k <k> <q>'")
    return SatFormula.from_clauses(clauses, *header)


def serialize_formula(phi: SatFormula) -> str:
    return f"p kin2k {phi.k} {phi.q}\n" + "".join(" ".join(c) + "\n" for c in phi.clauses)


def _vb_block(b: int) -> Graph:
    """K_{2b+1,2b+1} minus u_i v_i (all i) and u_i v_{i+b} (2 <= i <= b+1)."""
    n = 2 * b + 1
    gb = GraphBuilder()
    gb.add_vertices([f"u{i}" for i in range(1, n + 1)] + [f"v{i}" for i in range(1, n + 1)])
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j or (2 <= i <= b + 1 and j == i + b):
                continue
            gb.add_edge(f"u{i}", f"v{j}")
    return gb.build()


def _variable_into(asm: _Assembler, b: int, var: str, value: Optional[bool]):
    """Variable gadget for ``var``; returns (occurrence ids, colouring or None)."""
    block = _vb_block(b)
    occ = [asm.vertex(f"{var}.x{j}", f"occurrence x_{j} of variable {var}" + (" (left)" if j <= b + 1 else " (right)"))
           for j in range(1, 2 * b + 3)]
    lefts, rights = [], []
    col: Dict[str, str] = {}
    # variable-dependent class colours for value true; swapped when false
    tv = C_BLUE if value else C_RED
    fv_ = flip(tv)
    for unit in range(1, b + 2):
        pre = f"{var}.{unit}"
        k1 = asm.embed(block, lambda v: f"{pre}.K1{v}", lambda v: f"variable {var} unit {unit} K1 {v}")
        k2 = asm.embed(block, lambda v: f"{pre}.K2{v}", lambda v: f"variable {var} unit {unit} K2 {v}")
        mid = asm.vertex(f"{pre}.M", f"variable {var} unit {unit} middle vertex")
        left = asm.vertex(f"{pre}.L", f"variable {var} unit {unit} left vertex")
        right = asm.vertex(f"{pre}.R", f"variable {var} unit {unit} right vertex")
        for i in range(b + 2, 2 * b + 2):
            asm.edge(mid, k1[f"v{i}"])
            asm.edge(right, k2[f"v{i}"])
        for i in range(2, b + 2):
            asm.edge(mid, k2[f"u{i}"])
            asm.edge(left, k1[f"u{i}"])
        lefts.append(left)
        rights.append(right)
        if value is not None:
            col[left] = C_BLUE
            col[right] = C_RED
            for i in range(1, 2 * b + 2):
                col[k1[f"v{i}"]] = C_BLUE if 2 <= i <= b + 1 else C_RED
                col[k2[f"u{i}"]] = C_BLUE if i <= b + 1 else C_RED
                col[k1[f"u{i}"]] = tv if i >= b + 2 else fv_
                col[k2[f"v{i}"]] = tv if 2 <= i <= b + 1 else fv_
            col[mid] = tv
    for j in range(b + 1):
        for i in range(b + 1):
            if i != j:
                asm.edge(occ[j], lefts[i])
                asm.edge(occ[b + 1 + j], rights[i])
    if value is not None:
        col.update({o: tv for o in occ})
    return occ, (col if value is not None else None)


def build_variable_gadget(b: int) -> ReductionArtifact:
    if b < 2:
        raise GadgetError("variable gadget needs b >= 2")
    asm = _Assembler()
    occ, col = _variable_into(asm, b, "x", True)
    g = asm.graph()
    exp = {v: 2 * b for v in g.vertices if v not in occ}
    exp.update({o: b for o in occ})
    _degree_check(g, exp)
    claim = f"in every ({b},{b})-colouring of a formula instance all {2 * b + 2} occurrence vertices share a colour"
    frame = frozenset(exp.keys() - set(occ))
    return ReductionArtifact(g, asm.notes, claim, TwoColoring(col, b, b), frame=frame)._finish()


def build_variable_block(b: int) -> ReductionArtifact:
    """K1 of the variable gadget with its left and middle vertices attached."""
    if b < 2:
        raise GadgetError("variable gadget needs b >= 2")
    asm = _Assembler()
    k1 = asm.embed(_vb_block(b), lambda v: f"K1{v}", lambda v: f"K1 {v}")
    left = asm.vertex("L", "left vertex")
    mid = asm.vertex("M", "middle vertex")
    for i in range(2, b + 2):
        asm.edge(left, k1[f"u{i}"])
    for i in range(b + 2, 2 * b + 2):
        asm.edge(mid, k1[f"v{i}"])
    g = asm.graph()
    _degree_check(g, {v: 2 * b for v in k1.values()})
    claim = f"in every colouring where each K1 vertex has {b} neighbours of each colour, u_2..u_{b + 1} share a colour"
    return ReductionArtifact(g, asm.notes, claim, frame=frozenset(k1.values()))._finish()


def build_bb_instance(phi: SatFormula, b: int, assignment: Optional[Mapping[str, bool]] = None) -> ReductionArtifact:
    """Graph with a (b, b)-colouring iff phi has an assignment with exactly b true variables per clause."""
    if b < 2:
        raise GadgetError("need b >= 2")
    if phi.k != b or phi.q != b + 1:
        raise GadgetError(f"formula must be ({b}-in-{2 * b})-SAT_{b + 1}")
    if assignment is not None:
        if set(assignment) != set(phi.variables):
            raise GadgetError("assignment must cover exactly the formula's variables")
        if not phi.satisfied_by(assignment):
            raise GadgetError("assignment does not put exactly b true variables in every clause")
    asm = _Assembler()
    occ: Dict[str, List[str]] = {}
    col: Dict[str, str] = {}
    for var in sorted(phi.variables):
        occ[var], part = _variable_into(asm, b, var, None if assignment is None else assignment[var])
        if part:
            col.update(part)
    rank: Counter = Counter()
    for i, clause in enumerate(phi.clauses, start=1):
        for side, shift, colour in (("l", 0, C_RED), ("r", b + 1, C_BLUE)):
            small = [asm.vertex(f"C{i}.{side}{j}", f"clause {i} {'left' if side == 'l' else 'right'} copy small part {j}")
                     for j in range(1, b + 1)]
            for var in clause:
                y = occ[var][shift + rank[var]]
                for s in small:
                    asm.edge(s, y)
            col.update({s: colour for s in small})
        for var in clause:
            rank[var] += 1
    g = asm.graph()
    _degree_check(g, {v: 2 * b for v in g.vertices})
    witness = TwoColoring(col, b, b) if assignment is not None else None
    claim = f"the formula has an exactly-{b}-of-{2 * b} assignment iff G has a ({b},{b})-colouring"
    return ReductionArtifact(g, asm.notes, claim, witness, frame=frozenset(g.vertices))._finish()


def assignment_from_coloring(phi: SatFormula, col: TwoColoring, annotations: Mapping[str, str]) -> Dict[str, bool]:
    """Truth values read off the annotated first occurrence vertex of each variable (blue = true)."""
    first = {}
    for v, note in annotations.items():
        if note.startswith("occurrence x_1 of variable "):
            first[note[len("occurrence x_1 of variable "):].split(" ")[0]] = v
    missing = sorted(set(phi.variables) - set(first))
    if missing:
        raise GadgetError(f"no occurrence annotation for variable {missing[0]!r}")
    return {x: col.color[first[x]] == C_BLUE for x in sorted(phi.variables)}


# -- text format -----------------------------------------------------------------------------------


def serialize_annotations(notes: Mapping[str, str]) -> str:
    return "".join(f"a {v} {label}\n" for v, label in sorted(notes.items()))


def parse_annotations(text: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split(None, 2)
        if len(tok) < 3 or tok[0] != "a":
            raise GraphFormatError("expected 'a <vertex-id> <label>'", lineno)
        if tok[1] in out:
            raise GraphFormatError(f"duplicate annotation for {tok[1]!r}", lineno)
        out[tok[1]] = tok[2]
    return out
