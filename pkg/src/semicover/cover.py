"""Covering projections: representation, verification, degree-obedience."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .graph import LOOP, ORDINARY, SEMI, Graph, GraphFormatError, degree


class CoverMapError(ValueError):
    """The map is not total or names elements that do not exist."""


@dataclass
class CoverMap:
    vertex_map: Dict[str, str]
    edge_map: Dict[str, str]

    def fibre(self, x: str) -> List[str]:
        return sorted(u for u, y in self.vertex_map.items() if y == x)


@dataclass
class VerifyReport:
    violations: List[Tuple[int, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, condition: int, element: str, message: str) -> None:
        self.violations.append((condition, element, message))

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"condition {c}: {el}: {msg}" for c, el, msg in self.violations)


def _check_total(g: Graph, h: Graph, f: CoverMap) -> None:
    missing_v = g.vertices - set(f.vertex_map)
    missing_e = g.edges - set(f.edge_map)
    if missing_v or missing_e:
        what = sorted(missing_v) + sorted(missing_e)
        raise CoverMapError(f"map is not total; no image for {what[:5]}")
    extra = (set(f.vertex_map) - g.vertices) | (set(f.edge_map) - g.edges)
    if extra:
        raise CoverMapError(f"map names unknown source elements {sorted(extra)[:5]}")
    bad = [x for x in f.vertex_map.values() if x not in h.vertices]
    bad += [e for e in f.edge_map.values() if e not in h.incidence]
    if bad:
        raise CoverMapError(f"map names unknown target elements {sorted(set(bad))[:5]}")


def verify_cover(g: Graph, h: Graph, f: CoverMap) -> VerifyReport:
    """Check all eight covering conditions, collecting every violation."""
    _check_total(g, h, f)
    fv, fe = f.vertex_map, f.edge_map
    report = VerifyReport()

    for e in sorted(g.edges):
        image = fe[e]
        kind, hkind = g.kind(e), h.kind(image)
        ends = g.ends(e)
        if kind == LOOP:
            if hkind != LOOP:
                report.add(1, e, f"loop mapped to {hkind} edge {image}")
            elif h.incidence[image] != fv[ends[0]]:
                report.add(3, e, f"image loop {image} is not at f({ends[0]})")
        elif kind == SEMI:
            if hkind != SEMI:
                report.add(2, e, f"semi-edge mapped to {hkind} edge {image}")
            elif h.incidence[image] != fv[ends[0]]:
                report.add(3, e, f"image semi-edge {image} is not at f({ends[0]})")
        else:
            u, v = ends
            if hkind == ORDINARY:
                if fv[u] == fv[v] or set(h.incidence[image]) != {fv[u], fv[v]}:
                    report.add(5, e, f"ends map to {fv[u]},{fv[v]} but {image} joins {h.incidence[image]}")
            elif not (fv[u] == fv[v] == h.incidence[image]):
                report.add(4, e, f"ends map to {fv[u]},{fv[v]} but {image} sits at {h.incidence[image]}")

    # local bijectivity: how many times each target edge is hit at each source vertex
    hits: Dict[str, Counter] = defaultdict(Counter)
    for e in g.edges:
        if g.kind(e) == LOOP:
            hits[g.ends(e)[0]][fe[e]] += 2
        else:
            for u in g.ends(e):
                hits[u][fe[e]] += 1

    fibres: Dict[str, List[str]] = defaultdict(list)
    for u in sorted(g.vertices):
        fibres[fv[u]].append(u)

    for x in sorted(h.incidence):
        hkind = h.kind(x)
        if hkind == LOOP:
            cond, need, span = 6, 2, fibres[h.incidence[x]]
        elif hkind == SEMI:
            cond, need, span = 7, 1, fibres[h.incidence[x]]
        else:
            a, b = h.incidence[x]
            cond, need, span = 8, 1, fibres[a] + fibres[b]
        for u in span:
            got = hits[u][x]
            if got != need:
                report.add(cond, u, f"{got} preimage incidences of {x} at {u}, expected {need}")
    return report


def is_degree_obedient(g: Graph, h: Graph, fv: Mapping[str, str]) -> bool:
    return not obedience_violations(g, h, fv)


def obedience_violations(g: Graph, h: Graph, fv: Mapping[str, str]) -> List[Tuple[int, str]]:
    """Vertices of ``g`` breaking the degree-obedience conditions, as ``(condition, vertex)``."""
    missing = g.vertices - set(fv)
    if missing:
        raise CoverMapError(f"vertex map is not total; no image for {sorted(missing)[:5]}")
    bad = sorted({x for x in fv.values() if x not in h.vertices})
    if bad:
        raise CoverMapError(f"vertex map names unknown target vertices {bad[:5]}")
    out = []
    for x in sorted(g.vertices):
        u = fv[x]
        towards = Counter(fv[w] for w in g.neighbors(x))
        others = set(towards) | {v for v in h.neighbors(u)}
        others.discard(u)
        if any(h.multiplicity(u, v) != towards[v] for v in others):
            out.append((1, x))
        dh, dg = degree(h, u), degree(g, x)
        if dh.semi + 2 * dh.loops != dg.semi + 2 * dg.loops + towards[u]:
            out.append((2, x))
        if dg.semi > dh.semi:
            out.append((3, x))
    return out


def fold_number(g: Graph, h: Graph, f: CoverMap) -> Optional[int]:
    """Common fibre size of a verified cover, or None when fibres differ."""
    report = verify_cover(g, h, f)
    if not report.ok:
        raise CoverMapError(f"not a covering projection:\n{report}")
    sizes = Counter(f.vertex_map.values())
    values = {sizes.get(x, 0) for x in h.vertices}
    if len(values) != 1:
        return None
    return values.pop()


# -- text format -----------------------------------------------------------------


def parse_cover_map(text: str) -> CoverMap:
    vmap: Dict[str, str] = {}
    emap: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 4 or tok[0] != "m" or tok[1] not in ("v", "e"):
            raise GraphFormatError("expected 'm v <g> <h>' or 'm e <g> <h>'", lineno)
        target = vmap if tok[1] == "v" else emap
        if tok[2] in target:
            raise GraphFormatError(f"duplicate image for {tok[2]!r}", lineno)
        target[tok[2]] = tok[3]
    return CoverMap(vmap, emap)


def serialize_cover_map(f: CoverMap) -> str:
    lines = [f"m v {u} {x}" for u, x in sorted(f.vertex_map.items())]
    lines += [f"m e {e} {x}" for e, x in sorted(f.edge_map.items())]
    return "\n".join(lines) + "\n"
