"""Red/blue vertex colourings with a prescribed number of same- and other-colour neighbours."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Set

from .factors import SearchBudgetExceeded
from .graph import Graph, GraphError, GraphFormatError, connected_components

RED = "red"
BLUE = "blue"
COLORS = (RED, BLUE)


def flip(c: str) -> str:
    return BLUE if c == RED else RED


@dataclass(frozen=True)
class TwoColoring:
    color: Mapping[str, str]
    own: int
    other: int

    def __post_init__(self):
        bad = [v for v, c in self.color.items() if c not in COLORS]
        if bad:
            raise ValueError(f"colours must be red or blue; got {self.color[bad[0]]!r} at {bad[0]!r}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TwoColoring)
            and dict(self.color) == dict(other.color)
            and (self.own, self.other) == (other.own, other.other)
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.color.items()), self.own, self.other))

    def swapped(self) -> "TwoColoring":
        return TwoColoring({v: flip(c) for v, c in self.color.items()}, self.own, self.other)

    def vertices_of(self, c: str) -> List[str]:
        return sorted(v for v, x in self.color.items() if x == c)


def neighbour_counts(g: Graph, color: Mapping[str, str], u: str):
    """(same, other) neighbour counts at u; loops add two to ``same``, semi-edges nothing."""
    same = 2 * len(g.loops_at(u))
    other = 0
    cu = color[u]
    for e in g.ordinary_at(u):
        if color[g.other_end(e, u)] == cu:
            same += 1
        else:
            other += 1
    return same, other


def coloring_violations(g: Graph, col: TwoColoring, frame: Optional[Iterable[str]] = None) -> List[str]:
    missing = g.vertices - set(col.color)
    if missing:
        raise GraphError(f"colouring is not total; {sorted(missing)[:5]} uncoloured")
    vs = g.sorted_vertices() if frame is None else sorted(frame)
    return [u for u in vs if neighbour_counts(g, col.color, u) != (col.own, col.other)]


def check_bc_coloring(g: Graph, col: TwoColoring) -> bool:
    return not coloring_violations(g, col)


def default_frame(g: Graph, b: int, c: int) -> Set[str]:
    """Vertices of full degree b+c, the ones a gadget lemma constrains."""
    return {u for u in g.vertices if len(g.ordinary_at(u)) + 2 * len(g.loops_at(u)) == b + c}


class _Propagator:
    """Backtracking over vertex colours with counting-based unit propagation."""

    def __init__(self, g: Graph, b: int, c: int, frame: Set[str], max_nodes=None, deadline=None):
        self.g = g
        self.b, self.c = b, c
        self.frame = frame
        self.order = g.sorted_vertices()
        self.nbrs: Dict[str, List[str]] = {u: [g.other_end(e, u) for e in g.ordinary_at(u)] for u in self.order}
        self.loops = {u: 2 * len(g.loops_at(u)) for u in self.order}
        self.color: Dict[str, str] = {}
        self.trail: List[str] = []
        self.nodes = 0
        self.max_nodes = max_nodes
        self.deadline = deadline

    def _tick(self):
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise SearchBudgetExceeded(self.nodes)
        if self.deadline is not None and self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded(self.nodes)

    def _set(self, u, col, queue):
        self.color[u] = col
        self.trail.append(u)
        queue.append(u)
        queue.extend(w for w in self.nbrs[u] if w in self.frame)

    def _undo(self, mark):
        while len(self.trail) > mark:
            del self.color[self.trail.pop()]

    def _examine(self, u, queue) -> bool:
        """Check the frame constraint at u and force neighbours when counts are tight."""
        cu = self.color.get(u)
        if cu is None:
            options = [col for col in COLORS if self._room(u, col)]
            if len(options) == 1:
                self._set(u, options[0], queue)
            return bool(options)
        same = self.loops[u]
        other = 0
        free = []
        for w in self.nbrs[u]:
            cw = self.color.get(w)
            if cw is None:
                free.append(w)
            elif cw == cu:
                same += 1
            else:
                other += 1
        if same > self.b or other > self.c:
            return False
        need_same, need_other = self.b - same, self.c - other
        if need_same + need_other != len(free):
            return False
        if free and (need_same == 0 or need_other == 0):
            forced = cu if need_other == 0 else flip(cu)
            for w in dict.fromkeys(free):
                if w not in self.color:
                    self._set(w, forced, queue)
        return True

    def _room(self, u, col) -> bool:
        same = self.loops[u]
        other = 0
        for w in self.nbrs[u]:
            cw = self.color.get(w)
            if cw == col:
                same += 1
            elif cw is not None:
                other += 1
        return same <= self.b and other <= self.c

    def propagate(self, queue) -> bool:
        while queue:
            u = queue.pop()
            if u in self.frame and not self._examine(u, queue):
                return False
        return True

    def assign(self, u, col) -> bool:
        queue: List[str] = []
        self._set(u, col, queue)
        return self.propagate(queue)

    def _slack(self, u: str) -> int:
        return sum(1 for w in self.nbrs[u] if w not in self.color)

    def _next(self, pending: List[str]) -> Optional[str]:
        """Uncoloured neighbour of the tightest coloured frame vertex, else the first pending vertex."""
        best, best_key = None, None
        for u in self.trail:
            if u not in self.frame:
                continue
            free = self._slack(u)
            if free and (best_key is None or free < best_key):
                best_key = free
                best = next(w for w in self.nbrs[u] if w not in self.color)
                if free == 1:
                    break
        if best is not None:
            return best
        return next((v for v in pending if v not in self.color), None)

    def search(self, pending: List[str]) -> Iterator[Dict[str, str]]:
        self._tick()
        u = self._next(pending)
        if u is None:
            yield dict(self.color)
            return
        for col in COLORS:
            mark = len(self.trail)
            if self.assign(u, col):
                yield from self.search(pending)
            self._undo(mark)


def _local_frame_ok(g, b, c, frame):
    for u in frame:
        deg = len(g.ordinary_at(u)) + 2 * len(g.loops_at(u))
        if deg != b + c or 2 * len(g.loops_at(u)) > b:
            return False
    return True


def search_colorings(
    g: Graph,
    b: int,
    c: int,
    frame: Optional[Iterable[str]] = None,
    max_nodes: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> Iterator[TwoColoring]:
    """Yield every colouring whose frame vertices satisfy the (b, c) constraint."""
    frame = default_frame(g, b, c) if frame is None else set(frame)
    if not _local_frame_ok(g, b, c, frame):
        return
    deadline = None if time_limit is None else time.monotonic() + time_limit
    prop = _Propagator(g, b, c, frame, max_nodes, deadline)
    # frame vertices first, so propagation fires early
    order = sorted(g.vertices, key=lambda v: (v not in frame, v))
    bfs: List[str] = []
    seen: Set[str] = set()
    for root in order:
        if root in seen:
            continue
        seen.add(root)
        layer = [root]
        while layer:
            bfs.extend(layer)
            nxt = []
            for u in layer:
                for w in sorted(set(prop.nbrs[u])):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            layer = nxt
    if not prop.propagate([u for u in frame]):
        return
    for col in prop.search(bfs):
        yield TwoColoring(col, b, c)


def find_bc_coloring(
    g: Graph, b: int, c: int, max_nodes: Optional[int] = None, time_limit: Optional[float] = None
) -> Optional[TwoColoring]:
    """A (b, c)-colouring of every vertex, or None. Components are solved separately."""
    if any(len(g.ordinary_at(u)) + 2 * len(g.loops_at(u)) != b + c for u in g.vertices):
        return None
    deadline = None if time_limit is None else time.monotonic() + time_limit
    color: Dict[str, str] = {}
    for comp in connected_components(g):
        first = comp.sorted_vertices()[0]
        prop = _Propagator(comp, b, c, set(comp.vertices), max_nodes, deadline)
        # a global swap maps solutions to solutions, so the first vertex may be red
        if not prop.assign(first, RED):
            return None
        found = next(prop.search(_bfs_order(comp, first)), None)
        if found is None:
            return None
        color.update(found)
    return TwoColoring(color, b, c)


def _bfs_order(g: Graph, root: str) -> List[str]:
    order, seen, i = [root], {root}, 0
    while i < len(order):
        u = order[i]
        i += 1
        for w in sorted({g.other_end(e, u) for e in g.ordinary_at(u)}):
            if w not in seen:
                seen.add(w)
                order.append(w)
    return order


# -- text format ------------------------------------------------------------


def serialize_coloring(col: TwoColoring) -> str:
    return "".join(f"c {v} {c}\n" for v, c in sorted(col.color.items()))


def parse_coloring(text: str, own: int = 0, other: int = 0) -> TwoColoring:
    color: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 3 or tok[0] != "c" or tok[2] not in COLORS:
            raise GraphFormatError("expected 'c <vertex-id> red|blue'", lineno)
        if tok[1] in color:
            raise GraphFormatError(f"duplicate colour for {tok[1]!r}", lineno)
        color[tok[1]] = tok[2]
    return TwoColoring(color, own, other)
