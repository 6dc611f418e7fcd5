"""Command-line front end.

Exit codes: 0 yes/valid, 1 no/invalid, 2 usage or input error, 3 unknown
(search budget exhausted).
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import gadgets
from .coloring import TwoColoring, check_bc_coloring, parse_coloring, serialize_coloring
from .cover import is_degree_obedient, parse_cover_map, serialize_cover_map, verify_cover
from .deciders import EXACT, Verdict, decide_bc_coloring, decide_F, decide_W
from .factors import SearchBudgetExceeded, serialize_subsets
from .graph import GraphError, parse_graph, read_graph, serialize_graph, tensor_k2
from .oracle import NO, UNKNOWN, YES, SearchBudget, solve_cover

EXIT = {YES: 0, NO: 1, UNKNOWN: 3}
USAGE = 2


class UsageError(Exception):
    pass


def parse_target(spec: str) -> Tuple[str, object]:
    """``F:b,c`` | ``W:k,m,l,p,q`` | ``@file``."""
    if spec.startswith("@") and len(spec) > 1:
        return "graph", spec[1:]
    m = re.fullmatch(r"([FW]):(\d+(?:,\d+)*)", spec)
    if not m:
        raise UsageError(f"bad target {spec!r}; expected F:b,c or W:k,m,l,p,q or @file")
    nums = tuple(int(x) for x in m.group(2).split(","))
    if m.group(1) == "F" and len(nums) != 2:
        raise UsageError("F target needs two parameters")
    if m.group(1) == "W":
        if len(nums) != 5:
            raise UsageError("W target needs five parameters")
        if nums[2] < 1:
            raise UsageError("W target needs l >= 1")
    return m.group(1), nums


def _budget(args) -> SearchBudget:
    return SearchBudget(args.max_nodes, args.time_limit)


def _write(path: Optional[str], text: str):
    if path:
        Path(path).write_text(text)


def _witness_text(w) -> str:
    if w is None:
        return ""
    if isinstance(w, TwoColoring):
        return serialize_coloring(w)
    if isinstance(w, list):
        return serialize_subsets(w)
    return serialize_cover_map(w)


# -- subcommands ---------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    g, h = read_graph(args.g), read_graph(args.h)
    f = parse_cover_map(Path(args.map).read_text())
    report = verify_cover(g, h, f)
    print("valid" if report.ok else f"invalid\n{report}")
    return 0 if report.ok else 1


def cmd_obedient(args) -> int:
    g, h = read_graph(args.g), read_graph(args.h)
    f = parse_cover_map(Path(args.map).read_text())
    ok = is_degree_obedient(g, h, f.vertex_map)
    print("obedient" if ok else "not obedient")
    return 0 if ok else 1


def cmd_decide(args, target) -> int:
    kind, params = target
    g = read_graph(args.g)
    if kind == "F":
        v = decide_F(g, *params, budget=_budget(args))
    elif kind == "W":
        v = decide_W(g, *params, budget=_budget(args))
    else:
        res = solve_cover(g, read_graph(params), _budget(args))
        v = Verdict(res.status, res.witness, EXACT)
    print(v.answer)
    print(f"method={v.method}")
    if v.yes:
        _write(args.out, _witness_text(v.witness))
    return EXIT[v.answer]


def cmd_solve(args) -> int:
    g, h = read_graph(args.g), read_graph(args.h)
    res = solve_cover(g, h, _budget(args))
    print(res.status)
    print(f"nodes={res.nodes}")
    if res.yes:
        _write(args.out, serialize_cover_map(res.witness))
    return EXIT[res.status]


def cmd_color(args) -> int:
    g = read_graph(args.g)
    if args.check:
        col = parse_coloring(Path(args.check).read_text(), args.b, args.c)
        ok = check_bc_coloring(g, col)
        print("valid" if ok else "invalid")
        return 0 if ok else 1
    v = decide_bc_coloring(g, args.b, args.c, _budget(args))
    print(v.answer)
    if v.yes:
        _write(args.out, serialize_coloring(v.witness))
    return EXIT[v.answer]


GADGETS = {
    "matchings": (gadgets.build_matchings_gadget, ["d"]),
    "Gab": (gadgets.build_Gab, ["a", "b"]),
    "Galb": (gadgets.build_Galb, ["a", "l", "b"]),
    "bridge-general": (gadgets.build_bridge_general, ["b", "c"]),
    "bridge-cplus1": (gadgets.build_bridge_cplus1, ["c"]),
    "F": (gadgets.build_F_gadget, ["b"]),
    "variable": (gadgets.build_variable_gadget, ["b"]),
    "variable-block": (gadgets.build_variable_block, ["b"]),
}


def _emit_artifact(art: gadgets.ReductionArtifact, out: Optional[str]) -> int:
    if out:
        Path(f"{out}.graph").write_text(serialize_graph(art.instance))
        Path(f"{out}.ann").write_text(gadgets.serialize_annotations(art.annotations))
        Path(f"{out}.claim").write_text(art.claim + "\n")
        if art.witness is not None:
            Path(f"{out}.witness").write_text(_witness_text(art.witness))
        print(f"{len(art.instance.vertices)} vertices, {len(art.instance.edges)} edges")
    else:
        sys.stdout.write(serialize_graph(art.instance))
    return 0


def cmd_gadget(args) -> int:
    build, names = GADGETS[args.name]
    if len(args.params) != len(names):
        raise UsageError(f"gadget {args.name} takes parameters {' '.join(names)}")
    return _emit_artifact(build(*args.params), args.out)


def _parse_assignment(text: str) -> dict:
    out = {}
    for item in text.split(","):
        name, _, val = item.partition("=")
        if val not in ("0", "1") or not name:
            raise UsageError(f"bad assignment item {item!r}; expected name=0 or name=1")
        out[name] = val == "1"
    return out


def cmd_reduce(args, target) -> int:
    src = Path(args.source).read_text()
    if args.kind == "onevertex":
        art = gadgets.build_onevertex_instance(parse_graph(src), _need(args.k, "--k"), _need(args.d, "--d"))
    elif args.kind == "nonregular":
        if target is None or target[0] != "W":
            raise UsageError("nonregular reduction needs --target W:k,m,l,p,q")
        art = gadgets.build_nonregular_instance(parse_graph(src), *target[1])
    elif args.kind == "bb1":
        art = gadgets.build_bb1_instance(parse_graph(src), _need(args.b, "--b"), _need(args.c, "--c"))
    elif args.kind == "b1":
        art = gadgets.build_b1_instance(parse_graph(src), _need(args.b, "--b"))
    else:
        phi = gadgets.parse_formula(src)
        assign = _parse_assignment(args.assignment) if args.assignment else None
        art = gadgets.build_bb_instance(phi, _need(args.b, "--b"), assign)
    return _emit_artifact(art, args.out)


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this reduction")
    return value


def cmd_product(args) -> int:
    sys.stdout.write(serialize_graph(tensor_k2(read_graph(args.h))))
    return 0


# -- entry point -------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semicover", description="Graph covers of multigraphs with semi-edges.")
    sub = p.add_subparsers(dest="command", required=True)

    def budgeted(sp):
        sp.add_argument("--max-nodes", type=int, default=None, metavar="N")
        sp.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
        sp.add_argument("--out", default=None, help="write the witness here")

    sp = sub.add_parser("verify", help="check a covering projection")
    sp.add_argument("g"), sp.add_argument("h"), sp.add_argument("map")
    sp = sub.add_parser("obedient", help="check degree-obedience of a vertex map")
    sp.add_argument("g"), sp.add_argument("h"), sp.add_argument("map")
    sp = sub.add_parser("decide", help="decide covering of F(b,c), W(k,m,l,p,q) or a graph file")
    sp.add_argument("g")
    sp.add_argument("--target", required=True)
    budgeted(sp)
    sp = sub.add_parser("solve", help="exact cover search")
    sp.add_argument("g"), sp.add_argument("h")
    budgeted(sp)
    sp = sub.add_parser("color", help="find or check a (b,c)-colouring")
    sp.add_argument("g")
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--check", default=None, metavar="COLORING")
    budgeted(sp)
    sp = sub.add_parser("gadget", help="generate a gadget")
    sp.add_argument("name", choices=sorted(GADGETS))
    sp.add_argument("params", nargs="*", type=int)
    sp.add_argument("--out", default=None, metavar="PREFIX")
    sp = sub.add_parser("reduce", help="generate a full reduction instance")
    sp.add_argument("kind", choices=["onevertex", "nonregular", "bb1", "b1", "bb"])
    sp.add_argument("source", help="source graph file, or formula file for 'bb'")
    for flag in ("--k", "--d", "--b", "--c"):
        sp.add_argument(flag, type=int, default=None)
    sp.add_argument("--target", default=None)
    sp.add_argument("--assignment", default=None, help="e.g. a=1,b=1,c=0,d=0 (bb only)")
    sp.add_argument("--out", default=None, metavar="PREFIX")
    sp = sub.add_parser("product-k2", help="print H x K2")
    sp.add_argument("h")
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else 0
    try:
        target = parse_target(args.target) if getattr(args, "target", None) else None
        handlers = {
            "verify": cmd_verify,
            "obedient": cmd_obedient,
            "solve": cmd_solve,
            "color": cmd_color,
            "gadget": cmd_gadget,
            "product-k2": cmd_product,
        }
        if args.command == "decide":
            return cmd_decide(args, target)
        if args.command == "reduce":
            return cmd_reduce(args, target)
        return handlers[args.command](args)
    except SearchBudgetExceeded as exc:
        print(UNKNOWN)
        print(exc, file=sys.stderr)
        return EXIT[UNKNOWN]
    except (UsageError, GraphError, ValueError, OSError) as exc:
        print(f"semicover: error: {exc}", file=sys.stderr)
        return USAGE


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
