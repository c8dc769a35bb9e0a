"""Command-line front end: ``coxgalaxy <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from . import classify, galaxy, moves, oracle
from .coxsys import (
    CoxeterError,
    abelianization_rank,
    canonical_form,
    irreducible_components,
    parse_system,
)


def _read(path: str):
    if path == "-":
        return parse_system(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _budget(args) -> galaxy.Budget:
    kw = {}
    if args.max_vertices is not None:
        kw["max_vertices"] = args.max_vertices
    if args.max_rank is not None:
        kw["max_rank"] = args.max_rank
    if args.time_limit is not None:
        kw["time_limit"] = args.time_limit
    if args.max_moves is not None:
        kw["max_moves_per_vertex"] = args.max_moves
    return galaxy.Budget(**kw)


def _positive_int(text):
    val = int(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _positive_float(text):
    val = float(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _add_budget(p):
    p.add_argument("--max-vertices", type=_positive_int)
    p.add_argument("--max-rank", type=_positive_int)
    p.add_argument("--time-limit", type=_positive_float, help="seconds per exploration")
    p.add_argument("--max-moves", type=_positive_int, help="moves kept per vertex")


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args, out):
    m = _read(args.file)
    comps = []
    for c in irreducible_components(m):
        ty = classify.spherical_type(m, c)
        comps.append({"generators": m.names(c), "type": ty.name if ty else None})
    u, d, p = moves.statistics(m)
    report = {
        "rank": m.rank,
        "canon": canonical_form(m).hex,
        "components": comps,
        "spherical": classify.is_spherical(m),
        "order": classify.group_order(m),
        "basic_subsets": [
            {"generators": m.names(b.members), "type": b.type.name} for b in classify.basic_subsets(m)
        ],
        "statistics": {"u": u, "d": d, "p": p},
        "expanded": u == 0,
        "abelianization_rank": abelianization_rank(m),
    }
    out.write(_dump(report) + "\n")
    return 0


def cmd_moves(args, out):
    m = _read(args.file)
    found = []
    for rec, m2 in moves.all_moves(m, include_trivial_twists=args.all_twists):
        entry = rec.to_dict()
        entry["result"] = m2.to_dict()
        found.append(entry)
    out.write(_dump({"source": canonical_form(m).hex, "moves": found}) + "\n")
    return 0


def cmd_explore(args, out):
    m = _read(args.file)
    kinds = set(galaxy.ALL_MOVES)
    if args.no_twists:
        kinds.discard("Twist")
    frag = galaxy.explore(m, _budget(args), kinds)
    if args.core or args.spine:
        frag = galaxy.vertical_core(frag)
    edges = None
    if args.spine:
        edges = galaxy.spine(frag).edges
    if args.format == "dot":
        out.write(frag.to_dot(edges=edges, draw_graphs=args.draw_graphs))
    elif args.format == "json":
        data = frag.to_dict()
        if edges is not None:
            data["edges"] = [rec.to_dict() for _, _, rec in edges]
        else:
            data["clique_counts"] = {str(k): v for k, v in frag.clique_counts().items()}
        data["diagnostics"] = frag.diagnostics
        out.write(_dump(data) + "\n")
    else:
        n_edges = len(edges) if edges is not None else frag.edge_count()
        out.write(f"vertices: {len(frag)}\n")
        out.write(f"edges: {n_edges}\n")
        out.write("layers: " + ", ".join(f"{k}:{v}" for k, v in frag.layer_counts().items()) + "\n")
        out.write(f"components: {len(frag.components())}\n")
        if frag.truncated:
            out.write("truncated: " + "; ".join(frag.diagnostics) + "\n")
    return 0


def cmd_iso(args, out):
    m1, m2 = _read(args.file1), _read(args.file2)
    res = galaxy.decide_isomorphic(m1, m2, _budget(args))
    if isinstance(res, galaxy.Isomorphic):
        data = {
            "verdict": "Isomorphic",
            "certificate": res.certificate,
            "path": [r.to_dict() for r in res.path],
        }
        status = 0
    elif isinstance(res, galaxy.NonIsomorphic):
        data = {"verdict": "NonIsomorphic", "certificate": res.certificate, "details": res.details}
        status = 0
    else:
        data = {"verdict": "Unknown", "diagnostics": res.diagnostics}
        status = 2
    out.write(_dump(data) + "\n")
    return status


def cmd_starlet(args, out):
    m = galaxy.starlet(args.k)
    if args.format == "dot":
        out.write(galaxy.system_to_dot(m))
    else:
        out.write(_dump(m.to_dict()) + "\n")
    return 0


def cmd_system(args, out):
    m = _read(args.file)
    if args.format == "dot":
        out.write(galaxy.system_to_dot(m))
    else:
        out.write(_dump(m.to_dict()) + "\n")
    return 0


def cmd_verify(args, out):
    m = _read(args.file)
    text = args.move
    if not text.lstrip().startswith("{"):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        move = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CoxeterError(f"move is not valid JSON: {exc}") from exc
    kind, payload = move.get("kind"), move.get("payload", {})
    if kind == "BlowUp":
        pt = moves.PseudoTransposition.from_dict(m, payload)
        result = moves.blow_up(m, pt)
        words = moves.blow_up_words(m, pt)
        rep = oracle.verify_generating_set(m, words, result, cap=args.cap)
    elif kind == "Twist":
        tw = moves.TwistDescriptor.from_dict(m, payload)
        result = moves.apply_twist(m, tw)
        rep = oracle.verify_generating_set(m, moves.twist_words(m, tw), result, cap=args.cap)
    elif kind == "BlowDown":
        # check the inverse blow-up from the lower system back to m
        result = moves.blow_down(m, moves.BlowDown.from_dict(m, payload))
        pt = next(
            p
            for p in moves.find_pseudo_transpositions(result)
            if canonical_form(moves.blow_up(result, p)) == canonical_form(m)
        )
        rep = oracle.verify_generating_set(result, moves.blow_up_words(result, pt), moves.blow_up(result, pt), cap=args.cap)
    else:
        raise CoxeterError(f"cannot verify move kind {kind!r}")
    data = {"kind": kind, "result": result.to_dict(), "report": rep.to_dict()}
    out.write(_dump(data) + "\n")
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coxgalaxy", description="Explore isomorphisms between Coxeter systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="types, order, basic subsets, statistics")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("moves", help="all applicable moves")
    p.add_argument("file")
    p.add_argument("--all-twists", action="store_true", help="include twists that do not change the graph")
    p.set_defaults(func=cmd_moves)

    p = sub.add_parser("explore", help="explore the reachable fragment")
    p.add_argument("file")
    p.add_argument("--core", action="store_true", help="restrict to the vertical core")
    p.add_argument("--spine", action="store_true", help="output a spanning forest of the core")
    p.add_argument("--no-twists", action="store_true", help="vertical moves only")
    p.add_argument("--draw-graphs", action="store_true", help="DOT: draw each vertex's Coxeter graph")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    _add_budget(p)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("iso", help="decide isomorphism of two systems")
    p.add_argument("file1")
    p.add_argument("file2")
    _add_budget(p)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("starlet", help="emit a starlet system")
    p.add_argument("k", nargs="+", type=int)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_starlet)

    p = sub.add_parser("show", help="print a system as JSON or DOT")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_system)

    p = sub.add_parser("verify", help="oracle check of a move")
    p.add_argument("file")
    p.add_argument("move", help="MoveRecord JSON (inline or a file path)")
    p.add_argument("--cap", type=_positive_int, default=200, help="order cap for infinite labels")
    p.set_defaults(func=cmd_verify)
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args, out)
    except (CoxeterError, OSError, ValueError, StopIteration) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main():
    sys.exit(run())
