"""Command-line interface: ``trusskit <command> [options] FILE``.

Exit codes: 0 verified/stable/ok, 1 refuted/unstable, 2 inconclusive,
64 usage error, 65 invalid input data, 66 unreadable input file.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import io
from .diagram import canonical_link, cells_report, is_cell_diagram, is_compact_manifold_diagram, is_manifold_diagram
from .errors import TrussError
from .explore import (
    Bounds,
    PerturbationCertificate,
    SearchStatus,
    Stability,
    compose_perturbations,
    enumerate_space,
    search_perturbation,
    stability,
    verify_perturbation,
)
from .poset import Verdict, sort_key
from .render import RenderOptions, render_svg, slices_text
from .strat import (
    StratTruss,
    compactify_strat,
    dual_strat,
    glue_strat,
    interior_strat,
    normalize,
    trivially_labeled,
)
from .tangle import (
    INDICATOR,
    TanglePresentation,
    cell_structure,
    complexity,
    dual_cell_structure,
    is_compact_tangle,
    is_tangle,
    presentation_from_strat,
    tstr,
)
from .truss import compactify, dual, glue, interior

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- helpers -------------------------------------------------------------------


def _load(path: str) -> io.Document:
    if path == "-":
        return io.parse(sys.stdin.buffer.read())
    return io.load(path)


def _strat_of(doc: io.Document) -> StratTruss:
    p = doc.payload
    if doc.kind == "strat":
        return p
    if doc.kind == "tangle":
        return p.strat
    if doc.kind == "truss":
        return trivially_labeled(p)
    raise UsageError(f"expected a truss, stratified truss or tangle document, got {doc.kind!r}")


def _tangle_of(doc: io.Document, m: int | None = None) -> TanglePresentation:
    if doc.kind != "tangle":
        raise UsageError(f"expected a tangle document, got {doc.kind!r}")
    TP = doc.payload
    return TP if m is None else TanglePresentation(TP.bundle, TP.Q, m)


def _rewrap(doc: io.Document, X: StratTruss) -> io.Document:
    """Same kind as ``doc`` when possible: tangles stay tangles if labels allow."""
    meta = {"name": doc.name, "description": doc.description}
    if doc.kind == "truss" and len(X.label_poset) == 1:
        return io.Document("truss", X.bundle, **meta)
    if doc.kind == "tangle" and X.label_poset == INDICATOR:
        return io.Document("tangle", presentation_from_strat(X, doc.payload.m), **meta)
    return io.Document("strat", X, **meta)


def _emit_doc(doc: io.Document) -> None:
    sys.stdout.buffer.write(io.serialize(doc))


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(data, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _key(x: tuple) -> str:
    return "-".join(map(str, x))


def _verdict_code(v: Verdict | bool) -> int:
    if v is True or v is Verdict.YES:
        return EXIT_OK
    if v is Verdict.UNKNOWN:
        return EXIT_INCONCLUSIVE
    return EXIT_REFUTED


# -- commands ------------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = _load(args.file)
    p = doc.payload
    if doc.kind == "poset":
        size = len(p)
    elif doc.kind == "truss":
        size = len(p.top())
    elif doc.kind == "certificate":
        size = len(p.bundle.bundle.top())
    else:
        size = len(p.bundle.top())
    _emit(args, {"kind": doc.kind, "valid": True, "size": size}, f"ok: {doc.kind} with {size} elements")
    return EXIT_OK


def cmd_normalize(args) -> int:
    doc = _load(args.file)
    nf = normalize(_strat_of(doc)).nf
    _emit_doc(_rewrap(doc, nf))
    return EXIT_OK


def cmd_dual(args) -> int:
    doc = _load(args.file)
    times = 2 if args.twice else 1
    if doc.kind == "truss":
        B = doc.payload
        for _ in range(times):
            B = dual(B)
        _emit_doc(io.Document("truss", B, name=doc.name, description=doc.description))
        return EXIT_OK
    X = _strat_of(doc)
    for _ in range(times):
        X = dual_strat(X)
    _emit_doc(_rewrap(doc, X))
    return EXIT_OK


def cmd_compactify(args) -> int:
    doc = _load(args.file)
    if doc.kind == "truss":
        _emit_doc(io.Document("truss", compactify(doc.payload), name=doc.name, description=doc.description))
    else:
        _emit_doc(_rewrap(doc, compactify_strat(_strat_of(doc))))
    return EXIT_OK


def cmd_interior(args) -> int:
    doc = _load(args.file)
    if doc.kind == "truss":
        _emit_doc(io.Document("truss", interior(doc.payload), name=doc.name, description=doc.description))
    else:
        _emit_doc(_rewrap(doc, interior_strat(_strat_of(doc))))
    return EXIT_OK


def cmd_glue(args) -> int:
    a, b = _load(args.first), _load(args.second)
    if a.kind == "truss" and b.kind == "truss":
        _emit_doc(io.Document("truss", glue(a.payload, b.payload, args.dir)))
    else:
        _emit_doc(_rewrap(io.Document(a.kind, a.payload), glue_strat(_strat_of(a), _strat_of(b), args.dir)))
    return EXIT_OK


def cmd_check_diagram(args) -> int:
    X = _strat_of(_load(args.file))
    if args.cell:
        rep = is_cell_diagram(X)
    elif args.compact:
        rep = is_compact_manifold_diagram(X)
    else:
        rep = is_manifold_diagram(X)
    data = rep.to_json()
    text = f"diagram: {data['verdict']}"
    if "failure" in data:
        text += f" ({data['failure']['reason']} at {data['failure']['element']})"
    _emit(args, data, text)
    return _verdict_code(rep.verdict)


def cmd_check_tangle(args) -> int:
    TP = _tangle_of(_load(args.file), args.m)
    rep = is_compact_tangle(TP) if args.compact else is_tangle(TP)
    data = rep.to_json()
    lines = [f"tangle: {data['verdict']}"]
    lines += [f"  tdim {k}: {v}" for k, v in data["tdim"].items()]
    if "failure" in data:
        lines.append(f"  failure: {data['failure']['reason']} at {data['failure']['element']}")
    _emit(args, data, "\n".join(lines))
    return _verdict_code(rep.verdict)


def cmd_tstr(args) -> int:
    doc = _load(args.file)
    _emit_doc(io.Document("strat", tstr(_tangle_of(doc, args.m)), name=doc.name))
    return EXIT_OK


def cmd_link(args) -> int:
    X = _strat_of(_load(args.file))
    named = not X.bundle.is_truss
    stratum = io.parse_pathkey(args.stratum, named)
    L = canonical_link(X, stratum)
    elems = sorted(L.poset.elements, key=sort_key)
    data = {
        "elements": [_key(x) for x in elems],
        "covers": [[_key(a), _key(b)] for a, b in L.poset.sorted_covers],
        "labels": {_key(x): str(L.labels[x]) for x in elems},
    }
    _emit(args, data, f"link of {args.stratum}: {len(elems)} elements, {len(data['covers'])} covers")
    return EXIT_OK


def _cells_json(cs) -> dict:
    counts: dict = {}
    for d in cs.dims.values():
        counts[str(d)] = counts.get(str(d), 0) + 1
    return {"cellular": cs.cellular.value, "euler": cs.euler, "cells_by_dim": dict(sorted(counts.items()))}


def cmd_cells(args) -> int:
    doc = _load(args.file)
    if doc.kind == "tangle":
        cs = cell_structure(_tangle_of(doc, args.m))
        data = _cells_json(cs)
        _emit(args, data, f"cellular: {data['cellular']}, euler characteristic {data['euler']}")
        return _verdict_code(cs.cellular)
    entries = cells_report(_strat_of(doc))
    data = {"cells": [{"element": _key(e.element), "dim": e.dim, "degenerate": e.degenerate} for e in entries]}
    live = [e for e in entries if not e.degenerate]
    _emit(args, data, "\n".join(f"{e.dim}-cell at {_key(e.element)}" for e in live) or "no cells")
    return EXIT_OK


def cmd_dual_cells(args) -> int:
    cs = dual_cell_structure(_tangle_of(_load(args.file), args.m))
    data = _cells_json(cs)
    _emit(args, data, f"cellular: {data['cellular']}, euler characteristic {data['euler']}")
    return _verdict_code(cs.cellular)


def cmd_complexity(args) -> int:
    c = complexity(_tangle_of(_load(args.file)))
    _emit(args, {"complexity": c}, str(c))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.tangle is not None:
        kind, m = "tangles", args.tangle
    elif args.stratified:
        kind, m = "stratified", None
    else:
        kind, m = "trusses", None
    for obj in enumerate_space(args.n, args.max_size, kind, m, args.max_strata):
        line = json.dumps(io.encode(io.document_for(obj)), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        sys.stdout.write(line + "\n")
    return EXIT_OK


def _bounds(args) -> Bounds:
    return Bounds(args.max_q, args.max_total, args.max_nodes)


def _cert_of(doc: io.Document) -> PerturbationCertificate:
    if doc.kind != "certificate":
        raise UsageError(f"expected a certificate document, got {doc.kind!r}")
    return doc.payload


def cmd_perturb(args) -> int:
    if args.action == "verify":
        if len(args.files) != 1:
            raise UsageError("perturb verify takes one file")
        rep = verify_perturbation(_cert_of(_load(args.files[0])))
        data = rep.to_json()
        text = f"perturbation: {data['verdict']}" + "".join(f"\n  {f['at']}: {f['reason']}" for f in data["failures"])
        _emit(args, data, text)
        return _verdict_code(rep.verdict)
    if args.action == "compose":
        if len(args.files) != 2:
            raise UsageError("perturb compose takes two files")
        P1, P2 = (_cert_of(_load(f)) for f in args.files)
        _emit_doc(io.Document("certificate", compose_perturbations(P1, P2)))
        return EXIT_OK
    if len(args.files) != 1:
        raise UsageError("perturb search takes one file")
    res = search_perturbation(_tangle_of(_load(args.files[0])), _bounds(args))
    if res.status is SearchStatus.FOUND:
        _emit_doc(io.Document("certificate", res.certificate))
        return EXIT_REFUTED
    sys.stderr.write(f"search: {res.status.value} after {res.explored} nodes, {res.bundles} bundles\n")
    if args.json:
        sys.stdout.write(json.dumps({"status": res.status.value, "explored": res.explored}, sort_keys=True) + "\n")
    return EXIT_OK if res.status is SearchStatus.NONE else EXIT_INCONCLUSIVE


def cmd_stable(args) -> int:
    rep = stability(_tangle_of(_load(args.file)), _bounds(args), inductive=args.inductive)
    data = rep.to_json()
    text = f"stability: {data['verdict']}"
    if "inductively_stable" in data:
        text += f"\ninductively stable: {data['inductively_stable']}"
    _emit(args, data, text)
    if rep.verdict is Stability.STABLE:
        return EXIT_OK
    if rep.verdict is Stability.UNSTABLE:
        return EXIT_REFUTED
    return EXIT_INCONCLUSIVE


def cmd_render(args) -> int:
    doc = _load(args.file)
    X = _strat_of(doc)
    if args.slices:
        sys.stdout.write(slices_text(X.bundle, X.labeling))
        return EXIT_OK
    emphasize = frozenset({"0"}) if doc.kind == "tangle" else frozenset(args.emphasize or ())
    svg = render_svg(X, RenderOptions(emphasize=emphasize))
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(svg)
    else:
        sys.stdout.buffer.write(svg)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--seed", type=int, default=0, help="reserved; has no effect on results")

    parser = _Parser(prog="trusskit", description="Combinatorial trusses, diagrams and tangles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, file=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if file:
            p.add_argument("file", help="JSON document ('-' for stdin)")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "parse and validate a document")
    add("normalize", cmd_normalize, "normal form of a stratified truss")
    add("dual", cmd_dual, "dual truss").add_argument("--twice", action="store_true")
    add("compactify", cmd_compactify, "cubical compactification")
    add("interior", cmd_interior, "interior of a closed truss")
    g = add("glue", cmd_glue, "glue two trusses along a side", file=False)
    g.add_argument("first")
    g.add_argument("second")
    g.add_argument("--dir", type=int, required=True, help="direction k (1 is the last level)")
    d = add("check-diagram", cmd_check_diagram, "manifold (or cell) diagram check")
    d.add_argument("--compact", action="store_true")
    d.add_argument("--cell", action="store_true")
    t = add("check-tangle", cmd_check_tangle, "tangle check with transversal dimensions")
    t.add_argument("--m", type=int)
    t.add_argument("--compact", action="store_true")
    add("tstr", cmd_tstr, "transversal stratification of a tangle").add_argument("--m", type=int)
    add("link", cmd_link, "canonical link of a stratum").add_argument("--stratum", required=True)
    add("cells", cmd_cells, "cells of a tangle or a cell diagram").add_argument("--m", type=int)
    add("dual-cells", cmd_dual_cells, "dual cell structure of a tangle").add_argument("--m", type=int)
    add("complexity", cmd_complexity, "number of tangle elements")
    e = add("enumerate", cmd_enumerate, "stream trusses, stratified trusses or tangles", file=False)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--max-size", type=int, required=True)
    e.add_argument("--tangle", type=int, metavar="M")
    e.add_argument("--stratified", action="store_true")
    e.add_argument("--max-strata", type=int, default=3)
    for name, func, help_text in (("perturb", cmd_perturb, "verify, compose or search perturbations"),
                                  ("stable", cmd_stable, "bounded stability of a singularity")):
        p = add(name, func, help_text, file=(name == "stable"))
        if name == "perturb":
            p.add_argument("action", choices=["verify", "compose", "search"])
            p.add_argument("files", nargs="+")
        else:
            p.add_argument("--inductive", action="store_true")
        p.add_argument("--max-q", type=int, default=Bounds.max_q)
        p.add_argument("--max-total", type=int, default=Bounds.max_total)
        p.add_argument("--max-nodes", type=int, default=Bounds.max_nodes)
    r = add("render", cmd_render, "SVG picture (n <= 2) or text slices")
    r.add_argument("--slices", action="store_true")
    r.add_argument("--emphasize", nargs="*", help="labels to draw in black")
    r.add_argument("-o", "--output")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"trusskit: usage error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"trusskit: cannot read input: {exc}\n")
        return EXIT_NOINPUT
    except TrussError as exc:
        sys.stderr.write(f"trusskit: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
