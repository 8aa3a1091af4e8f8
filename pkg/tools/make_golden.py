"""Regenerate the golden SVG files used by tests/test_render.py.

Usage: PYTHONPATH=src python3 tools/make_golden.py
Only run this after checking a rendering change by eye.
"""

from __future__ import annotations

import pathlib

from trusskit import fixtures
from trusskit.poset import Poset
from trusskit.render import RenderOptions, render_svg
from trusskit.strat import make_strat
from trusskit.truss import one_truss

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"


def cases() -> dict:
    labels = Poset.from_relations("apb", [("a", "p"), ("b", "p")])
    marked = make_strat(one_truss("RSR"), labels, {(0,): "a", (1,): "p", (2,): "b"})
    emph = RenderOptions(emphasize=frozenset({"0"}))
    return {
        "marked_interval": (marked, RenderOptions()),
        "point": (fixtures.get("point").strat, emph),
        "pt2": (fixtures.get("pt2").strat, emph),
        "cap": (fixtures.get("cap").strat, emph),
        "circle": (fixtures.get("circle").strat, emph),
        "constant_rsr": (fixtures.get("constant_rsr"), RenderOptions(labels=False)),
    }


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, (X, opts) in cases().items():
        (GOLDEN / f"{name}.svg").write_bytes(render_svg(X, opts))


if __name__ == "__main__":
    main()
