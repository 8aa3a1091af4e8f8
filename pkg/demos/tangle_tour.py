"""Walk through the bundled cap: tangle check, transversal strata, link, picture.

Usage: python demos/tangle_tour.py [OUTDIR]
"""

from __future__ import annotations

import pathlib
import sys

from trusskit import fixtures
from trusskit.diagram import canonical_link, is_manifold_diagram
from trusskit.render import RenderOptions, render_svg, slices_text
from trusskit.tangle import cell_structure, dual_cell_structure, is_tangle, tstr


def main(outdir: pathlib.Path) -> None:
    cap = fixtures.get("cap")
    print(slices_text(cap.bundle, cap.strat.labeling))

    report = is_tangle(cap)
    print("tangle:", report.verdict.value)
    for x, k in sorted(report.tdim.items()):
        print(f"  transversal dimension at {x}: {k}")

    X = tstr(cap)
    diag = is_manifold_diagram(X)
    print("refined stratification is a manifold diagram:", diag.verdict)
    for s in X.strata:
        print(f"  stratum {s}: link has {len(canonical_link(X, s).poset)} elements")

    print("euler characteristic of cells:", cell_structure(cap).euler)
    print("euler characteristic of dual cells:", dual_cell_structure(cap).euler)

    outdir.mkdir(parents=True, exist_ok=True)
    target = outdir / "cap.svg"
    target.write_bytes(render_svg(X, RenderOptions(emphasize=frozenset({"0"}))))
    print("picture written to", target)


if __name__ == "__main__":
    main(pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "."))
