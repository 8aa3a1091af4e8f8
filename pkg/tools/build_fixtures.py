"""Write the hand-built fixtures as canonical JSON documents.

Usage: PYTHONPATH=src python3 tools/build_fixtures.py [OUTDIR]
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

import fixture_defs as fd  # noqa: E402
from trusskit import io  # noqa: E402

FIXTURES = {
    "point": (fd.point, "a single point in the open interval"),
    "pt2": (fd.pt2, "a single point in the open square"),
    "strand": (fd.strand, "one straight strand crossing the square"),
    "cap": (fd.cap, "two strands from the source side meeting in a cap"),
    "bifur": (fd.bifur, "a strand splitting into two: not a tangle"),
    "circle": (fd.circle, "a closed circle inside the square"),
    "braid": (fd.braid, "two strands in the cube, one passing over the other"),
    "wiggle2": (fd.cusp, "sheet whose source side is an S-shaped strand and whose target side is straight"),
    "circle_by_strand": (fd.circle_by_strand, "cone on a circle beside a strand: not a tangle"),
    "flat_cap3": (fd.flat_cap3, "cap in the cube with both strands over one point of the second direction"),
    "spread_cap3": (fd.spread_cap3, "cap in the cube with strands over distinct points of the second direction"),
    "split_1_2": (fd.one_to_two, "perturbation of one point into two"),
    "split_2_3": (fd.two_to_three, "perturbation of two points into three"),
    "split_1_3": (fd.one_to_three, "perturbation of one point into three"),
    "vanishing_point": (fd.vanishing_point, "bundle over the arrow whose generic fiber misses the point"),
    "constant_rsr": (fd.constant_rsr, "a subdivided interval with one label"),
}


def build(outdir: pathlib.Path) -> list[pathlib.Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (make, description) in FIXTURES.items():
        doc = io.document_for(make(), name=name, description=description)
        path = outdir / f"{name}.json"
        io.dump(doc, path)
        written.append(path)
    return written


if __name__ == "__main__":
    default = pathlib.Path(__file__).resolve().parent.parent / "src" / "trusskit" / "fixtures"
    for p in build(pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else default):
        print(p)
