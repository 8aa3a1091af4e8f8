"""Acceptance suite: one test per criterion.

Run under pytest (a summary line per criterion is printed at the end) or
directly with ``python tests/test_acceptance.py`` for a PASS/FAIL listing.
"""

from __future__ import annotations

import itertools
import json
import pathlib
import sys
import time

ROOT = pathlib.Path(__file__).resolve().parent.parent
for extra in (ROOT / "tests", ROOT / "tools", ROOT / "src"):
    if str(extra) not in sys.path:
        sys.path.insert(0, str(extra))

import pytest  # noqa: E402

from trusskit import cli, fixtures, io  # noqa: E402
from trusskit.diagram import is_cell_diagram, is_manifold_diagram  # noqa: E402
from trusskit.errors import FibersMismatch  # noqa: E402
from trusskit.explore import (  # noqa: E402
    Bounds,
    SearchStatus,
    compose_perturbations,
    enumerate_space,
    identity_perturbation,
    search_perturbation,
    stratifications,
    verify_perturbation,
)
from trusskit.poset import Poset, Verdict, is_cellular, recognize_sphere  # noqa: E402
from trusskit.render import render_svg  # noqa: E402
from trusskit.strat import (  # noqa: E402
    compactify_strat,
    dual_strat,
    interior_strat,
    normal_form_by_enumeration,
    normalize,
    trivially_labeled,
)
from trusskit.tangle import (  # noqa: E402
    TanglePresentation,
    cell_structure,
    dual_cell_structure,
    has_closed_realization,
    is_singularity,
    is_tangle,
    tstr,
)
from trusskit.truss import dual, enumerate_trusses  # noqa: E402

TITLES = {
    1: "enumeration counts of 1-trusses",
    2: "dual is an involution swapping open and closed",
    3: "normalize agrees with the coarsening-minimal target and is idempotent",
    4: "compactification round trip and cellularity",
    5: "transversal stratifications are manifold diagrams",
    6: "manifold diagrams are exactly duals of cell diagrams",
    7: "fixture verdicts",
    8: "double wiggle has a verified perturbation",
    9: "A1 cap is stable within bounds",
    10: "perturbation composition is unital and associative",
    11: "Euler characteristics of cells and dual cells",
    12: "sphere recognition fixtures",
    13: "CLI round trips, golden renders and exit codes",
}

TANGLE_FIXTURES = [n for n in fixtures.names() if isinstance(fixtures.get(n), TanglePresentation)]
TRUSS_FIXTURES = fixtures.names()


def _bundle_of(obj):
    while hasattr(obj, "bundle"):
        obj = obj.bundle
    return obj


def _stratified_suite():
    """Stratified 2-trusses with at most 7 top elements and at most 3 strata."""
    for T in enumerate_trusses(2, 7):
        yield from stratifications(T, 3)


def _small_tangles():
    for m in (0, 1, 2):
        yield from enumerate_space(2, 9, "tangles", m)


# -- criteria ------------------------------------------------------------------


def test_criterion_01_counts():
    by_size = {}
    for T in enumerate_trusses(1, 8):
        by_size.setdefault(len(T.top()), []).append(T)
    for k in range(1, 9):
        found = by_size.get(k, [])
        assert len(found) == 2
        closed = sum(T.is_closed() for T in found)
        opened = sum(T.is_open() for T in found)
        assert (closed, opened) == ((1, 1) if k % 2 else (0, 0))


def test_criterion_02_duality():
    count = 0
    for n in range(4):
        for T in enumerate_trusses(n, 6):
            D = dual(T)
            assert dual(D) == T
            assert D.is_open() == T.is_closed() and D.is_closed() == T.is_open()
            count += 1
    for name in TRUSS_FIXTURES:
        B = _bundle_of(fixtures.get(name))
        assert dual(dual(B)) == B
        assert dual(B).is_open() == B.is_closed()
    assert count > 10000


def test_criterion_03_normalization():
    count = 0
    for X in _stratified_suite():
        nf = normalize(X).nf
        assert nf == normal_form_by_enumeration(X)
        assert normalize(nf).nf == nf
        count += 1
    assert count > 20000


def test_criterion_04_compactification():
    for T in enumerate_trusses(2, 7):
        if not T.is_open():
            continue
        for X in stratifications(T, 3):
            C = compactify_strat(X)
            assert C.bundle.is_closed()
            assert interior_strat(C) == X
        C = compactify_strat(trivially_labeled(T)).bundle
        assert is_cellular(C.top(), C.cell_dim) is Verdict.YES


def test_criterion_05_tangles_to_diagrams():
    seen = 0
    for TP in _small_tangles():
        assert is_manifold_diagram(tstr(TP)).verdict
        seen += 1
    for name in TANGLE_FIXTURES:
        TP = fixtures.get(name)
        if is_tangle(TP).verdict is Verdict.YES:
            assert is_manifold_diagram(tstr(TP)).verdict
            seen += 1
    assert seen > 20


def test_criterion_06_diagram_cell_duality():
    # is_cell_diagram raises InternalDisagreement if its two facetality routes disagree
    for X in _stratified_suite():
        assert is_manifold_diagram(X).verdict == is_cell_diagram(dual_strat(X)).verdict
    for name in TANGLE_FIXTURES:
        TP = fixtures.get(name)
        for X in (TP.strat, tstr(TP)) if is_tangle(TP).verdict is Verdict.YES else (TP.strat,):
            assert is_manifold_diagram(X).verdict == is_cell_diagram(dual_strat(X)).verdict


def test_criterion_07_fixture_verdicts():
    pt2 = fixtures.get("pt2")
    assert pt2.n == 2 and pt2.m == 0 and is_singularity(pt2)
    point = fixtures.get("point")
    assert is_singularity(point) and is_tangle(point).tdim == {(1,): 0}
    cap = is_tangle(fixtures.get("cap"))
    assert cap.verdict is Verdict.YES
    assert sorted(cap.tdim.values()) == [0, 1, 1]
    (apex,) = [x for x, k in cap.tdim.items() if k == 0]
    assert all(fixtures.get("cap").bundle.top().lt(x, apex) for x in cap.tdim if x != apex)
    bifur = is_tangle(fixtures.get("bifur"))
    assert bifur.verdict is Verdict.NO and bifur.failure[0] == (1, 1)


def test_criterion_08_double_wiggle_instability():
    res = search_perturbation(fixtures.get("wiggle2"), Bounds(max_q=4, max_total=18))
    assert res.status is SearchStatus.FOUND, f"search returned {res.status.value}"
    assert verify_perturbation(res.certificate)
    assert "wiggle2_perturbation" in fixtures.names(), "no hand-transcribed certificate is shipped"
    assert verify_perturbation(fixtures.get("wiggle2_perturbation"))


def test_criterion_09_cap_stability():
    res = search_perturbation(fixtures.get("cap"), Bounds(max_q=3, max_total=16))
    assert res.status is SearchStatus.NONE


def test_criterion_10_composition():
    a, b, c = (fixtures.get(n) for n in ("split_1_2", "split_2_3", "split_1_3"))
    for P in (a, b, c):
        assert verify_perturbation(P)
        assert compose_perturbations(identity_perturbation(P.special), P) == P
        assert compose_perturbations(P, identity_perturbation(P.generic)) == P
    ab = compose_perturbations(a, b)
    assert verify_perturbation(ab) and ab == c
    i3 = identity_perturbation(b.generic)
    left = compose_perturbations(compose_perturbations(a, b), i3)
    right = compose_perturbations(a, compose_perturbations(b, i3))
    assert left == right and verify_perturbation(left)
    with pytest.raises(FibersMismatch):
        compose_perturbations(b, a)


def test_criterion_11_euler():
    circle, strand = fixtures.get("circle"), fixtures.get("strand")
    assert cell_structure(circle).euler == 0 and dual_cell_structure(circle).euler == 0
    assert cell_structure(strand).euler == 1
    seen = 0
    for TP in _small_tangles():
        if has_closed_realization(TP):
            assert cell_structure(TP).euler == dual_cell_structure(TP).euler
            seen += 1
    assert seen > 0


def _crown():
    return Poset.from_relations("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def _simplex_boundary():
    faces = [frozenset(s) for k in (1, 2, 3) for s in itertools.combinations(range(4), k)]
    return Poset.from_relations(faces, [(x, y) for x in faces for y in faces if x < y])


def test_criterion_12_spheres():
    chain = Poset.from_relations("abc", [("a", "b"), ("b", "c")])
    assert recognize_sphere(Poset.discrete([]), -1) is Verdict.YES
    assert recognize_sphere(Poset.discrete("ab"), 0) is Verdict.YES
    assert recognize_sphere(_crown(), 1) is Verdict.YES
    assert recognize_sphere(_simplex_boundary(), 2) is Verdict.YES
    assert recognize_sphere(chain, 1) is Verdict.NO
    assert recognize_sphere(Poset.discrete("a"), 0) is Verdict.NO
    assert recognize_sphere(chain, 3) is Verdict.UNKNOWN
    assert recognize_sphere(_simplex_boundary(), 3) is Verdict.UNKNOWN


def test_criterion_13_cli(tmp_path, capsysbinary):
    from make_golden import cases

    for name in fixtures.names():
        raw = fixtures.raw(name)
        assert io.serialize(io.parse(raw)) == raw
    golden = ROOT / "tests" / "golden"
    for name, (X, opts) in cases().items():
        assert render_svg(X, opts) == (golden / f"{name}.svg").read_bytes()
    fix = pathlib.Path(fixtures.__file__).parent
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    expected = [
        (["validate", fix / "cap.json"], 0),
        (["check-tangle", fix / "bifur.json"], 1),
        (["stable", "--max-nodes", "5", fix / "cap.json"], 2),
        (["no-such-command"], 64),
        (["validate", bad], 65),
        (["validate", tmp_path / "missing.json"], 66),
    ]
    for argv, code in expected:
        assert cli.main([str(a) for a in argv]) == code, argv
    capsysbinary.readouterr()
    code = cli.main(["dual", "--twice", str(fix / "pt2.json")])
    assert code == 0 and capsysbinary.readouterr().out == fixtures.raw("pt2")


# -- standalone runner ---------------------------------------------------------


def main() -> int:
    failed = 0
    for number, title in TITLES.items():
        name = next(n for n in globals() if n.startswith(f"test_criterion_{number:02d}_"))
        t0 = time.time()
        try:
            code = pytest.main(["-q", "-p", "no:cacheprovider", f"{__file__}::{name}"], plugins=[])
            ok = code == 0
        except Exception:  # pragma: no cover
            ok = False
        failed += not ok
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({time.time() - t0:.1f} s)", flush=True)
    print(json.dumps({"passed": len(TITLES) - failed, "failed": failed}))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
