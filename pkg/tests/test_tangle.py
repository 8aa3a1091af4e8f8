from __future__ import annotations

import pytest

from trusskit import fixtures
from trusskit.diagram import is_manifold_diagram
from trusskit.errors import NotATangle, NotInQ, TrussError
from trusskit.explore import enumerate_space
from trusskit.poset import Verdict
from trusskit.tangle import (
    TanglePresentation,
    cell_structure,
    check_transversal_at,
    complexity,
    dual_cell_structure,
    has_closed_realization,
    is_compact_tangle,
    is_singularity,
    is_tangle,
    normal_singularity_at,
    tstr,
)
from trusskit.truss import compactify, constant_truss, one_truss

TANGLES = ["point", "pt2", "strand", "cap", "circle", "braid", "flat_cap3", "spread_cap3", "wiggle2"]


def small_tangles():
    for m in (0, 1, 2):
        yield from enumerate_space(2, 7, "tangles", m)
    for m in (0, 1):
        yield from enumerate_space(1, 5, "tangles", m)


def test_q_must_be_up_closed():
    with pytest.raises(TrussError):
        TanglePresentation(one_truss("RSR"), {(0,)}, 0)


def test_empty_tangle():
    TP = TanglePresentation(constant_truss(["R", "R"]), set(), 1)
    rep = is_tangle(TP)
    assert rep.verdict is Verdict.YES and rep.tdim == {}


def test_point_in_interval():
    TP = fixtures.get("point")
    assert is_tangle(TP).tdim == {(1,): 0}
    assert is_singularity(TP)
    assert not is_tangle(TanglePresentation(TP.bundle, TP.Q, 1)).verdict is Verdict.YES


def test_wrong_dimension_fails():
    strand = fixtures.get("strand")
    assert is_tangle(TanglePresentation(strand.bundle, strand.Q, 0)).verdict is Verdict.NO
    assert is_tangle(TanglePresentation(strand.bundle, strand.Q, 2)).verdict is Verdict.NO


def test_transversal_outside_q():
    TP = fixtures.get("pt2")
    with pytest.raises(NotInQ):
        check_transversal_at(TP, (0, 0))


def test_fixture_profiles():
    assert is_tangle(fixtures.get("pt2")).tdim == {(1, 1): 0}
    assert is_tangle(fixtures.get("cap")).tdim == {(0, 1): 1, (0, 3): 1, (1, 1): 0}
    assert set(is_tangle(fixtures.get("strand")).tdim.values()) == {1}
    assert set(is_tangle(fixtures.get("braid")).tdim.values()) == {1}


def test_rejections():
    bifur = is_tangle(fixtures.get("bifur"))
    assert bifur.verdict is Verdict.NO and bifur.failure[0] == (1, 1)
    assert is_tangle(fixtures.get("circle_by_strand")).verdict is Verdict.NO


@pytest.mark.parametrize("name", TANGLES)
def test_tstr_is_a_diagram(name):
    TP = fixtures.get(name)
    X = tstr(TP)
    assert is_manifold_diagram(X).verdict
    # refinement: every stratum lies inside Q or inside its complement
    for members in X.strata.values():
        assert len({x in TP.Q for x in members}) == 1


def test_tdim_bounded_by_m():
    for TP in small_tangles():
        assert all(0 <= k <= TP.m for k in is_tangle(TP).tdim.values())


def test_tstr_of_enumerated_tangles():
    for TP in small_tangles():
        assert is_manifold_diagram(tstr(TP)).verdict


def test_tstr_needs_a_tangle():
    with pytest.raises(NotATangle):
        tstr(fixtures.get("bifur"))


def test_singularities():
    assert is_singularity(fixtures.get("cap"))
    assert not is_singularity(fixtures.get("strand"))
    cone = normal_singularity_at(fixtures.get("cap"), (0, 1))
    assert cone.n == 1 and cone.m == 0


def test_complexity():
    assert complexity(fixtures.get("cap")) == 3
    assert complexity(fixtures.get("pt2")) == 1


def test_compact_tangle():
    TP = fixtures.get("circle")
    C = TanglePresentation(compactify(TP.bundle), {(x[0] + 1, x[1] + 1) for x in TP.Q}, 1)
    assert is_compact_tangle(C).verdict is Verdict.YES
    assert is_compact_tangle(TP).verdict is Verdict.NO


def test_euler_characteristics():
    circle, strand = fixtures.get("circle"), fixtures.get("strand")
    assert cell_structure(circle).euler == 0
    assert dual_cell_structure(circle).euler == 0
    assert cell_structure(strand).euler == 1
    assert has_closed_realization(circle) and not has_closed_realization(strand)


@pytest.mark.parametrize("name", ["point", "pt2", "strand", "cap", "circle"])
def test_cell_structures_are_cellular(name):
    TP = fixtures.get(name)
    assert cell_structure(TP).cellular is Verdict.YES
    assert dual_cell_structure(TP).cellular is Verdict.YES


def test_closed_realizations_have_matching_euler():
    seen = 0
    for TP in small_tangles():
        if has_closed_realization(TP):
            seen += 1
            assert cell_structure(TP).euler == dual_cell_structure(TP).euler
    assert seen > 0


def test_report_json():
    out = is_tangle(fixtures.get("cap")).to_json()
    assert out == {"verdict": "yes", "tdim": {"0-1": 1, "0-3": 1, "1-1": 0}}


def test_tdim_is_antitone_along_q():
    cases = [fixtures.get(n) for n in TANGLES] + list(small_tangles())
    for TP in cases:
        tdim = is_tangle(TP).tdim
        top = TP.bundle.top()
        assert all(tdim[x] >= tdim[y] for x in TP.Q for y in TP.Q if top.le(x, y))
