from __future__ import annotations

import pytest
from hypothesis import given, settings

from strategies import stratified, two_trusses
from trusskit.errors import NoCommonRefinement, NotMonotone, SidesMismatch
from trusskit.poset import Poset
from trusskit.strat import (
    compactify_strat,
    conormalize,
    dual_strat,
    enumerate_coarsenings,
    from_partition,
    glue_strat,
    interior_strat,
    is_coarsening,
    is_conormalized,
    is_normalized,
    make_strat,
    match_sides,
    normal_form_by_enumeration,
    normalize,
    refine_fiber,
    trivially_labeled,
)
from trusskit.truss import constant_truss, one_truss

POINT_IN_LINE = Poset.from_relations("apb", [("a", "p"), ("b", "p")])


def marked(word: str, at: int) -> object:
    """1-truss with the singular element ``at`` in its own stratum."""
    labels = {(i,): ("p" if i == at else "a" if i < at else "b") for i in range(len(word))}
    return make_strat(one_truss(word), POINT_IN_LINE, labels)


def test_labeling_must_be_monotone():
    with pytest.raises(NotMonotone):
        make_strat(one_truss("RSR"), POINT_IN_LINE, {(0,): "p", (1,): "a", (2,): "b"})


def test_strata_are_connected_pieces():
    X = trivially_labeled(one_truss("RSRSR"))
    assert len(X.strata) == 1
    Y = from_partition(one_truss("RSR"), [[(0,)], [(1,)], [(2,)]])
    assert len(Y.strata) == 3 and len(Y.entr.covers) == 2


def test_normalize_constant_interval():
    nf = normalize(trivially_labeled(one_truss("RSRSR"))).nf
    assert nf.bundle == one_truss("R")


def test_marked_point_is_normal():
    X = marked("RSR", 1)
    assert is_normalized(X)
    assert normalize(X).nf == X
    assert normalize(marked("RSRSR", 3)).nf == marked("RSR", 1)


def test_normalize_square():
    X = trivially_labeled(constant_truss(["RSR", "RSRSR"]))
    assert normalize(X).nf.bundle == constant_truss(["R", "R"])


@settings(max_examples=40)
@given(stratified(two_trusses(max_len=3)))
def test_normalize_matches_enumeration(X):
    if len(X.bundle.top()) > 7:
        return
    assert normalize(X).nf == normal_form_by_enumeration(X)


@given(stratified())
def test_normalize_is_idempotent_and_witnessed(X):
    res = normalize(X)
    assert is_normalized(res.nf)
    assert normalize(res.nf).nf == res.nf
    ok, problems = is_coarsening(res.witness)
    assert ok, problems
    assert res.nf.entr == X.entr or len(res.nf.strata) == len(X.strata)


@given(stratified())
def test_normalize_strategies_agree(X):
    assert normalize(X, "greedy").nf == normalize(X, "descending").nf


def test_enumerated_coarsenings_are_valid():
    X = trivially_labeled(one_truss("RSRSR"))
    targets = {F.target.bundle for F in enumerate_coarsenings(X)}
    assert targets == {one_truss("RSRSR"), one_truss("RSR"), one_truss("R")}
    assert all(is_coarsening(F)[0] for F in enumerate_coarsenings(X))


def test_conormalize_collapses_closed_runs():
    X = trivially_labeled(one_truss("SRSRS"))
    assert normalize(X).nf.bundle == one_truss("SRS")
    assert conormalize(X).nf.bundle == one_truss("S")
    assert is_conormalized(conormalize(X).nf)


@given(stratified())
def test_conormalize_is_dual_normalize(X):
    assert conormalize(X).nf == dual_strat(normalize(dual_strat(X)).nf)


@given(stratified())
def test_dual_strat_involution(X):
    assert dual_strat(dual_strat(X)) == X
    assert dual_strat(X).entr == X.entr.opposite()


# -- labeled constructions -----------------------------------------------------


@given(stratified())
def test_compactify_interior_strat(X):
    if not X.bundle.is_open():
        return
    C = compactify_strat(X)
    assert C.bundle.is_closed()
    assert interior_strat(C) == X


def test_glue_strat_labels():
    A = marked("SRSRS", 2)
    labels = {(i,): "b" for i in range(3)}
    B = make_strat(one_truss("SRS"), POINT_IN_LINE, labels)
    G = glue_strat(A, B, 1)
    assert G.bundle == one_truss("SRSRSRS")
    assert [G.labeling[(i,)] for i in range(7)] == ["a", "a", "p", "b", "b", "b", "b"]
    with pytest.raises(SidesMismatch):
        glue_strat(B, A, 1)


def test_refine_and_match_sides():
    square = trivially_labeled(constant_truss(["SRS", "R"]))
    Y = refine_fiber(square, 2, (2,), 0, 1)
    assert Y.bundle.fiber((2,)) == "RSR"
    other = trivially_labeled(constant_truss(["SRS", "RSR"]))
    A, B = match_sides(square, other, 2)
    assert A.bundle.fiber((2,)) == "RSR" and B == other
    with pytest.raises(NoCommonRefinement):
        match_sides(trivially_labeled(constant_truss(["SRS", "RSRSR"])), other, 2)
