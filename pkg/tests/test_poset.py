from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import posets
from trusskit.errors import CycleDetected, NotMonotone, UnknownElement
from trusskit.poset import (
    Poset,
    PosetMap,
    Verdict,
    cc_split,
    closure,
    euler_characteristic,
    is_cellular,
    order_complex,
    recognize_disk,
    recognize_sphere,
)


# -- independent oracles -------------------------------------------------------


def reachability(elements, relations):
    """Reflexive-transitive closure by Floyd-Warshall."""
    idx = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    R = [[i == j for j in range(n)] for i in range(n)]
    for a, b in relations:
        R[idx[a]][idx[b]] = True
    for k in range(n):
        for i in range(n):
            if R[i][k]:
                for j in range(n):
                    if R[k][j]:
                        R[i][j] = True
    return {(x, y) for x in elements for y in elements if R[idx[x]][idx[y]]}


def chain_counts(P: Poset) -> list[int]:
    """Number of chains of each size, by testing all subsets."""
    elems = list(P)
    counts = []
    for k in range(1, len(elems) + 1):
        c = sum(
            1 for sub in itertools.combinations(elems, k)
            if all(P.le(a, b) or P.le(b, a) for a, b in itertools.combinations(sub, 2))
        )
        if c == 0:
            break
        counts.append(c)
    return counts


def mobius_euler(P: Poset) -> int:
    """Euler characteristic of the order complex as 1 + mu(bottom, top) of the bounded extension."""
    elems = list(P)
    order = sorted(elems, key=lambda x: len(P.down(x)))
    mu = {}
    for y in order:
        mu[y] = -1 - sum(mu[z] for z in P.down(y, strict=True))
    top = -1 - sum(mu.values())
    return 1 + top


def crown(k: int) -> Poset:
    """Face poset of a k-gon: vertices below the two edges containing them."""
    vs = [f"v{i}" for i in range(k)]
    es = [f"e{i}" for i in range(k)]
    rel = [(vs[i], es[i]) for i in range(k)] + [(vs[(i + 1) % k], es[i]) for i in range(k)]
    return Poset.from_relations(vs + es, rel)


def simplex_boundary(n: int) -> Poset:
    """Proper non-empty faces of the n-simplex, ordered by inclusion."""
    faces = [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(n + 1), k)]
    rel = [(a, b) for a in faces for b in faces if a < b]
    return Poset.from_relations(faces, rel)


def suspension(P: Poset, tag: str = "") -> Poset:
    poles = ["north" + tag, "south" + tag]
    elems = list(P) + poles
    rel = [(a, b) for a, b in P.covers] + [(x, pole) for x in P for pole in poles]
    return Poset.from_relations(elems, rel)


def product(P: Poset, Q: Poset) -> Poset:
    elems = [(a, b) for a in P for b in Q]
    rel = [((a, b), (c, d)) for (a, b) in elems for (c, d) in elems if P.le(a, c) and Q.le(b, d)]
    return Poset.from_relations(elems, rel)


def chain(k: int) -> Poset:
    return Poset.from_relations(range(k), [(i, i + 1) for i in range(k - 1)])


# -- construction --------------------------------------------------------------


@given(posets())
def test_order_is_transitive_closure(P):
    expected = reachability(list(P), P.covers)
    assert {(x, y) for x in P for y in P if P.le(x, y)} == expected


@given(posets())
def test_covers_have_nothing_between(P):
    for a, b in P.covers:
        assert P.lt(a, b)
        assert not any(P.lt(a, c) and P.lt(c, b) for c in P)


@given(posets())
def test_up_and_down_sets(P):
    for x in P:
        assert set(P.up(x)) == {y for y in P if P.le(x, y)}
        assert set(P.down(x, strict=True)) == {y for y in P if P.lt(y, x)}
        assert P.is_up_closed(P.up(x))
        assert P.is_down_closed(P.down(x))


def test_cycle_rejected():
    with pytest.raises(CycleDetected):
        Poset.from_relations("abc", [("a", "b"), ("b", "c"), ("c", "a")])


def test_unknown_element_rejected():
    with pytest.raises(UnknownElement):
        Poset.from_relations("ab", [("a", "z")])


@given(posets())
def test_opposite_reverses(P):
    Q = P.opposite()
    assert all(P.le(x, y) == Q.le(y, x) for x in P for y in P)
    assert Q.opposite() == P


@given(posets(), st.data())
def test_induced_keeps_order(P, data):
    sub = data.draw(st.sets(st.sampled_from(list(P)))) if len(P) else set()
    S = P.induced(sub)
    assert set(S) == set(sub)
    assert all(S.le(x, y) == P.le(x, y) for x in S for y in S)


def test_closures():
    P = chain(4)
    assert set(closure(P, 1, "down")) == {0, 1}
    assert set(closure(P, 1, "up")) == {1, 2, 3}
    assert set(closure(P, 1, "strict-up")) == {2, 3}


@given(posets())
def test_comparability_components_partition(P):
    comps = P.comparability_components()
    assert sorted(x for c in comps for x in c) == sorted(P, key=repr) or sum(map(len, comps)) == len(P)
    where = {x: i for i, c in enumerate(comps) for x in c}
    for a, b in P.covers:
        assert where[a] == where[b]


# -- maps ----------------------------------------------------------------------


def test_poset_map_must_be_monotone():
    with pytest.raises(NotMonotone):
        PosetMap(chain(2), chain(2), {0: 1, 1: 0})


@given(posets(), st.data())
def test_cc_split_factors_the_labeling(P, data):
    labels = chain(3)
    # monotone labeling: take a linear extension and cut it into three runs
    order = sorted(P, key=lambda x: len(P.down(x)))
    cuts = sorted(data.draw(st.lists(st.integers(0, len(order)), min_size=2, max_size=2)))
    f = {x: (0 if i < cuts[0] else 1 if i < cuts[1] else 2) for i, x in enumerate(order)}
    if not all(f[a] <= f[b] for a, b in P.covers):
        return
    char, cons = cc_split(PosetMap(P, labels, f))
    assert all(cons(char(x)) == f[x] for x in P)
    for x in P:
        block = [y for y in P if char(y) == char(x)]
        assert len(P.comparability_components(block)) == 1


# -- order complexes -----------------------------------------------------------


@given(posets(6))
def test_order_complex_counts_match_subset_oracle(P):
    assert order_complex(P).counts() == chain_counts(P)


@given(posets(7))
def test_euler_characteristic_matches_mobius(P):
    assert euler_characteristic(P) == mobius_euler(P)


# -- spheres and disks ---------------------------------------------------------


@pytest.mark.parametrize("P,d", [
    (Poset.discrete([]), -1),
    (Poset.discrete("ab"), 0),
    (crown(2), 1),
    (crown(5), 1),
    (simplex_boundary(3), 2),
    (suspension(crown(4)), 2),
    (suspension(suspension(Poset.discrete("ab")), "2"), 2),
])
def test_sphere_positives(P, d):
    assert recognize_sphere(P, d) is Verdict.YES


@pytest.mark.parametrize("P,d", [
    (chain(2), 0),
    (Poset.discrete("a"), 0),
    (chain(3), 1),
    (Poset.discrete("a"), -1),
    (crown(4), 2),
    (product(crown(2), crown(2)), 2),
    (simplex_boundary(3), 1),
])
def test_sphere_negatives(P, d):
    assert recognize_sphere(P, d) is Verdict.NO


def test_torus_has_euler_zero():
    assert euler_characteristic(product(crown(2), crown(2))) == 0


def test_high_spheres_are_unknown():
    assert recognize_sphere(simplex_boundary(4), 3) is Verdict.UNKNOWN
    assert recognize_sphere(chain(3), 4) is Verdict.UNKNOWN


def test_disks():
    assert recognize_disk(Poset.discrete("a"), 0) is Verdict.YES
    zigzag = Poset.from_relations("abcd", [("a", "b"), ("c", "b"), ("c", "d")])
    assert recognize_disk(zigzag, 1) is Verdict.YES
    assert recognize_disk(chain(3), 1) is Verdict.NO
    assert recognize_disk(chain(3), 2) is Verdict.YES
    assert recognize_disk(crown(3), 1) is Verdict.NO
    cone = Poset.from_relations(list(crown(4)) + ["c"], list(crown(4).covers) + [(x, "c") for x in crown(4)])
    assert recognize_disk(cone, 2) is Verdict.YES
    assert recognize_disk(suspension(crown(4)), 2) is Verdict.NO


def test_closed_cell_face_posets_are_cellular():
    # the 2-simplex with faces ordered so that each cell's strict up-closure is its boundary
    P = simplex_boundary(3).opposite()
    assert is_cellular(P, lambda f: len(f) - 1) is Verdict.YES
    assert is_cellular(crown(4).opposite(), lambda x: 1 if x.startswith("e") else 0) is Verdict.YES
    assert is_cellular(chain(3).opposite(), lambda i: i) is Verdict.NO
