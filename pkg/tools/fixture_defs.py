"""Hand-built fixtures; `python3 tools/build_fixtures.py` writes them as JSON."""

from __future__ import annotations

from trusskit.tangle import TanglePresentation
from trusskit.truss import POINT, TrussBundle

SPLIT = [(0, 0), (0, 2)]  # R -> RSR: one strand appears
MERGE = [(0, 0), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (4, 2)]  # RSRSR -> RSR: two strands meet
VANISH = [(0, 0), (0, 1), (0, 2)]  # R -> RSR, as a relation from the empty side


def level1(word):
    return ({(): word}, {})


def over_interval(fibers, bordisms):
    """Second level over the level-1 word of length ``len(fibers)``."""
    fib = {(i,): w for i, w in enumerate(fibers)}
    return fib, {((r,), (s,)): pairs for (r, s), pairs in bordisms.items()}


def pt2():
    B = TrussBundle.build(POINT, [level1("RSR"), over_interval(["R", "RSR", "R"], {(0, 1): SPLIT, (2, 1): SPLIT})])
    return TanglePresentation(B, {(1, 1)}, 0)


def cap():
    B = TrussBundle.build(POINT, [level1("RSR"), over_interval(["RSRSR", "RSR", "R"], {(0, 1): MERGE, (2, 1): VANISH})])
    return TanglePresentation(B, {(1, 1), (0, 1), (0, 3)}, 1)


def strand():
    B = TrussBundle.build(POINT, [level1("R"), ({(0,): "RSR"}, {})])
    return TanglePresentation(B, {(0, 1)}, 1)


def bifur():
    ident = [(0, 0), (1, 1), (2, 2)]
    merge = [(0, 0), (1, 1), (2, 1), (3, 1), (4, 2)]
    B = TrussBundle.build(POINT, [level1("RSR"), over_interval(["RSR", "RSR", "RSRSR"], {(0, 1): ident, (2, 1): merge})])
    return TanglePresentation(B, {(0, 1), (1, 1), (2, 1), (2, 3)}, 1)


def circle():
    B = TrussBundle.build(
        POINT,
        [level1("RSRSR"), over_interval(["R", "RSR", "RSRSR", "RSR", "R"], {(0, 1): VANISH, (2, 1): MERGE, (2, 3): MERGE, (4, 3): VANISH})],
    )
    return TanglePresentation(B, {(1, 1), (2, 1), (2, 3), (3, 1)}, 1)


# -- 2-singularities in 3-space with a single target strand --------------------

ONE_TO_TWO_SHEETS = [(0, 0), (1, 1), (2, 2), (2, 4)]  # RSR -> RSRSR, strand keeps index 1
ONE_TO_TWO_SHEETS_TOP = [(0, 0), (0, 2), (1, 3), (2, 4)]  # RSR -> RSRSR, strand goes to index 3
THREE_TO_TWO_UPPER = [(0, 0), (1, 1), (2, 2), (3, 3), (4, 3), (5, 3), (6, 4)]  # branches 2,3 meet
THREE_TO_TWO_LOWER = [(0, 0), (1, 1), (2, 1), (3, 1), (4, 2), (5, 3), (6, 4)]  # branches 1,2 meet
IDENT3 = [(0, 0), (1, 1), (2, 2)]


def strand_cone(source_bordisms, source_Q):
    """Cone on (source -> single strand): the source lives over level-2 word RSRSR
    with level-3 fibers RSR, RSRSR, RSRSRSR, RSRSR, RSR."""
    f_words = ["RSR", "RSRSR", "RSRSRSR", "RSRSR", "RSR"]
    fibers3 = {(0, j): w for j, w in enumerate(f_words)}
    fibers3.update({(1, k): "RSR" for k in range(3)})
    fibers3[(2, 0)] = "RSR"
    bor3 = {((0, a), (0, b)): pairs for (a, b), pairs in source_bordisms.items()}
    bor3.update({((1, 0), (1, 1)): IDENT3, ((1, 2), (1, 1)): IDENT3})
    bor3.update({((0, 0), (1, 0)): IDENT3, ((0, 1), (1, 1)): MERGE, ((0, 3), (1, 1)): MERGE, ((0, 4), (1, 2)): IDENT3})
    bor3.update({((2, 0), (1, 0)): IDENT3, ((2, 0), (1, 2)): IDENT3})
    level2 = ({(0,): "RSRSR", (1,): "RSR", (2,): "R"}, {((0,), (1,)): MERGE, ((2,), (1,)): VANISH})
    B = TrussBundle.build(POINT, [level1("RSR"), level2, (fibers3, bor3)])
    Q = {(0,) + q for q in source_Q} | {(1, 0, 1), (1, 1, 1), (1, 2, 1), (2, 0, 1)}
    return TanglePresentation(B, Q, 2)


def cusp():
    """Cone on an S-shaped strand (folds joining the upper, then the lower pair)."""
    return strand_cone(
        {(0, 1): ONE_TO_TWO_SHEETS, (2, 1): THREE_TO_TWO_UPPER, (2, 3): THREE_TO_TWO_LOWER, (4, 3): ONE_TO_TWO_SHEETS_TOP},
        {(0, 1), (1, 1), (1, 3), (2, 1), (2, 3), (2, 5), (3, 1), (3, 3), (4, 1)},
    )


def circle_by_strand():
    """Cone on a strand with a small circle above it."""
    return strand_cone(
        {(0, 1): ONE_TO_TWO_SHEETS, (2, 1): THREE_TO_TWO_UPPER, (2, 3): THREE_TO_TWO_UPPER, (4, 3): ONE_TO_TWO_SHEETS},
        {(0, 1), (1, 1), (1, 3), (2, 1), (2, 3), (2, 5), (3, 1), (3, 3), (4, 1)},
    )


# -- 1-tangle caps in 3-space ----------------------------------------------------

R_TO_RSRSR = [(0, 0), (0, 2), (0, 4)]


def _cap3(r0_level2, r0_fibers, r0_cross, Q):
    """Cap of a curve in 3-space; the special slice is a single point over RSR/RSR."""
    fibers2 = {(0,): r0_level2, (1,): "RSR", (2,): "R"}
    merge2 = MERGE if r0_level2 == "RSRSR" else IDENT3
    bor2 = {((0,), (1,)): merge2, ((2,), (1,)): VANISH}
    fibers3 = {(0, j): w for j, w in enumerate(r0_fibers)}
    fibers3.update({(1, 0): "R", (1, 1): "RSR", (1, 2): "R", (2, 0): "R"})
    bor3 = {}
    for j, w in enumerate(r0_level2):
        if w == "R":
            for s in (j - 1, j + 1):
                if 0 <= s < len(r0_level2):
                    bor3[((0, j), (0, s))] = VANISH if r0_fibers[s] == "RSR" else R_TO_RSRSR
    bor3.update({((1, 0), (1, 1)): VANISH, ((1, 2), (1, 1)): VANISH})
    bor3.update({((2, 0), (1, 0)): [(0, 0)], ((2, 0), (1, 2)): [(0, 0)]})
    bor3.update(r0_cross)
    B = TrussBundle.build(POINT, [level1("RSR"), (fibers2, bor2), (fibers3, bor3)])
    return TanglePresentation(B, Q, 1)


def flat_cap3():
    """Both strands over one level-2 point, stacked in the last direction."""
    return _cap3(
        "RSR",
        ["R", "RSRSR", "R"],
        {((0, 0), (1, 0)): [(0, 0)], ((0, 1), (1, 1)): MERGE, ((0, 2), (1, 2)): [(0, 0)]},
        {(0, 1, 1), (0, 1, 3), (1, 1, 1)},
    )


def spread_cap3():
    """Strands over two distinct level-2 points."""
    return _cap3(
        "RSRSR",
        ["R", "RSR", "R", "RSR", "R"],
        {((0, 0), (1, 0)): [(0, 0)], ((0, 1), (1, 1)): IDENT3, ((0, 3), (1, 1)): IDENT3, ((0, 4), (1, 2)): [(0, 0)]},
        {(0, 1, 1), (0, 3, 1), (1, 1, 1)},
    )


# -- a braid generator: two strands in 3-space, one passing over the other ---------


def braid():
    fibers2 = {(0,): "RSRSR", (1,): "RSR", (2,): "RSRSR"}
    bor2 = {((0,), (1,)): MERGE, ((2,), (1,)): MERGE}
    fibers3 = {}
    bor3 = {}
    for s in (0, 2):
        for j, w in enumerate(["R", "RSR", "R", "RSR", "R"]):
            fibers3[(s, j)] = w
        for r, t in [(0, 1), (2, 1), (2, 3), (4, 3)]:
            bor3[((s, r), (s, t))] = VANISH
        bor3[((s, 0), (1, 0))] = [(0, 0)]
        bor3[((s, 4), (1, 2))] = [(0, 0)]
    fibers3.update({(1, 0): "R", (1, 1): "RSRSR", (1, 2): "R"})
    bor3[((1, 0), (1, 1))] = R_TO_RSRSR
    bor3[((1, 2), (1, 1))] = R_TO_RSRSR
    # the strand starting low in the second direction is on top in the third
    bor3[((0, 1), (1, 1))] = ONE_TO_TWO_SHEETS_TOP
    bor3[((0, 3), (1, 1))] = ONE_TO_TWO_SHEETS
    bor3[((2, 1), (1, 1))] = ONE_TO_TWO_SHEETS
    bor3[((2, 3), (1, 1))] = ONE_TO_TWO_SHEETS_TOP
    B = TrussBundle.build(POINT, [level1("RSR"), (fibers2, bor2), (fibers3, bor3)])
    Q = {(0, 1, 1), (0, 3, 1), (1, 1, 1), (1, 1, 3), (2, 1, 1), (2, 3, 1)}
    return TanglePresentation(B, Q, 1)


# -- perturbations of 0-tangles in the interval -----------------------------------


def _points(k):
    return "R" + "SR" * k


def point_split(before, after, bordism):
    """Perturbation certificate from ``before`` points to ``after`` points."""
    from trusskit.explore import ARROW, GENERIC, SPECIAL, PerturbationCertificate, TangleBundle

    B = TrussBundle.build(
        ARROW, [({SPECIAL: _points(before), GENERIC: _points(after)}, {(GENERIC, SPECIAL): bordism})]
    )
    Q = {SPECIAL + (2 * i + 1,) for i in range(before)} | {GENERIC + (2 * i + 1,) for i in range(after)}
    return PerturbationCertificate(TangleBundle(B, Q, 0))


def one_to_two():
    return point_split(1, 2, MERGE)


def two_to_three():
    return point_split(2, 3, THREE_TO_TWO_LOWER)


def one_to_three():
    return point_split(1, 3, [(0, 0), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 2)])


# -- small extras -----------------------------------------------------------------


def point():
    """The point singularity in the interval."""
    B = TrussBundle.build(POINT, [level1("RSR")])
    return TanglePresentation(B, {(1,)}, 0)


def vanishing_point():
    """Special fiber a point, generic fiber empty: surjectivity fails."""
    from trusskit.explore import ARROW, GENERIC, SPECIAL, PerturbationCertificate, TangleBundle

    B = TrussBundle.build(ARROW, [({SPECIAL: "RSR", GENERIC: "R"}, {(GENERIC, SPECIAL): VANISH})])
    return PerturbationCertificate(TangleBundle(B, {SPECIAL + (1,)}, 0))


def constant_rsr():
    """``RSR`` with a single label everywhere; its normal form is ``R``."""
    from trusskit.strat import trivially_labeled

    return trivially_labeled(TrussBundle.build(POINT, [level1("RSR")]), "x")
