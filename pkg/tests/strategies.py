"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

from hypothesis import reject
from hypothesis import strategies as st

from trusskit.errors import TrussError
from trusskit.poset import Poset
from trusskit.strat import from_partition
from trusskit.truss import POINT, TrussBundle, enumerate_bordisms


@st.composite
def posets(draw, max_size: int = 7):
    """Random posets from random relations along a random linear extension."""
    n = draw(st.integers(0, max_size))
    rels = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                rels.append((i, j))
    return Poset.from_relations(range(n), rels)


def words(max_len: int = 7):
    return st.integers(1, max_len).flatmap(
        lambda k: st.sampled_from(["".join("RS"[(i + s) % 2] for i in range(k)) for s in (0, 1)])
    )


@st.composite
def two_trusses(draw, max_len: int = 5):
    """Random 2-trusses over a point: fibers first, then one bordism per cover."""
    base = draw(words(max_len))
    fibers = {(i,): draw(words(max_len)) for i in range(len(base))}
    bordisms = {}
    for i, letter in enumerate(base):
        if letter != "R":
            continue
        for j in (i - 1, i + 1):
            if 0 <= j < len(base):
                options = enumerate_bordisms(fibers[(i,)], fibers[(j,)])
                if not options:
                    reject()
                bordisms[((i,), (j,))] = sorted(draw(st.sampled_from(options)))
    try:
        return TrussBundle.build(POINT, [({(): base}, {}), (fibers, bordisms)])
    except TrussError:
        reject()


@st.composite
def stratified(draw, trusses=two_trusses(), max_strata: int = 3):
    T = draw(trusses)
    top = T.top()
    elems = list(top.elements)
    labels = [draw(st.integers(0, max_strata - 1)) for _ in elems]
    blocks: dict = {}
    for x, c in zip(elems, labels):
        blocks.setdefault(c, []).append(x)
    pieces = []
    for blk in blocks.values():
        pieces.extend(top.comparability_components(blk))
    try:
        return from_partition(T, pieces)
    except TrussError:
        reject()
