"""Stratified trusses, coarsenings and normal forms.

A stratified truss is a truss bundle with a monotone labeling of its top total
poset.  Strata are the connected pieces of the label fibers.  A coarsening
merges runs ``R S R ... R`` of a fiber into a single regular element (level by
level, compatibly with the bundle structure) without changing the strata.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import NoCommonRefinement, NotMonotone, SidesMismatch, SizeBoundExceeded, StratumCrossesFibers
from .poset import Poset, PosetMap, cc_split, sort_key
from .truss import (
    Level,
    Restriction,
    TrussBundle,
    close_pairs,
    compactify_with_maps,
    dual,
    fiber_le,
    glue_with_maps,
    identity_pairs,
    interior_restriction,
    side_restriction,
)


class StratTruss:
    """A truss bundle with a monotone labeling of its top total poset."""

    def __init__(self, bundle: TrussBundle, label_poset: Poset, labeling: Mapping):
        self.bundle = bundle
        self.label_poset = label_poset
        top = bundle.top()
        missing = [x for x in top if x not in labeling]
        if missing:
            raise NotMonotone(f"labeling undefined on {missing[:3]}")
        self.labeling = {x: labeling[x] for x in top}
        for x, lab in self.labeling.items():
            if lab not in label_poset:
                raise NotMonotone(f"label {lab!r} of {x!r} is not in the label poset")
        for a, b in top.covers:
            if not label_poset.le(self.labeling[a], self.labeling[b]):
                raise NotMonotone(f"labels of {a!r} <= {b!r} are not ordered")
        if not bundle.is_truss and bundle.n > 0:
            cut = bundle.base_len
            for members in self.strata.values():
                if len({x[:cut] for x in members}) > 1:
                    raise StratumCrossesFibers(f"stratum {members[0]!r} spans several base elements")

    @property
    def n(self) -> int:
        return self.bundle.n

    @cached_property
    def _split(self) -> tuple[PosetMap, PosetMap]:
        f = PosetMap(self.bundle.top(), self.label_poset, self.labeling)
        return cc_split(f)

    @property
    def stratum_of(self) -> dict:
        """Top element -> stratum name (the stratum's first element)."""
        return dict(self._split[0].assignment)

    @property
    def entr(self) -> Poset:
        """The poset of strata."""
        return self._split[0].target

    @cached_property
    def strata(self) -> dict:
        out: dict = {}
        for x, s in self._split[0].assignment.items():
            out.setdefault(s, []).append(x)
        return {s: sorted(v, key=sort_key) for s, v in sorted(out.items(), key=lambda kv: sort_key(kv[0]))}

    @cached_property
    def key(self) -> tuple:
        """Canonical form: labels only matter through strata."""
        return (self.bundle.key, tuple(tuple(v) for v in self.strata.values()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StratTruss):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"StratTruss({self.bundle!r}, strata={len(self.strata)})"

    def restrict(self, res: Restriction) -> "StratTruss":
        return StratTruss(res.bundle, self.label_poset, {v: self.labeling[k] for k, v in res.top_map.items()})

    def canonical(self) -> "StratTruss":
        """Same stratified truss, labeled by strata into the strata poset."""
        return StratTruss(self.bundle, self.entr, self.stratum_of)


def make_strat(bundle: TrussBundle, label_poset: Poset, labeling: Mapping) -> StratTruss:
    return StratTruss(bundle, label_poset, labeling)


def trivially_labeled(bundle: TrussBundle, label: object = "x") -> StratTruss:
    return StratTruss(bundle, Poset.discrete([label]), {x: label for x in bundle.top()})


def from_partition(bundle: TrussBundle, blocks: Iterable[Iterable]) -> StratTruss:
    """Stratified truss whose labels are the given blocks (quotient order)."""
    label = {}
    for blk in blocks:
        blk = sorted(blk, key=sort_key)
        for x in blk:
            label[x] = blk[0]
    top = bundle.top()
    names = sorted(set(label.values()), key=sort_key)
    rel = {(label[a], label[b]) for a, b in top.covers if label[a] != label[b]}
    return StratTruss(bundle, Poset.from_relations(names, rel), label)


def strat_equal(A: StratTruss, B: StratTruss) -> bool:
    return A.key == B.key


def dual_strat(X: StratTruss) -> StratTruss:
    return StratTruss(dual(X.bundle), X.label_poset.opposite(), X.labeling)


# -- coarsenings -------------------------------------------------------------


@dataclass(frozen=True)
class Coarsening:
    source: StratTruss
    target: StratTruss
    maps: tuple = field(repr=False)  # maps[i-1]: level i elements of source -> target

    def is_identity(self) -> bool:
        return all(all(k == v for k, v in m.items()) for m in self.maps) and self.source == self.target

    def then(self, other: "Coarsening") -> "Coarsening":
        return Coarsening(
            self.source,
            other.target,
            tuple({x: m2[m1[x]] for x in m1} for m1, m2 in zip(self.maps, other.maps)),
        )


def identity_coarsening(X: StratTruss) -> Coarsening:
    return Coarsening(X, X, tuple({x: x for x in X.bundle.total(i)} for i in range(1, X.n + 1)))


@dataclass
class _Image:
    target: StratTruss | None
    problems: list[str]


def _fiber_map_problems(word: str, images: list[int], new_word: str) -> list[str]:
    probs = []
    if any(b < a for a, b in zip(images, images[1:])):
        probs.append("fiber map is not frame-monotone")
    if sorted(set(images)) != list(range(len(new_word))):
        probs.append("fiber map is not surjective")
    for j, c in enumerate(word):
        if c == "R" and new_word[images[j]] != "R":
            probs.append("fiber map sends a regular element to a singular one")
            break
    if word[0] != new_word[0] or word[-1] != new_word[-1]:
        probs.append("fiber map changes endpoint dimensions")
    return probs


def image_of(X: StratTruss, maps: list[dict]) -> _Image:
    """Build the target of candidate coarsening maps and list violated clauses.

    Target fibers are read from the images; target bordisms are the closed
    images of the source relations.
    """
    B = X.bundle
    probs: list[str] = []
    levels: list[Level] = []
    prev = {x: x for x in B.base}
    for i in range(1, B.n + 1):
        cur = maps[i - 1]
        lvl = B.levels[i - 1]
        fibers: dict = {}
        for p, w in lvl.fibers.items():
            np_ = prev[p]
            imgs = []
            for j in range(len(w)):
                y = cur[p + (j,)]
                if y[:-1] != np_:
                    return _Image(None, [f"level {i}: map does not commute with the projection at {p + (j,)}"])
                imgs.append(y[-1])
            size = max(imgs) + 1
            letters = ["S"] * size
            for j, c in enumerate(w):
                if c == "R":
                    letters[imgs[j]] = "R"
            new_word = "".join(letters)
            fp = _fiber_map_problems(w, imgs, new_word)
            if fp:
                return _Image(None, [f"level {i}, fiber over {p}: {fp[0]}"])
            if fibers.setdefault(np_, new_word) != new_word:
                return _Image(None, [f"level {i}: fibers merged into {np_} disagree"])
        try:
            below = TrussBundle(B.base, levels).total(i - 1)
        except Exception as exc:
            return _Image(None, [f"level {i - 1}: {exc}"])
        old_below = B.total(i - 1)
        gathered: dict = {}
        for u in old_below:
            for v in old_below.up(u):
                nu, nv = prev[u], prev[v]
                if nu == nv and u != v:
                    # merged arrow must land in the fiber order
                    wq = fibers[nu]
                    for a, b in B.rel(u, v):
                        if not fiber_le(wq, cur[u + (a,)][-1], cur[v + (b,)][-1]):
                            return _Image(None, [f"level {i}: merged arrow {u}->{v} is not an identity"])
                    continue
                if not below.le(nu, nv):
                    return _Image(None, [f"level {i - 1}: map is not monotone on {u}->{v}"])
                gathered.setdefault((nu, nv), set()).update(
                    (cur[u + (a,)][-1], cur[v + (b,)][-1]) for a, b in B.rel(u, v)
                )
        bordisms = {}
        for nu, nv in below.covers:
            pairs = gathered.get((nu, nv), set())
            bordisms[(nu, nv)] = close_pairs(fibers[nu], fibers[nv], pairs)
        levels.append(Level(fibers, bordisms))
        prev = cur
    target_bundle = TrussBundle(B.base, levels)
    probs = target_bundle.problems()
    if probs:
        return _Image(None, probs)
    # every source arrow must survive (monotone at the top)
    top_new = target_bundle.top()
    top_map = maps[-1] if maps else {x: x for x in B.base}
    for a, b in B.top().covers:
        if not top_new.le(top_map[a], top_map[b]):
            return _Image(None, ["map is not monotone on the top total poset"])
    labeling: dict = {}
    for x, lab in X.labeling.items():
        if labeling.setdefault(top_map[x], lab) != lab:
            return _Image(None, [f"labels disagree on the preimage of {top_map[x]}"])
    try:
        target = StratTruss(target_bundle, X.label_poset, labeling)
    except Exception as exc:
        return _Image(None, [f"target labeling: {exc}"])
    probs = entr_problems(X, target, top_map)
    return _Image(target if not probs else None, probs)


def entr_problems(X: StratTruss, Y: StratTruss, top_map: Mapping) -> list[str]:
    sx, sy = X.stratum_of, Y.stratum_of
    assign: dict = {}
    for x, s in sx.items():
        t = sy[top_map[x]]
        if assign.setdefault(s, t) != t:
            return ["a stratum is split by the map"]
    if len(set(assign.values())) != len(assign) or len(assign) != len(Y.strata):
        return ["strata are not in bijection"]
    EX, EY = X.entr, Y.entr
    for a in EX:
        for b in EX:
            if EX.le(a, b) != EY.le(assign[a], assign[b]):
                return ["entrance path posets are not isomorphic"]
    return []


def is_coarsening(F: Coarsening) -> tuple[bool, list[str]]:
    """Check all coarsening clauses; returns (ok, violated clauses)."""
    img = image_of(F.source, list(F.maps))
    if img.target is None:
        return False, img.problems
    if img.target.bundle != F.target.bundle:
        return False, ["target bundle differs from the image of the source"]
    if any(F.target.stratum_of[y] != img.target.stratum_of[y] for y in F.target.bundle.top()):
        return False, ["target strata differ from the image strata"]
    top_map = F.maps[-1] if F.maps else {}
    for x, lab in F.source.labeling.items():
        if F.target.labeling[top_map[x]] != lab:
            return False, ["labels are not preserved"]
    return True, []


# -- enumeration oracle ------------------------------------------------------


def _collapse_map(word: str, chosen: Iterable[int]) -> list[int]:
    """Frame map merging each chosen interior singular with its two neighbours."""
    chosen = set(chosen)
    out = []
    new = 0
    for j in range(len(word)):
        if j > 0 and (j in chosen or (j - 1) in chosen):
            out.append(new)
        else:
            if j > 0:
                new += 1
            out.append(new)
    return out


def _interior_singulars(word: str) -> list[int]:
    return [j for j in range(1, len(word) - 1) if word[j] == "S"]


def candidate_maps(B: TrussBundle) -> Iterator[list[dict]]:
    """All levelwise collapse maps (one subset of interior singulars per fiber)."""
    per_level = []
    for i in range(1, B.n + 1):
        fibers = sorted(B.levels[i - 1].fibers.items(), key=lambda kv: sort_key(kv[0]))
        per_level.append(fibers)
    spaces = []
    for fibers in per_level:
        for p, w in fibers:
            sing = _interior_singulars(w)
            spaces.append([c for r in range(len(sing) + 1) for c in itertools.combinations(sing, r)])
    for choice in itertools.product(*spaces):
        pos = 0
        maps = []
        prev = {x: x for x in B.base}
        for fibers in per_level:
            cur = {}
            for p, w in fibers:
                fm = _collapse_map(w, choice[pos])
                pos += 1
                for j in range(len(w)):
                    cur[p + (j,)] = prev[p] + (fm[j],)
            maps.append(cur)
            prev = cur
        yield maps


def enumerate_coarsenings(X: StratTruss, max_candidates: int = 200_000) -> list[Coarsening]:
    """Every coarsening out of ``X`` by exhaustive generation and validation."""
    count = 1
    for lvl in X.bundle.levels:
        for w in lvl.fibers.values():
            count *= 2 ** len(_interior_singulars(w))
    if count > max_candidates:
        raise SizeBoundExceeded(f"{count} candidate maps exceed the bound {max_candidates}")
    out = []
    for maps in candidate_maps(X.bundle):
        img = image_of(X, maps)
        if img.target is not None:
            out.append(Coarsening(X, img.target, tuple(maps)))
    return out


def normal_form_by_enumeration(X: StratTruss) -> StratTruss:
    """The unique coarsening target that admits only the identity coarsening."""
    terminal = []
    seen = set()
    for F in enumerate_coarsenings(X):
        if F.target.key in seen:
            continue
        seen.add(F.target.key)
        if len(enumerate_coarsenings(F.target)) == 1:
            terminal.append(F.target)
    if len(terminal) != 1:
        raise AssertionError(f"expected one terminal coarsening target, found {len(terminal)}")
    return terminal[0]


# -- normalization -----------------------------------------------------------


def _lift_maps(B: TrussBundle, i: int, level_map: dict) -> list[dict]:
    """Identity below level ``i``, ``level_map`` at ``i``, prefix-substitution above."""
    maps = [{x: x for x in B.total(k)} for k in range(1, i)]
    maps.append(level_map)
    cut = B.base_len + i
    for k in range(i + 1, B.n + 1):
        maps.append({x: level_map[x[:cut]] + x[cut:] for x in B.total(k)})
    return maps


def _collapse_orbit(B: TrussBundle, i: int, p_top: tuple, t_top: int) -> dict | None:
    below = B.total(i - 1)
    orbit = {}
    for p in below.down(p_top):
        w = B.fiber(p)
        hits = [t for (t, s) in B.rel(p, p_top) if s == t_top and w[t] == "S"]
        if hits:
            t = hits[0]
            if not 0 < t < len(w) - 1:
                return None
            orbit[p] = t
    return orbit


def try_collapse(X: StratTruss, i: int, p_top: tuple, t_top: int) -> tuple[StratTruss, list[dict]] | None:
    """Merge the singular ``p_top + (t_top,)`` and everything mapping onto it."""
    B = X.bundle
    orbit = _collapse_orbit(B, i, p_top, t_top)
    if orbit is None:
        return None
    if i == B.n:
        for p, t in orbit.items():
            labs = {X.labeling[p + (t + d,)] for d in (-1, 0, 1)}
            if len(labs) != 1:
                return None
    else:
        for p, t in orbit.items():
            if len({B.fiber(p + (t + d,)) for d in (-1, 0, 1)}) != 1:
                return None
    level_map = {}
    for p in B.total(i - 1):
        w = B.fiber(p)
        fm = _collapse_map(w, [orbit[p]] if p in orbit else [])
        for j in range(len(w)):
            level_map[p + (j,)] = p + (fm[j],)
    maps = _lift_maps(B, i, level_map)
    img = image_of(X, maps)
    if img.target is None:
        return None
    return img.target, maps


def _candidates(X: StratTruss, levels: Iterable[int]) -> Iterator[tuple[int, tuple, int]]:
    B = X.bundle
    for i in levels:
        for p in B.total(i - 1):
            for t in _interior_singulars(B.fiber(p)):
                yield i, p, t


@dataclass(frozen=True)
class NormalForm:
    nf: StratTruss
    witness: Coarsening


def _compose_maps(first: list[dict], second: list[dict]) -> list[dict]:
    return [{x: m2[y] for x, y in m1.items()} for m1, m2 in zip(first, second)]


def normalize(X: StratTruss, strategy: str = "greedy") -> NormalForm:
    """Coarsen to normal form by repeated elementary collapses.

    ``greedy`` restarts from the lexicographically least collapse after each
    step; ``descending`` exhausts the top level before moving down, repeating
    the sweep until nothing changes.
    """
    cur = X
    maps = [{x: x for x in X.bundle.total(i)} for i in range(1, X.n + 1)]
    if strategy == "greedy":
        progress = True
        while progress:
            progress = False
            for i, p, t in _candidates(cur, range(1, cur.n + 1)):
                step = try_collapse(cur, i, p, t)
                if step is not None:
                    cur, step_maps = step
                    maps = _compose_maps(maps, step_maps)
                    progress = True
                    break
    elif strategy == "descending":
        changed = True
        while changed:
            changed = False
            for i in range(cur.n, 0, -1):
                again = True
                while again:
                    again = False
                    for _, p, t in _candidates(cur, [i]):
                        step = try_collapse(cur, i, p, t)
                        if step is not None:
                            cur, step_maps = step
                            maps = _compose_maps(maps, step_maps)
                            again = changed = True
                            break
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    witness = Coarsening(X, cur, tuple(maps))
    return NormalForm(cur, witness)


def is_normalized(X: StratTruss) -> bool:
    return all(try_collapse(X, i, p, t) is None for i, p, t in _candidates(X, range(1, X.n + 1)))


def conormalize(X: StratTruss, strategy: str = "greedy") -> NormalForm:
    """Normal form for the dual notion of coarsening, which also collapses
    degenerate cells ``S R S -> S``; used for closed trusses in cell diagrams."""
    nf = normalize(dual_strat(X), strategy)
    return NormalForm(dual_strat(nf.nf), Coarsening(X, dual_strat(nf.nf), nf.witness.maps))


def is_conormalized(X: StratTruss) -> bool:
    return is_normalized(dual_strat(X))


# -- refinement for gluing ---------------------------------------------------


def refine_fiber(X: StratTruss, level: int, prefix: tuple, at: int, extra: int) -> StratTruss:
    """Subdivide the regular element ``prefix + (at,)`` into ``R (S R)^extra``.

    Towers above the new elements are copies of the tower above the old one,
    and labels are copied as well.
    """
    B = X.bundle
    w = B.fiber(prefix)
    if w[at] != "R":
        raise NoCommonRefinement("only regular elements can be subdivided")
    if extra == 0:
        return X
    cut = B.base_len + level
    width = 2 * extra

    def old_of(y: tuple) -> tuple:
        if y[: cut - 1] != prefix or len(y) < cut:
            return y
        j = y[cut - 1]
        if j < at:
            return y
        if j <= at + width:
            return y[: cut - 1] + (at,) + y[cut:]
        return y[: cut - 1] + (j - width,) + y[cut:]

    levels = list(B.levels[: level - 1])
    fibers = dict(B.levels[level - 1].fibers)
    fibers[prefix] = w[:at] + "R" + "SR" * extra + w[at + 1 :]
    bordisms = {}
    for (p, q), pairs in B.levels[level - 1].bordisms.items():
        new = set()
        for a, b in pairs:
            aa = [a] if p != prefix else ([a] if a < at else ([a + width] if a > at else range(at, at + width + 1)))
            bb = [b] if q != prefix else ([b] if b < at else ([b + width] if b > at else range(at, at + width + 1)))
            new.update(itertools.product(aa, bb))
        bordisms[(p, q)] = close_pairs(fibers[p], fibers[q], new)
    levels.append(Level(fibers, bordisms))
    for k in range(level + 1, B.n + 1):
        partial = TrussBundle(B.base, levels)
        P = partial.total(k - 1)
        fib = {y: B.fiber(old_of(y)) for y in P}
        bord = {}
        for y, z in P.covers:
            oy, oz = old_of(y), old_of(z)
            bord[(y, z)] = identity_pairs(fib[y]) if oy == oz else B.rel(oy, oz)
        levels.append(Level(fib, bord))
    out = TrussBundle(B.base, levels)
    out.validate()
    labeling = {y: X.labeling[old_of(y)] for y in out.top()}
    return StratTruss(out, X.label_poset, labeling)


def _side_pair(A: StratTruss, B: StratTruss, k: int):
    ra = side_restriction(A.bundle, k, "+")
    rb = side_restriction(B.bundle, k, "-")
    return ra, rb, A.restrict(ra), B.restrict(rb)


def _is_subdivided_interval(word: str) -> bool:
    return len(word) % 2 == 1 and word[0] == "R" and all(word[j] == "RS"[j % 2] for j in range(len(word)))


def match_sides(A: StratTruss, B: StratTruss, k: int) -> tuple[StratTruss, StratTruss]:
    """Refine ``A`` and ``B`` so that the + side of ``A`` matches the - side of ``B``.

    Restricted strategy: a side fiber consisting of one regular element is
    subdivided (with copied towers and labels) to match a fiber ``R(SR)^m`` on
    the other side.  Anything else raises :class:`NoCommonRefinement`.
    """
    try:
        ra, rb, sa, sb = _side_pair(A, B, k)
    except Exception as exc:
        raise NoCommonRefinement(f"sides are not defined: {exc}") from None
    for _ in range(len(sa.bundle.top()) + len(sb.bundle.top()) + 1):
        if strat_equal(sa, sb):
            return A, B
        target = _first_mismatch(sa.bundle, sb.bundle)
        if target is None:
            raise NoCommonRefinement("sides have equal trusses but incompatible strata")
        level, p, wa, wb = target
        if wa == "R" and _is_subdivided_interval(wb):
            old = _preimage(ra, level, p)
            A = refine_fiber(A, level, old, 0, wb.count("S"))
        elif wb == "R" and _is_subdivided_interval(wa):
            old = _preimage(rb, level, p)
            B = refine_fiber(B, level, old, 0, wa.count("S"))
        else:
            raise NoCommonRefinement(f"no restricted refinement of {wa!r} and {wb!r}")
        ra, rb, sa, sb = _side_pair(A, B, k)
    raise NoCommonRefinement("refinement did not converge")


def _first_mismatch(Sa: TrussBundle, Sb: TrussBundle):
    if Sa.n != Sb.n or Sa.base != Sb.base:
        raise NoCommonRefinement("sides have different shapes")
    for level in range(1, Sa.n + 1):
        Pa, Pb = Sa.total(level - 1), Sb.total(level - 1)
        if Pa != Pb:
            raise NoCommonRefinement(f"sides differ below level {level}")
        for p in Pa:
            wa, wb = Sa.fiber(p), Sb.fiber(p)
            if wa != wb:
                return level, p, wa, wb
    return None


def _preimage(res: Restriction, level: int, p: tuple) -> tuple:
    for old, new in res.maps[level - 1].items():
        if new == p:
            return old
    raise NoCommonRefinement(f"{p!r} has no preimage")


# -- labeled versions of the truss constructions ----------------------------------


def compactify_strat(X: StratTruss) -> StratTruss:
    """New elements carry the label of their retraction image."""
    comp = compactify_with_maps(X.bundle)
    return StratTruss(comp.bundle, X.label_poset, {y: X.labeling[r] for y, r in comp.retraction.items()})


def interior_strat(X: StratTruss) -> StratTruss:
    return X.restrict(interior_restriction(X.bundle))


def glue_strat(A: StratTruss, B: StratTruss, k: int) -> StratTruss:
    """Strict gluing of labeled trusses; labels must agree on the shared side."""
    if A.label_poset != B.label_poset:
        raise SidesMismatch("label posets differ")
    g = glue_with_maps(A.bundle, B.bundle, k)
    labeling: dict = {}
    for src, m in ((A, g.left), (B, g.right)):
        for x, y in m.items():
            if y in labeling and labeling[y] != src.labeling[x]:
                raise SidesMismatch(f"labels disagree on the shared element {y!r}")
            labeling[y] = src.labeling[x]
    return StratTruss(g.bundle, A.label_poset, labeling)
