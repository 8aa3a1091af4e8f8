"""1-trusses, 1-truss bordisms and towers of 1-truss bundles.

A fiber is a word over ``S`` (singular, dim 0) and ``R`` (regular, dim 1) that
alternates.  Inside a fiber, a regular element sits below each adjacent
singular element.  A bordism between two fibers is a closed relation
``{(source index, target index)}``; pairs mean "source element <= target
element" in the total poset.

A :class:`TrussBundle` is a base poset plus a list of levels.  Level ``i``
assigns a fiber word to every element of the level ``i-1`` total poset and a
bordism to every cover of it.  Elements of the level ``i`` total poset are
tuples ``prefix + (index,)``; the base elements are tuples as well (a truss
has the single base element ``()``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (
    BordismError,
    BundleError,
    FiberError,
    InvalidPath,
    LevelOutOfRange,
    NotASubtruss,
    NotClosed,
    NotOpen,
    SidesMismatch,
)
from .poset import Poset, sort_key

Pairs = frozenset  # frozenset[tuple[int, int]]


# -- 1-trusses -------------------------------------------------------------


def check_word(word: str) -> str:
    if not isinstance(word, str) or not word:
        raise FiberError("a 1-truss must be a non-empty word")
    if set(word) - {"S", "R"}:
        raise FiberError(f"letters other than S/R in {word!r}")
    for a, b in zip(word, word[1:]):
        if a == b:
            raise FiberError(f"{word!r} does not alternate")
    return word


def fiber_le(word: str, a: int, b: int) -> bool:
    return a == b or (abs(a - b) == 1 and word[a] == "R" and word[b] == "S")


def flip(word: str) -> str:
    return word.translate(str.maketrans("SR", "RS"))


@dataclass(frozen=True)
class Fiber:
    """A 1-truss given by its word in frame order."""

    word: str

    def __post_init__(self):
        check_word(self.word)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(0 if c == "S" else 1 for c in self.word)

    @property
    def kind(self) -> str:
        ends = self.word[0] + self.word[-1]
        return {"SS": "closed", "RR": "open"}.get(ends, "mixed")

    def singulars(self) -> list[int]:
        return [i for i, c in enumerate(self.word) if c == "S"]

    def regulars(self) -> list[int]:
        return [i for i, c in enumerate(self.word) if c == "R"]

    def le(self, a: int, b: int) -> bool:
        return fiber_le(self.word, a, b)

    def poset(self) -> Poset:
        return Poset.from_relations(range(len(self.word)), fiber_covers(self.word))

    def dual(self) -> "Fiber":
        return Fiber(flip(self.word))

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return self.word


def fiber_covers(word: str) -> list[tuple[int, int]]:
    out = []
    for i in range(len(word) - 1):
        out.append((i, i + 1) if word[i] == "R" else (i + 1, i))
    return out


# -- bordisms --------------------------------------------------------------


def close_pairs(src: str, tgt: str, pairs: Iterable[tuple[int, int]]) -> Pairs:
    """Smallest closed relation containing ``pairs``.

    Fiber orders have length-one chains only, so one step of saturation suffices.
    """
    out = set()
    for t, s in pairs:
        lows = [t] + ([u for u in (t - 1, t + 1) if 0 <= u < len(src)] if src[t] == "S" else [])
        highs = [s] + ([u for u in (s - 1, s + 1) if 0 <= u < len(tgt)] if tgt[s] == "R" else [])
        out.update(itertools.product(lows, highs))
    return frozenset(out)


def identity_pairs(word: str) -> Pairs:
    return frozenset((a, b) for a in range(len(word)) for b in range(len(word)) if fiber_le(word, a, b))


def compose_pairs(first: Iterable[tuple[int, int]], second: Iterable[tuple[int, int]]) -> Pairs:
    by_mid: dict[int, list[int]] = {}
    for b, c in second:
        by_mid.setdefault(b, []).append(c)
    return frozenset((a, c) for a, b in first for c in by_mid.get(b, ()))


def transpose_pairs(pairs: Iterable[tuple[int, int]]) -> Pairs:
    return frozenset((b, a) for a, b in pairs)


def bordism_problems(src: str, tgt: str, pairs: Pairs) -> list[str]:
    """Violated bordism conditions (empty list when valid)."""
    probs = []
    for t, s in pairs:
        if not (0 <= t < len(src) and 0 <= s < len(tgt)):
            probs.append(f"pair {(t, s)} out of range")
            return probs
    if close_pairs(src, tgt, pairs) != pairs:
        probs.append("relation is not closed")
    for t in range(len(src)):
        if src[t] == "S":
            images = [s for (u, s) in pairs if u == t and tgt[s] == "S"]
            if len(images) != 1:
                probs.append(f"source singular {t} has {len(images)} singular images")
    for s in range(len(tgt)):
        if tgt[s] == "R":
            pre = [t for (t, u) in pairs if u == s and src[t] == "R"]
            if len(pre) != 1:
                probs.append(f"target regular {s} has {len(pre)} regular preimages")
    ordered = sorted(pairs)
    for (t, s), (t2, s2) in itertools.combinations(ordered, 2):
        if (t < t2 and s2 < s) or (t2 < t and s < s2):
            probs.append(f"pairs {(t, s)} and {(t2, s2)} cross")
            break
    related_src = {t for t, _ in pairs}
    related_tgt = {s for _, s in pairs}
    if len(related_src) != len(src) or len(related_tgt) != len(tgt):
        probs.append("some element is unrelated")
    return probs


@dataclass(frozen=True)
class Bordism:
    """A 1-truss bordism, stored fully closed."""

    source: Fiber
    target: Fiber
    pairs: Pairs

    @classmethod
    def generated(cls, source: str, target: str, pairs: Iterable[tuple[int, int]]) -> "Bordism":
        src, tgt = check_word(source), check_word(target)
        b = cls(Fiber(src), Fiber(tgt), close_pairs(src, tgt, pairs))
        b.validate()
        return b

    @classmethod
    def identity(cls, word: str) -> "Bordism":
        return cls(Fiber(word), Fiber(word), identity_pairs(word))

    def problems(self) -> list[str]:
        return bordism_problems(self.source.word, self.target.word, self.pairs)

    def validate(self) -> None:
        probs = self.problems()
        if probs:
            raise BordismError("; ".join(probs))

    def compose(self, other: "Bordism") -> "Bordism":
        if self.target != other.source:
            raise BordismError("bordisms are not composable")
        return Bordism(self.source, other.target, compose_pairs(self.pairs, other.pairs))

    def dual(self) -> "Bordism":
        return Bordism(self.target.dual(), self.source.dual(), transpose_pairs(self.pairs))


def enumerate_bordisms(src: str, tgt: str) -> list[Pairs]:
    """All bordisms ``src -> tgt`` in a deterministic order.

    A bordism is fixed by its monotone singular function and monotone regular
    cofunction; everything else is forced by closure and non-crossing.  The
    lone exception is ``R -> S``, whose only bordism is the full relation.
    """
    sing_s = [i for i, c in enumerate(src) if c == "S"]
    sing_t = [i for i, c in enumerate(tgt) if c == "S"]
    reg_s = [i for i, c in enumerate(src) if c == "R"]
    reg_t = [i for i, c in enumerate(tgt) if c == "R"]
    if not sing_s and not reg_t:
        pairs = frozenset({(0, 0)})
        return [pairs] if not bordism_problems(src, tgt, pairs) else []
    out = []
    seen = set()
    for g in itertools.combinations_with_replacement(sing_t, len(sing_s)):
        for h in itertools.combinations_with_replacement(reg_s, len(reg_t)):
            gen = list(zip(sing_s, g)) + [(t, s) for s, t in zip(reg_t, h)]
            pairs = close_pairs(src, tgt, gen)
            if pairs in seen:
                continue
            seen.add(pairs)
            if not bordism_problems(src, tgt, pairs):
                out.append(pairs)
    return out


# -- bundles ---------------------------------------------------------------


@dataclass(frozen=True)
class Level:
    fibers: Mapping[tuple, str]
    bordisms: Mapping[tuple, Pairs]

    def key(self) -> tuple:
        return (
            tuple(sorted(self.fibers.items(), key=lambda kv: sort_key(kv[0]))),
            tuple(sorted(((k, tuple(sorted(v))) for k, v in self.bordisms.items()), key=lambda kv: sort_key(kv[0]))),
        )


def _base_len(base: Poset) -> int:
    lengths = {len(x) for x in base}
    if len(lengths) > 1:
        raise BundleError("base elements must be tuples of one common length")
    return lengths.pop() if lengths else 0


class TrussBundle:
    """A tower of 1-truss bundles over ``base``.  Immutable once built."""

    def __init__(self, base: Poset, levels: Iterable[Level]):
        for x in base:
            if not isinstance(x, tuple):
                raise BundleError(f"base element {x!r} is not a tuple")
        self.base = base
        self.levels: tuple[Level, ...] = tuple(levels)
        self.base_len = _base_len(base)
        self._totals: dict[int, Poset] = {0: base}
        self._rels: dict[tuple, Pairs] = {}

    # -- construction helpers ------------------------------------------

    @classmethod
    def build(cls, base: Poset, levels: Iterable[tuple[Mapping, Mapping]], validate: bool = True) -> "TrussBundle":
        """Bundle from fiber words and generating bordism pairs (closed here)."""
        built: list[Level] = []
        for fibers, bordisms in levels:
            fibers = {tuple(k): check_word(v) for k, v in fibers.items()}
            closed = {}
            for (p, q), pairs in bordisms.items():
                p, q = tuple(p), tuple(q)
                if p not in fibers or q not in fibers:
                    raise BundleError(f"bordism over {(p, q)} references a missing fiber")
                pairs = [tuple(x) for x in pairs]
                for a, b in pairs:
                    if not (0 <= a < len(fibers[p]) and 0 <= b < len(fibers[q])):
                        raise BordismError(f"pair {(a, b)} out of range over {(p, q)}")
                closed[(p, q)] = close_pairs(fibers[p], fibers[q], pairs)
            built.append(Level(fibers, closed))
        out = cls(base, built)
        if validate:
            out.validate()
        return out

    # -- basic structure -----------------------------------------------

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def is_truss(self) -> bool:
        return len(self.base) == 1 and self.base_len == 0

    def _check_level(self, i: int) -> None:
        if not 0 <= i <= self.n:
            raise LevelOutOfRange(f"level {i} outside 0..{self.n}")

    def level_of(self, x: tuple) -> int:
        return len(x) - self.base_len

    def fiber(self, x: tuple) -> str:
        """Word of the fiber over ``x`` (an element of some total poset below the top)."""
        i = self.level_of(x)
        self._check_level(i + 1)
        try:
            return self.levels[i].fibers[x]
        except KeyError:
            raise InvalidPath(f"{x!r} is not an element of level {i}") from None

    def total(self, i: int | None = None) -> Poset:
        """Total poset at level ``i`` (the top level by default)."""
        if i is None:
            i = self.n
        self._check_level(i)
        if i not in self._totals:
            below = self.total(i - 1)
            lvl = self.levels[i - 1]
            elems = []
            rels = []
            for p in below:
                try:
                    w = lvl.fibers[p]
                except KeyError:
                    raise BundleError(f"level {i} lacks a fiber over {p!r}") from None
                elems.extend(p + (j,) for j in range(len(w)))
                rels.extend((p + (a,), p + (b,)) for a, b in fiber_covers(w))
            for (p, q), pairs in lvl.bordisms.items():
                rels.extend((p + (a,), q + (b,)) for a, b in pairs)
            self._totals[i] = Poset.from_relations(elems, rels)
        return self._totals[i]

    def top(self) -> Poset:
        return self.total(self.n)

    def rel(self, p: tuple, q: tuple) -> Pairs:
        """Composite bordism over the arrow ``p <= q`` of a total poset."""
        key = (p, q)
        if key not in self._rels:
            i = self.level_of(p) + 1
            T = self.total(i)
            wp, wq = self.fiber(p), self.fiber(q)
            self._rels[key] = frozenset(
                (a, b) for a in range(len(wp)) for b in range(len(wq)) if T.le(p + (a,), q + (b,))
            )
        return self._rels[key]

    def check_element(self, x: tuple) -> None:
        i = self.level_of(x)
        if i < 0 or i > self.n or x not in self.total(i):
            raise InvalidPath(f"{x!r} is not a valid element path")

    def cell_dim(self, x: tuple) -> int:
        self.check_element(x)
        return sum(
            self.levels[k].fibers[x[: self.base_len + k]][x[self.base_len + k]] == "R"
            for k in range(self.level_of(x))
        )

    def is_open(self) -> bool:
        return all(w[0] == "R" and w[-1] == "R" for lvl in self.levels for w in lvl.fibers.values())

    def is_closed(self) -> bool:
        return all(w[0] == "S" and w[-1] == "S" for lvl in self.levels for w in lvl.fibers.values())

    # -- validation and identity -----------------------------------------

    def problems(self) -> list[str]:
        probs: list[str] = []
        try:
            for i in range(1, self.n + 1):
                below = self.total(i - 1)
                lvl = self.levels[i - 1]
                if set(lvl.fibers) != set(below.elements):
                    probs.append(f"level {i}: fibers do not match the level {i - 1} elements")
                    return probs
                for p, w in lvl.fibers.items():
                    check_word(w)
                if set(lvl.bordisms) != set(below.covers):
                    probs.append(f"level {i}: bordisms are not indexed by the covers below")
                    return probs
                for (p, q), pairs in sorted(lvl.bordisms.items(), key=lambda kv: sort_key(kv[0])):
                    for msg in bordism_problems(lvl.fibers[p], lvl.fibers[q], pairs):
                        probs.append(f"level {i}, over {p}->{q}: {msg}")
                if probs:
                    return probs
                self.total(i)
                probs.extend(self._path_problems(i))
                if probs:
                    return probs
        except (FiberError, BundleError) as exc:
            probs.append(str(exc))
        except Exception as exc:  # cycles and unknown elements surface here
            probs.append(f"{type(exc).__name__}: {exc}")
        return probs

    def _path_problems(self, i: int) -> list[str]:
        below = self.total(i - 1)
        lvl = self.levels[i - 1]
        probs = []
        for p in below:
            ups = below.upper_covers(p)
            if len(ups) < 2:
                continue
            for q in below.up(p, strict=True):
                composite = self.rel(p, q)
                via = [r for r in ups if below.le(r, q)]
                if len(via) < 2:
                    continue
                msgs = bordism_problems(lvl.fibers[p], lvl.fibers[q], composite)
                if msgs:
                    probs.append(f"level {i}, composite {p}->{q}: {msgs[0]}")
                    return probs
                for r in via:
                    path = compose_pairs(lvl.bordisms[(p, r)], self.rel(r, q))
                    if path != composite:
                        probs.append(f"level {i}: paths {p}->{q} through {r} disagree")
                        return probs
        return probs

    def validate(self) -> "TrussBundle":
        probs = self.problems()
        if probs:
            raise BundleError("; ".join(probs))
        return self

    @cached_property
    def key(self) -> tuple:
        return (
            self.base.elements,
            self.base.sorted_covers,
            tuple(lvl.key() for lvl in self.levels),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrussBundle):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        if self.is_truss and self.n:
            return f"TrussBundle(n={self.n}, top={len(self.top())}, level1={self.levels[0].fibers[()]!r})"
        return f"TrussBundle(n={self.n}, base={len(self.base)}, top={len(self.top())})"


# -- constructors ----------------------------------------------------------

POINT = Poset.from_relations([()], [])


def bare(base: Poset) -> TrussBundle:
    """The 0-level bundle over ``base``."""
    return TrussBundle(base, ())


def one_truss(word: str) -> TrussBundle:
    return TrussBundle(POINT, [Level({(): check_word(word)}, {})])


def constant_truss(words: Iterable[str]) -> TrussBundle:
    """Product of 1-trusses, one word per level."""
    out = bare(POINT)
    for w in words:
        out = product(out, one_truss(w))
    return out


def open_cube(k: int) -> TrussBundle:
    return constant_truss(["R"] * k)


def closed_point(k: int) -> TrussBundle:
    return constant_truss(["S"] * k)


CORNER_WORDS = {"0": "R", "-": "SR", "+": "RS"}


def corner(sigma: Iterable[str]) -> TrussBundle:
    """Corner truss from signs in {'0', '-', '+'} (open, lower, upper corner)."""
    return constant_truss([CORNER_WORDS[s] for s in sigma])


def constant_bundle(base: Poset, T: TrussBundle) -> TrussBundle:
    return product(bare(base), T)


# -- structural operations -------------------------------------------------


def dual(B: TrussBundle) -> TrussBundle:
    levels = []
    for lvl in B.levels:
        fibers = {p: flip(w) for p, w in lvl.fibers.items()}
        bordisms = {(q, p): transpose_pairs(pairs) for (p, q), pairs in lvl.bordisms.items()}
        levels.append(Level(fibers, bordisms))
    return TrussBundle(B.base.opposite(), levels)


def product(S: TrussBundle, T: TrussBundle) -> TrussBundle:
    """Append the levels of the truss ``T`` as constant levels on top of ``S``."""
    if not T.is_truss:
        raise BundleError("the second product factor must be a truss")
    top = S.top()
    cut = S.base_len + S.n
    levels = list(S.levels)
    for j, tl in enumerate(T.levels):
        Tj = T.total(j)
        fibers = {s + t: tl.fibers[t] for s in top for t in Tj}
        bordisms = {}
        for s1, s2 in top.covers:
            for t in Tj:
                bordisms[(s1 + t, s2 + t)] = identity_pairs(tl.fibers[t])
        for (t1, t2), pairs in tl.bordisms.items():
            for s in top:
                bordisms[(s + t1, s + t2)] = pairs
        levels.append(Level(fibers, bordisms))
    out = TrussBundle(S.base, levels)
    assert all(len(x) == cut + T.n for x in out.top()) or not out.top()
    return out


def truncate(B: TrussBundle, k: int, part: str = "above") -> TrussBundle:
    B._check_level(k)
    if part == "above":
        return TrussBundle(B.total(k), B.levels[k:])
    if part == "below":
        return TrussBundle(B.base, B.levels[:k])
    raise ValueError(f"unknown truncation part {part!r}")


@dataclass(frozen=True)
class Restriction:
    """A restricted bundle plus per-level maps from old to new elements."""

    bundle: TrussBundle
    maps: tuple  # maps[i]: dict old level-i element -> new element

    @property
    def top_map(self) -> dict:
        return self.maps[-1]


def restrict(B: TrussBundle, keep: list, keep_base: Iterable | None = None, check: bool = True) -> Restriction:
    """Subbundle on the kept elements, re-addressed so each fiber starts at index 0.

    ``keep[i-1]`` is the kept subset of the level ``i`` total poset.  Kept parts
    of each fiber must be non-empty intervals for every kept prefix.
    """
    base_keep = set(B.base.elements if keep_base is None else keep_base)
    base = B.base.induced(base_keep)
    maps: list[dict] = [{x: x for x in base_keep}]
    levels: list[Level] = []
    for i in range(1, B.n + 1):
        lvl = B.levels[i - 1]
        prev = maps[-1]
        kept = set(keep[i - 1])
        cur: dict = {}
        fibers = {}
        offset = {}
        for p, new_p in prev.items():
            w = lvl.fibers[p]
            idx = [j for j in range(len(w)) if p + (j,) in kept]
            if not idx or idx != list(range(idx[0], idx[-1] + 1)):
                raise NotASubtruss(f"kept part of the fiber over {p!r} is not a non-empty interval")
            lo = idx[0]
            offset[p] = (lo, idx[-1])
            fibers[new_p] = w[lo : idx[-1] + 1]
            for j in idx:
                cur[p + (j,)] = new_p + (j - lo,)
        stray = kept - set(cur)
        if stray:
            raise NotASubtruss(f"kept elements over dropped prefixes: {sorted(stray, key=sort_key)[:3]}")
        old_below = B.total(i - 1).induced(prev)
        new_below = old_below.relabel(prev)
        inverse = {v: k for k, v in prev.items()}
        bordisms = {}
        for np_, nq in new_below.covers:
            p, q = inverse[np_], inverse[nq]
            (lp, hp), (lq, hq) = offset[p], offset[q]
            bordisms[(np_, nq)] = frozenset(
                (a - lp, b - lq) for a, b in B.rel(p, q) if lp <= a <= hp and lq <= b <= hq
            )
        levels.append(Level(fibers, bordisms))
        maps.append(cur)
    out = TrussBundle(base, levels)
    if check:
        probs = out.problems()
        if probs:
            raise NotASubtruss("; ".join(probs))
        for i in range(1, B.n + 1):
            expect = B.total(i).induced(maps[i]).relabel(maps[i])
            if expect != out.total(i):
                raise NotASubtruss(f"level {i} total poset is not the induced subposet")
    return Restriction(out, tuple(maps))


def _tower_keep(B: TrussBundle, x: tuple, up: bool) -> list:
    keep = []
    for i in range(1, B.n + 1):
        xi = x[: B.base_len + i]
        T = B.total(i)
        keep.append(T.up(xi) if up else T.down(xi))
    return keep


def neighborhood_restriction(T: TrussBundle, x: tuple) -> Restriction:
    if T.level_of(x) != T.n:
        raise InvalidPath(f"{x!r} is not a top element")
    T.check_element(x)
    base_elem = x[: T.base_len]
    res = restrict(T, _tower_keep(T, x, up=False), keep_base=T.base.down(base_elem))
    if set(res.top_map) != set(T.top().down(x)):
        raise NotASubtruss("neighborhood does not match the down-closure")
    return res


def neighborhood(T: TrussBundle, x: tuple) -> TrussBundle:
    return neighborhood_restriction(T, x).bundle


def closure_up_restriction(T: TrussBundle, x: tuple) -> Restriction:
    if T.level_of(x) != T.n:
        raise InvalidPath(f"{x!r} is not a top element")
    T.check_element(x)
    base_elem = x[: T.base_len]
    res = restrict(T, _tower_keep(T, x, up=True), keep_base=T.base.up(base_elem))
    if set(res.top_map) != set(T.top().up(x)):
        raise NotASubtruss("closure does not match the up-closure")
    return res


def closure_up(T: TrussBundle, x: tuple) -> TrussBundle:
    return closure_up_restriction(T, x).bundle


def side_restriction(T: TrussBundle, k: int, sign: str) -> Restriction:
    """Restrict the level ``n-k+1`` fibers to their first (-) or last (+) element."""
    if not 1 <= k <= T.n:
        raise LevelOutOfRange(f"direction {k} outside 1..{T.n}")
    if sign not in ("-", "+"):
        raise ValueError("sign must be '-' or '+'")
    j = T.n - k + 1
    keep = [list(T.total(i)) for i in range(1, j)]
    chosen = []
    for p in T.total(j - 1):
        w = T.fiber(p)
        chosen.append(p + ((0 if sign == "-" else len(w) - 1),))
    keep.append(chosen)
    cut = T.base_len + j
    chosen_set = set(chosen)
    for i in range(j + 1, T.n + 1):
        keep.append([x for x in T.total(i) if x[:cut] in chosen_set])
    return restrict(T, keep)


def side(T: TrussBundle, k: int, sign: str) -> TrussBundle:
    return side_restriction(T, k, sign).bundle


def drop_singleton_level(T: TrussBundle, j: int) -> tuple[TrussBundle, dict]:
    """Remove level ``j`` when each of its fibers is a single element.

    Returns the new bundle and the map on top elements.
    """
    cut = T.base_len + j - 1
    for w in T.levels[j - 1].fibers.values():
        if len(w) != 1:
            raise BundleError(f"level {j} is not a singleton level")

    def strip(x: tuple) -> tuple:
        return x[:cut] + x[cut + 1 :] if len(x) > cut else x

    levels = list(T.levels[: j - 1])
    for lvl in T.levels[j:]:
        fibers = {strip(p): w for p, w in lvl.fibers.items()}
        bordisms = {(strip(p), strip(q)): pairs for (p, q), pairs in lvl.bordisms.items()}
        levels.append(Level(fibers, bordisms))
    out = TrussBundle(T.base, levels)
    return out, {x: strip(x) for x in T.top()}


def boundary_restriction(T: TrussBundle, part: str) -> tuple[TrussBundle, dict]:
    """Domain (``part='domain'``) or codomain of a truss, with the top element map."""
    if T.n < 1:
        raise LevelOutOfRange("a 0-level truss has no boundary")
    sign = {"domain": "-", "codomain": "+"}[part]
    res = side_restriction(T, T.n, sign)
    out, strip = drop_singleton_level(res.bundle, 1)
    return out, {x: strip[y] for x, y in res.top_map.items()}


def boundary_dir(T: TrussBundle, part: str) -> TrussBundle:
    return boundary_restriction(T, part)[0]


@dataclass(frozen=True)
class Gluing:
    bundle: TrussBundle
    left: dict  # top elements of A -> glued
    right: dict  # top elements of B -> glued


def glue_with_maps(A: TrussBundle, B: TrussBundle, k: int) -> Gluing:
    if A.n != B.n or not 1 <= k <= A.n:
        raise SidesMismatch("trusses of different dimension or direction out of range")
    if A.base != B.base:
        raise SidesMismatch("bases differ")
    if side(A, k, "+") != side(B, k, "-"):
        raise SidesMismatch(f"side + of the first and side - of the second differ in direction {k}")
    j = A.n - k + 1
    levels = list(A.levels[: j - 1])
    below = A.total(j - 1)
    ma = {x: x for x in below}
    mb = dict(ma)
    fibers, nma, nmb = {}, {}, {}
    for p in below:
        wa, wb = A.fiber(p), B.fiber(p)
        fibers[p] = wa + wb[1:]
        for a in range(len(wa)):
            nma[p + (a,)] = p + (a,)
        for b in range(len(wb)):
            nmb[p + (b,)] = p + (b + len(wa) - 1,)
    bordisms = {}
    for p, q in below.covers:
        sa, sb = len(A.fiber(p)) - 1, len(A.fiber(q)) - 1
        pairs = set(A.rel(p, q)) | {(a + sa, b + sb) for a, b in B.rel(p, q)}
        bordisms[(p, q)] = close_pairs(fibers[p], fibers[q], pairs)
    levels.append(Level(fibers, bordisms))
    ma, mb = nma, nmb
    for i in range(j + 1, A.n + 1):
        partial = TrussBundle(A.base, levels)
        G = partial.total(i - 1)
        inv_a = {v: u for u, v in ma.items()}
        inv_b = {v: u for u, v in mb.items()}
        fibers = {}
        for g in G:
            if g in inv_a:
                fibers[g] = A.fiber(inv_a[g])
                if g in inv_b and B.fiber(inv_b[g]) != fibers[g]:
                    raise SidesMismatch(f"shared element {g!r} carries different fibers")
            else:
                fibers[g] = B.fiber(inv_b[g])
        bordisms = {}
        ta, tb = A.total(i - 1), B.total(i - 1)
        for g, h in G.covers:
            if g in inv_a and h in inv_a and ta.le(inv_a[g], inv_a[h]):
                bordisms[(g, h)] = A.rel(inv_a[g], inv_a[h])
            elif g in inv_b and h in inv_b and tb.le(inv_b[g], inv_b[h]):
                bordisms[(g, h)] = B.rel(inv_b[g], inv_b[h])
            else:
                raise SidesMismatch(f"cover {g!r} -> {h!r} has no preimage arrow")
        levels.append(Level(fibers, bordisms))
        ma = {x + (c,): ma[x] + (c,) for x in ta for c in range(len(A.fiber(x)))}
        mb = {x + (c,): mb[x] + (c,) for x in tb for c in range(len(B.fiber(x)))}
    out = TrussBundle(A.base, levels)
    out.validate()
    return Gluing(out, ma, mb)


def glue(A: TrussBundle, B: TrussBundle, k: int) -> TrussBundle:
    return glue_with_maps(A, B, k).bundle


@dataclass(frozen=True)
class Compactification:
    bundle: TrussBundle
    retraction: dict  # new top element -> old top element
    inclusion: dict  # old top element -> new top element


def compactify_with_maps(B: TrussBundle) -> Compactification:
    """Add singular endpoints to every fiber, building fibers over new elements
    as copies of the fiber over their retraction image."""
    if not B.is_open():
        raise NotOpen("compactification needs an open bundle")
    cr = {x: x for x in B.base}
    levels: list[Level] = []
    for i in range(1, B.n + 1):
        partial = TrussBundle(B.base, levels)
        P = partial.total(i - 1)
        fibers = {}
        new_cr = {}
        for x in P:
            w = B.fiber(cr[x])
            fibers[x] = "S" + w + "S"
            for j in range(len(w) + 2):
                new_cr[x + (j,)] = cr[x] + (min(max(j - 1, 0), len(w) - 1),)
        bordisms = {}
        for y, z in P.covers:
            if cr[y] == cr[z]:
                bordisms[(y, z)] = identity_pairs(fibers[y])
                continue
            old = B.rel(cr[y], cr[z])
            ly, lz = len(fibers[y]) - 1, len(fibers[z]) - 1
            pairs = {(a + 1, b + 1) for a, b in old} | {(0, 0), (ly, lz)}
            bordisms[(y, z)] = close_pairs(fibers[y], fibers[z], pairs)
        levels.append(Level(fibers, bordisms))
        cr = new_cr
    out = TrussBundle(B.base, levels)
    out.validate()
    inclusion = {}
    for x in B.top():
        inclusion[x] = x[: B.base_len] + tuple(c + 1 for c in x[B.base_len :])
    return Compactification(out, cr, inclusion)


def compactify(B: TrussBundle) -> TrussBundle:
    return compactify_with_maps(B).bundle


def interior_restriction(B: TrussBundle) -> Restriction:
    if not B.is_closed():
        raise NotClosed("interior needs a closed bundle")
    keep = []
    prev = set(B.base)
    for i in range(1, B.n + 1):
        cur = []
        for p in B.total(i - 1):
            if p not in prev:
                continue
            w = B.fiber(p)
            if len(w) < 3:
                raise NotClosed(f"fiber over {p!r} has empty interior")
            cur.extend(p + (j,) for j in range(1, len(w) - 1))
        keep.append(cur)
        prev = set(cur)
    return restrict(B, keep)


def interior(B: TrussBundle) -> TrussBundle:
    return interior_restriction(B).bundle


def cone_check(T: TrussBundle) -> tuple | None:
    """The cone point of an open truss, or None."""
    if not T.is_open():
        return None
    top = T.top().maximum()
    if top is None or T.cell_dim(top) != 0:
        return None
    return top


# -- product factorisation -------------------------------------------------

FACTOR_WORDS = {
    "cube": ("R",),
    "corner": ("R", "SR", "RS"),
    "point": ("S",),
}


@dataclass(frozen=True)
class Factorization:
    words: tuple  # leading factor words, one per level
    remainder: TrussBundle  # a truss
    remainder_labels: dict | None

    @property
    def k(self) -> int:
        return len(self.words)

    @property
    def sigma(self) -> tuple:
        inv = {v: s for s, v in CORNER_WORDS.items()}
        return tuple(inv.get(w, w) for w in self.words)


def fiber_truss(B: TrussBundle, k: int, y: tuple) -> tuple[TrussBundle, dict]:
    """The truss over ``y`` (a level ``k`` element) of the upper truncation at ``k``.

    Returns the truss and the map from top elements of ``B`` over ``y`` to it.
    """
    cut = len(y)
    keep = []
    for i in range(1, B.n + 1):
        if i <= k:
            keep.append([y[: B.base_len + i]])
        else:
            keep.append([x for x in B.total(i) if x[:cut] == y])
    res = restrict(B, keep, keep_base=[y[: B.base_len]])
    out = res.bundle
    top_map = dict(res.top_map)
    # strip base and leading singleton levels
    levels = []
    new_cut = B.base_len + k

    def strip(x: tuple) -> tuple:
        return x[new_cut:]

    for lvl in out.levels[k:]:
        levels.append(
            Level(
                {strip(p): w for p, w in lvl.fibers.items()},
                {(strip(p), strip(q)): v for (p, q), v in lvl.bordisms.items()},
            )
        )
    truss = TrussBundle(POINT, levels)
    return truss, {x: strip(v) for x, v in top_map.items()}


def factor_leading(T: TrussBundle, mode: str = "cube", labels: Mapping | None = None) -> Factorization:
    """Split off the longest leading constant factor allowed by ``mode``.

    ``cube`` allows the open interval ``R``; ``corner`` adds ``SR`` and ``RS``;
    ``point`` allows the closed point ``S``.  With labels, the remainder must
    carry the same labels over every element of the factor.
    """
    allowed = FACTOR_WORDS[mode]
    words = []
    for lvl in T.levels:
        ws = set(lvl.fibers.values())
        if len(ws) != 1:
            break
        w = ws.pop()
        if w not in allowed:
            break
        words.append(w)
    for k in range(len(words), -1, -1):
        factor = constant_truss(words[:k])
        y0 = T.total(k).elements[0]
        rem, rmap = fiber_truss(T, k, y0)
        if product(factor, rem) != T:
            continue
        rem_labels = None
        if labels is not None:
            rem_labels = {rmap[x]: labels[x] for x in rmap}
            if any(labels[x] != rem_labels[x[k:]] for x in T.top()):
                continue
        return Factorization(tuple(words[:k]), rem, rem_labels)
    raise AssertionError("the trivial factorisation always succeeds")


# -- enumeration -----------------------------------------------------------


def words_of_length(k: int) -> list[str]:
    """The two alternating words of length ``k``."""
    if k < 1:
        return []
    return ["".join("SR"[(i + s) % 2] for i in range(k)) for s in (1, 0)]


def enumerate_trusses(n: int, max_top: int, base: Poset = POINT) -> Iterator[TrussBundle]:
    """All ``n``-level bundles over ``base`` with at most ``max_top`` top elements."""
    if n == 0:
        if len(base) <= max_top:
            yield bare(base)
        return
    for lower in enumerate_trusses(n - 1, max_top, base):
        P = lower.top()
        elems = list(P.elements)
        budget = max_top - len(elems)
        if budget < 0:
            continue
        for extra in _compositions(budget, len(elems)):
            for choice in itertools.product(*(words_of_length(1 + e) for e in extra)):
                fibers = dict(zip(elems, choice))
                covers = P.sorted_covers
                options = [enumerate_bordisms(fibers[p], fibers[q]) for p, q in covers]
                for picks in itertools.product(*options):
                    lvl = Level(fibers, dict(zip(covers, picks)))
                    cand = TrussBundle(base, list(lower.levels) + [lvl])
                    if not cand._path_problems(n):
                        yield cand


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Tuples of ``parts`` non-negative ints with sum at most ``total``."""
    if parts == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
