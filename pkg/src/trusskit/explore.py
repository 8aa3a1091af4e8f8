"""Tangle bundles, perturbations, bounded stability search and enumeration.

A tangle bundle is a truss bundle over a finite base together with an
up-closed tangle subposet ``Q`` of its top total poset.  Perturbations are
tangle bundles over the arrow ``1 -> 0`` (written with base elements ``("0",)``
for the special fiber and ``("1",)`` for the generic one, ``("1",) <= ("0",)``).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator

from .errors import FibersMismatch, SizeBoundExceeded, TrussError
from .poset import Poset, Verdict, recognize_disk, sort_key
from .strat import StratTruss, from_partition
from .tangle import INDICATOR, TanglePresentation, is_singularity, is_tangle
from .truss import (
    Level,
    TrussBundle,
    compactify_with_maps,
    compose_pairs,
    constant_bundle,
    enumerate_bordisms,
    enumerate_trusses,
    fiber_truss,
    identity_pairs,
    neighborhood_restriction,
    restrict,
    truncate,
)

SPECIAL = ("0",)
GENERIC = ("1",)
ARROW = Poset.from_relations([SPECIAL, GENERIC], [(GENERIC, SPECIAL)])
TWO_ARROWS = Poset.from_relations([("0",), ("1",), ("2",)], [(("1",), ("0",)), (("2",), ("1",))])


def max_total_default() -> int:
    return int(float(os.environ.get("TRUSSKIT_MAX_TOTAL", "1e5")))


def _product_labels(base: Poset) -> Poset:
    elems = [(i,) + b for i in INDICATOR for b in base]
    rels = [((i,) + b, (j,) + c) for i in INDICATOR for j in INDICATOR for b in base for c in base
            if INDICATOR.le(i, j) and base.le(b, c)]
    return Poset.from_relations(elems, rels)


@dataclass(frozen=True, eq=False)
class TangleBundle:
    bundle: TrussBundle
    Q: frozenset
    m: int

    def __post_init__(self):
        object.__setattr__(self, "Q", frozenset(tuple(x) for x in self.Q))
        top = self.bundle.top()
        stray = [x for x in self.Q if x not in top]
        if stray:
            raise TrussError(f"Q contains non-elements {sorted(stray, key=sort_key)[:3]}")
        if not top.is_up_closed(self.Q):
            raise TrussError("Q is not up-closed in the top total poset")

    @property
    def base(self) -> Poset:
        return self.bundle.base

    @property
    def n(self) -> int:
        return self.bundle.n

    @cached_property
    def strat(self) -> StratTruss:
        """Indicator labels paired with the base element."""
        cut = self.bundle.base_len
        labels = {x: ("0" if x in self.Q else "1",) + x[:cut] for x in self.bundle.top()}
        return StratTruss(self.bundle, _product_labels(self.base), labels)

    def fiber(self, b: tuple) -> TanglePresentation:
        truss, tmap = fiber_truss(self.bundle, 0, b)
        return TanglePresentation(truss, {tmap[x] for x in self.Q if x in tmap}, self.m)

    def fiber_map(self, b: tuple) -> dict:
        """Top elements over ``b`` -> elements of the fiber truss."""
        return fiber_truss(self.bundle, 0, b)[1]

    def key(self) -> tuple:
        return (self.bundle.key, tuple(sorted(self.Q, key=sort_key)), self.m)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TangleBundle):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"TangleBundle(base={len(self.base)}, n={self.n}, m={self.m}, #Q={len(self.Q)})"


def constant_tangle_bundle(base: Poset, TP: TanglePresentation) -> TangleBundle:
    B = constant_bundle(base, TP.bundle)
    return TangleBundle(B, {b + x for b in base for x in TP.Q}, TP.m)


@dataclass
class Report:
    verdict: Verdict
    failures: list = field(default_factory=list)  # (where, reason)

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "failures": [{"at": "-".join(map(str, w)) if isinstance(w, tuple) else w, "reason": r} for w, r in self.failures],
        }


def is_tangle_bundle(TB: TangleBundle) -> Report:
    verdicts = []
    failures = []
    for b in TB.base:
        rep = is_tangle(TB.fiber(b))
        verdicts.append(rep.verdict)
        if rep.verdict is not Verdict.YES:
            failures.append((b, f"fiber is not an {TB.m}-tangle: {rep.failure}"))
    return Report(Verdict.all(verdicts), failures)


def _lower_generic_fiber(TB: TangleBundle, c: tuple, x: tuple) -> TanglePresentation:
    """Fiber over ``c`` of the lower closure of ``x`` (restricted to base ``{c, b}``)."""
    B = TB.bundle
    res = neighborhood_restriction(B, x)
    nb = res.bundle
    local = TangleBundle(nb, {res.top_map[y] for y in TB.Q if y in res.top_map}, TB.m)
    return local.fiber(c)


def is_fiber_bundle(TB: TangleBundle) -> Verdict:
    """Fiber transition: generic fibers of lower closures are ``m``-disks."""
    cut = TB.bundle.base_len
    verdicts = []
    for b in TB.base:
        for c in TB.base.down(b, strict=True):
            for x in sorted((y for y in TB.Q if y[:cut] == b), key=sort_key):
                local = _lower_generic_fiber(TB, c, x)
                if not local.bundle.is_open():
                    return Verdict.NO
                comp = compactify_with_maps(local.bundle)
                qbar = [y for y, r in comp.retraction.items() if r in local.Q]
                v = recognize_disk(comp.bundle.top().induced(qbar), TB.m)
                if v is Verdict.NO:
                    return Verdict.NO
                verdicts.append(v)
    return Verdict.all(verdicts)


def _path_bundle(TP: TanglePresentation) -> TangleBundle:
    """The levels above 1 as a bundle of ``(m-1)``-tangles over the level-1 poset."""
    return TangleBundle(truncate(TP.bundle, 1, "above"), TP.Q, TP.m - 1)


def is_path(TP: TanglePresentation) -> bool:
    """An ``(m+1)``-tangle ``(n+1)``-truss fibered over its first level."""
    if TP.n < 1 or TP.m < 1:
        return False
    if is_tangle(TP).verdict is not Verdict.YES:
        return False
    PB = _path_bundle(TP)
    return bool(is_tangle_bundle(PB)) and is_fiber_bundle(PB) is Verdict.YES


def is_coherence(TP: TanglePresentation) -> bool:
    """A path without points of transversal dimension 0."""
    if not is_path(TP):
        return False
    return all(k != 0 for k in is_tangle(TP).tdim.values())


# -- perturbations -------------------------------------------------------------


class PerturbationCertificate:
    """A tangle bundle over the arrow from the generic to the special fiber."""

    def __init__(self, bundle: TangleBundle):
        if bundle.base != ARROW:
            raise TrussError("a perturbation lives over the arrow (0 <- 1)")
        self.bundle = bundle

    @property
    def special(self) -> TanglePresentation:
        return self.bundle.fiber(SPECIAL)

    @property
    def generic(self) -> TanglePresentation:
        return self.bundle.fiber(GENERIC)

    @property
    def Q(self) -> frozenset:
        return self.bundle.Q

    @property
    def m(self) -> int:
        return self.bundle.m

    def key(self) -> tuple:
        return self.bundle.key()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PerturbationCertificate):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"PerturbationCertificate(special #Q={len(self.special.Q)}, generic #Q={len(self.generic.Q)})"


def _surjectivity_failures(TB: TangleBundle) -> list:
    top = TB.bundle.top()
    special = [x for x in TB.Q if x[0] == SPECIAL[0]]
    generic = [y for y in TB.Q if y[0] == GENERIC[0]]
    return [x for x in sorted(special, key=sort_key) if not any(top.le(y, x) for y in generic)]


def verify_perturbation(PC: PerturbationCertificate) -> Report:
    rep = is_tangle_bundle(PC.bundle)
    for x in _surjectivity_failures(PC.bundle):
        rep.failures.append((x, "special tangle element has no generic tangle element below it"))
        rep.verdict = Verdict.NO
    return rep


def identity_perturbation(TP: TanglePresentation) -> PerturbationCertificate:
    return PerturbationCertificate(constant_tangle_bundle(ARROW, TP))


def _rebase(B: TrussBundle, base: Poset, rename: dict) -> TrussBundle:
    """Same levels with base prefixes renamed."""

    def mv(x: tuple) -> tuple:
        return rename[x[:1]] + x[1:]

    levels = [
        Level({mv(p): w for p, w in lvl.fibers.items()}, {(mv(p), mv(q)): v for (p, q), v in lvl.bordisms.items()})
        for lvl in B.levels
    ]
    return TrussBundle(base, levels)


def compose_perturbations(P1: PerturbationCertificate, P2: PerturbationCertificate) -> PerturbationCertificate:
    """``P1: A ~> B`` and ``P2: B ~> C`` give ``A ~> C`` by composing relations."""
    if P1.generic != P2.special:
        raise FibersMismatch("generic fiber of the first perturbation differs from the special fiber of the second")
    B1 = P1.bundle.bundle
    B2 = _rebase(P2.bundle.bundle, Poset.from_relations([("1",), ("2",)], [(("2",), ("1",))]), {SPECIAL: ("1",), GENERIC: ("2",)})
    levels = []
    for l1, l2 in zip(B1.levels, B2.levels):
        fibers = dict(l1.fibers)
        for p, w in l2.fibers.items():
            if p in fibers and fibers[p] != w:
                raise FibersMismatch(f"shared fiber {p!r} differs")
            fibers[p] = w
        bordisms = dict(l1.bordisms)
        bordisms.update(l2.bordisms)
        levels.append(Level(fibers, bordisms))
    joint = TrussBundle(TWO_ARROWS, levels).validate()
    keep = [[x for x in joint.total(i) if x[0] != "1"] for i in range(1, joint.n + 1)]
    res = restrict(joint, keep, keep_base=[("0",), ("2",)])
    out = _rebase(res.bundle, ARROW, {("0",): SPECIAL, ("2",): GENERIC}).validate()
    special = {res.top_map[x] for x in P1.Q if x[0] == "0"}
    generic = {GENERIC + res.top_map[("2",) + y[1:]][1:] for y in P2.Q if y[0] == "1"}
    Q = special | generic
    return PerturbationCertificate(TangleBundle(out, Q, P1.m))


# -- bounded search --------------------------------------------------------------


@lru_cache(maxsize=None)
def _bordisms(src: str, tgt: str) -> tuple:
    return tuple(enumerate_bordisms(src, tgt))


@dataclass(frozen=True)
class Bounds:
    max_q: int = 4  # tangle elements of the generic fiber
    max_total: int = 16  # top elements of the generic fiber
    max_nodes: int = 2_000_000  # search steps before giving up


class SearchStatus(str, enum.Enum):
    FOUND = "found"
    NONE = "none"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SearchResult:
    status: SearchStatus
    certificate: PerturbationCertificate | None = None
    explored: int = 0
    bundles: int = 0


class _Budget(Exception):
    pass


class _Search:
    """Build generic fibers level by level together with their relations to
    the special fiber, pruning by path independence and size bounds."""

    def __init__(self, TP: TanglePresentation, bounds: Bounds):
        self.TP = TP
        self.T = TP.bundle
        self.bounds = bounds
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.bounds.max_nodes:
            raise _Budget

    def _special_level(self, i: int) -> Level:
        lvl = self.T.levels[i - 1]
        return Level(
            {SPECIAL + p: w for p, w in lvl.fibers.items()},
            {(SPECIAL + p, SPECIAL + q): v for (p, q), v in lvl.bordisms.items()},
        )

    def bundles(self) -> Iterator[TrussBundle]:
        yield from self._levels([], 1)

    def _levels(self, levels: list, i: int) -> Iterator[TrussBundle]:
        if i > self.T.n:
            yield TrussBundle(ARROW, levels)
            return
        partial = TrussBundle(ARROW, levels)
        C = partial.total(i - 1)
        special = self._special_level(i)
        gen = [y for y in C if y[0] == GENERIC[0]]
        order = self._top_down(C, gen)
        rel_cache: dict = {}

        def rel_to(z: tuple, u: tuple, fibers, bordisms):
            if z == u:
                return identity_pairs(fibers[z])
            if z[0] == SPECIAL[0]:
                return self.T.rel(z[1:], u[1:])
            return rel_cache[z][u]

        fibers = dict(special.fibers)
        bordisms = dict(special.bordisms)
        budget = self.bounds.max_total

        def assign(k: int, used: int):
            if k == len(order):
                lvl = Level(dict(fibers), dict(bordisms))
                yield from self._levels(levels + [lvl], i + 1)
                return
            y = order[k]
            ups = C.upper_covers(y)
            remaining = len(order) - k - 1
            for length in range(1, budget - used - remaining + 1):
                for word in _words(length):
                    self._tick()
                    fibers[y] = word
                    for rels, chosen in self._cover_choices(y, word, ups, C, fibers, bordisms, rel_to):
                        for z, pairs in chosen.items():
                            bordisms[(y, z)] = pairs
                        rel_cache[y] = rels
                        yield from assign(k + 1, used + length)
                        for z in chosen:
                            del bordisms[(y, z)]
                        del rel_cache[y]
                    del fibers[y]

        yield from assign(0, 0)

    @staticmethod
    def _top_down(C: Poset, gen: list) -> list:
        done: set = set()
        order = []
        pending = sorted(gen, key=sort_key)
        while pending:
            for y in pending:
                if all(z in done or z[0] == SPECIAL[0] for z in C.upper_covers(y)):
                    order.append(y)
                    done.add(y)
                    pending.remove(y)
                    break
            else:  # pragma: no cover - posets are acyclic
                raise TrussError("no top-down order")
        return order

    def _cover_choices(self, y, word, ups, C, fibers, bordisms, rel_to):
        """Bordisms from ``word`` to each upper cover, with agreeing composites."""

        def rec(j: int, rels: dict, chosen: dict):
            if j == len(ups):
                yield rels, chosen
                return
            z = ups[j]
            above = C.up(z)
            for pairs in _bordisms(word, fibers[z]):
                self._tick()
                new = {}
                ok = True
                for u in above:
                    comp = compose_pairs(pairs, rel_to(z, u, fibers, bordisms))
                    if u in rels and rels[u] != comp:
                        ok = False
                        break
                    new[u] = comp
                if not ok:
                    continue
                merged = dict(rels)
                merged.update(new)
                yield from rec(j + 1, merged, {**chosen, z: pairs})

        yield from rec(0, {}, {})


@lru_cache(maxsize=None)
def _words(length: int) -> tuple:
    return tuple(["".join("RS"[(i + s) % 2] for i in range(length)) for s in (0, 1)])


def _up_closed_subsets(P: Poset, allowed: list, max_size: int) -> Iterator[frozenset]:
    """Up-closed subsets of ``P`` inside ``allowed`` with at most ``max_size`` elements."""
    allowed_set = set(allowed)
    cand = [x for x in allowed if all(u in allowed_set for u in P.up(x))]
    cand.sort(key=lambda x: (len(P.up(x)), sort_key(x)))  # upper elements first

    def rec(idx: int, chosen: frozenset):
        if idx == len(cand):
            yield chosen
            return
        yield from rec(idx + 1, chosen)
        x = cand[idx]
        if len(chosen) < max_size and all(u in chosen or u == x for u in P.up(x)):
            yield from rec(idx + 1, chosen | {x})

    yield from rec(0, frozenset())


def _complexities(TP: TanglePresentation) -> dict:
    top = TP.bundle.top()
    return {x: sum(1 for y in TP.Q if top.le(y, x)) for x in TP.Q}


def _perturbations_of(TP: TanglePresentation, bounds: Bounds, simpler: bool, state: dict) -> Iterator[PerturbationCertificate]:
    """All perturbations within bounds (generic fibers strictly simpler if asked)."""
    search = _Search(TP, bounds)
    qt = {SPECIAL + x for x in TP.Q}
    try:
        for B in search.bundles():
            state["bundles"] = state.get("bundles", 0) + 1
            if B.problems():
                continue
            top = B.top()
            gens = [y for y in top if y[0] == GENERIC[0]]
            if len(gens) > bounds.max_total:
                continue
            allowed = [y for y in gens if all(u in qt for u in top.up(y) if u[0] == SPECIAL[0])]
            Wpos = top.induced(gens)
            for S in _up_closed_subsets(Wpos, allowed, bounds.max_q):
                search._tick()
                if any(not any(top.le(y, x) for y in S) for x in qt):
                    continue
                TB = TangleBundle(B, qt | S, TP.m)
                gen = TB.fiber(GENERIC)
                if simpler:
                    if any(c >= len(TP.Q) for c in _complexities(gen).values()):
                        continue
                if is_tangle(gen).verdict is not Verdict.YES:
                    continue
                cert = PerturbationCertificate(TB)
                if verify_perturbation(cert):
                    yield cert
    finally:
        state["nodes"] = search.nodes


def _preference(cert: PerturbationCertificate) -> tuple:
    gen = cert.generic
    return (len(gen.Q), len(gen.bundle.top()), repr(cert.key()))


def search_perturbation(TP: TanglePresentation, bounds: Bounds = Bounds()) -> SearchResult:
    """Least perturbation whose generic fiber is pointwise strictly simpler."""
    state: dict = {}
    best = None
    try:
        for cert in _perturbations_of(TP, bounds, simpler=True, state=state):
            if best is None or _preference(cert) < _preference(best):
                best = cert
    except _Budget:
        if best is None:
            return SearchResult(SearchStatus.INCONCLUSIVE, None, state.get("nodes", 0), state.get("bundles", 0))
    if best is None:
        return SearchResult(SearchStatus.NONE, None, state.get("nodes", 0), state.get("bundles", 0))
    return SearchResult(SearchStatus.FOUND, best, state.get("nodes", 0), state.get("bundles", 0))


class Stability(str, enum.Enum):
    STABLE = "stable_within_bounds"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


@dataclass
class StabilityReport:
    verdict: Stability
    certificate: PerturbationCertificate | None = None
    inductive: Verdict | None = None
    witness: PerturbationCertificate | None = None  # breaks inductive stability

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value}
        if self.inductive is not None:
            out["inductively_stable"] = self.inductive.value
        if self.certificate is not None:
            out["generic_q"] = len(self.certificate.generic.Q)
        if self.witness is not None:
            out["witness_generic_q"] = len(self.witness.generic.Q)
        return out


def _is_constant(cert: PerturbationCertificate) -> bool:
    return cert.bundle == constant_tangle_bundle(ARROW, cert.special)


def stability(TP: TanglePresentation, bounds: Bounds = Bounds(), inductive: bool = False) -> StabilityReport:
    res = search_perturbation(TP, bounds)
    if res.status is SearchStatus.FOUND:
        return StabilityReport(Stability.UNSTABLE, res.certificate)
    if res.status is SearchStatus.INCONCLUSIVE:
        return StabilityReport(Stability.INCONCLUSIVE)
    report = StabilityReport(Stability.STABLE)
    if inductive:
        report.inductive = Verdict.YES
        state: dict = {}
        try:
            for cert in _perturbations_of(TP, bounds, simpler=False, state=state):
                if _is_constant(cert):
                    continue
                gen = cert.generic
                if not is_singularity(gen):
                    continue
                sub = search_perturbation(gen, bounds)
                if sub.status is SearchStatus.NONE:
                    report.inductive = Verdict.NO
                    report.witness = cert
                    break
                if sub.status is SearchStatus.INCONCLUSIVE:
                    report.inductive = Verdict.UNKNOWN
        except _Budget:
            if report.inductive is Verdict.YES:
                report.inductive = Verdict.UNKNOWN
    return report


# -- enumeration -----------------------------------------------------------------


def _partitions(n: int, k: int) -> Iterator[list]:
    def rec(i, labels, used):
        if i == n:
            yield list(labels)
            return
        for c in range(min(used + 1, k)):
            labels.append(c)
            yield from rec(i + 1, labels, max(used, c + 1))
            labels.pop()

    yield from rec(0, [], 0)


def stratifications(T: TrussBundle, max_strata: int) -> Iterator[StratTruss]:
    """Every stratification of ``T`` with at most ``max_strata`` strata."""
    top = T.top()
    elems = list(top.elements)
    for lab in _partitions(len(elems), max_strata):
        blocks: dict = {}
        for x, c in zip(elems, lab):
            blocks.setdefault(c, []).append(x)
        if any(len(top.comparability_components(b)) > 1 for b in blocks.values()):
            continue
        try:
            yield from_partition(T, blocks.values())
        except TrussError:
            continue


def tangles_on(T: TrussBundle, m: int) -> Iterator[TanglePresentation]:
    """Every ``m``-tangle presentation on the open truss ``T``."""
    if not T.is_open():
        return
    top = T.top()
    for S in _up_closed_subsets(top, list(top.elements), len(top)):
        TP = TanglePresentation(T, S, m)
        if is_tangle(TP).verdict is Verdict.YES:
            yield TP


def enumerate_space(n: int, max_size: int, kind: str = "trusses", m: int | None = None,
                    max_strata: int = 3) -> Iterator:
    """Exhaustive stream of trusses, stratified trusses or tangles in a fixed order."""
    if max_size > max_total_default():
        raise SizeBoundExceeded(f"size bound {max_size} exceeds TRUSSKIT_MAX_TOTAL")
    for T in enumerate_trusses(n, max_size):
        if kind == "trusses":
            yield T
        elif kind == "stratified":
            yield from stratifications(T, max_strata)
        elif kind == "tangles":
            if m is None:
                raise ValueError("tangle enumeration needs m")
            yield from tangles_on(T, m)
        else:
            raise ValueError(f"unknown enumeration kind {kind!r}")


__all__ = [
    "ARROW",
    "Bounds",
    "PerturbationCertificate",
    "Report",
    "SearchResult",
    "SearchStatus",
    "Stability",
    "StabilityReport",
    "TangleBundle",
    "compose_perturbations",
    "constant_tangle_bundle",
    "enumerate_space",
    "identity_perturbation",
    "is_coherence",
    "is_fiber_bundle",
    "is_path",
    "is_tangle_bundle",
    "search_perturbation",
    "stability",
    "stratifications",
    "tangles_on",
    "verify_perturbation",
]
