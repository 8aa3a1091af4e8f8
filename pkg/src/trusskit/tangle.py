"""Tangle trusses: transversality, transversal dimension and cell structures.

A tangle presentation is an open truss together with an up-closed subset ``Q``
of its top total poset (the tangle manifold) and a dimension ``m``.  The
indicator of ``Q`` labels ``Q`` by ``"0"`` and its complement by ``"1"``, with
``"1" < "0"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import NotATangle, NotInQ, TrussError
from .poset import Poset, Verdict, euler_characteristic, is_cellular, order_complex, recognize_sphere, sort_key
from .strat import StratTruss, from_partition, is_normalized, normalize
from .truss import (
    TrussBundle,
    compactify_with_maps,
    cone_check,
    factor_leading,
    neighborhood_restriction,
)

INDICATOR = Poset.from_relations(["0", "1"], [("1", "0")])


@dataclass(frozen=True, eq=False)
class TanglePresentation:
    bundle: TrussBundle
    Q: frozenset
    m: int

    def __post_init__(self):
        object.__setattr__(self, "Q", frozenset(tuple(x) for x in self.Q))
        top = self.bundle.top()
        stray = [x for x in self.Q if x not in top]
        if stray:
            raise TrussError(f"Q contains non-elements {sorted(stray)[:3]}")
        if not top.is_up_closed(self.Q):
            raise TrussError("Q is not up-closed in the top total poset")

    @cached_property
    def strat(self) -> StratTruss:
        return StratTruss(self.bundle, INDICATOR, {x: "0" if x in self.Q else "1" for x in self.bundle.top()})

    @property
    def n(self) -> int:
        return self.bundle.n

    def key(self) -> tuple:
        return (self.bundle.key, tuple(sorted(self.Q)), self.m)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TanglePresentation):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"TanglePresentation(n={self.n}, m={self.m}, #Q={len(self.Q)})"


def presentation_from_strat(X: StratTruss, m: int) -> TanglePresentation:
    return TanglePresentation(X.bundle, frozenset(x for x, v in X.labeling.items() if v == "0"), m)


@dataclass(frozen=True)
class Transversal:
    verdict: Verdict
    k: int | None = None
    cone: TanglePresentation | None = None
    apex: tuple | None = None
    reason: str = ""


def check_transversal_at(TP: TanglePresentation, x: tuple, mode: str = "cube") -> Transversal:
    if x not in TP.Q:
        raise NotInQ(f"{x!r} is not in Q")
    local = TP.strat.restrict(neighborhood_restriction(TP.bundle, x))
    nf = normalize(local).nf
    fac = factor_leading(nf.bundle, mode, nf.labeling)
    C = fac.remainder
    k = fac.k
    if not C.is_open():
        return Transversal(Verdict.NO, k, reason="remainder is not open")
    top = C.top().maximum()
    if top is None:
        return Transversal(Verdict.NO, k, reason="remainder has no maximum")
    if C.cell_dim(top) != 0:
        return Transversal(Verdict.NO, k, reason="maximum of the remainder is regular")
    D = frozenset(y for y, v in fac.remainder_labels.items() if v == "0")
    if top not in D:
        return Transversal(Verdict.NO, k, reason="cone point is not in the tangle")
    d = TP.m - k - 1
    if d < -1:
        return Transversal(Verdict.NO, k, reason=f"cube exponent {k} exceeds the tangle dimension")
    link = C.top().induced(D - {top})
    verdict = recognize_sphere(link, d)
    cone = TanglePresentation(C, D, TP.m - k)
    reason = "" if verdict is Verdict.YES else f"link is not recognised as a {d}-sphere ({verdict.value})"
    return Transversal(verdict, k, cone, top, reason)


@dataclass
class TangleReport:
    verdict: Verdict
    tdim: dict = field(default_factory=dict)
    local: dict = field(default_factory=dict)
    failure: tuple | None = None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "tdim": {"-".join(map(str, x)): k for x, k in sorted(self.tdim.items(), key=lambda kv: sort_key(kv[0]))},
        }
        if self.failure is not None:
            x, reason = self.failure
            out["failure"] = {"element": None if x is None else "-".join(map(str, x)), "reason": reason}
        return out


def _tangle_report(TP: TanglePresentation, mode: str) -> TangleReport:
    if not is_normalized(TP.strat):
        return TangleReport(Verdict.NO, failure=(None, "indicator stratification is not normalized"))
    report = TangleReport(Verdict.YES)
    pending_unknown = None
    for x in sorted(TP.Q, key=sort_key):
        tr = check_transversal_at(TP, x, mode)
        if tr.verdict is Verdict.NO:
            return TangleReport(Verdict.NO, report.tdim, report.local, (x, tr.reason))
        if tr.verdict is Verdict.UNKNOWN and pending_unknown is None:
            pending_unknown = (x, tr.reason)
        report.tdim[x] = tr.k
        report.local[x] = tr
    if pending_unknown is not None:
        report.verdict = Verdict.UNKNOWN
        report.failure = pending_unknown
    return report


def is_tangle(TP: TanglePresentation) -> TangleReport:
    if not TP.bundle.is_open():
        return TangleReport(Verdict.NO, failure=(None, "truss is not open"))
    return _tangle_report(TP, "cube")


def is_compact_tangle(TP: TanglePresentation) -> TangleReport:
    if not TP.bundle.is_closed():
        return TangleReport(Verdict.NO, failure=(None, "truss is not closed"))
    return _tangle_report(TP, "corner")


def _require_tangle(TP: TanglePresentation) -> TangleReport:
    rep = is_tangle(TP)
    if rep.verdict is not Verdict.YES:
        raise NotATangle(f"not a tangle: {rep.failure}")
    return rep


def tstr(TP: TanglePresentation) -> StratTruss:
    """Refine the indicator stratification by transversal dimension."""
    rep = _require_tangle(TP)
    top = TP.bundle.top()
    blocks = []
    for k in sorted(set(rep.tdim.values())):
        blocks.extend(top.comparability_components([x for x, v in rep.tdim.items() if v == k]))
    rest = [x for x in top if x not in TP.Q]
    if rest:
        blocks.extend(top.comparability_components(rest))
    return from_partition(TP.bundle, blocks)


def is_singularity(TP: TanglePresentation) -> bool:
    return is_tangle(TP).verdict is Verdict.YES and cone_check(TP.bundle) is not None


def normal_singularity_at(TP: TanglePresentation, x: tuple) -> TanglePresentation:
    rep = _require_tangle(TP)
    return rep.local[x].cone


def complexity(TP: TanglePresentation) -> int:
    return len(TP.Q)


@dataclass(frozen=True)
class CellStructure:
    poset: Poset
    cellular: Verdict
    dims: dict
    embedding: dict  # element of the poset -> element of the ambient top poset

    @property
    def euler(self) -> int:
        return euler_characteristic(order_complex(self.poset))


def compactified(TP: TanglePresentation) -> tuple[TanglePresentation, dict]:
    """Cubical compactification of a tangle, with the retraction on top elements."""
    comp = compactify_with_maps(TP.bundle)
    Qbar = frozenset(y for y, r in comp.retraction.items() if r in TP.Q)
    return TanglePresentation(comp.bundle, Qbar, TP.m), comp.retraction


def cell_structure(TP: TanglePresentation) -> CellStructure:
    _require_tangle(TP)
    comp, _ = compactified(TP)
    P = comp.bundle.top().induced(comp.Q)
    dims = {y: comp.bundle.cell_dim(y) for y in P}
    return CellStructure(P, is_cellular(P, dims), dims, {y: y for y in P})


def dual_cell_structure(TP: TanglePresentation) -> CellStructure:
    """``Q`` with reversed order; dual cells of dimension ``m - cell_dim``."""
    _require_tangle(TP)
    Qp = TP.bundle.top().induced(TP.Q)
    dims = {x: TP.m - TP.bundle.cell_dim(x) for x in Qp}
    Qop = Qp.opposite()
    return CellStructure(Qop, is_cellular(Qop, dims), dims, {x: x for x in Qop})


def has_closed_realization(TP: TanglePresentation) -> bool:
    """Compactifying adds no tangle points (the tangle avoids the boundary)."""
    comp, _ = compactified(TP)
    return len(comp.Q) == len(TP.Q)
