"""Recognition of manifold diagrams, cell diagrams and their links."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InternalDisagreement, NotACellDiagram, NotADiagram
from .poset import Poset, sort_key
from .strat import StratTruss, conormalize, dual_strat, is_conormalized, is_normalized, normalize
from .truss import (
    closure_up_restriction,
    compactify_with_maps,
    factor_leading,
    neighborhood_restriction,
)


@dataclass(frozen=True)
class LocalFactor:
    """Leading factor words and the stratified remainder at one element."""

    words: tuple
    remainder: StratTruss
    apex: tuple  # cone point (or facet bottom) of the remainder

    @property
    def k(self) -> int:
        return len(self.words)


@dataclass
class DiagramReport:
    verdict: bool
    local: dict = field(default_factory=dict)  # element -> LocalFactor
    failure: tuple | None = None  # (element or None, reason)

    def to_json(self) -> dict:
        out = {
            "verdict": "yes" if self.verdict else "no",
            "elements": {
                "-".join(map(str, x)): {"k": f.k, "factor": list(f.words), "cone_size": len(f.remainder.bundle.top())}
                for x, f in sorted(self.local.items(), key=lambda kv: sort_key(kv[0]))
            },
        }
        if self.failure is not None:
            x, reason = self.failure
            out["failure"] = {"element": None if x is None else "-".join(map(str, x)), "reason": reason}
        return out


def _normalized_local(X: StratTruss, res, cellular: bool = False) -> tuple[StratTruss, dict]:
    local = X.restrict(res)
    nf = conormalize(local) if cellular else normalize(local)
    return nf.nf, nf.witness.maps[-1] if nf.witness.maps else {}


def _own_stratum(X: StratTruss, x: tuple) -> bool:
    return len(X.strata[X.stratum_of[x]]) == 1


def check_conical_at(X: StratTruss, x: tuple, mode: str = "cube") -> LocalFactor | str:
    """Cube (or corner) times stratified open cone at ``x``; a reason string on failure."""
    nf, _ = _normalized_local(X, neighborhood_restriction(X.bundle, x))
    fac = factor_leading(nf.bundle, mode, nf.labeling)
    C = fac.remainder
    if not C.is_open():
        return "remainder is not open"
    top = C.top().maximum()
    if top is None:
        return "remainder has no maximum"
    if C.cell_dim(top) != 0:
        return "maximum of the remainder is regular"
    cone = StratTruss(C, nf.label_poset, fac.remainder_labels)
    if not _own_stratum(cone, top):
        return "cone point is not its own stratum"
    return LocalFactor(fac.words, cone, top)


def is_manifold_diagram(X: StratTruss) -> DiagramReport:
    if not X.bundle.is_open():
        return DiagramReport(False, failure=(None, "truss is not open"))
    if not is_normalized(X):
        witness = normalize(X).nf
        return DiagramReport(False, failure=(None, f"not normalized; normal form has {len(witness.bundle.top())} elements"))
    report = DiagramReport(True)
    for x in X.bundle.top():
        res = check_conical_at(X, x)
        if isinstance(res, str):
            return DiagramReport(False, report.local, (x, res))
        report.local[x] = res
    return report


def is_compact_manifold_diagram(X: StratTruss) -> DiagramReport:
    if not X.bundle.is_closed():
        return DiagramReport(False, failure=(None, "truss is not closed"))
    if not is_normalized(X):
        return DiagramReport(False, failure=(None, "not normalized"))
    report = DiagramReport(True)
    for x in X.bundle.top():
        res = check_conical_at(X, x, mode="corner")
        if isinstance(res, str):
            return DiagramReport(False, report.local, (x, res))
        report.local[x] = res
    return report


def check_facetal_at(X: StratTruss, x: tuple) -> LocalFactor | str:
    """Closed point times stratified closed facet at ``x``; a reason string on failure."""
    nf, _ = _normalized_local(X, closure_up_restriction(X.bundle, x), cellular=True)
    fac = factor_leading(nf.bundle, "point", nf.labeling)
    F = fac.remainder
    if not F.is_closed():
        return "remainder is not closed"
    bottom = F.top().minimum()
    if bottom is None:
        return "remainder has no minimum"
    if F.cell_dim(bottom) != F.n:
        return "minimum of the remainder is not top-dimensional"
    facet = StratTruss(F, nf.label_poset, fac.remainder_labels)
    if not _own_stratum(facet, bottom):
        return "facet bottom is not its own stratum"
    return LocalFactor(fac.words, facet, bottom)


def _cell_direct(X: StratTruss) -> DiagramReport:
    if not X.bundle.is_closed():
        return DiagramReport(False, failure=(None, "truss is not closed"))
    if not is_conormalized(X):
        return DiagramReport(False, failure=(None, "not normalized"))
    report = DiagramReport(True)
    for x in X.bundle.top():
        res = check_facetal_at(X, x)
        if isinstance(res, str):
            return DiagramReport(False, report.local, (x, res))
        report.local[x] = res
    return report


def is_cell_diagram(X: StratTruss) -> DiagramReport:
    """Facetality checked directly and through the dual manifold diagram."""
    direct = _cell_direct(X)
    via_dual = is_manifold_diagram(dual_strat(X))
    if direct.verdict != via_dual.verdict:
        raise InternalDisagreement(
            f"direct facetality says {direct.verdict}, dual conicality says {via_dual.verdict}"
        )
    return direct


@dataclass(frozen=True)
class LabeledPoset:
    poset: Poset
    labels: dict

    def key(self) -> tuple:
        return (self.poset.elements, self.poset.sorted_covers, tuple(self.labels[x] for x in self.poset))


def canonical_link(X: StratTruss, stratum: tuple) -> LabeledPoset:
    """Boundary of the compactified cone at any point of ``stratum``."""
    report = is_manifold_diagram(X)
    if not report.verdict:
        raise NotADiagram(f"not a manifold diagram: {report.failure}")
    if stratum not in X.strata:
        raise NotADiagram(f"{stratum!r} is not a stratum")
    links = []
    for x in X.strata[stratum]:
        cone = report.local[x].remainder
        comp = compactify_with_maps(cone.bundle)
        inner = set(comp.inclusion.values())
        boundary = [y for y in comp.bundle.top() if y not in inner]
        labels = {y: cone.labeling[comp.retraction[y]] for y in boundary}
        links.append(LabeledPoset(comp.bundle.top().induced(boundary), labels))
    first = links[0]
    for other in links[1:]:
        if other.key() != first.key():
            raise InternalDisagreement("canonical link depends on the chosen point")
    return first


@dataclass(frozen=True)
class CellEntry:
    element: tuple
    dim: int
    degenerate: bool


def cells_report(X: StratTruss) -> list[CellEntry]:
    """Cells of a cell diagram; a cell is degenerate when its closure
    normalizes to something that maps it to a lower-dimensional element."""
    report = is_cell_diagram(X)
    if not report.verdict:
        raise NotACellDiagram(f"not a cell diagram: {report.failure}")
    out = []
    for x in X.bundle.top():
        res = closure_up_restriction(X.bundle, x)
        nf, wmap = _normalized_local(X, res, cellular=True)
        xs = wmap.get(res.top_map[x], res.top_map[x])
        dim = X.bundle.cell_dim(x)
        out.append(CellEntry(x, dim, nf.bundle.cell_dim(xs) < dim))
    return out


def arrow_listing(X: StratTruss) -> list[str]:
    """One line per non-degenerate cell, for documentation."""
    lines = []
    for entry in cells_report(X):
        if not entry.degenerate:
            lines.append(f"{entry.dim}-cell at {'-'.join(map(str, entry.element))}")
    return lines


__all__ = [
    "DiagramReport",
    "LocalFactor",
    "LabeledPoset",
    "CellEntry",
    "check_conical_at",
    "is_manifold_diagram",
    "is_compact_manifold_diagram",
    "check_facetal_at",
    "is_cell_diagram",
    "canonical_link",
    "cells_report",
    "arrow_listing",
]
