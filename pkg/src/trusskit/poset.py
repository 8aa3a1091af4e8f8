"""Finite posets, monotone maps, order complexes and low-dimensional recognition.

Elements are opaque hashable values (strings, or tuples of ints for truss
elements).  A :class:`Poset` stores its covering relation (the transitive
reduction) and keeps up/down sets as integer bitmasks for fast comparisons.
"""

from __future__ import annotations

import enum
import graphlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Iterator, Mapping

from .errors import CycleDetected, NotMonotone, UnknownElement

Element = Hashable


def sort_key(x: object) -> tuple:
    """Total order usable on mixed element types (ints, strings, tuples)."""
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, bool):
        return (0, int(x), "")
    if isinstance(x, int):
        return (0, x, "")
    return (1, 0, str(x))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @staticmethod
    def of(flag: bool) -> "Verdict":
        return Verdict.YES if flag else Verdict.NO

    @staticmethod
    def all(verdicts: Iterable["Verdict"]) -> "Verdict":
        """Conjunction: any NO wins, then any UNKNOWN, else YES."""
        seen_unknown = False
        for v in verdicts:
            if v is Verdict.NO:
                return Verdict.NO
            if v is Verdict.UNKNOWN:
                seen_unknown = True
        return Verdict.UNKNOWN if seen_unknown else Verdict.YES


class Poset:
    """An immutable finite poset.

    Construct with :meth:`from_relations` (any generating relation) or the
    module-level :func:`build`.  ``covers`` is always the transitive reduction.
    """

    def __init__(self, elements: tuple, up: list[int]):
        # private: use from_relations
        self.elements = elements
        self._index = {x: i for i, x in enumerate(elements)}
        self._up = up
        down = [0] * len(elements)
        for i, mask in enumerate(up):
            for j in _bits(mask):
                down[j] |= 1 << i
        self._down = down

    @classmethod
    def from_relations(cls, elements: Iterable[Element], relations: Iterable[tuple]) -> "Poset":
        elems = tuple(sorted(set(elements), key=sort_key))
        index = {x: i for i, x in enumerate(elems)}
        succ: list[set[int]] = [set() for _ in elems]
        for a, b in relations:
            if a not in index:
                raise UnknownElement(f"unknown element {a!r}")
            if b not in index:
                raise UnknownElement(f"unknown element {b!r}")
            if a != b:
                succ[index[a]].add(index[b])
        # graphlib wants predecessors; feeding successors gives reverse topological order
        sorter = graphlib.TopologicalSorter({i: succ[i] for i in range(len(elems))})
        try:
            order = list(sorter.static_order())
        except graphlib.CycleError as exc:
            cyc = [elems[i] for i in exc.args[1]]
            raise CycleDetected(f"relations contain a cycle through {cyc!r}") from None
        up = [0] * len(elems)
        for i in order:
            mask = 0
            for j in succ[i]:
                mask |= (1 << j) | up[j]
            up[i] = mask
        return cls(elems, up)

    @classmethod
    def discrete(cls, elements: Iterable[Element]) -> "Poset":
        return cls.from_relations(elements, ())

    # -- basic queries -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self.covers == other.covers

    def __hash__(self) -> int:
        return hash((self.elements, self.covers))

    def __repr__(self) -> str:
        return f"Poset({len(self.elements)} elements, {len(self.covers)} covers)"

    def index(self, x: Element) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise UnknownElement(f"unknown element {x!r}") from None

    def le(self, x: Element, y: Element) -> bool:
        i, j = self.index(x), self.index(y)
        return i == j or bool(self._up[i] >> j & 1)

    def lt(self, x: Element, y: Element) -> bool:
        return bool(self._up[self.index(x)] >> self.index(y) & 1)

    def comparable(self, x: Element, y: Element) -> bool:
        return self.le(x, y) or self.le(y, x)

    def _elems(self, mask: int) -> list:
        return [self.elements[i] for i in _bits(mask)]

    def up_mask(self, x: Element, strict: bool = False) -> int:
        i = self.index(x)
        return self._up[i] if strict else self._up[i] | (1 << i)

    def down_mask(self, x: Element, strict: bool = False) -> int:
        i = self.index(x)
        return self._down[i] if strict else self._down[i] | (1 << i)

    def up(self, x: Element, strict: bool = False) -> list:
        return self._elems(self.up_mask(x, strict))

    def down(self, x: Element, strict: bool = False) -> list:
        return self._elems(self.down_mask(x, strict))

    def mask_of(self, subset: Iterable[Element]) -> int:
        mask = 0
        for x in subset:
            mask |= 1 << self.index(x)
        return mask

    @cached_property
    def covers(self) -> frozenset:
        out = set()
        for i, mask in enumerate(self._up):
            implied = 0
            for j in _bits(mask):
                implied |= self._up[j]
            for j in _bits(mask & ~implied):
                out.add((self.elements[i], self.elements[j]))
        return frozenset(out)

    @cached_property
    def sorted_covers(self) -> tuple:
        return tuple(sorted(self.covers, key=sort_key))

    @cached_property
    def relations(self) -> frozenset:
        """All pairs x <= y, including reflexive ones."""
        return frozenset(
            (self.elements[i], self.elements[j])
            for i, mask in enumerate(self._up)
            for j in (i, *_bits(mask))
        )

    def upper_covers(self, x: Element) -> list:
        return [b for a, b in self.sorted_covers if a == x]

    def lower_covers(self, x: Element) -> list:
        return [a for a, b in self.sorted_covers if b == x]

    def maxima(self) -> list:
        return [x for i, x in enumerate(self.elements) if not self._up[i]]

    def minima(self) -> list:
        return [x for i, x in enumerate(self.elements) if not self._down[i]]

    def maximum(self) -> Element | None:
        m = self.maxima()
        return m[0] if len(m) == 1 else None

    def minimum(self) -> Element | None:
        m = self.minima()
        return m[0] if len(m) == 1 else None

    def is_up_closed(self, subset: Iterable[Element]) -> bool:
        mask = self.mask_of(subset)
        return all((self._up[i] & ~mask) == 0 for i in _bits(mask))

    def is_down_closed(self, subset: Iterable[Element]) -> bool:
        mask = self.mask_of(subset)
        return all((self._down[i] & ~mask) == 0 for i in _bits(mask))

    # -- derived posets ----------------------------------------------------

    def induced(self, subset: Iterable[Element]) -> "Poset":
        sub = sorted(set(subset), key=sort_key)
        idx = [self.index(x) for x in sub]
        new_of_old = {o: n for n, o in enumerate(idx)}
        keep = 0
        for o in idx:
            keep |= 1 << o
        up = []
        for o in idx:
            m = 0
            for j in _bits(self._up[o] & keep):
                m |= 1 << new_of_old[j]
            up.append(m)
        return Poset(tuple(sub), up)

    def opposite(self) -> "Poset":
        return Poset(self.elements, list(self._down))

    def relabel(self, mapping: Mapping[Element, Element]) -> "Poset":
        """Rename elements along an injective mapping."""
        return Poset.from_relations(
            (mapping[x] for x in self.elements),
            ((mapping[a], mapping[b]) for a, b in self.covers),
        )

    def comparability_components(self, subset: Iterable[Element] | None = None) -> list[list]:
        """Connected components of the comparability graph (restricted to ``subset``)."""
        mask = (1 << len(self.elements)) - 1 if subset is None else self.mask_of(subset)
        comps = []
        remaining = mask
        while remaining:
            seed = (remaining & -remaining).bit_length() - 1
            comp = 1 << seed
            frontier = comp
            while frontier:
                nxt = 0
                for i in _bits(frontier):
                    nxt |= (self._up[i] | self._down[i]) & mask
                nxt &= ~comp
                comp |= nxt
                frontier = nxt
            remaining &= ~comp
            comps.append(self._elems(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.comparability_components()) <= 1

    def chains(self) -> Iterator[tuple]:
        """All non-empty chains, each listed bottom to top."""
        n = len(self.elements)

        def extend(chain: tuple, top: int) -> Iterator[tuple]:
            yield chain
            for j in _bits(self._up[top]):
                yield from extend(chain + (self.elements[j],), j)

        for i in range(n):
            yield from extend((self.elements[i],), i)

    def height(self) -> int:
        """Number of elements in a longest chain (0 for the empty poset)."""
        memo: dict[int, int] = {}

        def longest(i: int) -> int:
            if i not in memo:
                memo[i] = 1 + max((longest(j) for j in _bits(self._up[i])), default=0)
            return memo[i]

        return max((longest(i) for i in range(len(self.elements))), default=0)


def build(elements: Iterable[Element], covers: Iterable[tuple]) -> Poset:
    """Validated poset from elements and (not necessarily reduced) cover pairs."""
    return Poset.from_relations(elements, covers)


def closure(P: Poset, x: Element, mode: str = "down") -> Poset:
    """Induced subposet on the (strict) down- or up-closure of ``x``."""
    if mode == "down":
        return P.induced(P.down(x))
    if mode == "up":
        return P.induced(P.up(x))
    if mode == "strict-down":
        return P.induced(P.down(x, strict=True))
    if mode == "strict-up":
        return P.induced(P.up(x, strict=True))
    raise ValueError(f"unknown closure mode {mode!r}")


def opposite(P: Poset) -> Poset:
    return P.opposite()


@dataclass(frozen=True)
class PosetMap:
    source: Poset
    target: Poset
    assignment: Mapping[Element, Element] = field(hash=False)

    def __post_init__(self):
        for x in self.source:
            if x not in self.assignment:
                raise UnknownElement(f"map undefined on {x!r}")
            if self.assignment[x] not in self.target:
                raise UnknownElement(f"image {self.assignment[x]!r} not in target")
        for a, b in self.source.covers:
            if not self.target.le(self.assignment[a], self.assignment[b]):
                raise NotMonotone(f"{a!r} <= {b!r} but images are not ordered")

    def __call__(self, x: Element) -> Element:
        return self.assignment[x]

    def compose(self, after: "PosetMap") -> "PosetMap":
        """``after`` applied after ``self``."""
        return PosetMap(self.source, after.target, {x: after(self(x)) for x in self.source})

    def is_isomorphism(self) -> bool:
        img = {self(x) for x in self.source}
        if len(img) != len(self.source) or len(img) != len(self.target):
            return False
        return all(
            self.source.le(a, b) == self.target.le(self(a), self(b))
            for a in self.source for b in self.source
        )


def cc_split(f: PosetMap) -> tuple[PosetMap, PosetMap]:
    """Split a labeling into a characteristic map onto strata and a conservative map.

    Strata are the comparability components of each label fiber, named by their
    first element in sorted order.
    """
    P = f.source
    by_label: dict = {}
    for x in P:
        by_label.setdefault(f(x), []).append(x)
    stratum_of = {}
    for members in by_label.values():
        for comp in P.comparability_components(members):
            name = comp[0]
            for x in comp:
                stratum_of[x] = name
    names = sorted(set(stratum_of.values()), key=sort_key)
    rel = {(stratum_of[a], stratum_of[b]) for a, b in P.covers if stratum_of[a] != stratum_of[b]}
    E = Poset.from_relations(names, rel)
    char = PosetMap(P, E, stratum_of)
    cons = PosetMap(E, f.target, {s: f(s) for s in names})
    return char, cons


# -- order complexes -------------------------------------------------------


@dataclass(frozen=True)
class OrderComplex:
    """Chains of a poset grouped by dimension (a chain of k+1 elements has dim k)."""

    vertices: tuple
    simplices: tuple  # simplices[d] = tuple of chains with d+1 elements

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]


def order_complex(P: Poset) -> OrderComplex:
    by_dim: dict[int, list] = {}
    for c in P.chains():
        by_dim.setdefault(len(c) - 1, []).append(c)
    top = max(by_dim, default=-1)
    return OrderComplex(P.elements, tuple(tuple(by_dim.get(d, ())) for d in range(top + 1)))


def euler_characteristic(K: OrderComplex | Poset) -> int:
    if isinstance(K, Poset):
        K = order_complex(K)
    return sum((-1) ** d * n for d, n in enumerate(K.counts()))


# -- recognition -----------------------------------------------------------


def _link(P: Poset, x: Element) -> Poset:
    """Poset whose order complex is the link of vertex ``x`` in the order complex of P."""
    return P.induced(P._elems(P.up_mask(x, True) | P.down_mask(x, True)))


def _is_cycle_graph(P: Poset) -> bool:
    """Order complex is a single cycle (a 1-sphere)."""
    if len(P) < 3 or P.height() != 2 or not P.is_connected():
        return False
    for i in range(len(P)):
        if bin(P._up[i] | P._down[i]).count("1") != 2:
            return False
    return True


def _is_arc_graph(P: Poset) -> bool:
    """Order complex is a path graph with at least one edge (a 1-disk)."""
    if len(P) < 2 or P.height() != 2 or not P.is_connected():
        return False
    degrees = sorted(bin(P._up[i] | P._down[i]).count("1") for i in range(len(P)))
    return degrees[:2] == [1, 1] and all(d == 2 for d in degrees[2:])


def _surface_data(P: Poset):
    """Edge-to-triangle incidence for a poset whose order complex is 2-dimensional.

    Returns None when the order complex is not pure of dimension 2.
    """
    if P.height() != 3:
        return None
    K = order_complex(P)
    edge_count: dict[tuple, int] = {e: 0 for e in K.simplices[1]}
    covered_vertices = set()
    for a, b, c in K.simplices[2]:
        for e in ((a, b), (a, c), (b, c)):
            edge_count[e] += 1
        covered_vertices.update((a, b, c))
    if any(n == 0 for n in edge_count.values()) or len(covered_vertices) != len(P):
        return None
    return K, edge_count


def recognize_sphere(P: Poset, d: int) -> Verdict:
    """Is the order complex of P a combinatorial d-sphere? Exact for d <= 2."""
    if d < -1:
        raise ValueError("sphere dimension must be at least -1")
    if d == -1:
        return Verdict.of(len(P) == 0)
    if d == 0:
        return Verdict.of(len(P) == 2 and not P.comparable(*P.elements))
    if d == 1:
        return Verdict.of(_is_cycle_graph(P))
    if d == 2:
        data = _surface_data(P)
        if data is None:
            return Verdict.NO
        K, edge_count = data
        if any(n != 2 for n in edge_count.values()):
            return Verdict.NO
        if not P.is_connected():
            return Verdict.NO
        if not all(_is_cycle_graph(_link(P, x)) for x in P):
            return Verdict.NO
        return Verdict.of(euler_characteristic(K) == 2)
    return Verdict.UNKNOWN


def recognize_disk(P: Poset, d: int) -> Verdict:
    """Is the order complex of P a combinatorial closed d-disk? Exact for d <= 2."""
    if d < 0:
        raise ValueError("disk dimension must be non-negative")
    if d == 0:
        return Verdict.of(len(P) == 1)
    if d == 1:
        return Verdict.of(_is_arc_graph(P))
    if d == 2:
        data = _surface_data(P)
        if data is None or not P.is_connected():
            return Verdict.NO
        K, edge_count = data
        if any(n not in (1, 2) for n in edge_count.values()):
            return Verdict.NO
        boundary = [e for e, n in edge_count.items() if n == 1]
        if not boundary:
            return Verdict.NO
        # boundary edges must form one cycle; build it as a graph on chain vertices
        adj: dict = {}
        for a, b in boundary:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        if any(len(v) != 2 for v in adj.values()):
            return Verdict.NO
        start = next(iter(adj))
        seen, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(adj):
            return Verdict.NO
        for x in P:
            link = _link(P, x)
            ok = _is_arc_graph(link) if x in adj else _is_cycle_graph(link)
            if not ok:
                return Verdict.NO
        return Verdict.of(euler_characteristic(K) == 1)
    return Verdict.UNKNOWN


def is_cellular(P: Poset, with_dim: Callable[[Element], int] | Mapping[Element, int]) -> Verdict:
    """Every strict up-closure is a sphere of one dimension less than the element."""
    dim_of = with_dim.__getitem__ if isinstance(with_dim, Mapping) else with_dim
    verdicts = []
    for x in P:
        v = recognize_sphere(closure(P, x, "strict-up"), dim_of(x) - 1)
        if v is Verdict.NO:
            return Verdict.NO
        verdicts.append(v)
    return Verdict.all(verdicts)
