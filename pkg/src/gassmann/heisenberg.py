"""The group of 3x3 upper-triangular unipotent matrices over a finite ring.

Group elements are coordinate triples (a, b, c) of ring elements standing
for the matrix [[1, a, c], [0, 1, b], [0, 0, 1]]; the group law is
evaluated directly on the triples and matrices exist only for export.
Conjugacy classes are computed by full orbit expansion, trading speed for
an argument-free notion of correctness at desk scale.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .errors import DimensionMismatch, NotClosed, SizeCapExceeded, SpecMismatch
from .rings import Element, LinearMap, RingSpec, size_cap

GroupElement = tuple[Element, Element, Element]


class Heisenberg:
    """Group object for one coefficient ring; all operations are pure."""

    def __init__(self, ring: RingSpec):
        self.ring = ring

    def __eq__(self, other) -> bool:
        return isinstance(other, Heisenberg) and self.ring == other.ring

    def __hash__(self) -> int:
        return hash(("Heisenberg", self.ring))

    def __repr__(self) -> str:
        return f"Heisenberg({self.ring!r})"

    @property
    def order(self) -> int:
        return self.ring.size**3

    def identity(self) -> GroupElement:
        z = self.ring.zero()
        return (z, z, z)

    def _check(self, g: GroupElement) -> None:
        if len(g) != 3:
            raise SpecMismatch(f"{g!r} is not a coordinate triple")
        for comp in g:
            self.ring.check(comp)

    def mul(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """(a1,b1,c1) * (a2,b2,c2) = (a1+a2, b1+b2, c1+c2+a1*b2)."""
        ring = self.ring
        add = ring.add
        return (
            add(g[0], h[0]),
            add(g[1], h[1]),
            add(add(g[2], h[2]), ring.mul(g[0], h[1])),
        )

    def inv(self, g: GroupElement) -> GroupElement:
        ring = self.ring
        neg = ring.neg
        return (neg(g[0]), neg(g[1]), ring.add(neg(g[2]), ring.mul(g[0], g[1])))

    def conjugate(self, g: GroupElement, h: GroupElement) -> GroupElement:
        """g * h * g^-1."""
        return self.mul(self.mul(g, h), self.inv(g))

    @cached_property
    def elements(self) -> tuple[GroupElement, ...]:
        """All |R|^3 elements, lexicographic on the (a, b, c) coefficients."""
        els = self.ring.elements
        return tuple((a, b, c) for a in els for b in els for c in els)

    def center_elements(self) -> tuple[GroupElement, ...]:
        z = self.ring.zero()
        return tuple((z, z, c) for c in self.ring.elements)

    def element_matrix(self, g: GroupElement):
        """3x3 matrix form over the ring, for export and debugging."""
        ring = self.ring
        one, zero = ring.one(), ring.zero()
        a, b, c = g
        return ((one, a, c), (zero, one, b), (zero, zero, one))

    def conjugacy_classes(self, cap: Optional[int] = None) -> "ConjugacyClassTable":
        limit = size_cap() if cap is None else cap
        if self.order > limit:
            raise SizeCapExceeded(f"group order {self.order} exceeds cap {limit}")
        return _class_table_cached(self)


@functools.lru_cache(maxsize=None)
def heisenberg_group(ring: RingSpec) -> Heisenberg:
    return Heisenberg(ring)


def conjugacy_partition(elements, mul, inv):
    """Orbit partition of a finite group under conjugation by every element.

    Deterministic: seeds are taken in the given order, so each class is
    keyed by its minimal member and classes come out sorted by that key.
    """
    elts = list(elements)
    inverses = {g: inv(g) for g in elts}
    index: dict = {}
    classes: list[tuple] = []
    for seed in elts:
        if seed in index:
            continue
        orbit = {mul(mul(g, seed), inverses[g]) for g in elts}
        cid = len(classes)
        classes.append(tuple(sorted(orbit)))
        for member in orbit:
            index[member] = cid
    return tuple(classes), index


class ConjugacyClassTable:
    """Partition of a Heisenberg group into conjugacy classes."""

    def __init__(self, group: Heisenberg, classes, index):
        self.group = group
        self.classes = classes
        self.index = index

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, g: GroupElement) -> int:
        return self.index[g]

    def representatives(self) -> tuple[GroupElement, ...]:
        return tuple(cls[0] for cls in self.classes)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(cls) for cls in self.classes)

    def identity_class(self) -> int:
        return self.index[self.group.identity()]

    def to_json(self) -> dict:
        return {
            "ring": self.group.ring.to_json(),
            "classes": [
                {"representative": [list(x) for x in cls[0]], "size": len(cls)}
                for cls in self.classes
            ],
        }


@functools.lru_cache(maxsize=None)
def _class_table_cached(group: Heisenberg) -> ConjugacyClassTable:
    classes, index = conjugacy_partition(group.elements, group.mul, group.inv)
    return ConjugacyClassTable(group, classes, index)


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistedSubgroup:
    """H_f = {(x, 0, f(x))} for an additive self-map f of the ring."""

    group: Heisenberg
    f: LinearMap

    @cached_property
    def elements(self) -> frozenset:
        ring = self.group.ring
        zero = ring.zero()
        members = frozenset((x, zero, self.f.apply(x)) for x in ring.elements)
        if len(members) != ring.size:
            raise NotClosed("twisted subgroup lost elements; additive map broken")
        return members

    @cached_property
    def sorted_elements(self) -> tuple[GroupElement, ...]:
        return tuple(sorted(self.elements))

    @property
    def size(self) -> int:
        return self.group.ring.size

    def label(self) -> str:
        return f"H[{','.join(map(str, self.f.flatten()))}]"

    def to_json(self) -> dict:
        return {
            "ring": self.group.ring.to_json(),
            "f": self.f.to_json(),
            "elements": [[list(x) for x in g] for g in self.sorted_elements],
        }


@dataclass(frozen=True)
class PlainSubgroup:
    """An explicit subgroup given by its element set (center, whole group...)."""

    group: Heisenberg
    members: frozenset
    name: str = "subgroup"

    @property
    def elements(self) -> frozenset:
        return self.members

    @cached_property
    def sorted_elements(self) -> tuple[GroupElement, ...]:
        return tuple(sorted(self.members))

    @property
    def size(self) -> int:
        return len(self.members)

    def label(self) -> str:
        return self.name

    def to_json(self) -> dict:
        return {
            "ring": self.group.ring.to_json(),
            "name": self.name,
            "elements": [[list(x) for x in g] for g in self.sorted_elements],
        }


def twisted_subgroup(f: LinearMap, group: Heisenberg) -> TwistedSubgroup:
    """Build H_f; closure under the group law is re-checked at desk scale."""
    ring = group.ring
    if f.dim != ring.dim or f.p != ring.p:
        raise DimensionMismatch(
            f"map of dimension {f.dim} over GF({f.p}) does not act on {ring!r}"
        )
    sub = TwistedSubgroup(group, f)
    members = sub.elements
    if len(members) ** 2 <= (1 << 14):
        for g in members:
            for h in members:
                if group.mul(g, h) not in members:
                    raise NotClosed(f"{g} * {h} escapes the subgroup")
    return sub


def horizontal_subgroup(group: Heisenberg) -> TwistedSubgroup:
    """The untwisted subgroup {(x, 0, 0)}."""
    return twisted_subgroup(LinearMap.zero(group.ring.p, group.ring.dim), group)


def center_subgroup(group: Heisenberg) -> PlainSubgroup:
    return PlainSubgroup(group, frozenset(group.center_elements()), "center")


def whole_group(group: Heisenberg) -> PlainSubgroup:
    return PlainSubgroup(group, frozenset(group.elements), "whole-group")


def trivial_subgroup(group: Heisenberg) -> PlainSubgroup:
    return PlainSubgroup(group, frozenset([group.identity()]), "trivial")


def conjugate_subgroup(g: GroupElement, sub: TwistedSubgroup) -> TwistedSubgroup:
    """g H_f g^-1, which is again twisted: f' = f - mult_matrix(b of g).

    The structural answer is verified elementwise before it is returned.
    """
    from .rings import mult_matrix  # local to avoid cycle at import time

    group = sub.group
    group._check(g)
    f_new = sub.f - mult_matrix(g[1], group.ring)
    result = TwistedSubgroup(group, f_new)
    conjugated = frozenset(group.conjugate(g, h) for h in sub.elements)
    if conjugated != result.elements:
        raise NotClosed("structural conjugate disagrees with elementwise conjugation")
    return result
