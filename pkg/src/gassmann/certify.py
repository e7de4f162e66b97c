"""Almost-conjugacy certificates for twisted subgroup families.

Everything here is exact and brute-force checkable: intersection profiles
against full conjugacy-class tables, the structural conjugacy test next
to an independent conjugator search, canonical enumeration of subgroup
classes, the truncated-ring class count, the ambient GL(3) collapse, and
componentwise product certificates.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .errors import SizeCapExceeded, SpecMismatch
from .heisenberg import (
    ConjugacyClassTable,
    Heisenberg,
    TwistedSubgroup,
    conjugacy_partition,
    heisenberg_group,
    twisted_subgroup,
)
from .rings import (
    Element,
    FieldSpec,
    LinearMap,
    RingSpec,
    TruncRingSpec,
    all_linear_maps,
    is_mult_map,
    mult_matrix,
    size_cap,
)


@dataclass(frozen=True)
class GassmannCertificate:
    """Per-class intersection profiles for a subgroup pair, plus verdict."""

    ring: RingSpec
    label_h: str
    label_k: str
    size_h: int
    size_k: int
    identity_class: int
    class_sizes: tuple[int, ...]
    profile_h: tuple[int, ...]
    profile_k: tuple[int, ...]
    map_h: Optional[LinearMap] = None
    map_k: Optional[LinearMap] = None

    @property
    def equal(self) -> bool:
        return self.profile_h == self.profile_k

    @property
    def witness_class(self) -> Optional[int]:
        if self.equal:
            return None
        for i, (x, y) in enumerate(zip(self.profile_h, self.profile_k)):
            if x != y:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "subgroups": [self.label_h, self.label_k],
            "maps": [
                self.map_h.to_json() if self.map_h else None,
                self.map_k.to_json() if self.map_k else None,
            ],
            "sizes": [self.size_h, self.size_k],
            "identity_class": self.identity_class,
            "class_sizes": list(self.class_sizes),
            "profiles": [list(self.profile_h), list(self.profile_k)],
            "verdict": "equal" if self.equal else "unequal",
            "witness_class": self.witness_class,
        }


def intersection_profile(sub, table: ConjugacyClassTable) -> tuple[int, ...]:
    """|H intersect [g]| for every class, in canonical class order."""
    if sub.group != table.group:
        raise SpecMismatch("subgroup and class table live in different groups")
    counts = [0] * table.class_count
    for g in sub.elements:
        counts[table.index[g]] += 1
    return tuple(counts)


def almost_conjugate(sub_h, sub_k, table: Optional[ConjugacyClassTable] = None,
                     cap: Optional[int] = None) -> GassmannCertificate:
    """Certificate that two subgroups meet every conjugacy class equally."""
    if sub_h.group != sub_k.group:
        raise SpecMismatch("subgroups live in different groups")
    if table is None:
        table = sub_h.group.conjugacy_classes(cap=cap)
    return GassmannCertificate(
        ring=sub_h.group.ring,
        label_h=sub_h.label(),
        label_k=sub_k.label(),
        size_h=sub_h.size,
        size_k=sub_k.size,
        identity_class=table.identity_class(),
        class_sizes=table.sizes(),
        profile_h=intersection_profile(sub_h, table),
        profile_k=intersection_profile(sub_k, table),
        map_h=getattr(sub_h, "f", None),
        map_k=getattr(sub_k, "f", None),
    )


# ---------------------------------------------------------------------------
# Conjugacy of twisted subgroups: structural test and independent search
# ---------------------------------------------------------------------------


def are_conjugate(f: LinearMap, g: LinearMap, spec: RingSpec) -> bool:
    """Structural test: H_f and H_g are conjugate iff f - g is a multiplication."""
    return is_mult_map(f - g, spec) is not None


def are_conjugate_bruteforce(sub_h: TwistedSubgroup, sub_k: TwistedSubgroup,
                             cap: Optional[int] = None) -> bool:
    """Search every group element for one conjugating H_f onto H_g elementwise."""
    if sub_h.group != sub_k.group:
        raise SpecMismatch("subgroups live in different groups")
    group = sub_h.group
    limit = size_cap() if cap is None else cap
    if group.order > limit:
        raise SizeCapExceeded(f"group order {group.order} exceeds cap {limit}")
    target = sub_k.elements
    for g in group.elements:
        if frozenset(group.conjugate(g, h) for h in sub_h.elements) == target:
            return True
    return False


# ---------------------------------------------------------------------------
# Canonical class representatives
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def mult_subspace_echelon(spec: RingSpec) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Reduced echelon basis of the flattened multiplication matrices.

    Returns (pivot_position, row_vector) pairs in fixed leftmost-pivot
    order; the span always has dimension equal to the ring dimension.
    """
    p = spec.p
    n2 = spec.dim * spec.dim
    rows: list[list[int]] = [
        list(mult_matrix(e, spec).flatten()) for e in spec.basis()
    ]
    echelon: list[tuple[int, list[int]]] = []
    for row in rows:
        vec = row[:]
        for pivot, basis_row in echelon:
            c = vec[pivot]
            if c:
                vec = [(x - c * y) % p for x, y in zip(vec, basis_row)]
        pivot = next((i for i, c in enumerate(vec) if c), None)
        if pivot is None:
            continue
        inv = pow(vec[pivot], -1, p)
        vec = [(x * inv) % p for x in vec]
        for k, (piv2, row2) in enumerate(echelon):
            c = row2[pivot]
            if c:
                echelon[k] = (piv2, [(x - c * y) % p for x, y in zip(row2, vec)])
        echelon.append((pivot, vec))
    echelon.sort(key=lambda pr: pr[0])
    assert len(echelon) == spec.dim, "multiplication matrices are dependent"
    assert all(0 <= piv < n2 for piv, _ in echelon)
    return tuple((piv, tuple(vec)) for piv, vec in echelon)


def canonical_twist(f: LinearMap, spec: RingSpec) -> LinearMap:
    """Reduce f modulo the multiplication subspace by pivot elimination."""
    p = spec.p
    vec = list(f.flatten())
    for pivot, row in mult_subspace_echelon(spec):
        c = vec[pivot]
        if c:
            vec = [(x - c * y) % p for x, y in zip(vec, row)]
    return LinearMap.from_flat(p, tuple(vec), spec.dim)


@dataclass(frozen=True)
class ClassCatalog:
    """One canonical twist representative per conjugacy class of subgroups."""

    ring: RingSpec
    reps: tuple[LinearMap, ...]

    @property
    def count(self) -> int:
        return len(self.reps)

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "count": self.count,
                "reps": [r.to_json() for r in self.reps]}


def enumerate_class_reps(spec: RingSpec, cap: Optional[int] = None) -> ClassCatalog:
    """Canonicalize every additive map; distinct results are the class reps."""
    n2 = spec.dim * spec.dim
    limit = size_cap() if cap is None else cap
    if spec.p**n2 > limit:
        raise SizeCapExceeded(f"{spec.p}^{n2} additive maps exceed cap {limit}")
    seen = {canonical_twist(f, spec).flatten() for f in all_linear_maps(spec)}
    reps = tuple(LinearMap.from_flat(spec.p, flat, spec.dim) for flat in sorted(seen))
    return ClassCatalog(ring=spec, reps=reps)


def twist_orbit_count_bruteforce(spec: RingSpec, cap: Optional[int] = None) -> int:
    """Independent count of orbits of f under f -> f - mult_matrix(b)."""
    n2 = spec.dim * spec.dim
    limit = size_cap() if cap is None else cap
    if spec.p**n2 > limit:
        raise SizeCapExceeded(f"{spec.p}^{n2} additive maps exceed cap {limit}")
    translations = [mult_matrix(b, spec) for b in spec.elements]
    seen: set = set()
    orbits = 0
    for f in all_linear_maps(spec):
        key = f.flatten()
        if key in seen:
            continue
        orbits += 1
        for t in translations:
            seen.add((f - t).flatten())
    return orbits


# ---------------------------------------------------------------------------
# Truncated-ring class counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TowerClassCount:
    """Exact class count over GF(p)[t]/t^j next to the cited lower value."""

    p: int
    j: int
    exact: int
    cited_lower: int

    @property
    def bound_holds(self) -> bool:
        return self.exact >= self.cited_lower

    @property
    def gap(self) -> bool:
        """True when the exact count exceeds the cited value; never hidden."""
        return self.exact != self.cited_lower

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "j": self.j,
            "exact": self.exact,
            "cited_lower": self.cited_lower,
            "bound_holds": self.bound_holds,
            "gap": self.gap,
        }


def tower_class_count(spec: TruncRingSpec, cap: Optional[int] = None) -> TowerClassCount:
    """Count twisted-subgroup classes of the truncated-ring group exactly.

    The cited literature value p^(j(j-1)/2) is reported as a lower bound
    only; the enumeration over all GF(p)-linear twists gives p^(j(j-1))
    and the discrepancy is surfaced via the gap flag.
    """
    catalog = enumerate_class_reps(spec, cap=cap)
    cited = spec.p ** (spec.j * (spec.j - 1) // 2)
    return TowerClassCount(p=spec.p, j=spec.j, exact=catalog.count, cited_lower=cited)


# ---------------------------------------------------------------------------
# Ambient GL(3, F_q) collapse
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmbientClassReport:
    ambient: str
    within_group_classes: int
    ambient_classes: int
    bound_exponent: int
    reported_lower: int

    @property
    def bound_holds(self) -> bool:
        return self.ambient_classes >= self.reported_lower

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "within_group_classes": self.within_group_classes,
            "ambient_classes": self.ambient_classes,
            "lower_bound_exponent": self.bound_exponent,
            "reported_lower": self.reported_lower,
            "bound_holds": self.bound_holds,
        }


def _encode(spec: FieldSpec, x: Element) -> int:
    code = 0
    for c in reversed(x):
        code = code * spec.p + c
    return code


def _heisenberg_matrix_codes(spec: FieldSpec, f: LinearMap) -> list[tuple[int, ...]]:
    """H_f as flat 3x3 matrices over the field, entries integer-encoded."""
    one = _encode(spec, spec.one())
    out = []
    for x in spec.elements:
        xi = _encode(spec, x)
        fx = _encode(spec, f.apply(x))
        out.append((one, xi, fx, 0, one, 0, 0, 0, one))
    return out


def _gl3_tables(spec: FieldSpec):
    import numpy as np

    q = spec.size
    els = spec.elements
    add_t = np.zeros((q, q), dtype=np.int64)
    mul_t = np.zeros((q, q), dtype=np.int64)
    sub_t = np.zeros((q, q), dtype=np.int64)
    for a in els:
        ia = _encode(spec, a)
        for b in els:
            ib = _encode(spec, b)
            add_t[ia, ib] = _encode(spec, spec.add(a, b))
            mul_t[ia, ib] = _encode(spec, spec.mul(a, b))
            sub_t[ia, ib] = _encode(spec, spec.sub(a, b))
    return add_t, mul_t, sub_t


@functools.lru_cache(maxsize=4)
def _gl3_batch(spec: FieldSpec):
    """All invertible 3x3 matrices over the field, as an (N, 3, 3) array."""
    import numpy as np

    q = spec.size
    add_t, mul_t, sub_t = _gl3_tables(spec)
    count = q**9
    idx = np.arange(count, dtype=np.int64)
    entries = np.empty((count, 9), dtype=np.int64)
    for k in range(9):
        entries[:, k] = idx % q
        idx //= q
    a, b, c, d, e, f, g, h, i = (entries[:, k] for k in range(9))
    m1 = sub_t[mul_t[e, i], mul_t[f, h]]
    m2 = sub_t[mul_t[d, i], mul_t[f, g]]
    m3 = sub_t[mul_t[d, h], mul_t[e, g]]
    det = sub_t[add_t[mul_t[a, m1], mul_t[c, m3]], mul_t[b, m2]]
    keep = entries[det != 0]
    return keep.reshape(-1, 3, 3), add_t, mul_t


def _matmul_batch_right(batch, single, add_t, mul_t):
    """(N,3,3) @ (3,3) over the encoded field."""
    import numpy as np

    n = batch.shape[0]
    out = np.zeros((n, 3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            acc = mul_t[batch[:, i, 0], single[0][j]]
            acc = add_t[acc, mul_t[batch[:, i, 1], single[1][j]]]
            acc = add_t[acc, mul_t[batch[:, i, 2], single[2][j]]]
            out[:, i, j] = acc
    return out


def _matmul_batch_left(single, batch, add_t, mul_t):
    """(3,3) @ (N,3,3) over the encoded field."""
    import numpy as np

    n = batch.shape[0]
    out = np.zeros((n, 3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            acc = mul_t[single[i][0], batch[:, 0, j]]
            acc = add_t[acc, mul_t[single[i][1], batch[:, 1, j]]]
            acc = add_t[acc, mul_t[single[i][2], batch[:, 2, j]]]
            out[:, i, j] = acc
    return out


def _codes(batch, q):
    flat = batch.reshape(batch.shape[0], 9)
    code = flat[:, 0].copy()
    mult = 1
    for k in range(1, 9):
        mult *= q
        code += flat[:, k] * mult
    return code


def _gl3_conjugable(spec: FieldSpec, f: LinearMap, g: LinearMap) -> bool:
    """Does some element of GL(3, F_q) conjugate H_f onto H_g?

    Uses the linear reformulation M h = k M: M conjugates H_f into H_g
    exactly when every generator image lands in H_g, and equal orders
    upgrade containment to equality.
    """
    import numpy as np

    q = spec.size
    batch, add_t, mul_t = _gl3_batch(spec)
    gens = []
    for e in spec.basis():
        gens.append(
            (
                (_encode(spec, spec.one()), _encode(spec, e), _encode(spec, f.apply(e))),
                (0, _encode(spec, spec.one()), 0),
                (0, 0, _encode(spec, spec.one())),
            )
        )
    target = _heisenberg_matrix_codes(spec, g)
    target_codes = np.stack(
        [
            _codes(_matmul_batch_left(tuple(tuple(row) for row in
                   (mat[0:3], mat[3:6], mat[6:9])), batch, add_t, mul_t), q)
            for mat in target
        ]
    )
    mask = np.ones(batch.shape[0], dtype=bool)
    for h in gens:
        prod_codes = _codes(_matmul_batch_right(batch, h, add_t, mul_t), q)
        mask &= (target_codes == prod_codes[None, :]).any(axis=0)
        if not mask.any():
            return False
    return bool(mask.any())


def gl3_conjugable_bruteforce(spec: FieldSpec, f: LinearMap, g: LinearMap) -> bool:
    """Plain-Python conjugator scan over all of GL(3, F_q); small q only."""
    els = spec.elements
    zero, one = spec.zero(), spec.one()

    def mat_mul(x, y):
        return tuple(
            tuple(
                functools.reduce(
                    spec.add, (spec.mul(x[i][k], y[k][j]) for k in range(3))
                )
                for j in range(3)
            )
            for i in range(3)
        )

    def det(m):
        t1 = spec.mul(m[0][0], spec.sub(spec.mul(m[1][1], m[2][2]), spec.mul(m[1][2], m[2][1])))
        t2 = spec.mul(m[0][1], spec.sub(spec.mul(m[1][0], m[2][2]), spec.mul(m[1][2], m[2][0])))
        t3 = spec.mul(m[0][2], spec.sub(spec.mul(m[1][0], m[2][1]), spec.mul(m[1][1], m[2][0])))
        return spec.add(spec.sub(t1, t2), t3)

    subgroup_f = [((one, x, f.apply(x)), (zero, one, zero), (zero, zero, one)) for x in els]
    subgroup_g = {((one, x, g.apply(x)), (zero, one, zero), (zero, zero, one)) for x in els}
    all_matrices = (
        tuple(tuple(row) for row in (m[0:3], m[3:6], m[6:9]))
        for m in itertools.product(els, repeat=9)
    )
    for mat in all_matrices:
        if det(mat) == zero:
            continue
        ok = True
        for h in subgroup_f:
            mh = mat_mul(mat, h)
            if not any(mat_mul(k, mat) == mh for k in subgroup_g):
                ok = False
                break
        if ok:
            return True
    return False


def ambient_class_count(
    spec: FieldSpec,
    catalog: ClassCatalog,
    ambient: str = "GL3",
    q_cap: int = 4,
    override: bool = False,
) -> AmbientClassReport:
    """Count catalog classes that survive conjugation in the ambient group.

    ambient="N3" is the consistency case (no collapse possible, returns
    the catalog count); ambient="GL3" runs an exhaustive conjugator scan
    over GL(3, F_q), feasible for q <= 4 unless overridden.
    """
    if catalog.ring != spec:
        raise SpecMismatch("catalog was built for a different ring")
    exponent = spec.m * (spec.m - 1) - 9
    reported = max(1, spec.p**exponent) if exponent >= 0 else 1
    if ambient == "N3":
        return AmbientClassReport("N3", catalog.count, catalog.count, exponent, reported)
    if ambient != "GL3":
        raise SpecMismatch(f"unknown ambient {ambient!r}")
    if spec.size > q_cap and not override:
        raise SizeCapExceeded(f"q={spec.size} exceeds GL3 scan cap {q_cap}")
    reps = list(catalog.reps)
    parent = list(range(len(reps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if find(i) == find(j):
                continue
            if _gl3_conjugable(spec, reps[i], reps[j]):
                parent[find(j)] = find(i)
    classes = len({find(i) for i in range(len(reps))})
    return AmbientClassReport("GL3", catalog.count, classes, exponent, reported)


# ---------------------------------------------------------------------------
# Product families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductFamily:
    """Componentwise twisted subgroups inside a product of Heisenberg groups."""

    rings: tuple[FieldSpec, ...]
    maps: tuple[LinearMap, ...]

    def __post_init__(self):
        if len(self.rings) < 1:
            raise SpecMismatch("a product family needs at least one factor")
        if len(self.rings) != len(self.maps):
            raise SpecMismatch("one twist per factor ring required")
        chars = [r.p for r in self.rings]
        if len(set(chars)) != len(chars):
            raise SpecMismatch("factor residue fields must have distinct characteristics")
        for ring, f in zip(self.rings, self.maps):
            if f.dim != ring.dim or f.p != ring.p:
                raise SpecMismatch("twist dimensions inconsistent with factor rings")

    @cached_property
    def subgroups(self) -> tuple[TwistedSubgroup, ...]:
        return tuple(
            twisted_subgroup(f, heisenberg_group(ring))
            for ring, f in zip(self.rings, self.maps)
        )


@dataclass(frozen=True)
class ProductCertificate:
    """Tensor-profile certificate for a pair of product families."""

    factor_certificates: tuple[GassmannCertificate, ...]
    profile_h: tuple[int, ...]
    profile_k: tuple[int, ...]

    @property
    def equal(self) -> bool:
        return self.profile_h == self.profile_k

    @property
    def witness_class(self) -> Optional[int]:
        if self.equal:
            return None
        for i, (x, y) in enumerate(zip(self.profile_h, self.profile_k)):
            if x != y:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "factors": [c.to_json() for c in self.factor_certificates],
            "product_profiles": [list(self.profile_h), list(self.profile_k)],
            "verdict": "equal" if self.equal else "unequal",
            "witness_class": self.witness_class,
        }


def tensor_profiles(profiles: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    """Profile of a product subgroup over the product class table.

    Classes of a direct product are products of factor classes, ordered
    lexicographically by factor class indices, so the product profile is
    the flattened outer product of the factor profiles.
    """
    out = (1,)
    for prof in profiles:
        out = tuple(x * y for x in out for y in prof)
    return out


def product_certificate(fam1: ProductFamily, fam2: ProductFamily,
                        cap: Optional[int] = None) -> ProductCertificate:
    if fam1.rings != fam2.rings:
        raise SpecMismatch("product families must share factor ring specs")
    certs = tuple(
        almost_conjugate(h, k, cap=cap)
        for h, k in zip(fam1.subgroups, fam2.subgroups)
    )
    return ProductCertificate(
        factor_certificates=certs,
        profile_h=tensor_profiles([c.profile_h for c in certs]),
        profile_k=tensor_profiles([c.profile_k for c in certs]),
    )


class ProductGroup:
    """Direct product of Heisenberg groups, for direct cross-checks only."""

    def __init__(self, factors: Sequence[Heisenberg]):
        self.factors = tuple(factors)

    @property
    def order(self) -> int:
        out = 1
        for g in self.factors:
            out *= g.order
        return out

    def identity(self):
        return tuple(g.identity() for g in self.factors)

    def mul(self, a, b):
        return tuple(g.mul(x, y) for g, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(g.inv(x) for g, x in zip(self.factors, a))

    @cached_property
    def elements(self):
        return tuple(itertools.product(*(g.elements for g in self.factors)))

    def conjugacy_partition(self, cap: Optional[int] = None):
        limit = size_cap() if cap is None else cap
        if self.order > limit:
            raise SizeCapExceeded(f"product order {self.order} exceeds cap {limit}")
        return conjugacy_partition(self.elements, self.mul, self.inv)


def product_profile_direct(fams: ProductFamily, partition_index: dict,
                           class_count: int) -> tuple[int, ...]:
    """Profile of the product subgroup counted directly, no tensor identity."""
    counts = [0] * class_count
    for combo in itertools.product(*(sub.sorted_elements for sub in fams.subgroups)):
        counts[partition_index[combo]] += 1
    return tuple(counts)


def product_classes_from_factors(factor_tables: Sequence[ConjugacyClassTable]):
    """Cartesian product of factor class tables as a set-of-frozensets partition."""
    partitions = []
    for combo in itertools.product(*(t.classes for t in factor_tables)):
        members = frozenset(itertools.product(*combo))
        partitions.append(members)
    return partitions
