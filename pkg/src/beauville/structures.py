"""Spherical systems, Beauville and ramification structures, and their search.

A Sigma-set is a union of conjugacy classes, so it is handled as the set of
class keys of all powers of the tuple's entries.  Every backend's class key
is exact, which makes disjointness exact without listing the group; element
level Sigma-sets (``sigma_set``) still need an enumerable group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

from .errors import (BadInput, BudgetExhausted, DegreeTooLarge, GenusBelowTwo, NonIntegralChi,
                     NonIntegralGenus, TooLarge)
from .groups import ENUMERATION_CAP, GroupHandle, PermGroup, parse_group_spec
from .perm import CycleShape, random_class_element

UNFILTERED_SEARCH_CAP = 10_000
CENSUS_CAP = 5_000
POOL_SIZE = 512


# -- types and invariants ------------------------------------------------------------

def type_of(T: Sequence, G: GroupHandle | None = None) -> tuple[int, ...]:
    if G is not None:
        return tuple(G.element_order(x) for x in T)
    return tuple(int(x.order()) for x in T)


def is_hyperbolic(tau: Sequence[int]) -> bool:
    return sum(Fraction(1, m) for m in tau) < 1


def _check_type(tau: Sequence[int]) -> tuple[int, ...]:
    tau = tuple(int(m) for m in tau)
    if not tau or any(m < 2 for m in tau):
        raise BadInput(f"type entries must be at least 2, got {tau}")
    return tau


def genus_from_type(group_order: int, gprime: int, tau: Sequence[int]) -> int:
    """Genus of a G-cover of a genus ``gprime`` curve branched with orders ``tau``."""
    tau = _check_type(tau)
    if group_order < 1:
        raise BadInput("group order must be positive")
    rhs = group_order * (2 * gprime - 2 + sum(1 - Fraction(1, m) for m in tau))
    if rhs.denominator != 1 or rhs.numerator % 2:
        raise NonIntegralGenus(f"2g - 2 = {rhs} is not an even integer")
    return (rhs.numerator + 2) // 2


@dataclass(frozen=True)
class SurfaceInvariants:
    g1: int
    g2: int
    chi: int
    K2: int
    e: int
    q: int
    pg: int

    def to_dict(self) -> dict:
        return {"g1": self.g1, "g2": self.g2, "chi": self.chi, "K2": self.K2,
                "e": self.e, "q": self.q, "pg": self.pg}


def surface_invariants(group_order: int, type1: Sequence[int], type2: Sequence[int]) -> SurfaceInvariants:
    g1 = genus_from_type(group_order, 0, type1)
    g2 = genus_from_type(group_order, 0, type2)
    if g1 < 2 or g2 < 2:
        raise GenusBelowTwo(f"curve genera {g1}, {g2}; both must be at least 2")
    chi = Fraction((g1 - 1) * (g2 - 1), group_order)
    if chi.denominator != 1:
        raise NonIntegralChi(f"chi = {chi} is not an integer")
    c = chi.numerator
    return SurfaceInvariants(g1=g1, g2=g2, chi=c, K2=8 * c, e=4 * c, q=0, pg=c - 1)


# -- Sigma-sets ------------------------------------------------------------------------

def sigma_keys(G: GroupHandle, T: Sequence) -> set[Hashable]:
    """Class keys of every conjugate of every power of the entries of ``T``."""
    keys = {G.class_key(G.identity())}
    for x in T:
        y = G.identity()
        for _ in range(G.element_order(x)):
            y = G.mul(y, x)
            keys.add(G.class_key(y))
    return keys


def sigma_set(G: GroupHandle, T: Sequence) -> set[Hashable]:
    """Encoded elements of Sigma(T); needs an enumerable group."""
    if not G.enumerable:
        raise TooLarge(f"{G.spec} is above the enumeration cap")
    idx = G.indexed
    mask = idx.sigma_class_mask(idx.index_of(x) for x in T)
    members = np.nonzero(mask[idx.class_of])[0]
    return {G.encode(idx.element(int(i))) for i in members}


def _sigma_size(G: GroupHandle, T: Sequence) -> int | None:
    if not G.enumerable:
        return None
    idx = G.indexed
    mask = idx.sigma_class_mask(idx.index_of(x) for x in T)
    return int(idx.class_sizes[mask].sum())


def _lcm_orders(G: GroupHandle, T: Sequence) -> int:
    return math.lcm(*(G.element_order(x) for x in T))


def _class_keys_exact(G: GroupHandle) -> bool:
    return not isinstance(G, PermGroup) or G.enumerable


def is_disjoint(G: GroupHandle, T1: Sequence, T2: Sequence) -> bool | None:
    """Whether Sigma(T1) and Sigma(T2) meet only in the identity.

    Coprime orders settle it at once; otherwise class keys decide.  Returns
    None when neither applies.
    """
    return _disjointness(G, T1, T2)[0]


def _disjointness(G: GroupHandle, T1: Sequence, T2: Sequence) -> tuple[bool | None, str]:
    if math.gcd(_lcm_orders(G, T1), _lcm_orders(G, T2)) == 1:
        return True, "coprime-orders"
    if not _class_keys_exact(G):
        return None, "undecided"
    common = sigma_keys(G, T1) & sigma_keys(G, T2)
    return common == {G.class_key(G.identity())}, "class-keys"


# -- structures ----------------------------------------------------------------------

@dataclass
class SphericalSystem:
    """A tuple of group elements whose product is meant to be the identity."""

    group: GroupHandle
    elements: tuple

    @property
    def type(self) -> tuple[int, ...]:
        return type_of(self.elements, self.group)

    def product(self):
        G = self.group
        out = G.identity()
        for x in self.elements:
            out = G.mul(out, x)
        return out

    def product_is_identity(self) -> bool:
        return self.group.is_identity(self.product())

    def generated_order(self) -> int:
        return self.group.generated_order(self.elements)

    def to_json(self) -> dict:
        G = self.group
        tau = self.type
        try:
            genus = genus_from_type(G.order, 0, tau)
        except (NonIntegralGenus, BadInput):
            genus = None
        return {"elements": [G.to_json(x) for x in self.elements], "type": list(tau), "genus": genus}


@dataclass
class Report:
    """Outcome of a verification; ``valid`` is None when undecided."""

    valid: bool | None
    reason: str | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.valid)


@dataclass
class BeauvilleStructure:
    """Two spherical systems on one group (three entries each for Beauville)."""

    group: GroupHandle
    T1: SphericalSystem
    T2: SphericalSystem
    provenance: str = "input"
    report: Report | None = None

    @classmethod
    def from_elements(cls, G: GroupHandle, T1: Sequence, T2: Sequence) -> "BeauvilleStructure":
        return cls(G, SphericalSystem(G, tuple(T1)), SphericalSystem(G, tuple(T2)))

    @classmethod
    def from_quadruple(cls, G: GroupHandle, x1, y1, x2, y2) -> "BeauvilleStructure":
        z1 = G.inv(G.mul(x1, y1))
        z2 = G.inv(G.mul(x2, y2))
        return cls.from_elements(G, (x1, y1, z1), (x2, y2, z2))

    @property
    def types(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.T1.type, self.T2.type

    @property
    def is_triangular(self) -> bool:
        return len(self.T1.elements) == 3 and len(self.T2.elements) == 3

    def invariants(self) -> SurfaceInvariants | None:
        try:
            return surface_invariants(self.group.order, *self.types)
        except (NonIntegralGenus, NonIntegralChi, GenusBelowTwo):
            return None

    def conjugate(self, s) -> "BeauvilleStructure":
        G = self.group
        return BeauvilleStructure.from_elements(
            G, [G.conjugate(x, s) for x in self.T1.elements], [G.conjugate(x, s) for x in self.T2.elements])

    def to_json(self) -> dict:
        rep = self.report or verify_structure(self)
        inv = self.invariants()
        return {
            "group": self.group.spec,
            "order": self.group.order,
            "T1": self.T1.to_json(),
            "T2": self.T2.to_json(),
            "hyperbolic": [is_hyperbolic(t) for t in self.types],
            "invariants": None if inv is None else {k: v for k, v in inv.to_dict().items() if k not in ("g1", "g2")},
            "verified": rep.valid,
            "witness": rep.details,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict, G: GroupHandle | None = None) -> "BeauvilleStructure":
        try:
            if G is None:
                G = parse_group_spec(obj["group"])
            t1 = [G.from_json(x) for x in obj["T1"]["elements"]]
            t2 = [G.from_json(x) for x in obj["T2"]["elements"]]
        except (KeyError, TypeError) as exc:
            raise BadInput(f"malformed structure JSON: {exc}") from exc
        s = cls.from_elements(G, t1, t2)
        s.provenance = obj.get("provenance", "input")
        return s


def verify_structure(s: BeauvilleStructure, *, require_triangular: bool | None = None) -> Report:
    """Check products, generation and disjointness; the first failure is named."""
    G = s.group
    triangular = s.is_triangular if require_triangular is None else require_triangular
    details: dict = {"closure_sizes": [], "sigma_sizes": []}
    for name, T in (("T1", s.T1), ("T2", s.T2)):
        size = len(T.elements)
        if triangular and size != 3:
            return Report(False, f"size({name})", details)
        if size < 2:
            return Report(False, f"size({name})", details)
        if not T.product_is_identity():
            return Report(False, f"product({name})", details)
    undecided = None
    for name, T in (("T1", s.T1), ("T2", s.T2)):
        try:
            order = T.generated_order()
        except (TooLarge, DegreeTooLarge):
            details["closure_sizes"].append(None)
            undecided = undecided or f"generation({name})-undecided"
            continue
        details["closure_sizes"].append(order)
        if order != G.order:
            return Report(False, f"generation({name})", details)
    for T in (s.T1, s.T2):
        details["sigma_sizes"].append(_sigma_size(G, T.elements))
    ok, method = _disjointness(G, s.T1.elements, s.T2.elements)
    details["disjointness"] = method
    details["types"] = [list(t) for t in s.types]
    if ok is False:
        return Report(False, "disjointness", details)
    if triangular and not all(is_hyperbolic(t) for t in s.types):
        return Report(False, "hyperbolicity", details)
    if ok is None:
        undecided = undecided or "disjointness-undecided"
    if undecided:
        s.report = Report(None, undecided, details)
        return s.report
    s.report = Report(True, None, details)
    return s.report


def is_unmixed_beauville(G: GroupHandle, x1, y1, x2, y2) -> Report:
    return verify_structure(BeauvilleStructure.from_quadruple(G, x1, y1, x2, y2), require_triangular=True)


def is_ramification_structure(G: GroupHandle, T1: Sequence, T2: Sequence) -> Report:
    return verify_structure(BeauvilleStructure.from_elements(G, T1, T2), require_triangular=False)


# -- exhaustive search -------------------------------------------------------------

class _TripleCandidates:
    """Triples ``(x, y, (xy)^-1)`` with ``x`` a class representative, grouped by
    their Sigma class mask; generation is checked lazily, per mask."""

    def __init__(self, idx, tau: tuple[int, ...] | None):
        self.idx = idx
        N = idx.size
        ys = np.arange(N)
        xs_all, ys_all, masks = [], [], []
        for c, x in enumerate(idx.class_reps.tolist()):
            if tau is not None and idx.orders[x] != tau[0]:
                continue
            xy = np.asarray(idx.mul(np.full(N, x), ys))
            z = idx.inverse[xy]
            keep = np.ones(N, dtype=bool)
            if tau is not None:
                keep = (idx.orders == tau[1]) & (idx.orders[z] == tau[2])
            if not keep.any():
                continue
            yk = ys[keep]
            m = idx.power_classes[c] | idx.power_classes[idx.class_of[yk]] | idx.power_classes[idx.class_of[z[keep]]]
            xs_all.append(np.full(yk.size, x))
            ys_all.append(yk)
            masks.append(m)
        if masks:
            self.xs = np.concatenate(xs_all)
            self.ys = np.concatenate(ys_all)
            allm = np.concatenate(masks)
        else:
            self.xs = self.ys = np.zeros(0, dtype=np.int64)
            allm = np.zeros((0, idx.num_classes), dtype=bool)
        packed = np.packbits(allm, axis=1)
        uniq, first, inverse = np.unique(packed, axis=0, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty(len(order), dtype=np.int64)
        rank[order] = np.arange(len(order))
        self.masks = np.unpackbits(uniq[order], axis=1, count=idx.num_classes).astype(bool)
        self.label = rank[inverse.ravel()]
        self._members = None
        self._witness: dict[int, tuple[int, int] | None] = {}

    def __len__(self) -> int:
        return self.masks.shape[0]

    def witness(self, m: int) -> tuple[int, int] | None:
        """First generating pair with mask ``m``, or None."""
        if m not in self._witness:
            if self._members is None:
                self._members = {}
                for i, lab in enumerate(self.label.tolist()):
                    self._members.setdefault(lab, []).append(i)
            found = None
            for i in self._members.get(m, []):
                x, y = int(self.xs[i]), int(self.ys[i])
                if self.idx.generates([x, y]):
                    found = (x, y)
                    break
            self._witness[m] = found
        return self._witness[m]


def exhaustive_beauville_search(G: GroupHandle, type_filter=None) -> BeauvilleStructure | None:
    """First structure in a fixed iteration order, or None when none exists.

    ``type_filter`` is a pair of ordered types.  Both triples may take their
    first entry from class representatives only, since generation and
    Sigma-sets are invariant under conjugating one triple on its own.
    """
    cap = ENUMERATION_CAP if type_filter is not None else UNFILTERED_SEARCH_CAP
    if G.order > cap:
        raise TooLarge(f"{G.spec} has {G.order} elements; exhaustive search cap is {cap}")
    idx = G.indexed
    t1 = t2 = None
    if type_filter is not None:
        t1, t2 = (tuple(int(m) for m in t) for t in type_filter)
        if len(t1) != 3 or len(t2) != 3:
            raise BadInput("type filter needs two triples")
    c1 = _TripleCandidates(idx, t1)
    c2 = c1 if t2 == t1 else _TripleCandidates(idx, t2)
    if not len(c1) or not len(c2):
        return None
    # masks meet only in the identity class iff the product of the rest vanishes
    overlap = c1.masks[:, 1:].astype(np.int32) @ c2.masks[:, 1:].astype(np.int32).T
    for a in range(len(c1)):
        partners = np.nonzero(overlap[a] == 0)[0]
        if not partners.size:
            continue
        w1 = c1.witness(a)
        if w1 is None:
            continue
        for b in partners.tolist():
            w2 = c2.witness(b)
            if w2 is None:
                continue
            el = idx.element
            s = BeauvilleStructure.from_quadruple(G, el(w1[0]), el(w1[1]), el(w2[0]), el(w2[1]))
            s.provenance = "searched"
            rep = verify_structure(s)
            if not rep.valid:
                from .errors import InternalInvariantError

                raise InternalInvariantError(f"search produced an invalid structure: {rep.reason}")
            return s
    return None


# -- randomized search -------------------------------------------------------------

def _sampler(G: GroupHandle, spec, rng: np.random.Generator):
    """A function drawing elements matching a class constraint."""
    if isinstance(spec, CycleShape):
        if spec.n != G.degree:
            raise BadInput(f"shape on {spec.n} points in a degree-{G.degree} group")
        return lambda: random_class_element(spec, rng)
    if spec is None:
        return lambda: G.random_element(rng)
    order = int(spec)

    def draw():
        for _ in range(10_000):
            g = G.random_element(rng)
            if G.element_order(g) == order:
                return g
        raise BudgetExhausted(f"could not sample an element of order {order}")

    return draw


def _matches(G: GroupHandle, spec, g) -> bool:
    if isinstance(spec, CycleShape):
        return spec.matches(G.to_perm(g))
    if spec is None:
        return True
    return G.element_order(g) == int(spec)


def random_search(G: GroupHandle, class_constraints, budget: int, seed: int = 0) -> BeauvilleStructure:
    """Rejection sampling of two triples from prescribed classes.

    ``class_constraints`` is a pair of triples; each entry is a
    :class:`CycleShape`, an element order, or None.  Generating triples are
    pooled by their Sigma class keys and every new one is matched against the
    pool of the other side.  One sampled triple costs one unit of ``budget``.
    Raises :class:`BudgetExhausted` (which proves nothing) when the budget
    runs out.
    """
    if class_constraints is None:
        class_constraints = ((None, None, None), (None, None, None))
    cons = [tuple(c) for c in class_constraints]
    if len(cons) != 2 or any(len(c) != 3 for c in cons):
        raise BadInput("class constraints must be a pair of triples")
    rng = np.random.default_rng(seed)
    shared = cons[0] == cons[1]
    samplers = [(_sampler(G, c[0], rng), _sampler(G, c[1], rng)) for c in cons]
    pools: list[list[tuple[tuple, frozenset]]] = [[], []]
    seen: list[set[frozenset]] = [set(), set()]
    ident = G.class_key(G.identity())
    for attempt in range(budget):
        side = 0 if shared else attempt % 2
        draw_x, draw_y = samplers[side]
        x, y = draw_x(), draw_y()
        z = G.inv(G.mul(x, y))
        if not _matches(G, cons[side][2], z) or not G.generates([x, y]):
            continue
        T = (x, y, z)
        keys = frozenset(sigma_keys(G, T))
        other = pools[0] if shared else pools[1 - side]
        for U, ukeys in other:
            if keys & ukeys == {ident}:
                pair = (U, T) if side == 1 or shared else (T, U)
                st = BeauvilleStructure.from_elements(G, *pair)
                st.provenance = "searched"
                if verify_structure(st).valid:
                    return st
        if keys not in seen[side] and len(pools[side]) < POOL_SIZE:
            seen[side].add(keys)
            pools[side].append((T, keys))
    raise BudgetExhausted(f"no structure within {budget} samples (this is not a proof of nonexistence)")


# -- homomorphism census -----------------------------------------------------------

def _divides(orders: np.ndarray, r: int) -> np.ndarray:
    return (r % orders) == 0


def hom_census(G: GroupHandle, rst: Sequence[int], *, mode: str = "exact",
               samples: int = 10_000, seed: int = 0) -> dict:
    """Pairs ``(x, y)`` with ``x^r = y^s = (xy)^t = 1``, and how many generate G.

    Exact mode reduces ``x`` to class representatives and weights by class
    size; sampled mode estimates both counts from uniform pairs.
    """
    r, s, t = (int(v) for v in rst)
    if min(r, s, t) < 1:
        raise BadInput("exponents must be positive")
    if mode == "exact":
        if G.order > CENSUS_CAP:
            raise TooLarge(f"exact census is capped at order {CENSUS_CAP}")
        idx = G.indexed
        N = idx.size
        ys = np.arange(N)
        pairs = 0
        epi = 0
        for c, x in enumerate(idx.class_reps.tolist()):
            if r % int(idx.orders[x]):
                continue
            weight = int(idx.class_sizes[c])
            xy = np.asarray(idx.mul(np.full(N, x), ys))
            ok = _divides(idx.orders, s) & _divides(idx.orders[xy], t)
            good = ys[ok]
            pairs += weight * good.size
            epi += weight * sum(1 for y in good.tolist() if idx.generates([x, y]))
        return {"group": G.spec, "type": [r, s, t], "mode": "exact", "pairs": pairs, "epi_pairs": epi}
    if mode != "sampled":
        raise BadInput(f"unknown census mode {mode!r}")
    rng = np.random.default_rng(seed)
    hits = 0
    epi_hits = 0
    for _ in range(samples):
        x, y = G.random_element(rng), G.random_element(rng)
        if r % G.element_order(x) or s % G.element_order(y) or t % G.element_order(G.mul(x, y)):
            continue
        hits += 1
        if G.generates([x, y]):
            epi_hits += 1
    total = G.order**2
    out = {"group": G.spec, "type": [r, s, t], "mode": "sampled", "samples": samples}
    for name, h in (("pairs", hits), ("epi_pairs", epi_hits)):
        p = h / samples
        out[name] = p * total
        out[name + "_stderr"] = math.sqrt(p * (1 - p) / samples) * total
    return out
