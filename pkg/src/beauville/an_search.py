"""Almost homogeneous class selection and sampled structures on A_n and S_n.

Each entry of a type gets a class of shape ``(m^k, 1^f)``.  The products
``k m`` are made pairwise distinct, so the fixed-point counts are distinct
and every nontrivial power of an entry keeps its entry's fixed-point count;
Sigma-sets of different tuples can then only meet in the identity.

Triples are realised by annealing: ``x`` is drawn from its class, and ``y`` is
moved inside its class by transposition conjugations until ``x y`` lands in
the target class and ``<x, y>`` is transitive.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import BadType, BudgetExhausted, DegreeTooSmall, InternalInvariantError
from .groups import SymmetricGroup
from .perm import MAX_DEGREE, CycleShape, Permutation, contains_alternating, random_class_element
from .structures import BeauvilleStructure, verify_structure

log = logging.getLogger(__name__)

MAX_OFFSET = 11
NOMINAL_OFFSET = 5
FIXED_POINT_FACTOR = 12
DEFAULT_DEGREE_FACTOR = 100
ATTEMPT_STEPS = 200_000
TEMPERATURE = 0.5
HEAD_DRAWS = 32


@dataclass(frozen=True)
class ClassSelection:
    n: int
    types: tuple[tuple[int, ...], ...]
    shapes: tuple[tuple[CycleShape, ...], ...]
    mode: str
    offsets: tuple[int, ...]
    sorted_positions: tuple[tuple[int, int], ...]

    def _sorted(self, attr: str) -> tuple[int, ...]:
        return tuple(getattr(self.shapes[t][i], attr) for t, i in self.sorted_positions)

    @property
    def sorted_m(self) -> tuple[int, ...]:
        return self._sorted("m")

    @property
    def sorted_k(self) -> tuple[int, ...]:
        return self._sorted("k")

    @property
    def sorted_f(self) -> tuple[int, ...]:
        return self._sorted("f")

    def all_shapes(self) -> list[CycleShape]:
        return [s for tup in self.shapes for s in tup]

    def signs(self) -> tuple[int, ...]:
        """Product of the class signs per tuple."""
        return tuple(math.prod(s.sign for s in tup) for tup in self.shapes)

    def is_transitive_feasible(self) -> bool:
        """Whether each tuple passes the Riemann-Hurwitz count for a transitive
        action: the indices ``n - #cycles`` must add up to at least ``2n - 2``."""
        n = self.n
        for tup in self.shapes:
            index = sum(n - s.k - s.f for s in tup)
            if index < 2 * n - 2 or index % 2:
                return False
        return True

    def to_dict(self) -> dict:
        return {"n": self.n, "mode": self.mode, "types": [list(t) for t in self.types],
                "shapes": [[s.to_dict() for s in tup] for tup in self.shapes],
                "offsets": list(self.offsets)}


def _check_tuple(tau: Sequence[int]) -> tuple[int, ...]:
    tau = tuple(int(m) for m in tau)
    if len(tau) < 2 or any(m < 2 for m in tau):
        raise BadType(f"type entries must be at least 2, got {tau}", code="bad-type")
    if sum(1 - Fraction(1, m) for m in tau) <= 2:
        raise BadType(f"type {tau} is not hyperbolic: sum of 1 - 1/m must exceed 2", code="not-hyperbolic")
    return tau


def _odd_positions(tau: tuple[int, ...]) -> set[int]:
    """The two largest even entries (by value, then position) get odd k."""
    even = sorted((i for i, m in enumerate(tau) if m % 2 == 0), key=lambda i: (-tau[i], i))
    if len(even) < 2:
        raise BadType(f"type {tau} needs at least two even entries for S_n", code="too-few-even")
    return set(even[:2])


def _select(types: Sequence[Sequence[int]], n: int, mode: str, min_degree_factor: int | None) -> ClassSelection:
    types = tuple(_check_tuple(t) for t in types)
    if mode not in ("A_n", "S_n"):
        raise ValueError(f"unknown mode {mode!r}")
    entries = [(t, i, m) for t, tau in enumerate(types) for i, m in enumerate(tau)]
    odd = set()
    if mode == "S_n":
        odd = {(t, i) for t, tau in enumerate(types) for i in _odd_positions(tau)}
    # Step 1: orders in descending order, ties kept in input order
    entries.sort(key=lambda e: -e[2])
    m1 = entries[0][2]
    if min_degree_factor is not None and n <= min_degree_factor * m1:
        raise DegreeTooSmall(f"n = {n} must exceed {min_degree_factor} * {m1}")
    used: set[int] = set()
    chosen: dict[tuple[int, int], CycleShape] = {}
    offsets = []
    for t, i, m in entries:
        # Step 2: largest k with k m <= n and the required parity
        k0 = n // m
        want_odd = (t, i) in odd
        if (k0 % 2 == 1) != want_odd:
            k0 -= 1
        # Step 3: the smallest offset that avoids every product taken so far
        for l in range(MAX_OFFSET + 1):
            k = k0 - 2 * l
            if k < 1:
                break
            f = n - k * m
            if k * m not in used and f <= FIXED_POINT_FACTOR * m1:
                break
        else:
            k = 0
        if k < 1:
            raise DegreeTooSmall(f"no admissible k for order {m} at n = {n}")
        if l > NOMINAL_OFFSET:
            log.warning("class selection needed offset l = %d for m = %d at n = %d", l, m, n)
        used.add(k * m)
        offsets.append(l)
        chosen[(t, i)] = CycleShape(m, k, n - k * m)
    shapes = tuple(tuple(chosen[(t, i)] for i in range(len(tau))) for t, tau in enumerate(types))
    return ClassSelection(n=n, types=types, shapes=shapes, mode=mode, offsets=tuple(offsets),
                          sorted_positions=tuple((t, i) for t, i, _ in entries))


def choose_classes_an(type1: Sequence[int], type2: Sequence[int], n: int, *,
                      min_degree_factor: int | None = None) -> ClassSelection:
    """Almost homogeneous classes of even permutations for two types.

    With ``min_degree_factor`` set, ``n`` must exceed that multiple of the
    largest order.
    """
    return _select((type1, type2), n, "A_n", min_degree_factor)


def choose_classes_sn(type1: Sequence[int], type2: Sequence[int], n: int, *,
                      min_degree_factor: int | None = None) -> ClassSelection:
    """As :func:`choose_classes_an`, with two odd classes per triple."""
    return _select((type1, type2), n, "S_n", min_degree_factor)


def feasible_degrees(types: Sequence[Sequence[int]], lo: int, hi: int, mode: str = "A_n") -> list[int]:
    """Degrees in ``[lo, hi]`` whose class selection admits transitive tuples."""
    out = []
    for n in range(lo, hi + 1):
        try:
            sel = _select(types, n, mode, None)
        except DegreeTooSmall:
            continue
        if sel.is_transitive_feasible():
            out.append(n)
    return out


# -- sampling -------------------------------------------------------------------------

def _orbit_links(head: Sequence[Permutation], n: int) -> np.ndarray:
    """Each point mapped to a representative of its orbit under ``head``."""
    if not head:
        return np.arange(n, dtype=np.int32)
    src = np.tile(np.arange(n), len(head))
    dst = np.concatenate([g.images for g in head])
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    _, first = np.unique(labels, return_index=True)
    return first[labels].astype(np.int32)


def _hurwitz_sort(tup: list[Permutation], order: list[int]) -> list[Permutation]:
    """Reorder a tuple with product one by Hurwitz moves ``(a, b) -> (b, b^-1 a b)``.

    ``order[i]`` is the target position of ``tup[i]``'s class.  The moves keep
    the product, the classes and the generated group.
    """
    tup = list(tup)
    order = list(order)
    for end in range(len(tup) - 1, 0, -1):
        for i in range(end):
            if order[i] > order[i + 1]:
                a, b = tup[i], tup[i + 1]
                tup[i], tup[i + 1] = b, b.inverse() * a * b
                order[i], order[i + 1] = order[i + 1], order[i]
    return tup


def _realise(shapes: Sequence[CycleShape], n: int, mode: str, rng: np.random.Generator,
             budget: int) -> tuple[list[Permutation] | None, int]:
    """Find a tuple in the given classes with product one generating A_n / S_n.

    The two classes moving the most points are realised last.  The others
    form a head, drawn at random a few times keeping the draw whose product
    has the most cycles; the second to last entry is then annealed so that
    the product lands in the inverse class of the last entry and the whole
    tuple acts transitively.  Hurwitz moves restore the requested order.
    Returns the tuple (or None) and the number of proposals spent.
    """
    perm = sorted(range(len(shapes)), key=lambda i: (shapes[i].n - shapes[i].k - shapes[i].f, i))
    work = [shapes[i] for i in perm]
    spent = 0
    last = work[-1]
    while spent < budget:
        head, prefix = None, None
        for _ in range(HEAD_DRAWS if len(work) > 3 else 1):
            cand = [random_class_element(s, rng) for s in work[:-2]]
            prod = Permutation.identity(n)
            for g in cand:
                prod = prod * g
            if prefix is None or len(prod.cycles(include_fixed=True)) > len(prefix.cycles(include_fixed=True)):
                head, prefix = cand, prod
        y = random_class_element(work[-2], rng).images.copy()
        steps = min(ATTEMPT_STEPS, budget - spent)
        got, _ = kernels.anneal_product(prefix.images.copy(), y, last.m, last.f,
                                        int(rng.integers(2**62)), steps, TEMPERATURE, _orbit_links(head, n))
        spent += steps if got < 0 else max(got, 1)
        if got < 0:
            continue
        ys = Permutation(y)
        z = (prefix * ys).inverse()
        if not last.matches(z):
            raise InternalInvariantError("annealer reported success on a wrong class")
        tup = _hurwitz_sort(head + [ys, z], perm)
        if contains_alternating(tup[:-1], n) == mode:
            return tup, spent
    return None, spent


def build_ramification_structure(tau1: Sequence[int], tau2: Sequence[int], n: int, budget: int = 10**6,
                                 seed: int = 0, mode: str = "A_n", *,
                                 min_degree_factor: int | None = DEFAULT_DEGREE_FACTOR) -> BeauvilleStructure:
    """A verified ramification structure of type ``(tau1, tau2)`` on A_n or S_n.

    ``budget`` bounds the total number of annealer proposals over both tuples.
    """
    if n > MAX_DEGREE:
        raise DegreeTooSmall(f"n = {n} exceeds the degree cap {MAX_DEGREE}")
    sel = _select((tau1, tau2), n, mode, min_degree_factor)
    G = SymmetricGroup(n, alternating=(mode == "A_n"))
    rng = np.random.default_rng(seed)
    found = []
    remaining = budget
    for tup in sel.shapes:
        res, spent = _realise(tup, n, mode, rng, remaining)
        remaining -= spent
        if res is None:
            raise BudgetExhausted(f"no tuple in classes {[str(s) for s in tup]} within the budget")
        found.append(res)
    s = BeauvilleStructure.from_elements(G, found[0], found[1])
    s.provenance = "constructed"
    report = verify_structure(s)
    if not report.valid:
        raise InternalInvariantError(f"sampled structure failed verification: {report.reason}")
    report.details["selection"] = sel.to_dict()
    return s


def build_structure_an(type1: Sequence[int], type2: Sequence[int], n: int, budget: int = 10**6,
                       seed: int = 0, *, mode: str = "A_n",
                       min_degree_factor: int | None = DEFAULT_DEGREE_FACTOR) -> BeauvilleStructure:
    """A verified Beauville structure with the given types on A_n (or S_n)."""
    for tau in (type1, type2):
        if len(tuple(tau)) != 3:
            raise BadType("Beauville types are triples", code="bad-type")
    return build_ramification_structure(type1, type2, n, budget, seed, mode, min_degree_factor=min_degree_factor)
