"""PSL(2, q): projective matrices, trace triples and explicit structures.

Matrices act on row vectors, so a matrix is also a permutation of the
projective line ``0 .. q-1, oo`` (``oo`` is point ``q``) and matrix products
match the left-to-right composition used by :mod:`beauville.perm`.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .arith import divisors, is_prime_64, prime_power
from .errors import BadInput, BadType, FieldOverflow, InternalInvariantError, UnsupportedP, UnsupportedQ
from .gf import MAX_FIELD_SIZE, FieldElement, FiniteField, make_field
from .groups import ENUMERATION_CAP, GroupHandle, closure_rows
from .perm import Permutation, StabilizerChain

NAIVE_ORDER_LIMIT = 1000
# stabilizer chains on the projective line are exact but cost about q^3
CHAIN_DEGREE_LIMIT = 2048


def _val(F: FiniteField, x) -> int:
    if isinstance(x, FieldElement):
        return x.value
    return F.from_int(int(x))


class ProjectiveMatrix:
    """An element of PSL(2, q): a determinant-one matrix up to sign.

    The stored representative has its first nonzero entry (scanning
    ``a, b, c, d``) equal to the smaller encoding of ``{x, -x}``.
    """

    __slots__ = ("F", "entries")

    def __init__(self, F: FiniteField, a, b, c, d, *, check: bool = True, encoded: bool = False):
        # plain ints are integers mapped into F unless ``encoded`` says they
        # are already field encodings
        if not encoded:
            a, b, c, d = (_val(F, v) for v in (a, b, c, d))
        if check and F.sub(F.mul(a, d), F.mul(b, c)) != 1:
            raise BadInput("matrix does not have determinant 1")
        self.F = F
        self.entries = _normalize(F, (a, b, c, d))

    @classmethod
    def identity(cls, F: FiniteField) -> "ProjectiveMatrix":
        return cls(F, 1, 0, 0, 1, check=False, encoded=True)

    def __mul__(self, other: "ProjectiveMatrix") -> "ProjectiveMatrix":
        return ProjectiveMatrix(self.F, *_matmul(self.F, self.entries, other.entries), check=False, encoded=True)

    def inverse(self) -> "ProjectiveMatrix":
        F = self.F
        a, b, c, d = self.entries
        return ProjectiveMatrix(F, d, F.neg(b), F.neg(c), a, check=False, encoded=True)

    def __pow__(self, k: int) -> "ProjectiveMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        return ProjectiveMatrix(self.F, *_matpow(self.F, self.entries, k), check=False, encoded=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjectiveMatrix) and self.F == other.F and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    @property
    def trace(self) -> FieldElement:
        """Trace of the stored representative (defined up to sign)."""
        a, _, _, d = self.entries
        return FieldElement(self.F, self.F.add(a, d))

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def order(self) -> int:
        return _projective_order(self.F, self.entries)

    def kind(self) -> "ElementKind":
        return element_kind(self)

    def to_perm(self) -> Permutation:
        return Permutation(_moebius_images(self.F, self.entries), _trusted=True)

    def to_json(self) -> list:
        F = self.F
        a, b, c, d = self.entries
        return [[F.coeffs(a), F.coeffs(b)], [F.coeffs(c), F.coeffs(d)]]

    def __repr__(self) -> str:
        a, b, c, d = (FieldElement(self.F, v) for v in self.entries)
        return f"[[{a!r}, {b!r}], [{c!r}, {d!r}]]"


def _normalize(F: FiniteField, m: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    if F.p == 2:
        return m
    for x in m:
        if x:
            if F.neg(x) < x:
                return tuple(F.neg(v) for v in m)  # type: ignore[return-value]
            return m
    raise BadInput("zero matrix")


def _matmul(F: FiniteField, m, n):
    a, b, c, d = m
    e, f, g, h = n
    mul, add = F.mul, F.add
    return (add(mul(a, e), mul(b, g)), add(mul(a, f), mul(b, h)),
            add(mul(c, e), mul(d, g)), add(mul(c, f), mul(d, h)))


def _matpow(F: FiniteField, m, k: int):
    result = (1, 0, 0, 1)
    while k:
        if k & 1:
            result = _matmul(F, result, m)
        m = _matmul(F, m, m)
        k >>= 1
    return result


def _is_scalar_identity(F: FiniteField, m) -> bool:
    a, b, c, d = m
    return b == 0 and c == 0 and a == d and (a == 1 or a == F.neg(1))


def _moebius_images(F: FiniteField, m) -> np.ndarray:
    a, b, c, d = m
    q = F.q
    out = np.empty(q + 1, dtype=np.int32)
    for x in range(q):
        num = F.add(F.mul(x, a), c)
        den = F.add(F.mul(x, b), d)
        out[x] = q if den == 0 else F.div(num, den)
    out[q] = q if b == 0 else F.div(a, b)
    return out


def matrix_from_perm(F: FiniteField, p: Permutation) -> ProjectiveMatrix:
    """Recover the matrix of a Moebius permutation of the projective line."""
    q = F.q
    if p.n != q + 1:
        raise BadInput(f"expected a permutation of {q + 1} points")
    P, Q, R = p(q), p(0), p(1)
    if P == q:
        a, b, c, d = F.sub(R, Q), 0, Q, 1
    elif Q == q:
        a, b, c, d = P, 1, F.sub(R, P), 0
    elif R == q:
        a, b, c, d = P, 1, F.neg(Q), F.neg(1)
    else:
        a, b = F.mul(P, F.sub(Q, R)), F.sub(Q, R)
        c, d = F.mul(Q, F.sub(R, P)), F.sub(R, P)
    det = F.sub(F.mul(a, d), F.mul(b, c))
    s = F.sqrt(F.inv(det))
    if s is None:
        raise BadInput("permutation is not induced by PSL(2, q)")
    m = ProjectiveMatrix(F, *(F.mul(s, v) for v in (a, b, c, d)), encoded=True)
    if not np.array_equal(m.to_perm().images, p.images):
        raise BadInput("permutation is not a Moebius transformation")
    return m


class ElementKind(NamedTuple):
    tag: str  # "central", "unipotent", "split" or "nonsplit"
    trace: FieldElement


def element_kind(M: ProjectiveMatrix) -> ElementKind:
    F = M.F
    t = M.trace
    if M.is_identity():
        return ElementKind("central", t)
    if F.sub(F.mul(t.value, t.value), F.from_int(4)) == 0:
        return ElementKind("unipotent", t)
    return ElementKind("split" if _is_split(F, t.value) else "nonsplit", t)


def _is_split(F: FiniteField, t: int) -> bool:
    """Whether ``x^2 - t x + 1`` has a root in F."""
    return bool(F.quadratic_roots(F.neg(t), 1))


# -- orders and traces ---------------------------------------------------------------

def _projective_order(F: FiniteField, m) -> int:
    if _is_scalar_identity(F, m):
        return 1
    a, _, _, d = m
    t = F.add(a, d)
    q = F.q
    dd = 2 if F.p > 2 else 1
    if F.sub(F.mul(t, t), F.from_int(4)) == 0:
        return F.p
    bound = (q - 1) // dd if _is_split(F, t) else (q + 1) // dd
    for k in divisors(bound):
        if _is_scalar_identity(F, _matpow(F, m, k)):
            return k
    raise InternalInvariantError("element order does not divide the expected bound")


@lru_cache(maxsize=None)
def _ord_of_trace(F: FiniteField, alpha: int) -> int:
    comp = (0, F.neg(1), 1, alpha)
    if F.q > NAIVE_ORDER_LIMIT:
        return _projective_order(F, comp)
    k = 1
    cur = comp
    while not _is_scalar_identity(F, cur):
        cur = _matmul(F, cur, comp)
        k += 1
    return k


def ord_of_trace(F: FiniteField, alpha) -> int:
    """Projective order of the elements of SL(2, q) with trace ``alpha``."""
    return _ord_of_trace(F, _val(F, alpha))


def traces_of_order(F: FiniteField, r: int) -> list[FieldElement]:
    """All traces whose elements have projective order ``r``, in encoding order."""
    if r < 2:
        raise BadInput("order must be at least 2")
    return [FieldElement(F, a) for a in range(F.q) if _ord_of_trace(F, a) == r]


def is_singular(alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> bool:
    F = alpha.field
    s = alpha * alpha + beta * beta + gamma * gamma - alpha * beta * gamma
    return s == FieldElement(F, F.from_int(4))


def is_small(alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> bool:
    F = alpha.field
    orders = [ord_of_trace(F, x) for x in (alpha, beta, gamma)]
    return orders.count(2) >= 2 or all(2 <= o <= 5 for o in orders)


class TraceTriple(NamedTuple):
    """``A B C = I`` in SL(2, q); ``sl`` keeps the signed matrices."""

    A: ProjectiveMatrix
    B: ProjectiveMatrix
    C: ProjectiveMatrix
    sl: tuple


def _triple(F: FiniteField, A, B, C) -> TraceTriple:
    return TraceTriple(ProjectiveMatrix(F, *A, check=False, encoded=True), ProjectiveMatrix(F, *B, check=False, encoded=True),
                       ProjectiveMatrix(F, *C, check=False, encoded=True), (A, B, C))


def solve_trace_triple(F: FiniteField, alpha, beta, gamma) -> TraceTriple:
    """Matrices with traces ``alpha, beta, gamma`` and product the identity.

    ``A = [[alpha, -1], [1, 0]]`` and ``B = [[l, mu], [nu, beta - l]]``; for each
    ``l`` in encoding order, det B = 1 and tr AB = gamma leave one monic
    quadratic in ``mu``.  When that fails every solution has ``A`` central.
    """
    al, be, ga = (_val(F, x) for x in (alpha, beta, gamma))
    A = (al, F.neg(1), 1, 0)
    for lam in range(F.q):
        lin = F.sub(F.mul(al, lam), ga)
        const = F.add(F.sub(1, F.mul(lam, be)), F.mul(lam, lam))
        roots = F.quadratic_roots(lin, const)
        if not roots:
            continue
        mu = roots[0]
        nu = F.sub(F.add(F.mul(al, lam), mu), ga)
        B = (lam, mu, nu, F.sub(be, lam))
        AB = _matmul(F, A, B)
        a, b, c, d = AB
        C = (d, F.neg(b), F.neg(c), a)
        return _triple(F, A, B, C)
    # no solution with A off the centre: A = eps I, C = eps B^-1, needs gamma = eps beta
    for eps in sorted({1, F.neg(1)}):
        if F.add(eps, eps) == al and F.mul(eps, be) == ga:
            A = (eps, 0, 0, eps)
            B = (0, F.neg(1), 1, be)
            C = (F.mul(eps, be), eps, F.neg(eps), 0)
            return _triple(F, A, B, C)
    raise InternalInvariantError(f"no trace triple for {(al, be, ga)} over {F!r}")


# -- the group ----------------------------------------------------------------------------

class PSL2Group(GroupHandle):
    def __init__(self, q: int):
        pe = prime_power(q)
        if pe is None:
            raise UnsupportedQ(f"{q} is not a prime power")
        if q > MAX_FIELD_SIZE:
            raise UnsupportedQ(f"q = {q} exceeds the field size cap")
        try:
            self.F = make_field(*pe)
        except FieldOverflow as exc:
            raise UnsupportedQ(str(exc)) from exc
        self.q = q
        self.p, self.e = pe
        self.degree = q + 1
        self.chain_degree_limit = CHAIN_DEGREE_LIMIT
        self.spec = f"psl2:{q}"
        self._order = q * (q * q - 1) // (2 if q % 2 else 1)

    @property
    def order(self) -> int:
        return self._order

    def matrix(self, a, b, c, d) -> ProjectiveMatrix:
        return ProjectiveMatrix(self.F, a, b, c, d)

    def generators(self) -> list[ProjectiveMatrix]:
        F = self.F
        gens = [self.matrix(1, 1, 0, 1), self.matrix(1, 0, 1, 1)]
        if self.e > 1:
            w = F.generator
            gens.append(ProjectiveMatrix(F, w, 0, 0, F.inv(w), encoded=True))
        return gens

    def identity(self) -> ProjectiveMatrix:
        return ProjectiveMatrix.identity(self.F)

    def is_identity(self, a) -> bool:
        return a.is_identity()

    def element_order(self, a) -> int:
        return a.order()

    def encode(self, a):
        return a.entries

    def decode(self, key):
        return ProjectiveMatrix(self.F, *key, encoded=True)

    def to_perm(self, g) -> Permutation:
        return g.to_perm()

    def from_perm(self, p):
        return matrix_from_perm(self.F, p)

    def to_json(self, g):
        return g.to_json()

    def from_json(self, obj):
        try:
            (a, b), (c, d) = obj
        except (TypeError, ValueError) as exc:
            raise BadInput(f"expected [[a, b], [c, d]], got {obj!r}") from exc
        F = self.F
        vals = [F.from_coeffs(v) if isinstance(v, list) else F.from_int(int(v)) for v in (a, b, c, d)]
        return ProjectiveMatrix(F, *vals, encoded=True)

    def random_element(self, rng):
        F = self.F
        q = self.q
        k = int(rng.integers(q**3 - q))
        if k < q * q * (q - 1):
            a, rest = 1 + k % (q - 1), k // (q - 1)
            b, c = rest % q, rest // q
            d = F.div(F.add(1, F.mul(b, c)), a)
        else:
            k -= q * q * (q - 1)
            b, d = 1 + k % (q - 1), k // (q - 1)
            a, c = 0, F.neg(F.inv(b))
        return ProjectiveMatrix(F, a, b, c, d, check=False, encoded=True)

    def generated_order(self, elems) -> int:
        if self.order <= ENUMERATION_CAP:
            gens = [g.to_perm().images for g in elems if not g.is_identity()]
            if not gens:
                return 1
            return closure_rows(np.stack(gens), self.order).shape[0]
        return super().generated_order(elems)

    def class_key(self, g: ProjectiveMatrix):
        """Trace up to sign, with the unipotent classes split by a square class."""
        F = self.F
        if g.is_identity():
            return ("1",)
        a, b, c, d = g.entries
        t = F.add(a, d)
        two = F.from_int(2)
        if F.p == 2:
            return ("u",) if t == 0 else ("s", t)
        if t == two or t == F.neg(two):
            eps = 1 if t == two else F.neg(1)
            n12 = F.mul(eps, b)
            x = n12 if n12 != 0 else F.neg(F.mul(eps, c))
            return ("u", F.is_square(x))
        return ("s", min(t, F.neg(t)))


# -- generation -----------------------------------------------------------------------

def _subfield_orders(q: int) -> list[int]:
    """Orders of PSL(2, p^f) and PGL(2, p^f) for proper subfields."""
    p, e = prime_power(q)  # type: ignore[misc]
    out = []
    for f in divisors(e):
        if f == e:
            continue
        r = p**f
        pgl = r * (r * r - 1)
        out += [pgl // math.gcd(2, r - 1), pgl]
    return out


def macbeath_certificate(A: ProjectiveMatrix, B: ProjectiveMatrix) -> bool:
    """Whether the trace triple of ``(A, B)`` alone proves ``<A, B> = PSL(2, q)``.

    Requires the triple to be neither singular nor small and the order of
    ``A`` or ``B`` to rule out every proper subfield subgroup.
    """
    F = A.F
    AB = A * B
    tr = [A.trace, B.trace, AB.trace]
    if is_singular(*tr) or is_small(*tr):
        return False
    sub = _subfield_orders(F.q)
    return any(all(N % o for N in sub) for o in (A.order(), B.order()))


def generates_psl2(A: ProjectiveMatrix, B: ProjectiveMatrix, q: int | None = None) -> tuple[bool | None, dict]:
    """Decide ``<A, B> = PSL(2, q)``, with a witness.

    Up to the enumeration cap the subgroup is closed out element by element;
    above it a stabilizer chain on the projective line gives its exact order
    while the degree allows.  Beyond that the answer is None (undecided) and
    the witness records whether the trace certificate holds.
    """
    F = A.F
    if q is not None and q != F.q:
        raise BadInput("q does not match the matrices' field")
    q = F.q
    full = q * (q * q - 1) // (2 if q % 2 else 1)
    witness = {"method": None, "subgroup_order": None, "group_order": full,
               "trace_certificate": macbeath_certificate(A, B)}
    gens = np.stack([A.to_perm().images, B.to_perm().images])
    if full <= ENUMERATION_CAP:
        witness["method"] = "closure"
        witness["subgroup_order"] = closure_rows(gens, full).shape[0]
    elif q + 1 <= CHAIN_DEGREE_LIMIT:
        witness["method"] = "stabilizer-chain"
        witness["subgroup_order"] = StabilizerChain(list(gens), q + 1, max_degree=CHAIN_DEGREE_LIMIT).order()
    else:
        witness["method"] = "undecided"
        return None, witness
    return witness["subgroup_order"] == full, witness


# -- constructions ------------------------------------------------------------------

PUBLISHED_SMALL_TYPES = {
    7: ((4, 4, 4), (7, 7, 7)),
    9: ((4, 4, 4), (5, 5, 5)),
    11: ((5, 5, 5), (6, 6, 6)),
}
NO_STRUCTURE = (2, 3, 4, 5)


def _generating_triple(F: FiniteField, r: int) -> TraceTriple | None:
    """First trace ``alpha`` of order ``r`` whose triple ``(alpha, alpha, alpha)``
    generates PSL(2, q).

    When generation cannot be decided, the first triple carrying the trace
    certificate is returned; its structure will verify as undecided.
    """
    for alpha in traces_of_order(F, r):
        if is_singular(alpha, alpha, alpha):
            continue
        tri = solve_trace_triple(F, alpha, alpha, alpha)
        ok, witness = generates_psl2(tri.A, tri.B)
        if ok or (ok is None and witness["trace_certificate"]):
            return tri
    return None


def _structure(G: PSL2Group, t1: TraceTriple, t2: TraceTriple, provenance: str):
    from .structures import BeauvilleStructure, verify_structure

    s = BeauvilleStructure.from_elements(G, (t1.A, t1.B, t1.C), (t2.A, t2.B, t2.C))
    s.provenance = provenance
    report = verify_structure(s)
    if report.valid is False:
        raise InternalInvariantError(f"constructed structure failed verification: {report.reason}")
    return s


def beauville_psl2(q: int):
    """A Beauville structure on PSL(2, q), or None when none exists.

    ``q`` in {7, 9, 11} is searched at the known types; larger ``q`` use the
    constructive types ``((q-1)/2)^3, ((q+1)/2)^3`` (odd) or ``(q-1)^3, (q+1)^3``
    (even).
    """
    G = PSL2Group(q)
    if q in NO_STRUCTURE:
        return None
    if q in PUBLISHED_SMALL_TYPES:
        from .structures import exhaustive_beauville_search

        s = exhaustive_beauville_search(G, PUBLISHED_SMALL_TYPES[q])
        if s is None:
            raise InternalInvariantError(f"no structure of the expected type on PSL(2, {q})")
        return s
    d = 2 if q % 2 else 1
    r1, r2 = (q - 1) // d, (q + 1) // d
    t1 = _generating_triple(G.F, r1)
    t2 = _generating_triple(G.F, r2)
    if t1 is None or t2 is None:
        raise InternalInvariantError(f"no generating trace triple of order {r1 if t1 is None else r2}")
    return _structure(G, t1, t2, "constructed")


def unipotent_triple(p: int) -> TraceTriple:
    """Three unipotents with product one generating PSL(2, p), ``p >= 7`` prime."""
    if p < 7 or p >= MAX_FIELD_SIZE or not is_prime_64(p):
        raise UnsupportedP(f"unipotent triples need an odd prime p >= 7, got {p}")
    F = make_field(p)
    tri = solve_trace_triple(F, 2, 2, F.neg(2))
    ok, _ = generates_psl2(tri.A, tri.B)
    if ok is False:
        raise InternalInvariantError(f"unipotent triple does not generate PSL(2, {p})")
    return tri


def beauville_psl2p_typed(p: int, r: int, s: int):
    """Structure of type ``((r, r, r), (s, s, s))`` on PSL(2, p)."""
    if p < 3 or p % 2 == 0 or not is_prime_64(p):
        raise BadType(f"{p} is not an odd prime", code="bad-prime")
    if r <= 5 or s <= 5:
        raise BadType("both orders must exceed 5", code="order-too-small")
    if math.gcd(r, s) != 1:
        raise BadType(f"gcd({r}, {s}) = {math.gcd(r, s)}: coprime orders are necessary", code="not-coprime")
    G = PSL2Group(p)
    triples = []
    for t in (r, s):
        if G.order % t:
            raise BadType(f"{t} does not divide |PSL(2, {p})| = {G.order}", code="order-not-dividing")
        if t == p:
            triples.append(unipotent_triple(p))
            continue
        if ((p - 1) // 2) % t and ((p + 1) // 2) % t:
            raise BadType(f"PSL(2, {p}) has no element of order {t}", code="no-element-of-order")
        tri = _generating_triple(G.F, t)
        if tri is None:
            return None
        triples.append(tri)
    return _structure(G, triples[0], triples[1], "constructed")
