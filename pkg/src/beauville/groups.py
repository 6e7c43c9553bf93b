"""Finite groups behind one interface.

Every backend carries a faithful permutation representation (``to_perm`` /
``from_perm``); subgroup orders come from stabilizer chains on it, and groups
of order at most ``ENUMERATION_CAP`` can be indexed: all elements listed,
products and inverses as integer-array operations, conjugacy classes and
power maps precomputed.  Native elements are Permutation for symmetric,
alternating and generic permutation groups, ``(a, b)`` pairs for (Z/nZ)^2,
and :class:`~beauville.psl2.ProjectiveMatrix` for PSL(2, q).
"""
from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from functools import cached_property
from pathlib import Path
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BadInput, CapExceeded, TooLarge
from .perm import MAX_DEGREE, Permutation, StabilizerChain, parse_permutation

ENUMERATION_CAP = 100_000
TABLE_CAP = 2_500


# -- closure on permutation rows ----------------------------------------------------

def closure_rows(gens: np.ndarray, cap: int | None = None) -> np.ndarray:
    """All elements of ``<gens>`` as rows, identity first, in breadth-first order.

    Raises :class:`CapExceeded` as soon as more than ``cap`` elements are found.
    """
    n = gens.shape[1]
    dtype = np.int16 if n < 32768 else np.int32
    gens = gens.astype(dtype)
    ident = np.arange(n, dtype=dtype)
    rows = [ident[None, :]]
    seen = {ident.tobytes()}
    frontier = ident[None, :]
    while frontier.shape[0]:
        # right multiplication by each generator: (f*g)[x] = g[f[x]]
        cand = np.concatenate([g[frontier] for g in gens])
        fresh = []
        for row in cand:
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                fresh.append(row)
                if cap is not None and len(seen) > cap:
                    raise CapExceeded(cap)
        frontier = np.array(fresh, dtype=dtype).reshape(-1, n)
        rows.append(frontier)
    return np.concatenate(rows)


# -- group handles --------------------------------------------------------------------

class GroupHandle(ABC):
    """Common interface; see the module docstring."""

    spec: str
    degree: int
    chain_degree_limit: int = MAX_DEGREE

    @property
    @abstractmethod
    def order(self) -> int: ...

    @abstractmethod
    def generators(self) -> list: ...

    @abstractmethod
    def to_perm(self, g) -> Permutation: ...

    @abstractmethod
    def from_perm(self, p: Permutation): ...

    @abstractmethod
    def to_json(self, g): ...

    @abstractmethod
    def from_json(self, obj): ...

    def identity(self):
        return self.from_perm(Permutation.identity(self.degree))

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def power(self, a, k: int):
        return a ** k

    def conjugate(self, a, s):
        """``s^-1 a s``."""
        return self.mul(self.mul(self.inv(s), a), s)

    def is_identity(self, a) -> bool:
        return self.to_perm(a).is_identity()

    def element_order(self, a) -> int:
        return self.to_perm(a).order()

    def encode(self, a) -> Hashable:
        return tuple(self.to_perm(a).to_list())

    def decode(self, key: Hashable):
        return self.from_perm(Permutation(list(key)))

    def random_element(self, rng: np.random.Generator):
        idx = self.indexed
        return idx.element(int(rng.integers(idx.size)))

    def class_key(self, a) -> Hashable:
        """Equal exactly for elements conjugate in this group."""
        idx = self.indexed
        return ("class", int(idx.class_of[idx.index_of(a)]))

    def perm_generators(self) -> np.ndarray:
        gens = [self.to_perm(g).images for g in self.generators()]
        if not gens:
            return np.arange(self.degree, dtype=np.int32)[None, :]
        return np.stack(gens)

    def chain(self, elems: Sequence, seed: int = 0) -> StabilizerChain:
        return StabilizerChain([self.to_perm(g) for g in elems], self.degree, seed=seed,
                               max_degree=self.chain_degree_limit)

    def generated_order(self, elems: Sequence) -> int:
        return self.chain(elems).order()

    def generates(self, elems: Sequence) -> bool:
        return self.generated_order(elems) == self.order

    @property
    def enumerable(self) -> bool:
        return self.order <= ENUMERATION_CAP

    @cached_property
    def indexed(self) -> "IndexedGroup":
        if not self.enumerable:
            raise TooLarge(f"{self.spec} has {self.order} elements; the indexing cap is {ENUMERATION_CAP}")
        return IndexedGroup(self)

    def elements(self) -> Iterator:
        idx = self.indexed
        for i in range(idx.size):
            yield idx.element(i)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec} order={self.order}>"


class SymmetricGroup(GroupHandle):
    """S_n, or A_n with ``alternating=True``, on points ``0 .. n-1``."""

    def __init__(self, n: int, alternating: bool = False):
        if n < 1:
            raise BadInput("degree must be positive")
        Permutation.identity(n)  # degree cap check
        self.n = n
        self.degree = n
        self.alternating = alternating
        self.spec = f"{'an' if alternating else 'sn'}:{n}"

    @property
    def order(self) -> int:
        f = math.factorial(self.n)
        return f // 2 if self.alternating and self.n >= 2 else f

    def generators(self) -> list[Permutation]:
        n = self.n
        if n <= 2:
            if self.alternating or n == 1:
                return []
            return [Permutation.from_cycles([[0, 1]], n)]
        if self.alternating:
            if n == 3:
                return [Permutation.from_cycles([[0, 1, 2]], n)]
            # (0 1 2) and an (n-1)- or n-cycle of even sign
            long = list(range(n)) if n % 2 else list(range(1, n))
            return [Permutation.from_cycles([[0, 1, 2]], n), Permutation.from_cycles([long], n)]
        return [Permutation.from_cycles([[0, 1]], n), Permutation.from_cycles([list(range(n))], n)]

    def to_perm(self, g) -> Permutation:
        return g

    def from_perm(self, p: Permutation) -> Permutation:
        return p

    def contains(self, g: Permutation) -> bool:
        return g.n == self.n and (not self.alternating or g.sign() == 1)

    def to_json(self, g: Permutation) -> str:
        return g.to_cycle_string()

    def from_json(self, obj) -> Permutation:
        g = parse_permutation(obj, self.n)
        if not self.contains(g):
            raise BadInput(f"{g} is not an element of {self.spec}")
        return g

    def random_element(self, rng: np.random.Generator) -> Permutation:
        g = Permutation(rng.permutation(self.n).astype(np.int32), _trusted=True)
        if self.alternating and g.sign() == -1:
            g = g * Permutation.from_cycles([[0, 1]], self.n)
        return g

    def class_key(self, g: Permutation) -> Hashable:
        ctype = g.cycle_type()
        if not self.alternating:
            return ctype
        if len(set(ctype)) != len(ctype) or not all(L % 2 for L in ctype):
            return ctype
        # S_n-classes with distinct odd cycle lengths split in A_n; the half is
        # the parity of a conjugator from the standard representative
        cycles = sorted(g.cycles(include_fixed=True), key=len, reverse=True)
        target = [pt for cyc in cycles for pt in cyc]
        return ctype + (Permutation(target, _trusted=True).sign(),)


class AbelianSquared(GroupHandle):
    """(Z/nZ)^2 acting on two disjoint ``n``-cycles of points."""

    def __init__(self, n: int):
        if n < 1:
            raise BadInput("n must be positive")
        self.n = n
        self.degree = 2 * n
        Permutation.identity(self.degree)
        self.spec = f"ab2:{n}"

    @property
    def order(self) -> int:
        return self.n * self.n

    def generators(self) -> list[tuple[int, int]]:
        if self.n == 1:
            return []
        return [(1, 0), (0, 1)]

    def identity(self) -> tuple[int, int]:
        return (0, 0)

    def mul(self, a, b):
        n = self.n
        return ((a[0] + b[0]) % n, (a[1] + b[1]) % n)

    def inv(self, a):
        n = self.n
        return ((-a[0]) % n, (-a[1]) % n)

    def power(self, a, k: int):
        n = self.n
        return ((a[0] * k) % n, (a[1] * k) % n)

    def conjugate(self, a, s):
        return a

    def is_identity(self, a) -> bool:
        return a[0] % self.n == 0 and a[1] % self.n == 0

    def element_order(self, a) -> int:
        n = self.n
        return math.lcm(n // math.gcd(a[0], n), n // math.gcd(a[1], n))

    def encode(self, a):
        return (a[0] % self.n, a[1] % self.n)

    def decode(self, key):
        return tuple(key)

    def to_perm(self, a) -> Permutation:
        n = self.n
        r = np.arange(n)
        return Permutation(np.concatenate([(r + a[0]) % n, n + (r + a[1]) % n]), _trusted=True)

    def from_perm(self, p: Permutation):
        img = p.images
        return (int(img[0]), int(img[self.n]) - self.n)

    def to_json(self, a):
        return [int(a[0]) % self.n, int(a[1]) % self.n]

    def from_json(self, obj):
        if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
            raise BadInput(f"expected a pair for {self.spec}, got {obj!r}")
        return (int(obj[0]) % self.n, int(obj[1]) % self.n)

    def random_element(self, rng):
        return (int(rng.integers(self.n)), int(rng.integers(self.n)))

    def class_key(self, a):
        return self.encode(a)

    def generated_order(self, elems) -> int:
        # |<elems>| = n^2 / [Z^2 : L] where L = span(elems) + nZ^2; the index is
        # the gcd of the 2x2 minors of the matrix [elems | nI]
        n = self.n
        vecs = [self.encode(e) for e in elems]
        g = n * n
        for a, b in vecs:
            g = math.gcd(g, n * a, n * b)
        for i, (a, b) in enumerate(vecs):
            for c, d in vecs[i + 1:]:
                g = math.gcd(g, a * d - b * c)
        return n * n // g


def make_abelian_squared(n: int) -> AbelianSquared:
    return AbelianSquared(n)


class PermGroup(GroupHandle):
    """The group generated by explicit permutations."""

    def __init__(self, gens: Sequence[Permutation], degree: int, spec: str = "perm"):
        self.degree = degree
        self._gens = [g for g in gens if not g.is_identity()]
        self.spec = spec
        self._chain = StabilizerChain(self._gens, degree)

    @property
    def order(self) -> int:
        return self._chain.order()

    def generators(self) -> list[Permutation]:
        return list(self._gens)

    def to_perm(self, g) -> Permutation:
        return g

    def from_perm(self, p):
        return p

    def contains(self, g: Permutation) -> bool:
        return g.n == self.degree and self._chain.contains(g)

    def to_json(self, g):
        return g.to_cycle_string()

    def from_json(self, obj):
        g = parse_permutation(obj, self.degree)
        if not self.contains(g):
            raise BadInput(f"{g} is not an element of {self.spec}")
        return g

    @classmethod
    def from_file(cls, path: str) -> "PermGroup":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise BadInput(f"cannot read generators from {path}: {exc}") from exc
        degree = None
        if isinstance(data, dict):
            degree = data.get("degree")
            data = data.get("generators")
        if not isinstance(data, list):
            raise BadInput("expected a JSON list of generators")
        if degree is None:
            pts = [-1]
            for g in data:
                if isinstance(g, str) and not g.strip().startswith("["):
                    pts += [int(t) for t in g.replace("(", " ").replace(")", " ").replace(",", " ").split()]
                else:
                    pts.append(len(g if isinstance(g, list) else json.loads(g)) - 1)
            degree = max(pts) + 1
        gens = [parse_permutation(g, degree) for g in data]
        return cls(gens, degree, spec=f"perm:{path}")


def parse_group_spec(spec: str) -> GroupHandle:
    """``an:<n>``, ``sn:<n>``, ``psl2:<q>``, ``ab2:<n>`` or ``perm:<file>``."""
    kind, _, arg = spec.partition(":")
    if not arg:
        raise BadInput(f"malformed group spec {spec!r}")
    if kind == "perm":
        return PermGroup.from_file(arg)
    try:
        val = int(arg)
    except ValueError as exc:
        raise BadInput(f"malformed group spec {spec!r}") from exc
    if kind == "sn":
        return SymmetricGroup(val)
    if kind == "an":
        return SymmetricGroup(val, alternating=True)
    if kind == "ab2":
        return AbelianSquared(val)
    if kind == "psl2":
        from .psl2 import PSL2Group

        return PSL2Group(val)
    raise BadInput(f"unknown group family {kind!r}")


def closure(G: GroupHandle, gens: Sequence, cap: int) -> set:
    """Encoded elements of ``<gens>``; :class:`CapExceeded` beyond ``cap``."""
    if not gens:
        raise BadInput("closure needs at least one generator")
    rows = closure_rows(np.stack([G.to_perm(g).images for g in gens]), cap)
    return {G.encode(G.from_perm(Permutation(r, _trusted=True))) for r in rows}


def conjugacy_class_key(G: GroupHandle, g) -> Hashable:
    return G.class_key(g)


# -- indexed groups -----------------------------------------------------------------------

class IndexedGroup:
    """Elements of a group numbered ``0 .. N-1`` (identity is 0).

    Elements are stored as permutation rows; an element is located from the
    images of a base of the permutation representation.
    """

    def __init__(self, G: GroupHandle):
        self.G = G
        gens = G.perm_generators()
        n = gens.shape[1]
        self.perms = closure_rows(gens, G.order)
        self.size = self.perms.shape[0]
        if self.size != G.order:
            raise AssertionError(f"enumerated {self.size} elements, expected {G.order}")
        chain = StabilizerChain(list(gens), n)
        self.base = np.array(chain.base or [0], dtype=np.intp)
        self._radix = n
        if n ** len(self.base) < 2**62:
            keys = self._keys(self.perms[:, self.base])
            self._order = np.argsort(keys, kind="stable")
            self._sorted = keys[self._order]
            self._dict = None
        else:
            self._dict = {r.tobytes(): i for i, r in enumerate(self.perms[:, self.base])}
        ids = np.arange(self.size)
        self.inverse = self._locate(np.argsort(self.perms, axis=1)[:, self.base])
        self.table = None
        if self.size <= TABLE_CAP:
            a = np.repeat(ids, self.size)
            b = np.tile(ids, self.size)
            self.table = self._mul_raw(a, b).reshape(self.size, self.size).astype(np.int32)
        self.orders = self._element_orders()
        self._build_classes(gens)

    # -- element lookup -----------------------------------------------------

    def _keys(self, base_imgs: np.ndarray) -> np.ndarray:
        w = self._radix ** np.arange(base_imgs.shape[1], dtype=np.int64)
        return base_imgs.astype(np.int64) @ w

    def _locate(self, base_imgs: np.ndarray) -> np.ndarray:
        if self._dict is not None:
            dt = self.perms.dtype
            return np.array([self._dict[r.astype(dt).tobytes()] for r in base_imgs], dtype=np.int64)
        keys = self._keys(base_imgs)
        pos = np.searchsorted(self._sorted, keys)
        return self._order[pos]

    def index_of_perm(self, p: Permutation) -> int:
        return int(self._locate(p.images[self.base][None, :])[0])

    def index_of(self, g) -> int:
        return self.index_of_perm(self.G.to_perm(g))

    def element(self, i: int):
        return self.G.from_perm(Permutation(self.perms[i].astype(np.int32), _trusted=True))

    # -- arithmetic on indices -----------------------------------------------

    def _mul_raw(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.empty(len(a), dtype=np.int64)
        step = max(1, 4_000_000 // max(1, len(self.base)))
        for s in range(0, len(a), step):
            aa, bb = a[s:s + step], b[s:s + step]
            imgs = self.perms[bb[:, None], self.perms[aa][:, self.base]]
            out[s:s + step] = self._locate(imgs)
        return out

    def mul(self, a, b):
        """Index of ``a * b`` (vectorised over integer arrays)."""
        if self.table is not None:
            return self.table[a, b]
        scalar = np.isscalar(a) and np.isscalar(b)
        a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
        out = self._mul_raw(a.ravel(), b.ravel()).reshape(a.shape)
        return int(out[0]) if scalar else out

    def power(self, a: int, k: int) -> int:
        k %= int(self.orders[a])
        result = 0
        base = a
        while k:
            if k & 1:
                result = int(self.mul(result, base))
            base = int(self.mul(base, base))
            k >>= 1
        return result

    def _element_orders(self) -> np.ndarray:
        orders = np.zeros(self.size, dtype=np.int64)
        active = np.arange(self.size)
        cur = active.copy()
        k = 1
        while active.size:
            done = cur == 0
            orders[active[done]] = k
            active = active[~done]
            cur = self.mul(cur[~done], active) if active.size else cur[:0]
            k += 1
        return orders

    def _build_classes(self, gens: np.ndarray) -> None:
        ids = np.arange(self.size)
        src, dst = [], []
        for g in gens:
            gi = self.index_of_perm(Permutation(g.astype(np.int32), _trusted=True))
            conj = self.mul(self.mul(np.full(self.size, self.inverse[gi]), ids), np.full(self.size, gi))
            src.append(ids)
            dst.append(np.asarray(conj))
        if src:
            src_a = np.concatenate(src)
            dst_a = np.concatenate(dst)
        else:
            src_a = dst_a = ids
        graph = coo_matrix((np.ones(len(src_a), dtype=np.int8), (src_a, dst_a)), shape=(self.size, self.size))
        _, labels = connected_components(graph, directed=False)
        # relabel by first occurrence so the identity is class 0
        _, first = np.unique(labels, return_index=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first)] = np.arange(len(first))
        self.class_of = rank[labels]
        self.num_classes = len(first)
        self.class_reps = np.sort(first)
        self.class_sizes = np.bincount(self.class_of, minlength=self.num_classes)
        self.class_orders = self.orders[self.class_reps]
        pc = np.zeros((self.num_classes, self.num_classes), dtype=bool)
        for c, r in enumerate(self.class_reps.tolist()):
            x = 0
            for _ in range(int(self.orders[r])):
                pc[c, self.class_of[x]] = True
                x = int(self.mul(x, r))
        self.power_classes = pc

    # -- subgroups ---------------------------------------------------------------

    def closure_mask(self, gens: Sequence[int], stop_above: int | None = None) -> np.ndarray | None:
        """Boolean membership mask of ``<gens>``.

        With ``stop_above`` set, returns None as soon as the subgroup is known
        to have more than that many elements.
        """
        seen = np.zeros(self.size, dtype=bool)
        seen[0] = True
        count = 1
        frontier = np.array([0], dtype=np.int64)
        gens = [int(g) for g in gens]
        while frontier.size:
            cand = np.concatenate([np.asarray(self.mul(frontier, np.full(frontier.size, g))) for g in gens]) if gens else frontier[:0]
            cand = np.unique(cand)
            cand = cand[~seen[cand]]
            seen[cand] = True
            count += cand.size
            if stop_above is not None and count > stop_above:
                return None
            frontier = cand
        return seen

    def subgroup_order(self, gens: Sequence[int]) -> int:
        return int(self.closure_mask(gens).sum())

    def generates(self, gens: Sequence[int]) -> bool:
        # a subgroup with more than half the elements is the whole group
        return self.closure_mask(gens, stop_above=self.size // 2) is None or self.size == 1

    def sigma_class_mask(self, elems: Iterable[int]) -> np.ndarray:
        """Classes met by the powers of conjugates of the given elements."""
        mask = np.zeros(self.num_classes, dtype=bool)
        mask[0] = True
        for x in elems:
            mask |= self.power_classes[self.class_of[int(x)]]
        return mask
