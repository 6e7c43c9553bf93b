"""Permutations of {0, ..., n-1}, cycle shapes, and stabilizer chains.

Products compose left to right: ``(a * b)(i) = b(a(i))``, so ``x*y*z == 1``
reads "apply x, then y, then z".  Conjugation is ``g ** s = s^-1 g s``.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BadInput, DegreeTooLarge

MAX_DEGREE = 512


def _check_degree(n: int) -> None:
    if n > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {n} exceeds the cap {MAX_DEGREE}")


class Permutation:
    """An immutable permutation stored as an ``int32`` image vector."""

    __slots__ = ("images", "_hash")

    def __init__(self, images, *, _trusted: bool = False):
        arr = np.ascontiguousarray(images, dtype=np.int32)
        if not _trusted:
            n = arr.shape[0]
            _check_degree(n)
            if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(n, dtype=np.int32)):
                raise BadInput("image vector is not a permutation")
        arr.flags.writeable = False
        self.images = arr
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        _check_degree(n)
        return cls(np.arange(n, dtype=np.int32), _trusted=True)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        _check_degree(n)
        img = np.arange(n, dtype=np.int32)
        seen = set()
        for cyc in cycles:
            cyc = [int(c) for c in cyc]
            for i, a in enumerate(cyc):
                if not 0 <= a < n or a in seen:
                    raise BadInput(f"bad cycle {cyc} on {n} points")
                seen.add(a)
                img[a] = cyc[(i + 1) % len(cyc)]
        return cls(img, _trusted=True)

    @property
    def n(self) -> int:
        return self.images.shape[0]

    def __len__(self) -> int:
        return self.n

    def __call__(self, i: int) -> int:
        return int(self.images[i])

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(kernels.compose(self.images, other.images), _trusted=True)

    def inverse(self) -> "Permutation":
        return Permutation(kernels.invert(self.images), _trusted=True)

    def __invert__(self) -> "Permutation":
        return self.inverse()

    def __pow__(self, k) -> "Permutation":
        if isinstance(k, Permutation):
            # conjugate: s^-1 g s, as an image relabelling
            out = np.empty_like(self.images)
            out[k.images] = k.images[self.images]
            return Permutation(out, _trusted=True)
        k = int(k)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = np.arange(self.n, dtype=np.int32)
        cur = base.images
        while k:
            if k & 1:
                result = cur[result]
            cur = cur[cur]
            k >>= 1
        return Permutation(result, _trusted=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.images.tobytes())
        return self._hash

    def is_identity(self) -> bool:
        return bool(np.all(self.images == np.arange(self.n)))

    def cycles(self, *, include_fixed: bool = False) -> list[list[int]]:
        img = self.images.tolist()
        seen = bytearray(len(img))
        out = []
        for i in range(len(img)):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = 1
                cyc.append(j)
                j = img[j]
            if len(cyc) > 1 or include_fixed:
                out.append(cyc)
        return out

    def cycle_counts(self) -> np.ndarray:
        return kernels.cycle_counts(self.images)

    def cycle_type(self) -> tuple[int, ...]:
        counts = self.cycle_counts()
        return tuple(L for L in range(len(counts) - 1, 0, -1) for _ in range(int(counts[L])))

    def sign(self) -> int:
        counts = self.cycle_counts()
        even_cycles = int(counts[2::2].sum())
        return -1 if even_cycles % 2 else 1

    def order(self) -> int:
        counts = self.cycle_counts()
        return math.lcm(*(int(L) for L in np.nonzero(counts)[0])) if self.n else 1

    def fixed_point_count(self) -> int:
        return int(np.count_nonzero(self.images == np.arange(self.n)))

    def to_cycle_string(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def to_list(self) -> list[int]:
        return self.images.tolist()

    def __str__(self) -> str:
        return self.to_cycle_string()

    def __repr__(self) -> str:
        return f"Permutation({self.to_cycle_string()!r}, n={self.n})"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(data, n: int | None = None) -> Permutation:
    """Read cycle notation (``"(0 1 2)(3 4)"``, commas allowed) or an image list.

    Strings that look like JSON arrays are treated as image lists.  ``n`` is
    required for cycle notation unless the largest point is to be taken as
    ``n - 1``.
    """
    if isinstance(data, Permutation):
        return data
    if isinstance(data, str):
        text = data.strip()
        if text.startswith("["):
            return parse_permutation(json.loads(text), n)
        if text and _CYCLE_RE.sub("", text).strip():
            raise BadInput(f"cannot parse permutation {data!r}")
        cycles = []
        for body in _CYCLE_RE.findall(text):
            parts = [t for t in re.split(r"[\s,]+", body.strip()) if t]
            try:
                cycles.append([int(t) for t in parts])
            except ValueError as exc:
                raise BadInput(f"cannot parse permutation {data!r}") from exc
        if n is None:
            n = 1 + max((max(c) for c in cycles if c), default=-1)
        return Permutation.from_cycles([c for c in cycles if c], n)
    if isinstance(data, (list, tuple, np.ndarray)):
        img = [int(v) for v in data]
        if n is not None and len(img) != n:
            raise BadInput(f"image list has length {len(img)}, expected {n}")
        return Permutation(img)
    raise BadInput(f"cannot parse permutation from {type(data).__name__}")


# -- cycle shapes -------------------------------------------------------------

@dataclass(frozen=True)
class CycleShape:
    """The class of ``k`` disjoint ``m``-cycles and ``f`` fixed points."""

    m: int
    k: int
    f: int

    def __post_init__(self):
        if self.m < 2 or self.k < 1 or self.f < 0:
            raise BadInput(f"malformed cycle shape {self.m}^{self.k} 1^{self.f}")

    @property
    def n(self) -> int:
        return self.m * self.k + self.f

    @property
    def sign(self) -> int:
        return -1 if (self.m % 2 == 0 and self.k % 2 == 1) else 1

    def cycle_type(self) -> tuple[int, ...]:
        return (self.m,) * self.k + (1,) * self.f

    def matches(self, g: Permutation) -> bool:
        counts = g.cycle_counts()
        return (g.n == self.n and int(counts[self.m]) == self.k and int(counts[1]) == self.f)

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "f": self.f}


def cycle_type(g: Permutation) -> tuple[int, ...]:
    return g.cycle_type()


def sign(g: Permutation) -> int:
    return g.sign()


def order(g: Permutation) -> int:
    return g.order()


def fixed_point_count(g: Permutation) -> int:
    return g.fixed_point_count()


def class_representative(shape: CycleShape) -> Permutation:
    """``k`` consecutive ``m``-cycles on ``0 .. mk-1``; the rest fixed."""
    n = shape.n
    _check_degree(n)
    img = np.arange(n, dtype=np.int32)
    block = np.arange(shape.m * shape.k, dtype=np.int32).reshape(shape.k, shape.m)
    img[block.ravel()] = np.roll(block, -1, axis=1).ravel()
    return Permutation(img, _trusted=True)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_permutation(n: int, seed) -> Permutation:
    return Permutation(_rng(seed).permutation(n).astype(np.int32), _trusted=True)


def random_class_element(shape: CycleShape, seed) -> Permutation:
    """Uniform element of the S_n-class of ``shape``.

    ``seed`` is an int or a caller-owned ``numpy.random.Generator``.
    """
    rep = class_representative(shape)
    return rep ** random_permutation(shape.n, seed)


# -- stabilizer chains ------------------------------------------------------------

def _as_images(g, n: int) -> np.ndarray:
    if isinstance(g, Permutation):
        arr = g.images
    else:
        arr = np.ascontiguousarray(g, dtype=np.int32)
    if arr.shape != (n,):
        raise BadInput(f"generator of degree {arr.shape[0]} in a degree-{n} computation")
    return arr


class StabilizerChain:
    """Base and strong generating set for ``<gens>``.

    A seeded random Schreier-Sims pass builds the chain; unless it reaches
    the order bound ``n!`` (``n!/2`` for even generators) it is completed
    deterministically by sifting every Schreier generator, so the result is
    always exact.  The base is extended with the least moved point whenever
    a new level is needed.
    """

    def __init__(self, gens: Iterable, n: int, *, seed: int = 0, random_rounds: int = 30,
                 complete: bool = True, max_degree: int = MAX_DEGREE):
        if n > max_degree:
            raise DegreeTooLarge(f"degree {n} exceeds the cap {max_degree}")
        self.n = n
        self._ident = np.arange(n, dtype=np.int32)
        self.base: list[int] = []
        self._gens: list[np.ndarray] = []
        self._ginv: list[np.ndarray] = []
        self._depth: list[int] = []
        self._orbits: list[np.ndarray] = []
        self._svs = np.full((0, n), -1, dtype=np.int32)
        self._gens2d = np.empty((0, n), dtype=np.int32)
        self._ginv2d = np.empty((0, n), dtype=np.int32)

        inputs = [_as_images(g, n) for g in gens]
        inputs = [g for g in inputs if not np.array_equal(g, self._ident)]
        self.all_even = all(Permutation(g, _trusted=True).sign() == 1 for g in inputs)
        self.bound = math.factorial(n) // (2 if self.all_even and n >= 2 else 1)
        self.exact = False
        for g in inputs:
            h = g.copy()
            lvl = kernels.sift(h, np.array(self.base, dtype=np.int32), self._svs, self._ginv2d, 0)
            if not np.array_equal(h, self._ident):
                self._add_generator(h, lvl)
        if not inputs:
            self.exact = True
            return
        self._random_phase(seed, random_rounds)
        if self.order() == self.bound:
            self.exact = True
        elif complete:
            self.finish()

    # -- bookkeeping --------------------------------------------------------

    def _active(self, lvl: int) -> np.ndarray:
        return np.array([k for k, d in enumerate(self._depth) if d >= lvl], dtype=np.int32)

    def _rebuild_level(self, lvl: int) -> None:
        sv = np.empty(self.n, dtype=np.int32)
        orbit = kernels.orbit_schreier(self._gens2d, self._active(lvl), self.base[lvl], sv)
        self._svs[lvl] = sv
        self._orbits[lvl] = orbit

    def _add_generator(self, h: np.ndarray, depth: int) -> None:
        """Insert a strong generator fixing ``base[:depth]`` pointwise."""
        if depth == len(self.base):
            moved = np.nonzero(h != self._ident)[0]
            self.base.append(int(moved[0]))
            self._orbits.append(np.empty(0, dtype=np.int32))
            self._svs = np.vstack([self._svs, np.full((1, self.n), -1, dtype=np.int32)])
            new_level = True
        else:
            new_level = False
        h = np.ascontiguousarray(h, dtype=np.int32)
        self._gens.append(h)
        self._ginv.append(kernels.invert(h))
        self._depth.append(depth)
        self._gens2d = np.vstack([self._gens2d, h[None, :]])
        self._ginv2d = np.vstack([self._ginv2d, self._ginv[-1][None, :]])
        for lvl in range(depth + 1):
            orbit = self._orbits[lvl]
            if new_level and lvl == depth:
                self._rebuild_level(lvl)
            elif np.any(self._svs[lvl][h[orbit]] == -1):
                self._rebuild_level(lvl)

    def _sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        h = np.array(g, dtype=np.int32, copy=True)
        lvl = kernels.sift(h, np.array(self.base, dtype=np.int32), self._svs, self._ginv2d, start)
        return h, lvl

    def _absorb(self, g: np.ndarray, start: int = 0) -> int | None:
        """Sift ``g``; on a nontrivial residue add it and return its depth."""
        h, lvl = self._sift(g, start)
        if np.array_equal(h, self._ident):
            return None
        self._add_generator(h, lvl)
        return lvl

    def transversal(self, lvl: int, point: int) -> np.ndarray:
        """An element of the level-``lvl`` stabilizer mapping the base point to ``point``."""
        sv = self._svs[lvl]
        if sv[point] == -1:
            raise ValueError("point outside the basic orbit")
        path = []
        b = point
        while sv[b] != -2:
            k = int(sv[b])
            path.append(k)
            b = int(self._ginv[k][b])
        u = self._ident.copy()
        for k in reversed(path):
            u = self._gens[k][u]
        return u

    # -- construction phases ------------------------------------------------

    def _random_phase(self, seed: int, rounds: int) -> None:
        rng = np.random.default_rng(seed)
        pool = [g.copy() for g in self._gens]
        while len(pool) < 10:
            pool.append(pool[len(pool) % len(self._gens)].copy())
        acc = self._ident.copy()

        def step() -> np.ndarray:
            nonlocal acc
            i, j = rng.choice(len(pool), size=2, replace=False)
            other = pool[j] if rng.random() < 0.5 else kernels.invert(pool[j])
            if rng.random() < 0.5:
                pool[i] = other[pool[i]]
            else:
                pool[i] = pool[i][other]
            acc = pool[i][acc]
            return acc

        for _ in range(50):
            step()
        quiet = 0
        while quiet < rounds:
            if self.order() == self.bound:
                return
            if self._absorb(step()) is None:
                quiet += 1
            else:
                quiet = 0

    def _complete(self) -> None:
        lvl = len(self.base) - 1
        while lvl >= 0:
            restart = None
            for beta in self._orbits[lvl].tolist():
                u = self.transversal(lvl, beta)
                for k in self._active(lvl).tolist():
                    g = self._gens[k][u]
                    # the Schreier generator sifts from this level downward
                    depth = self._absorb(g, lvl)
                    if depth is not None:
                        restart = depth
                        break
                if restart is not None:
                    break
            if restart is None:
                lvl -= 1
            else:
                lvl = restart

    def finish(self) -> None:
        """Run the deterministic completion if it has not run yet."""
        if not self.exact:
            self._complete()
            self.exact = True

    # -- queries --------------------------------------------------------------

    def order(self) -> int:
        return math.prod(len(o) for o in self._orbits)

    def orbit_lengths(self) -> list[int]:
        return [len(o) for o in self._orbits]

    def contains(self, g) -> bool:
        h, _ = self._sift(_as_images(g, self.n))
        return bool(np.array_equal(h, self._ident))

    def strong_generators(self) -> list[Permutation]:
        return [Permutation(g, _trusted=True) for g in self._gens]


def generated_group_order(gens: Sequence, n: int, *, seed: int = 0) -> int:
    return StabilizerChain(gens, n, seed=seed).order()


def _is_transitive(gens: list[np.ndarray], n: int) -> bool:
    if n <= 1:
        return True
    if not gens:
        return False
    sv = np.empty(n, dtype=np.int32)
    g2 = np.vstack(gens)
    orbit = kernels.orbit_schreier(g2, np.arange(len(gens), dtype=np.int32), 0, sv)
    return len(orbit) == n


def _minimal_block(gens: list[list[int]], n: int, j: int) -> int:
    """Size of the smallest block containing 0 and ``j`` (union-find closure)."""
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    parent[j] = 0
    queue = [j]
    while queue:
        a = queue.pop()
        ra = find(a)
        for g in gens:
            x, y = find(g[a]), find(g[ra])
            if x != y:
                if y < x:
                    x, y = y, x
                parent[y] = x
                queue.append(y)
    root = find(0)
    return sum(1 for a in range(n) if find(a) == root)


def is_primitive(gens: Sequence, n: int) -> bool:
    """Whether the transitive group ``<gens>`` preserves no nontrivial block system."""
    imgs = [_as_images(g, n) for g in gens]
    if not _is_transitive(imgs, n):
        return False
    lists = [g.tolist() for g in imgs]
    return all(_minimal_block(lists, n, j) == n for j in range(1, n))


def contains_alternating(gens: Sequence, n: int, *, seed: int = 0) -> str:
    """Classify ``<gens>`` as ``"A_n"``, ``"S_n"`` or ``"proper"`` (exactly)."""
    if n < 3:
        raise BadInput("contains_alternating needs n >= 3")
    imgs = [_as_images(g, n) for g in gens]
    if not _is_transitive(imgs, n):
        return "proper"
    full = math.factorial(n)
    # the deterministic completion is only needed when the random pass
    # stalls below the bound and the group is primitive
    ch = StabilizerChain(imgs, n, seed=seed, complete=False)
    if ch.order() == ch.bound:
        return "A_n" if ch.all_even else "S_n"
    if not is_primitive(imgs, n):
        return "proper"
    ch.finish()
    order = ch.order()
    if order == full:
        return "S_n"
    if order == full // 2 and ch.all_even:
        return "A_n"
    return "proper"

