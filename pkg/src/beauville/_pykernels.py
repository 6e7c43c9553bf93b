"""Reference implementations of the permutation kernels.

Selected when the compiled ``_kernels`` extension is missing or when
``BEAUVILLE_PURE_PYTHON`` is set.  Every function here has the same signature
and produces the same result as its compiled twin, including the random
stream consumed by :func:`anneal_product`.

Permutations are 1-D ``int32`` arrays; ``p[i]`` is the image of point ``i``.
Products are read left to right: ``compose(a, b)`` applies ``a`` first.
"""
from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_INV_2_53 = 1.0 / 9007199254740992.0


def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return b[a]


def invert(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    out[a] = np.arange(len(a), dtype=a.dtype)
    return out


def cycle_counts(a: np.ndarray) -> np.ndarray:
    """``counts[L]`` is the number of ``L``-cycles of ``a`` (fixed points at ``L = 1``)."""
    img = a.tolist()
    n = len(img)
    seen = bytearray(n)
    counts = [0] * (n + 1)
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = 1
            j = img[j]
            length += 1
        counts[length] += 1
    return np.array(counts, dtype=np.int64)


def orbit_schreier(gens: np.ndarray, active: np.ndarray, root: int, sv: np.ndarray) -> np.ndarray:
    """Breadth-first orbit of ``root`` under ``gens[active]``.

    Fills the Schreier vector ``sv`` in place: ``sv[root] = -2``, ``sv[pt] = k``
    when ``pt = gens[k][prev]`` for an earlier orbit point ``prev``, and ``-1``
    off the orbit.  Returns the orbit in discovery order.
    """
    n = sv.shape[0]
    labels = [-1] * n
    labels[root] = -2
    ids = [int(k) for k in active]
    rows = [gens[k].tolist() for k in ids]
    orbit = [root]
    pos = 0
    while pos < len(orbit):
        pt = orbit[pos]
        pos += 1
        for k, row in zip(ids, rows):
            img = row[pt]
            if labels[img] == -1:
                labels[img] = k
                orbit.append(img)
    sv[:] = labels
    return np.array(orbit, dtype=np.int32)


def sift(g: np.ndarray, base: np.ndarray, svs: np.ndarray, gens_inv: np.ndarray, start: int) -> int:
    """Strip ``g`` through the chain from level ``start`` on, in place.

    Returns the first level whose basic orbit does not contain the image of its
    base point, or ``len(base)`` when ``g`` sifts through every level.
    """
    nlev = len(base)
    for lvl in range(start, nlev):
        b = int(base[lvl])
        sv = svs[lvl]
        beta = int(g[b])
        if sv[beta] == -1:
            return lvl
        while beta != b:
            inv = gens_inv[sv[beta]]
            g[:] = inv[g]
            beta = int(inv[beta])
    return nlev


class _XorShift:
    """xorshift64* generator; the compiled kernel uses the identical recurrence."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        s = (seed * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019) & MASK64
        self.state = s or 0x9E3779B97F4A7C15

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def uniform(self) -> float:
        return (self.next() >> 11) * _INV_2_53

    def below(self, m: int) -> int:
        return self.next() % m


def _cycles(p: list[int]):
    n = len(p)
    seen = bytearray(n)
    clen: list[int] = []
    cstart: list[int] = []
    pts: list[int] = []
    for i in range(n):
        if seen[i]:
            continue
        cstart.append(len(pts))
        j = i
        while not seen[j]:
            seen[j] = 1
            pts.append(j)
            j = p[j]
        clen.append(len(pts) - cstart[-1])
    return clen, cstart, pts


def _energy(clen: list[int], c: int, f: int) -> int:
    fix = 0
    e = 0
    for L in clen:
        if L == 1:
            fix += 1
        elif L != c:
            e += L // c + L % c
    return e + abs(fix - f)


def _find(par: list[int], i: int) -> int:
    while par[i] != i:
        par[i] = par[par[i]]
        i = par[i]
    return i


def _components(xs: list[int], ys: list[int]) -> tuple[list[int], int]:
    """Union-find forest of the classes joined by ``i ~ xs[i]`` and ``i ~ ys[i]``."""
    n = len(xs)
    par = list(range(n))
    count = n
    for img in (xs, ys):
        for i in range(n):
            a = _find(par, i)
            b = _find(par, img[i])
            if a != b:
                par[a] = b
                count -= 1
    return par, count


def anneal_product(x: np.ndarray, y: np.ndarray, c: int, f: int, seed: int,
                   max_steps: int, temperature: float, links: np.ndarray | None = None) -> tuple[int, int]:
    """Conjugate ``y`` by transpositions until ``x*y`` has shape ``(c^k, 1^f)``
    and ``<x, y>`` is transitive.

    The energy counts how far the cycles of ``x*y`` are from the target plus
    the number of orbits beyond one.  ``y`` is updated in place and stays in
    its conjugacy class throughout.  Returns ``(steps, best_energy)``;
    ``steps`` is ``-1`` when the target was not reached within ``max_steps``
    proposals.

    Orbits are those of ``y`` together with the relation ``i ~ links[i]``;
    ``links`` defaults to ``x``.
    """
    xs = x.tolist()
    ls = xs if links is None else links.tolist()
    ys = y.tolist()
    n = len(xs)
    yinv = [0] * n
    for i, v in enumerate(ys):
        yinv[v] = i
    rng = _XorShift(seed)

    def swap(i: int, j: int) -> None:
        yi = ys[i]
        yj = ys[j]
        ys[i] = yj
        ys[j] = yi
        yinv[yj] = i
        yinv[yi] = j
        a = yinv[i]
        b = yinv[j]
        ys[a] = j
        ys[b] = i
        yinv[i] = b
        yinv[j] = a

    clen, cstart, pts = _cycles([ys[v] for v in xs])
    par, ncomp = _components(ls, ys)
    e = _energy(clen, c, f) + ncomp - 1
    best = e
    result = -1
    for step in range(max_steps):
        if e == 0:
            result = step
            break
        ncyc = len(clen)
        bad = [k for k in range(ncyc) if clen[k] != 1 and clen[k] != c]
        fixed = [k for k in range(ncyc) if clen[k] == 1]
        nfix = len(fixed)
        u = rng.uniform()
        if u < 0.3:
            i = rng.below(n)
            j = rng.below(n - 1)
            if j >= i:
                j += 1
            if ncomp > 1 and u < 0.2:
                # join two orbits
                ri = _find(par, i)
                tries = 0
                while _find(par, j) == ri and tries < 8:
                    j = rng.below(n)
                    tries += 1
        elif bad and (rng.uniform() < 0.7 or nfix == f):
            b = bad[rng.below(len(bad))]
            L = clen[b]
            if L > c:
                s = rng.below(L)
                d = c if rng.uniform() < 0.7 else 1
                i = pts[cstart[b] + s]
                j = pts[cstart[b] + (s + d) % L]
            else:
                o = rng.below(ncyc)
                if o == b:
                    o = rng.below(ncyc)
                    if o == b:
                        continue
                i = pts[cstart[b] + rng.below(L)]
                j = pts[cstart[o] + rng.below(clen[o])]
        elif nfix > f:
            a = fixed[rng.below(nfix)]
            o = rng.below(ncyc)
            if o == a:
                continue
            i = pts[cstart[a]]
            j = pts[cstart[o] + rng.below(clen[o])]
        else:
            moving = [k for k in range(ncyc) if clen[k] > 1]
            if not moving:
                continue
            b = moving[rng.below(len(moving))]
            L = clen[b]
            s = rng.below(L)
            i = pts[cstart[b] + s]
            j = pts[cstart[b] + (s + 1) % L]
        if i == j:
            continue
        swap(i, j)
        nlen, nstart, npts = _cycles([ys[v] for v in xs])
        npar, ncomp2 = _components(ls, ys)
        e2 = _energy(nlen, c, f) + ncomp2 - 1
        if e2 <= e or rng.uniform() < math.exp(-(e2 - e) / temperature):
            clen, cstart, pts = nlen, nstart, npts
            par, ncomp = npar, ncomp2
            e = e2
            if e < best:
                best = e
        else:
            swap(i, j)
    else:
        if e == 0:
            result = max_steps
    y[:] = ys
    return result, best
