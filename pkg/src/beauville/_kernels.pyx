# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled permutation kernels.

Mirrors ``_pykernels`` function by function; results (including the random
stream of ``anneal_product``) are identical.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp
from libc.stdint cimport uint64_t, int32_t, int64_t

cnp.import_array()


def compose(const int32_t[::1] a, const int32_t[::1] b):
    cdef Py_ssize_t n = a.shape[0], i
    out = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] o = out
    for i in range(n):
        o[i] = b[a[i]]
    return out


def invert(const int32_t[::1] a):
    cdef Py_ssize_t n = a.shape[0], i
    out = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] o = out
    for i in range(n):
        o[a[i]] = <int32_t>i
    return out


def cycle_counts(const int32_t[::1] a):
    cdef Py_ssize_t n = a.shape[0], i, j, length
    counts = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] cnt = counts
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = 1
            j = a[j]
            length += 1
        cnt[length] += 1
    return counts


def orbit_schreier(const int32_t[:, ::1] gens, const int32_t[::1] active, int root, int32_t[::1] sv):
    cdef Py_ssize_t n = sv.shape[0], na = active.shape[0], pos = 0, size = 1, t
    cdef int pt, img, k
    orbit_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] orbit = orbit_arr
    for t in range(n):
        sv[t] = -1
    sv[root] = -2
    orbit[0] = root
    while pos < size:
        pt = orbit[pos]
        pos += 1
        for t in range(na):
            k = active[t]
            img = gens[k, pt]
            if sv[img] == -1:
                sv[img] = k
                orbit[size] = img
                size += 1
    return orbit_arr[:size].copy()


def sift(int32_t[::1] g, const int32_t[::1] base, const int32_t[:, ::1] svs,
         const int32_t[:, ::1] gens_inv, int start):
    cdef Py_ssize_t nlev = base.shape[0], n = g.shape[0], lvl, i
    cdef int b, beta, s
    for lvl in range(start, nlev):
        b = base[lvl]
        beta = g[b]
        if svs[lvl, beta] == -1:
            return lvl
        while beta != b:
            s = svs[lvl, beta]
            for i in range(n):
                g[i] = gens_inv[s, g[i]]
            beta = gens_inv[s, beta]
    return nlev


cdef inline uint64_t _next(uint64_t* state) noexcept nogil:
    cdef uint64_t x = state[0]
    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    state[0] = x
    return x * <uint64_t>0x2545F4914F6CDD1D


cdef inline double _uniform(uint64_t* state) noexcept nogil:
    return (_next(state) >> 11) * (1.0 / 9007199254740992.0)


cdef inline Py_ssize_t _below(uint64_t* state, Py_ssize_t m) noexcept nogil:
    return <Py_ssize_t>(_next(state) % <uint64_t>m)


cdef Py_ssize_t _cycles(const int32_t[::1] x, const int32_t[::1] y, Py_ssize_t n,
                        int32_t[::1] clen, int32_t[::1] cstart, int32_t[::1] pts,
                        unsigned char[::1] seen) noexcept nogil:
    cdef Py_ssize_t i, j, ncyc = 0, npts = 0
    for i in range(n):
        seen[i] = 0
    for i in range(n):
        if seen[i]:
            continue
        cstart[ncyc] = <int32_t>npts
        j = i
        while not seen[j]:
            seen[j] = 1
            pts[npts] = <int32_t>j
            npts += 1
            j = y[x[j]]
        clen[ncyc] = <int32_t>(npts - cstart[ncyc])
        ncyc += 1
    return ncyc


cdef Py_ssize_t _energy(const int32_t[::1] clen, Py_ssize_t ncyc, int c, int f) noexcept nogil:
    cdef Py_ssize_t k, fix = 0, e = 0
    cdef int L
    for k in range(ncyc):
        L = clen[k]
        if L == 1:
            fix += 1
        elif L != c:
            e += L // c + L % c
    if fix > f:
        return e + fix - f
    return e + f - fix


cdef inline int32_t _find(int32_t[::1] par, int32_t i) noexcept nogil:
    while par[i] != i:
        par[i] = par[par[i]]
        i = par[i]
    return i


cdef Py_ssize_t _components(const int32_t[::1] x, const int32_t[::1] y, Py_ssize_t n,
                            int32_t[::1] par) noexcept nogil:
    cdef Py_ssize_t i, count = n
    cdef int32_t a, b
    for i in range(n):
        par[i] = <int32_t>i
    for i in range(n):
        a = _find(par, <int32_t>i)
        b = _find(par, x[i])
        if a != b:
            par[a] = b
            count -= 1
    for i in range(n):
        a = _find(par, <int32_t>i)
        b = _find(par, y[i])
        if a != b:
            par[a] = b
            count -= 1
    return count


cdef inline void _swap(int32_t[::1] y, int32_t[::1] yinv, int i, int j) noexcept nogil:
    cdef int yi = y[i], yj = y[j], a, b
    y[i] = yj
    y[j] = yi
    yinv[yj] = i
    yinv[yi] = j
    a = yinv[i]
    b = yinv[j]
    y[a] = j
    y[b] = i
    yinv[i] = b
    yinv[j] = a


def anneal_product(const int32_t[::1] x, int32_t[::1] y, int c, int f, unsigned long long seed,
                   long long max_steps, double temperature, links=None):
    cdef Py_ssize_t n = x.shape[0], k, ncyc, ncyc2, nbad, nfix, nmov, b, o, a, L, s, d
    cdef Py_ssize_t ncomp, ncomp2, tries
    cdef long long step, result = -1
    cdef int i, j
    cdef int32_t ri
    cdef double u
    cdef Py_ssize_t e, e2, best
    cdef uint64_t state = <uint64_t>seed * <uint64_t>0x9E3779B97F4A7C15 + <uint64_t>0x632BE59BD9B4E019
    if state == 0:
        state = <uint64_t>0x9E3779B97F4A7C15

    yinv_arr = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] yinv = yinv_arr
    for k in range(n):
        yinv[y[k]] = <int32_t>k

    bufs = [np.empty(n, dtype=np.int32) for _ in range(11)]
    cdef int32_t[::1] par = bufs[9], npar = bufs[10]
    cdef int32_t[::1] clen = bufs[0], cstart = bufs[1], pts = bufs[2]
    cdef int32_t[::1] nlen = bufs[3], nstart = bufs[4], npts = bufs[5]
    cdef int32_t[::1] bad = bufs[6], fixed = bufs[7], moving = bufs[8]
    cdef int32_t[::1] tmp
    cdef const int32_t[::1] lk = x if links is None else links
    seen_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr

    ncyc = _cycles(x, y, n, clen, cstart, pts, seen)
    ncomp = _components(lk, y, n, par)
    e = _energy(clen, ncyc, c, f) + ncomp - 1
    best = e
    with nogil:
        for step in range(max_steps):
            if e == 0:
                result = step
                break
            nbad = 0
            nfix = 0
            for k in range(ncyc):
                if clen[k] == 1:
                    fixed[nfix] = <int32_t>k
                    nfix += 1
                elif clen[k] != c:
                    bad[nbad] = <int32_t>k
                    nbad += 1
            u = _uniform(&state)
            if u < 0.3:
                i = <int>_below(&state, n)
                j = <int>_below(&state, n - 1)
                if j >= i:
                    j += 1
                if ncomp > 1 and u < 0.2:
                    ri = _find(par, i)
                    tries = 0
                    while _find(par, j) == ri and tries < 8:
                        j = <int>_below(&state, n)
                        tries += 1
            elif nbad > 0 and (_uniform(&state) < 0.7 or nfix == f):
                b = bad[_below(&state, nbad)]
                L = clen[b]
                if L > c:
                    s = _below(&state, L)
                    d = c if _uniform(&state) < 0.7 else 1
                    i = pts[cstart[b] + s]
                    j = pts[cstart[b] + (s + d) % L]
                else:
                    o = _below(&state, ncyc)
                    if o == b:
                        o = _below(&state, ncyc)
                        if o == b:
                            continue
                    i = pts[cstart[b] + _below(&state, L)]
                    j = pts[cstart[o] + _below(&state, clen[o])]
            elif nfix > f:
                a = fixed[_below(&state, nfix)]
                o = _below(&state, ncyc)
                if o == a:
                    continue
                i = pts[cstart[a]]
                j = pts[cstart[o] + _below(&state, clen[o])]
            else:
                nmov = 0
                for k in range(ncyc):
                    if clen[k] > 1:
                        moving[nmov] = <int32_t>k
                        nmov += 1
                if nmov == 0:
                    continue
                b = moving[_below(&state, nmov)]
                L = clen[b]
                s = _below(&state, L)
                i = pts[cstart[b] + s]
                j = pts[cstart[b] + (s + 1) % L]
            if i == j:
                continue
            _swap(y, yinv, i, j)
            ncyc2 = _cycles(x, y, n, nlen, nstart, npts, seen)
            ncomp2 = _components(lk, y, n, npar)
            e2 = _energy(nlen, ncyc2, c, f) + ncomp2 - 1
            if e2 <= e or _uniform(&state) < exp(-(e2 - e) / temperature):
                tmp = clen
                clen = nlen
                nlen = tmp
                tmp = cstart
                cstart = nstart
                nstart = tmp
                tmp = pts
                pts = npts
                npts = tmp
                tmp = par
                par = npar
                npar = tmp
                ncyc = ncyc2
                ncomp = ncomp2
                e = e2
                if e < best:
                    best = e
            else:
                _swap(y, yinv, i, j)
        else:
            if e == 0:
                result = max_steps
    return int(result), int(best)
