"""Primes p with PSL(2, p) carrying a structure of type ((r,r,r), (s,s,s)).

If ``p = x (mod 2rs)`` with ``x = 1 (mod 2r)`` and ``x = -1 (mod s)`` then
``r | (p-1)/2`` and ``s | (p+1)/2``.  Such primes are found by scanning the
progression; each one gets an explicit, verified structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arith import is_prime_64
from .errors import BadInput, BadType, NoneFound, UnsupportedQ
from .psl2 import beauville_psl2p_typed
from .structures import BeauvilleStructure

__all__ = ["crt_target", "hunt", "HuntResult", "is_prime_64"]

DEFAULT_LIMIT = 100_000


def _normalise(r: int, s: int) -> tuple[int, int, bool]:
    if r <= 5 or s <= 5:
        raise BadInput(f"both orders must exceed 5, got {r}, {s}")
    if math.gcd(r, s) != 1:
        raise BadInput(f"gcd({r}, {s}) = {math.gcd(r, s)}; the orders must be coprime")
    if s % 2 == 0:
        return s, r, True
    return r, s, False


def crt_target(r: int, s: int) -> int:
    """The residue ``0 <= x < 2rs`` with ``x = 1 (mod 2r)``, ``x = -1 (mod s)``.

    ``s`` must be odd; when it is not, ``r`` and ``s`` are swapped first (see
    :func:`crt_oriented`).
    """
    return crt_oriented(r, s)[0]


def crt_oriented(r: int, s: int) -> tuple[int, int, int, bool]:
    """``(x, r, s, swapped)`` after putting the odd order second."""
    r, s, swapped = _normalise(int(r), int(s))
    m = 2 * r
    # x = 1 + m t with m t = -2 (mod s); m is invertible mod the odd s
    t = (-2 * pow(m, -1, s)) % s
    return 1 + m * t, r, s, swapped


@dataclass
class HuntResult:
    r: int
    s: int
    x: int
    modulus: int
    swapped: bool
    primes: list[int] = field(default_factory=list)
    structures: list[BeauvilleStructure | None] = field(default_factory=list)
    steps: int = 0

    def to_json(self) -> dict:
        entries = []
        for p, st in zip(self.primes, self.structures):
            entry: dict = {"p": p, "verified": False, "structure": None}
            if st is not None:
                js = st.to_json()
                entry["verified"] = js["verified"]
                entry["structure"] = js
            entries.append(entry)
        return {"r": self.r, "s": self.s, "x": self.x, "modulus": self.modulus,
                "swapped": self.swapped, "steps": self.steps, "primes": entries}


def hunt(r: int, s: int, count: int = 1, limit: int = DEFAULT_LIMIT) -> HuntResult:
    """The first ``count`` primes ``p = x + 2rs k`` with ``0 <= k < limit``.

    The structure is built on the requested orientation ``(r, s)``; the
    progression uses the odd order as ``s``.
    """
    r0, s0 = int(r), int(s)
    x, rr, ss, swapped = crt_oriented(r0, s0)
    modulus = 2 * rr * ss
    res = HuntResult(r=r0, s=s0, x=x, modulus=modulus, swapped=swapped)
    for k in range(limit):
        res.steps = k + 1
        p = x + modulus * k
        if p >= 2**64:
            break
        if not is_prime_64(p):
            continue
        res.primes.append(p)
        try:
            res.structures.append(beauville_psl2p_typed(p, r0, s0))
        except (BadType, UnsupportedQ):
            # beyond the field size cap
            res.structures.append(None)
        if len(res.primes) >= count:
            break
    if not res.primes:
        raise NoneFound(f"no prime in {x} + {modulus} k for k < {limit}; "
                        "primes in this progression exist, the bound was just too small")
    return res
