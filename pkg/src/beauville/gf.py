"""Exact arithmetic in finite fields F_q, q = p**e <= 2**20.

Elements are plain ints in ``range(q)``: the base-``p`` digits of an int are
the coefficients of the polynomial-basis representation, lowest degree first
(so ``2 + 3*p`` stands for ``2 + 3x``).  ``FiniteField`` does arithmetic on those
ints directly; ``FieldElement`` wraps one for operator syntax.

Prime fields reduce mod ``p``.  Extension fields multiply through discrete
log / antilog tables built once from a primitive element; for odd ``p`` and
``q <= 1024`` an addition table is built as well.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .arith import factorize, is_prime_64, prime_divisors
from .errors import FieldOverflow, NonPrimeCharacteristic, ZeroElement

MAX_FIELD_SIZE = 1 << 20
_ADD_TABLE_LIMIT = 1024


# -- polynomials over F_p as coefficient lists, lowest degree first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p) if p > 2 else 1
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _pmod([c % p for c in out], f, p)


def _ppowmod(a: list[int], n: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, f, p)
    while n:
        if n & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        n >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    b = _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic ``f`` (coefficients lowest degree first)."""
    e = len(f) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**e, f, p), x, p):
        return False
    for r in prime_divisors(e):
        h = _psub(_ppowmod(x, p ** (e // r), f, p), x, p)
        if len(_pgcd(list(f), h, p)) != 1:
            return False
    return True


def _digits(v: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        v, r = divmod(v, p)
        out.append(r)
    return out


def _undigits(d: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(d):
        v = v * p + c
    return v


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Least monic irreducible of degree ``e`` over F_p, ordering the lower
    coefficients by their base-``p`` encoding."""
    if e == 1:
        return (0, 1)
    for low in range(p**e):
        f = _digits(low, p, e) + [1]
        if f[0] == 0:
            continue
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """The field with ``p**e`` elements; see the module docstring for encoding."""

    def __init__(self, p: int, e: int, modulus: Sequence[int]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = tuple(modulus)
        if e > 1:
            self._build_tables()

    def _build_tables(self) -> None:
        p, e, q, f = self.p, self.e, self.q, list(self.modulus)
        order = q - 1
        primes = prime_divisors(order)
        gen = None
        for cand in range(p, q):
            d = _trim(_digits(cand, p, e))
            if all(_ppowmod(d, order // r, f, p) != [1] for r in primes):
                gen = d
                break
        assert gen is not None
        exp = [0] * (2 * order)
        log = [0] * q
        if p == 2 and gen == [0, 1]:
            # multiplication by x is a shift plus a conditional reduction
            red = _undigits(f, 2)
            v = 1
            for k in range(order):
                exp[k] = v
                log[v] = k
                v <<= 1
                if v >= q:
                    v ^= red
        elif gen == [0, 1]:
            cur = [1] + [0] * (e - 1)
            low = f[:-1]
            for k in range(order):
                v = _undigits(cur, p)
                exp[k] = v
                log[v] = k
                top = cur[-1]
                cur = [0] + cur[:-1]
                if top:
                    cur = [(c - top * fi) % p for c, fi in zip(cur, low)]
        else:
            cur = [1]
            for k in range(order):
                v = _undigits(cur + [0] * (e - len(cur)), p)
                exp[k] = v
                log[v] = k
                cur = _pmulmod(cur, gen, f, p)
        exp[order:] = exp[:order]
        self._exp = exp
        self._log = log
        self.generator = exp[1]
        if p > 2 and q <= _ADD_TABLE_LIMIT:
            dig = [_digits(v, p, e) for v in range(q)]
            pw = [p**i for i in range(e)]
            self._add_table = [
                [sum(((x + y) % p) * w for x, y, w in zip(da, db, pw)) for db in dig]
                for da in dig
            ]
        else:
            self._add_table = None

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.e, self.modulus) == (
            other.p, other.e, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __len__(self) -> int:
        return self.q

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(self, self.from_coeffs(value))
        return FieldElement(self, self.from_int(int(value)))

    # -- encoding ------------------------------------------------------------

    def from_int(self, k: int) -> int:
        """Image of the integer ``k`` under Z -> F_q (lands in the prime field)."""
        return k % self.p

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.e:
            raise ValueError(f"expected at most {self.e} coefficients")
        return _undigits([c % self.p for c in coeffs], self.p)

    def coeffs(self, a: int) -> list[int]:
        return _digits(a, self.p, self.e)

    def elements(self) -> Iterator["FieldElement"]:
        for v in range(self.q):
            yield FieldElement(self, v)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    # -- arithmetic on encoded ints -----------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            s = a + b
            return s - self.p if s >= self.p else s
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        p = self.p
        out = 0
        w = 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * w
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        p = self.p
        out = 0
        w = 1
        while a:
            a, d = divmod(a, p)
            out += ((-d) % p) * w
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("zero has no inverse")
        if self.e == 1:
            return pow(a, -1, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a = self.inv(a)
            n = -n
        if self.e == 1:
            return pow(a, n, self.p)
        if a == 0:
            return 1 if n == 0 else 0
        return self._exp[self._log[a] * n % (self.q - 1)]

    def is_square(self, a: int) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self.power(a, (self.q - 1) // 2) == 1

    def sqrt(self, a: int) -> int | None:
        """A square root of ``a`` (the smaller encoding of the two), or None."""
        if a == 0:
            return 0
        if self.p == 2:
            return self.power(a, self.q // 2)
        if not self.is_square(a):
            return None
        if self.e > 1:
            r = self._exp[self._log[a] // 2]
        else:
            r = _tonelli_shanks(a, self.p)
        return min(r, self.neg(r))

    def absolute_trace(self, a: int) -> int:
        """Trace of ``a`` down to the prime field."""
        t = 0
        x = a
        for _ in range(self.e):
            t = self.add(t, x)
            x = self.power(x, self.p)
        return t

    @cached_property
    def _trace_one(self) -> int:
        # any element of absolute trace 1; only used in characteristic 2
        return next(v for v in range(1, self.q) if self.absolute_trace(v) == 1)

    def quadratic_roots(self, b: int, c: int) -> list[int]:
        """Roots of ``x^2 + b x + c`` in increasing encoding order."""
        if self.p != 2:
            two = self.from_int(2)
            disc = self.sub(self.mul(b, b), self.mul(self.from_int(4), c))
            r = self.sqrt(disc)
            if r is None:
                return []
            nb = self.neg(b)
            roots = {self.div(self.add(nb, r), two), self.div(self.sub(nb, r), two)}
            return sorted(roots)
        if b == 0:
            return [self.sqrt(c)]
        # x = b*y turns the equation into y^2 + y = delta
        delta = self.div(c, self.mul(b, b))
        if self.absolute_trace(delta) != 0:
            return []
        theta = self._trace_one
        y = 0
        partial = 0
        th = theta
        d = delta
        for _ in range(self.e):
            y = self.add(y, self.mul(partial, d))
            partial = self.add(partial, th)
            th = self.mul(th, th)
            d = self.mul(d, d)
        y1 = self.mul(b, y)
        y2 = self.mul(b, self.add(y, 1))
        return sorted({y1, y2})

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("zero has no multiplicative order")
        order = self.q - 1
        for r, _ in factorize(order):
            while order % r == 0 and self.power(a, order // r) == 1:
                order //= r
        return order

    # -- quadratic extension -------------------------------------------------

    @cached_property
    def quadratic_extension(self) -> tuple["FiniteField", tuple[int, ...]]:
        """``(E, embed)`` with ``E`` of size ``q**2`` and ``embed[a]`` the image
        of ``a`` under a fixed field embedding F_q -> E."""
        E = make_field(self.p, 2 * self.e)
        if self.e == 1:
            return E, tuple(range(self.q))
        f = self.modulus
        root = None
        for cand in range(E.q):
            acc = 0
            for coef in reversed(f):
                acc = E.add(E.mul(acc, cand), E.from_int(coef))
            if acc == 0:
                root = cand
                break
        assert root is not None
        powers = [1]
        for _ in range(self.e - 1):
            powers.append(E.mul(powers[-1], root))
        embed = []
        for v in range(self.q):
            acc = 0
            for d, pw in zip(self.coeffs(v), powers):
                if d:
                    acc = E.add(acc, E.mul(E.from_int(d), pw))
            embed.append(acc)
        return E, tuple(embed)


def _tonelli_shanks(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    s = 0
    t = p - 1
    while t % 2 == 0:
        t //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, r, u = s, pow(z, t, p), pow(a, (t + 1) // 2, p), pow(a, t, p)
    while u != 1:
        i = 1
        uu = u * u % p
        while uu != 1:
            uu = uu * uu % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        r = r * b % p
        u = u * c % p
    return r


class FieldElement:
    """An element of a :class:`FiniteField`; immutable and hashable."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.div(o, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.power(self.value, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.q, self.value))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __lt__(self, other: "FieldElement") -> bool:
        return self.value < other.value

    @property
    def coeffs(self) -> list[int]:
        return self.field.coeffs(self.value)

    def __repr__(self) -> str:
        if self.field.e == 1:
            return str(self.value)
        return f"{self.field!r}{self.coeffs}"


@lru_cache(maxsize=None)
def make_field(p: int, e: int = 1) -> FiniteField:
    """The field of ``p**e`` elements with the least irreducible modulus."""
    if e < 1:
        raise ValueError("extension degree must be positive")
    if p >= MAX_FIELD_SIZE or p**e > MAX_FIELD_SIZE:
        raise FieldOverflow(f"{p}^{e} exceeds the field size cap {MAX_FIELD_SIZE}")
    if not is_prime_64(p):
        raise NonPrimeCharacteristic(f"{p} is not prime")
    return FiniteField(p, e, least_irreducible(p, e))


def _as_value(F: FiniteField, a) -> int:
    return F(a).value


def sqrt_in_field(F: FiniteField, a) -> FieldElement | None:
    r = F.sqrt(_as_value(F, a))
    return None if r is None else FieldElement(F, r)


def solve_monic_quadratic(F: FiniteField, b, c) -> set[FieldElement]:
    return {FieldElement(F, r) for r in F.quadratic_roots(_as_value(F, b), _as_value(F, c))}


def multiplicative_order(F: FiniteField, a) -> int:
    return F.multiplicative_order(_as_value(F, a))
