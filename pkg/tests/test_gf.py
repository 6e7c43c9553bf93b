import itertools

import pytest
from hypothesis import given, strategies as st

from beauville.errors import FieldOverflow, NonPrimeCharacteristic, ZeroElement
from beauville.gf import (FieldElement, is_irreducible, least_irreducible, make_field, multiplicative_order,
                          solve_monic_quadratic, sqrt_in_field)
from oracles import field_mul, irreducible_by_trial, least_irreducible_by_trial

SMALL_Q = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (17, 1),
           (19, 1), (23, 1), (5, 2), (3, 3), (29, 1), (31, 1), (2, 5), (37, 1), (41, 1), (43, 1),
           (47, 1), (7, 2), (53, 1), (59, 1), (61, 1), (2, 6)]


def test_make_field_examples():
    assert make_field(7, 1).q == 7
    assert tuple(make_field(2, 3).modulus) == (1, 1, 0, 1)
    with pytest.raises(NonPrimeCharacteristic):
        make_field(4, 1)
    with pytest.raises(FieldOverflow):
        make_field(2, 21)


@pytest.mark.parametrize("p,e", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2), (2, 6), (3, 4)])
def test_modulus_is_least_irreducible(p, e):
    assert tuple(least_irreducible(p, e)) == least_irreducible_by_trial(p, e)
    assert tuple(make_field(p, e).modulus) == least_irreducible_by_trial(p, e)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rabin_matches_trial_factorisation(p):
    for e in range(1, 5):
        for low in itertools.product(range(p), repeat=e):
            f = list(low) + [1]
            assert is_irreducible(f, p) == irreducible_by_trial(f, p), f


@pytest.mark.parametrize("p,e", [pe for pe in SMALL_Q if pe[0] ** pe[1] <= 64])
def test_field_axioms_exhaustive(p, e):
    F = make_field(p, e)
    q = F.q
    assert len(list(F.elements())) == q
    for a in range(q):
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in range(q):
            assert F.mul(a, b) == F.mul(b, a)
            assert F.coeffs(F.mul(a, b)) == field_mul(F.coeffs(a), F.coeffs(b), list(F.modulus), p)
            assert F.coeffs(F.add(a, b)) == [(x + y) % p for x, y in zip(F.coeffs(a), F.coeffs(b))]


@given(st.sampled_from([(2, 13), (3, 8), (5, 5), (7, 4), (8191, 1), (13, 3)]), st.data())
def test_field_axioms_random(pe, data):
    F = make_field(*pe)
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    mul, add = F.mul, F.add
    assert mul(a, mul(b, c)) == mul(mul(a, b), c)
    assert add(a, add(b, c)) == add(add(a, b), c)
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    if a:
        assert mul(a, F.inv(a)) == 1


def test_sqrt_examples():
    F7 = make_field(7)
    assert sqrt_in_field(F7, 2) == F7(3)
    assert sqrt_in_field(F7, 3) is None
    for pe in [(7, 1), (2, 3), (3, 2)]:
        F = make_field(*pe)
        assert sqrt_in_field(F, 0) == F.zero


@pytest.mark.parametrize("p,e", [pe for pe in SMALL_Q + [(11, 2), (3, 4), (5, 3), (2, 7)] if pe[0] ** pe[1] <= 121])
def test_sqrt_exhaustive(p, e):
    F = make_field(p, e)
    squares = {}
    for a in range(F.q):
        squares.setdefault(F.mul(a, a), []).append(a)
    for a in range(F.q):
        r = F.sqrt(a)
        if a in squares:
            assert r is not None and F.mul(r, r) == a
            assert r == min(squares[a])
        else:
            assert r is None


def test_quadratic_examples():
    F7 = make_field(7)
    assert solve_monic_quadratic(F7, 0, -2) == {F7(3), F7(4)}
    F8 = make_field(2, 3)
    assert solve_monic_quadratic(F8, 1, 1) == set()
    for pe in [(7, 1), (2, 3), (3, 2)]:
        F = make_field(*pe)
        assert solve_monic_quadratic(F, 0, 0) == {F.zero}


@pytest.mark.parametrize("p,e", [pe for pe in SMALL_Q if pe[0] ** pe[1] <= 64])
def test_quadratic_exhaustive(p, e):
    F = make_field(p, e)
    for b in range(F.q):
        for c in range(F.q):
            brute = [x for x in range(F.q) if F.add(F.add(F.mul(x, x), F.mul(b, x)), c) == 0]
            assert F.quadratic_roots(b, c) == sorted(brute)


def test_multiplicative_order_examples():
    F7 = make_field(7)
    assert multiplicative_order(F7, 3) == 6
    assert multiplicative_order(F7, 1) == 1
    assert multiplicative_order(F7, 6) == 2
    with pytest.raises(ZeroElement):
        multiplicative_order(F7, 0)


@pytest.mark.parametrize("p,e", [(2, 4), (3, 3), (13, 1), (5, 2), (2, 6)])
def test_multiplicative_order_brute(p, e):
    F = make_field(p, e)
    for a in range(1, F.q):
        k, x = 1, a
        while x != 1:
            x = F.mul(x, a)
            k += 1
        assert F.multiplicative_order(a) == k
        assert (F.q - 1) % k == 0


@pytest.mark.parametrize("p,e", [(3, 1), (5, 1), (2, 2), (3, 2), (2, 3)])
def test_quadratic_extension_embedding(p, e):
    F = make_field(p, e)
    E, emb = F.quadratic_extension
    assert E.q == F.q**2
    assert len(set(emb)) == F.q
    for a in range(F.q):
        for b in range(F.q):
            assert emb[F.add(a, b)] == E.add(emb[a], emb[b])
            assert emb[F.mul(a, b)] == E.mul(emb[a], emb[b])


def test_element_operators():
    F = make_field(3, 2)
    a, b = F([1, 2]), F([2, 1])
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a ** (F.q - 1) == F.one
    assert -a + a == F.zero
    assert isinstance(a * 2, FieldElement)
    assert a.coeffs == [1, 2]


def test_large_field_builds():
    F = make_field(2, 20)
    assert F.q == 2**20
    x = F.generator
    assert F.multiplicative_order(x) == 2**20 - 1
