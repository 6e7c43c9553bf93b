import math

import pytest
from hypothesis import given, strategies as st

from beauville.errors import BadInput, NoneFound
from beauville.primes import crt_oriented, crt_target, hunt
from beauville.structures import is_unmixed_beauville
from oracles import is_prime_trial

coprime_pairs = st.tuples(st.integers(6, 60), st.integers(6, 60)).filter(lambda rs: math.gcd(*rs) == 1)


def test_crt_examples():
    assert crt_target(7, 11) == 43
    with pytest.raises(BadInput):
        crt_target(6, 10)
    with pytest.raises(BadInput):
        crt_target(5, 11)


@given(coprime_pairs)
def test_crt_target_is_the_unique_residue(rs):
    x, r, s, swapped = crt_oriented(*rs)
    assert s % 2 == 1 and (r, s) == (rs[::-1] if swapped else rs)
    hits = [y for y in range(2 * r * s) if y % (2 * r) == 1 and (y + 1) % s == 0]
    assert hits == [x]
    assert ((x - 1) // 2) % r == 0 and ((x + 1) // 2) % s == 0
    assert crt_oriented(r, s)[:3] == (x, r, s)


def test_hunt_single():
    res = hunt(7, 11, 1, 10**6)
    assert res.primes == [43]
    s = res.structures[0]
    assert s.types == ((7, 7, 7), (11, 11, 11))
    assert s.report.valid is True
    assert s.report.details["closure_sizes"] == [39732, 39732]


def test_hunt_three():
    res = hunt(7, 11, 3, 10**6)
    brute = [p for p in range(43, 10**4, 154) if is_prime_trial(p)][:3]
    assert res.primes == brute
    for p, s in zip(res.primes, res.structures):
        assert ((p - 1) // 2) % 7 == 0 and ((p + 1) // 2) % 11 == 0
        x1, y1, _ = s.T1.elements
        x2, y2, _ = s.T2.elements
        assert is_unmixed_beauville(s.group, x1, y1, x2, y2).valid
        assert s.types == ((7, 7, 7), (11, 11, 11))


def test_hunt_swaps_even_order():
    res = hunt(11, 8, 1)
    assert res.swapped and res.primes
    p = res.primes[0]
    assert ((p - 1) // 2) % 8 == 0 and ((p + 1) // 2) % 11 == 0
    assert res.structures[0].types == ((11, 11, 11), (8, 8, 8))


def test_hunt_errors():
    with pytest.raises(BadInput):
        hunt(6, 10)
    with pytest.raises(NoneFound):
        hunt(7, 11, 1, limit=0)


def test_hunt_json():
    js = hunt(7, 11, 1).to_json()
    assert js["x"] == 43 and js["modulus"] == 154
    assert js["primes"][0]["p"] == 43 and js["primes"][0]["verified"] is True
