import pytest
from hypothesis import given, strategies as st

from beauville.arith import divisors, factorize, is_prime_64, prime_power
from oracles import is_prime_trial


def test_is_prime_matches_trial_division_below_1e6():
    import numpy as np

    sieve = np.ones(10**6 + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, 1001):
        if sieve[i]:
            sieve[i * i::i] = False
    mismatches = [n for n in range(10**6 + 1) if is_prime_64(n) != sieve[n]]
    assert mismatches == []


@given(st.integers(0, 10**7))
def test_is_prime_trial_oracle(n):
    assert is_prime_64(n) == is_prime_trial(n)


def test_is_prime_edge_cases():
    assert is_prime_64(43)
    assert not is_prime_64(1)
    assert not is_prime_64(0)
    assert is_prime_64(2**61 - 1)
    assert is_prime_64(18446744073709551557)  # largest prime below 2^64
    assert not is_prime_64(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    with pytest.raises(ValueError):
        is_prime_64(2**64)
    with pytest.raises(ValueError):
        is_prime_64(-1)


@given(st.integers(1, 10**6))
def test_factorize_roundtrip(n):
    prod = 1
    for p, e in factorize(n):
        assert is_prime_trial(p)
        prod *= p**e
    assert prod == n
    assert divisors(n) == [d for d in range(1, n + 1) if n % d == 0] if n < 2000 else True


def test_prime_power():
    assert prime_power(8) == (2, 3)
    assert prime_power(49) == (7, 2)
    assert prime_power(7) == (7, 1)
    assert prime_power(6) is None
    assert prime_power(1) is None
