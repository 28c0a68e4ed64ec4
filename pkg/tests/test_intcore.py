import random
from math import prod

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quadclass.errors import DomainError
from quadclass.intcore import (
    factor,
    integer_root,
    is_perfect_power,
    is_perfect_square,
    is_prime,
    kronecker,
    primes_up_to,
    sqrt_mod_prime,
    squarefree_decompose,
)


def trial_division(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_sieve_matches_trial_division():
    primes = [int(x) for x in primes_up_to(10**4)]
    assert primes == [n for n in range(2, 10**4 + 1) if trial_division(n) == {n: 1}]


def test_is_prime_agrees_with_sieve_below_one_million():
    sieve = set(int(x) for x in primes_up_to(10**6))
    assert all(is_prime(n) == (n in sieve) for n in range(10**6 + 1))


def test_factor_matches_trial_division_up_to_one_million():
    for n in range(1, 10**6 + 1, 37):
        assert factor(n).as_dict() == trial_division(n)


def test_factor_random_large():
    rng = random.Random(1)
    for _ in range(60):
        n = rng.randrange(2, 10**24)
        f = factor(n)
        assert prod(p**e for p, e in f.factors) == n
        assert f.as_dict() == sympy.factorint(n)


def test_factor_known_values():
    assert str(factor(800)) == "2^5 * 5^2"
    assert factor(2839593).as_dict() == {3: 1, 29: 1, 127: 1, 257: 1}
    assert factor(4 * (2 * 17**13 - 49)).as_dict() == {2: 2, 3: 1, 5: 2, 211: 1, 1481: 1, 9109: 1, 92789: 1}


def test_factor_semiprime_of_two_large_primes():
    p, q = 1000000000039, 1000000000061
    assert factor(p * q).as_dict() == {p: 1, q: 1}


def test_is_prime_against_sympy_large():
    rng = random.Random(2)
    for _ in range(300):
        n = rng.randrange(10**20, 10**40) | 1
        assert is_prime(n) == sympy.isprime(n)
    # strong pseudoprimes to several small bases
    for n in (3215031751, 3825123056546413051, 318665857834031151167461):
        assert not is_prime(n)


def test_divisors():
    assert sorted(factor(12).divisors()) == [1, 2, 3, 4, 6, 12]


def test_squarefree_and_powers():
    assert squarefree_decompose(325) == (5, 13)
    assert squarefree_decompose(2 * 13**5 * 17**13 - 0) == (13**2 * 17**6, 2 * 13 * 17)
    assert is_perfect_square(10**40) and not is_perfect_square(10**40 + 1)
    assert integer_root(10**30 + 5, 3) == 10**10
    assert is_perfect_power(8 * 7**9, 3) and not is_perfect_power(8 * 7**10, 3)


def euler(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def test_kronecker_matches_euler_criterion():
    assert kronecker(-964, 17) == euler(-964, 17) == -1
    for p in [int(x) for x in primes_up_to(400)][1:]:
        for a in range(-50, 50):
            assert kronecker(a, p) == euler(a, p)


def test_kronecker_against_sympy():
    rng = random.Random(3)
    for _ in range(2000):
        a, n = rng.randrange(-(10**6), 10**6), rng.randrange(1, 10**6) | 1
        assert kronecker(a, n) == sympy.jacobi_symbol(a, n)


@settings(max_examples=300)
@given(st.integers(-(10**6), 10**6), st.integers(-(10**6), 10**6), st.integers(1, 10**5))
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@settings(max_examples=300)
@given(st.integers(-(10**6), 10**6), st.integers(1, 10**4), st.integers(1, 10**4))
def test_kronecker_multiplicative_in_bottom(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_kronecker_zero_zero():
    with pytest.raises(DomainError):
        kronecker(0, 0)


def test_sqrt_mod_prime():
    for p in (3, 5, 13, 17, 10007, 1000000007):
        for a in range(1, 60):
            if euler(a, p) == 1:
                r = sqrt_mod_prime(a, p)
                assert r * r % p == a % p
