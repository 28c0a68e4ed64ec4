import random
from math import gcd, isqrt

import pytest

from quadclass.errors import DomainError, NotRepresentable
from quadclass.qform import (
    Discriminant,
    QForm,
    compose,
    inverse,
    is_reduced,
    pow,
    prime_form,
    principal_form,
    reduce,
)


def reduced_forms(d):
    out = []
    for a in range(1, isqrt(-d // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (b < 0 and c == a) or gcd(gcd(a, b), c) != 1:
                continue
            out.append(QForm(a, b, c))
    return out


def discriminants(lo, hi):
    return [d for d in range(-lo, -hi - 1, -1) if d % 4 in (0, 1) and d != 0]


# -- ideal multiplication oracle ---------------------------------------------
# A form (a, b, c) is the ideal Z a + Z (-b + sqrt(d))/2.  Elements of the
# quadratic order are stored as (x, y) meaning (x + y sqrt(d)) / 2.


def _mul(u, v, d):
    (x1, y1), (x2, y2) = u, v
    return ((x1 * x2 + y1 * y2 * d) // 2, (x1 * y2 + x2 * y1) // 2)


def _hnf(vectors):
    """Basis (n, 0), (m, k) of the lattice spanned by integer pairs (u, v)."""
    vecs = [list(v) for v in vectors if any(v)]
    while sum(1 for v in vecs if v[1]) > 1:
        vecs.sort(key=lambda v: (v[1] == 0, abs(v[1])))
        piv = vecs[0]
        for v in vecs[1:]:
            if v[1]:
                q = v[1] // piv[1]
                v[0] -= q * piv[0]
                v[1] -= q * piv[1]
        vecs = [v for v in vecs if any(v)]
    top = next(v for v in vecs if v[1])
    n = 0
    for v in vecs:
        if v is not top:
            n = gcd(n, v[0])
    if top[1] < 0:
        top = [-top[0], -top[1]]
    return n, top[0] % n, top[1]


def ideal_product(f, g, d):
    sigma = d & 1
    basis = lambda h: [(2 * h.a, 0), (-h.b, 1)]  # noqa: E731
    prods = [_mul(u, v, d) for u in basis(f) for v in basis(g)]
    # (X + Y sqrt d)/2 = u + v w with w = (sigma + sqrt d)/2
    coords = [((X - Y * sigma) // 2, Y) for X, Y in prods]
    n, m, k = _hnf(coords)
    a = n // k
    b = -(2 * (m // k) + sigma)
    c = (b * b - d) // (4 * a)
    return reduce(QForm(a, b, c))


def test_composition_matches_ideal_multiplication():
    for d in discriminants(3, 1500):
        forms = reduced_forms(d)
        for f in forms[:12]:
            for g in forms[:12]:
                assert compose(f, g) == ideal_product(f, g, d), (d, f, g)


def test_known_compositions():
    f = QForm(2, 1, 3)
    assert compose(f, QForm(2, -1, 3)) == QForm(1, 1, 6)
    assert compose(f, f) == QForm(2, -1, 3)
    assert pow(f, 3) == principal_form(-23)
    assert reduce(QForm(3, -1, 2)) == f
    assert reduce(QForm(6, 1, 1)) == QForm(1, 1, 6)


def test_group_laws_exhaustive_small():
    for d in discriminants(3, 2000):
        forms = reduced_forms(d)
        e = principal_form(d)
        for f in forms:
            assert compose(f, e) == f and compose(e, f) == f
            assert compose(f, inverse(f)) == e
        sample = forms if len(forms) <= 12 else forms[:: len(forms) // 12 + 1]
        for f in sample:
            for g in sample:
                fg = compose(f, g)
                assert fg == compose(g, f)
                for h in sample:
                    assert compose(fg, h) == compose(f, compose(g, h))


def _random_form(d, rng):
    """A random primitive form of discriminant d, built from a random prime form product."""
    f = principal_form(d)
    for ell in range(2, 400):
        if rng.random() < 0.2:
            try:
                f = compose(f, pow(prime_form(d, ell), rng.randrange(1, 50)))
            except (NotRepresentable, DomainError):
                pass
    return f


def test_group_laws_random_large():
    rng = random.Random(7)
    checked = 0
    while checked < 10**4:
        d = -rng.randrange(10**6, 10**15)
        if d % 4 not in (0, 1):
            continue
        f, g, h = (_random_form(d, rng) for _ in range(3))
        e = principal_form(d)
        assert compose(compose(f, g), h) == compose(f, compose(g, h))
        assert compose(f, g) == compose(g, f)
        assert compose(f, e) == f
        assert compose(f, inverse(f)) == e
        checked += 1


def test_reduce_idempotent_and_reduced():
    rng = random.Random(8)
    for _ in range(5000):
        a = rng.randrange(1, 10**6)
        b = rng.randrange(-(10**6), 10**6)
        c = (b * b + rng.randrange(1, 10**6) * 4 * a) // (4 * a) + 1
        if b * b - 4 * a * c >= 0:
            continue
        r = reduce(QForm(a, b, c))
        assert is_reduced(r)
        assert reduce(r) == r
        assert r.discriminant == b * b - 4 * a * c


def test_pow_additive():
    rng = random.Random(9)
    for _ in range(500):
        d = -rng.randrange(10**4, 10**12)
        if d % 4 not in (0, 1):
            continue
        f = _random_form(d, rng)
        m, n = rng.randrange(-500, 500), rng.randrange(-500, 500)
        assert compose(pow(f, m), pow(f, n)) == pow(f, m + n)


def test_prime_forms():
    assert prime_form(-23, 2) == QForm(2, 1, 3)
    assert prime_form(-964, 2) == QForm(2, 2, 121)
    with pytest.raises(NotRepresentable):
        prime_form(-23, 5)


def test_validation():
    with pytest.raises(DomainError):
        QForm(1, 1, -1)
    with pytest.raises(DomainError):
        compose(QForm(2, 1, 3), QForm(1, 1, 6 + 1))
    with pytest.raises(DomainError):
        Discriminant.of(-5)


def test_discriminant_conductor():
    D = Discriminant.of(-1300)
    assert (D.fundamental, D.conductor, D.fundamental_part) == (False, 5, -52)
    assert Discriminant.of(-52).fundamental
