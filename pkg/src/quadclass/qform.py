"""Positive definite binary quadratic forms and their class group law.

A form ``(a, b, c)`` stands for ``a x^2 + b x y + c y^2`` with discriminant
``b^2 - 4ac < 0``.  Every public operation returns reduced forms, so two
forms are in the same class exactly when they compare equal.

The hot loops elsewhere in the package call the tuple-level helpers
``_reduce`` / ``_compose`` / ``_pow`` directly to avoid object overhead.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Union

from .errors import DomainError, NotRepresentable
from .intcore import factor, is_prime, kronecker, sqrt_mod_prime


@dataclass(frozen=True)
class Discriminant:
    value: int
    fundamental: bool
    conductor: int

    @classmethod
    def of(cls, value: int) -> "Discriminant":
        if value >= 0:
            raise DomainError(f"discriminant must be negative, got {value}")
        if value % 4 not in (0, 1):
            raise DomainError(f"{value} is not 0 or 1 mod 4")
        # Strip square factors f^2 while the quotient stays a discriminant.
        f = 1
        for p, e in factor(-value).factors:
            k = e // 2
            while k:
                q = value // (f * p**k) ** 2
                if q % 4 in (0, 1):
                    break
                k -= 1
            f *= p**k
        return cls(value, f == 1, f)

    @property
    def fundamental_part(self) -> int:
        return self.value // self.conductor**2

    def __int__(self) -> int:
        return self.value


DiscLike = Union[Discriminant, int]


def _dval(disc: DiscLike) -> int:
    value = disc.value if isinstance(disc, Discriminant) else int(disc)
    if value >= 0 or value % 4 not in (0, 1):
        raise DomainError(f"{value} is not a negative discriminant")
    return value


@dataclass(frozen=True, order=True)
class QForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise DomainError(f"form {self.tuple()} is not positive definite")
        if self.b * self.b - 4 * self.a * self.c >= 0:
            raise DomainError(f"form {self.tuple()} has nonnegative discriminant")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _reduce(a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        if b > a or b <= -a:
            r = (a - b) // (2 * a)
            c += r * (b + a * r)
            b += 2 * a * r
        if a > c:
            a, b, c = c, -b, a
            continue
        if b < 0 and (a == c or b == -a):
            b = -b
        return a, b, c


def _compose(f: tuple[int, int, int], g: tuple[int, int, int], disc: int) -> tuple[int, int, int]:
    # Shanks' arrangement of Gauss composition (Cohen, Alg. 5.4.7), then reduce.
    a1, b1, c1 = f
    a2, b2, c2 = g
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1 = 0
        d = a1
    else:
        d, y1, _ = _xgcd(a2, a1)
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return _reduce(a3, b3, c3)


def _inverse(f: tuple[int, int, int]) -> tuple[int, int, int]:
    a, b, c = f
    if b == 0 or b == a or a == c:
        return f
    return (a, -b, c)


def _identity(disc: int) -> tuple[int, int, int]:
    k = disc & 1
    return (1, k, (k - disc) // 4)


def _pow(f: tuple[int, int, int], k: int, disc: int) -> tuple[int, int, int]:
    if k < 0:
        f, k = _inverse(f), -k
    result = _identity(disc)
    base = f
    while k:
        if k & 1:
            result = _compose(result, base, disc)
        k >>= 1
        if k:
            base = _compose(base, base, disc)
    return result


def _wrap(t: tuple[int, int, int]) -> QForm:
    return QForm(*t)


def _check_form(f: QForm) -> None:
    if not f.is_primitive():
        raise DomainError(f"form {f} is not primitive")


def principal_form(disc: DiscLike) -> QForm:
    return _wrap(_identity(_dval(disc)))


def is_reduced(f: QForm) -> bool:
    a, b, c = f.tuple()
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def reduce(f: QForm) -> QForm:
    return _wrap(_reduce(f.a, f.b, f.c))


def compose(f: QForm, g: QForm) -> QForm:
    disc = f.discriminant
    if g.discriminant != disc:
        raise DomainError(f"cannot compose {f} and {g}: discriminants {disc} and {g.discriminant}")
    _check_form(f)
    _check_form(g)
    return _wrap(_compose(f.tuple(), g.tuple(), disc))


def inverse(f: QForm) -> QForm:
    return _wrap(_reduce(f.a, -f.b, f.c))


def pow(f: QForm, k: int) -> QForm:  # noqa: A001 - mirrors the group-theoretic name
    """k-th power of the class of f by square-and-multiply; negative k inverts."""
    _check_form(f)
    return _wrap(_pow(_reduce(*f.tuple()), k, f.discriminant))


def prime_form(disc: DiscLike, ell: int) -> QForm:
    """The reduced form of a prime ideal of norm ell.

    The middle coefficient is taken as the root b of ``b^2 = disc (mod 4 ell)``
    with ``0 <= b <= ell`` before reduction; the other root gives the
    inverse class.
    """
    d = _dval(disc)
    if not is_prime(ell):
        raise DomainError(f"{ell} is not prime")
    if kronecker(d, ell) == -1:
        raise NotRepresentable(f"{ell} is inert for discriminant {d}")
    if ell == 2:
        b = next(b for b in (0, 1, 2) if (b * b - d) % 8 == 0)
    else:
        r = sqrt_mod_prime(d, ell)
        if r == 0:
            b = 0 if d % 2 == 0 else ell
        else:
            b = r if (r - d) % 2 == 0 else ell - r
    c = (b * b - d) // (4 * ell)
    if gcd(gcd(ell, b), c) != 1:
        raise DomainError(f"{ell} divides the conductor of {d}; no primitive prime form")
    return _wrap(_reduce(ell, b, c))
