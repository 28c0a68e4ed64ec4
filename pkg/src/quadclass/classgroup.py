"""Class numbers and class group structure for negative discriminants.

Two independent routes to the class number are provided:

* ``class_number`` counts reduced forms directly (exact, O(|disc|)).
* ``class_number_bsgs`` estimates h from a truncated Euler product for
  L(1, chi) and pins it down by baby-step giant-step: the subgroup generated
  by prime forms is grown until exactly one multiple of its order remains in
  the interval ``[h_est / r, h_est * r]`` (``r = sqrt(2)`` by default).

``group_structure`` uses the same subgroup builder to return invariant
factors with witness generators.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np

from .abelian import PGroup
from .errors import CertificationFailure, DomainError, InvalidExponent, ScaleLimit
from .intcore import factor, kronecker, primes_up_to, sqrt_mod_prime
from .qform import (
    DiscLike,
    Discriminant,
    QForm,
    _compose,
    _dval,
    _identity,
    _inverse,
    _pow,
    _reduce,
    principal_form,
)

DEFAULT_ENUM_BOUND = 10**9
DEFAULT_TRUNCATION = 10**6
INTERVAL_FACTOR = math.sqrt(2)
# "auto" counts forms directly up to this |disc| and switches to BSGS above it.
AUTO_ENUM_LIMIT = 2 * 10**7
# BSGS tables grow like |disc|^(1/4); past this they no longer fit a desk machine.
MAX_BSGS_DISC = 10**24


def enum_bound_from_env(default: int = DEFAULT_ENUM_BOUND) -> int:
    raw = os.environ.get("QUADCLASS_ENUM_BOUND")
    if not raw:
        return default
    try:
        value = int(float(raw)) if "e" in raw.lower() else int(raw)
    except ValueError:
        raise DomainError(f"QUADCLASS_ENUM_BOUND={raw!r} is not an integer") from None
    if value <= 0:
        raise DomainError("QUADCLASS_ENUM_BOUND must be positive")
    return value


@dataclass(frozen=True)
class ClassGroupStructure:
    discriminant: int
    h: int
    invariant_factors: tuple[int, ...]
    generators: tuple[QForm, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if math.prod(self.invariant_factors) != self.h:
            raise DomainError(f"invariant factors {self.invariant_factors} do not multiply to h={self.h}")
        for big, small in zip(self.invariant_factors, self.invariant_factors[1:]):
            if big % small:
                raise DomainError(f"{self.invariant_factors} is not a divisibility chain")

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


@dataclass(frozen=True)
class GenusInfo:
    ramified_prime_count: int
    two_rank: int


# -- enumeration -----------------------------------------------------------


def _reduced_tuples(d: int) -> list[tuple[int, int, int]]:
    if -d > 6 * 10**18:
        raise ScaleLimit(f"|disc|={-d} exceeds the 64-bit enumeration range")
    out = []
    amax = isqrt(-d // 3)
    parity = d & 1
    a0 = 1
    while a0 <= amax:
        # Blocks of a-values against every admissible b, about 10^6 cells each.
        a1 = min(amax, a0 + max(1, 10**6 // (2 * amax + 1)) - 1)
        a = np.arange(a0, a1 + 1, dtype=np.int64)[:, None]
        start = -a1 + 1
        if (start - parity) % 2:
            start += 1
        b = np.arange(start, a1 + 1, 2, dtype=np.int64)[None, :]
        num = b * b - d
        ok = (b > -a) & (b <= a) & (num % (4 * a) == 0)
        ia, ib = np.nonzero(ok)
        a0 = a1 + 1
        if ia.size == 0:
            continue
        av = a[ia, 0]
        bv = b[0, ib]
        cv = num[0, ib] // (4 * av)
        keep = (cv >= av) & ~((bv < 0) & (cv == av))
        keep &= np.gcd(np.gcd(bv, av), cv) == 1
        out.extend(zip(av[keep].tolist(), bv[keep].tolist(), cv[keep].tolist()))
    return out


def enumerate_reduced_forms(disc: DiscLike, enum_bound: int | None = None) -> list[QForm]:
    """All primitive reduced forms of the discriminant, ordered by (a, b)."""
    d = _dval(disc)
    bound = enum_bound if enum_bound is not None else enum_bound_from_env()
    if -d > bound:
        raise ScaleLimit(f"|disc|={-d} exceeds the enumeration bound {bound}")
    return [QForm(*t) for t in _reduced_tuples(d)]


def class_number(disc: DiscLike, enum_bound: int | None = None) -> int:
    d = _dval(disc)
    bound = enum_bound if enum_bound is not None else enum_bound_from_env()
    if -d > bound:
        raise ScaleLimit(f"|disc|={-d} exceeds the enumeration bound {bound}")
    return len(_reduced_tuples(d))


# -- analytic estimate -----------------------------------------------------


def _unit_count(d: int) -> int:
    return {-3: 6, -4: 4}.get(d, 2)


def _legendre_vec(d: int, primes: np.ndarray) -> np.ndarray:
    """Legendre symbols (d | p) for odd primes p via vectorized Euler criterion."""
    base = np.array([d % int(p) for p in primes], dtype=np.int64)
    ramified = base == 0
    exp = (primes - 1) // 2
    result = np.ones_like(base)
    while exp.any():
        odd = (exp & 1).astype(bool)
        result[odd] = result[odd] * base[odd] % primes[odd]
        base = base * base % primes
        exp >>= 1
    result[result == primes - 1] = -1
    result[ramified] = 0
    return result


def euler_product_estimate(disc: DiscLike, truncation: int = DEFAULT_TRUNCATION) -> float:
    """w sqrt|disc| / (2 pi) times the Euler product for L(1, chi) over p <= truncation."""
    d = _dval(disc)
    if not 2 <= truncation <= 10**8:
        raise DomainError(f"truncation bound {truncation} outside [2, 1e8]")
    primes = primes_up_to(truncation)
    odd = primes[1:]
    chi = _legendre_vec(d, odd)
    log_l = -np.log1p(-chi / odd.astype(float)).sum()
    log_l -= math.log1p(-kronecker(d, 2) / 2)
    return _unit_count(d) * math.sqrt(-d) / (2 * math.pi) * math.exp(log_l)


def analytic_interval(disc: DiscLike, truncation: int = DEFAULT_TRUNCATION, factor_: float = INTERVAL_FACTOR):
    est = euler_product_estimate(disc, truncation)
    return max(1, math.ceil(est / factor_)), math.floor(est * factor_)


# -- orders and BSGS -------------------------------------------------------


def _order_from_multiple(g, multiple: int, d: int) -> int:
    one = _identity(d)
    n = multiple
    for ell, e in factor(multiple).factors:
        for _ in range(e):
            if _pow(g, n // ell, d) == one:
                n //= ell
            else:
                break
    return n


def _bsgs_annihilator(y, kmin: int, kmax: int, d: int) -> int | None:
    """Some k >= kmin with y**k = 1, searching k in [kmin, kmax]."""
    one = _identity(d)
    width = kmax - kmin + 1
    m = isqrt(width - 1) + 1
    baby = {}
    x = one
    yinv = _inverse(y)
    for j in range(m):
        baby.setdefault(x, j)
        x = _compose(x, yinv, d)
    step = _pow(y, m, d)
    z = _pow(y, kmin, d)
    i = 0
    while kmin + i * m <= kmax:
        j = baby.get(z)
        if j is not None:
            return kmin + i * m + j
        z = _compose(z, step, d)
        i += 1
    return None


def element_order(f: QForm, h: int) -> int:
    """Exact order of the class of f, given any multiple h of it."""
    if h < 1:
        raise InvalidExponent(f"exponent must be positive, got {h}")
    d = f.discriminant
    g = _reduce(*f.tuple())
    if _pow(g, h, d) != _identity(d):
        raise InvalidExponent(f"{f} raised to {h} is not principal")
    return _order_from_multiple(g, h, d)


def _prime_forms(d: int, conductor: int, limit: int):
    for ell in primes_up_to(limit):
        ell = int(ell)
        if conductor % ell == 0 or kronecker(d, ell) == -1:
            continue
        if ell == 2:
            b = next(b for b in (0, 1, 2) if (b * b - d) % 8 == 0)
        else:
            r = sqrt_mod_prime(d, ell)
            b = (0 if d % 2 == 0 else ell) if r == 0 else (r if (r - d) % 2 == 0 else ell - r)
        yield ell, _reduce(ell, b, (b * b - d) // (4 * ell))


def _prime_form_limit(d: int) -> int:
    # Comfortably above the GRH generation bound 6 log^2 |d|.
    return max(1000, int(24 * math.log(-d) ** 2))


class _SubgroupBuilder:
    def __init__(self, d: int):
        self.d = d
        self.groups: dict[int, PGroup] = {}

    @property
    def order(self) -> int:
        return math.prod(g.order for g in self.groups.values())

    def add(self, g, n: int, hf: dict[int, int]) -> None:
        for ell, e in factor(n).factors:
            grp = self.groups.setdefault(ell, PGroup(ell, self.d))
            if hf and grp.order == ell ** hf.get(ell, 0):
                continue
            grp.add(_pow(g, n // ell**e, self.d), e)

    def structure(self) -> tuple[list[int], list[tuple[int, int, int]]]:
        columns = []
        for ell in sorted(self.groups):
            col = self.groups[ell].basis
            columns.append([(ell**e, g) for g, e in col])
        t = max((len(c) for c in columns), default=0)
        factors, gens = [], []
        for i in range(t):
            f, g = 1, _identity(self.d)
            for col in columns:
                if i < len(col):
                    f *= col[i][0]
                    g = _compose(g, col[i][1], self.d)
            factors.append(f)
            gens.append(g)
        return factors, gens


def _build(d: int, conductor: int, h: int | None, interval, want_structure: bool) -> _SubgroupBuilder | int:
    """Grow the subgroup generated by prime forms until its order is the class number."""
    b = _SubgroupBuilder(d)
    one = _identity(d)
    lo, hi = interval if interval else (h, h)
    hf = factor(h).as_dict() if h else {}
    limit = _prime_form_limit(d)
    for ell, g in _prime_forms(d, conductor, limit):
        if h is not None and b.order == h:
            break
        if g == one:
            continue
        if h is not None:
            n = _order_from_multiple(g, h, d)
        else:
            B = b.order
            k = _bsgs_annihilator(_pow(g, B, d), -(-lo // B), hi // B, d)
            if k is None:
                raise CertificationFailure(
                    f"no multiple of the subgroup order {B} in [{lo}, {hi}] kills the form over {ell}"
                )
            n = _order_from_multiple(g, B * k, d)
        b.add(g, n, hf)
        if h is None:
            B = b.order
            kmin, kmax = -(-lo // B), hi // B
            if kmin > kmax:
                raise CertificationFailure(f"subgroup order {B} has no multiple in [{lo}, {hi}]")
            if kmin == kmax:
                h = B * kmin
                hf = factor(h).as_dict()
                if not want_structure:
                    return h
    if h is None or b.order != h:
        raise CertificationFailure(f"prime forms up to {limit} did not generate a group of order in [{lo}, {hi}]")
    return b if want_structure else h


def _check_bsgs_scale(d: int) -> None:
    if -d > MAX_BSGS_DISC:
        raise ScaleLimit(f"|disc|={-d} exceeds the BSGS limit {MAX_BSGS_DISC:.0e}")


def class_number_bsgs(disc: DiscLike, truncation: int = DEFAULT_TRUNCATION) -> int:
    d = _dval(disc)
    _check_bsgs_scale(d)
    if d in (-3, -4):
        return 1
    D = disc if isinstance(disc, Discriminant) else Discriminant.of(d)
    return _build(d, D.conductor, None, analytic_interval(d, truncation), want_structure=False)


@lru_cache(maxsize=256)
def _structure_cached(d: int, method: str, enum_bound: int, truncation: int) -> ClassGroupStructure:
    if method not in ("auto", "bsgs", "enumerate"):
        raise DomainError(f"unknown method {method!r}")
    use_enum = method == "enumerate" or (method == "auto" and -d <= min(enum_bound, AUTO_ENUM_LIMIT))
    if not use_enum:
        _check_bsgs_scale(d)
    D = Discriminant.of(d)
    if use_enum:
        h = class_number(d, enum_bound)
        if h == 1:
            return ClassGroupStructure(d, 1, (), ())
        b = _build(d, D.conductor, h, None, want_structure=True)
    else:
        if d in (-3, -4):
            return ClassGroupStructure(d, 1, (), ())
        b = _build(d, D.conductor, None, analytic_interval(d, truncation), want_structure=True)
    factors, gens = b.structure()
    return ClassGroupStructure(d, b.order, tuple(factors), tuple(QForm(*g) for g in gens))


def group_structure(
    disc: DiscLike,
    *,
    method: str = "auto",
    enum_bound: int | None = None,
    truncation: int = DEFAULT_TRUNCATION,
) -> ClassGroupStructure:
    """Invariant factors (largest first) and generators of the form class group.

    ``method`` is "enumerate" (class number by counting reduced forms),
    "bsgs" (analytic interval plus BSGS) or "auto" (counting for small
    discriminants).
    """
    d = _dval(disc)
    bound = enum_bound if enum_bound is not None else enum_bound_from_env()
    return _structure_cached(d, method, bound, truncation)


def two_rank(disc: DiscLike) -> GenusInfo:
    d = _dval(disc)
    D = disc if isinstance(disc, Discriminant) else Discriminant.of(d)
    if not D.fundamental:
        raise DomainError(f"{d} is not a fundamental discriminant")
    r = len(factor(-d).factors)
    return GenusInfo(r, r - 1)


def sylow_parts(structure, ell: int) -> tuple[int, ...]:
    """ell-parts (> 1) of each invariant factor, ascending."""
    factors = structure.invariant_factors if isinstance(structure, ClassGroupStructure) else structure
    parts = []
    for h in factors:
        q = 1
        while h % ell == 0:
            h //= ell
            q *= ell
        if q > 1:
            parts.append(q)
    return tuple(sorted(parts))


__all__ = [
    "ClassGroupStructure",
    "GenusInfo",
    "analytic_interval",
    "class_number",
    "class_number_bsgs",
    "element_order",
    "enumerate_reduced_forms",
    "euler_product_estimate",
    "group_structure",
    "principal_form",
    "sylow_parts",
    "two_rank",
]
