"""The fields Q(sqrt(p^2 - 2 q^n)) and their order-n ideal class.

For distinct odd primes p, q and odd n >= 3 with p^2 < 2 q^n write
``p^2 - 2 q^n = -s^2 D`` with D squarefree.  The field discriminant is
``-4D``.  The prime above 2 is ramified and q splits, so the class of
``P * Q`` (P over 2, Q over q) has order dividing n; under the hypotheses
checked by ``check_hypotheses`` the order is exactly n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

from .classgroup import DEFAULT_TRUNCATION, element_order, group_structure
from .errors import DomainError, NotRepresentable, ScaleLimit
from .intcore import factor, is_perfect_power, is_perfect_square, is_prime, kronecker, squarefree_decompose
from .qform import Discriminant, QForm, compose, pow, prime_form, principal_form

DEFAULT_SEARCH_BOUND = 10**7


@dataclass(frozen=True)
class FieldSpec:
    p: int
    q: int
    n: int
    d: int
    s: int
    D: int
    delta: Discriminant

    @property
    def order_disc(self) -> int:
        """Discriminant 4d of the order Z[sqrt(d)]; equals delta.value when s = 1."""
        return 4 * self.d

    @property
    def label(self) -> str:
        return f"{self.p}^2-2*{self.q}^{self.n}"


@dataclass(frozen=True)
class HypothesisReport:
    size_ok: bool
    nonsquare_ok: bool
    cube_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.size_ok and self.nonsquare_ok and self.cube_ok


@dataclass(frozen=True)
class ObstructionCandidate:
    u: int
    v: int
    ell: int
    m: int
    t: int | None = None


@dataclass(frozen=True)
class ObstructionReport:
    """Result of searching for 2(p + s sqrt(-D)) = (u + v sqrt(-D))^ell.

    ``kind`` is "norm" when the norm equation already has no solution
    (ell != 3), otherwise "search".  ``norm_solutions`` lists every (u, v)
    with u^2 + D v^2 = 2 q^m; ``candidates`` keeps those that also match the
    real and imaginary parts.
    """

    kind: str
    ell: int
    m: int
    norm_solutions: tuple[tuple[int, int], ...] = ()
    candidates: tuple[ObstructionCandidate, ...] = ()
    searched: int = 0

    @property
    def obstructed(self) -> bool:
        return not self.candidates


def _validate(p: int, q: int, n: int) -> None:
    problems = []
    for name, x in (("p", p), ("q", q)):
        if x % 2 == 0 or not is_prime(x):
            problems.append(f"{name}={x} is not an odd prime")
    if p == q:
        problems.append("p and q must be distinct")
    if n < 3 or n % 2 == 0:
        problems.append(f"n={n} must be an odd integer >= 3")
    if problems:
        raise DomainError("; ".join(problems))


def check_hypotheses(p: int, q: int, n: int) -> HypothesisReport:
    _validate(p, q, n)
    gap = 2 * q**n - p * p
    size_ok = gap > 0
    nonsquare_ok = size_ok and not is_perfect_square(gap)
    cube_ok = n % 3 != 0 or 3 * q ** (n // 3) != p + 2
    return HypothesisReport(size_ok, nonsquare_ok, cube_ok)


def build_field_spec(p: int, q: int, n: int) -> FieldSpec:
    _validate(p, q, n)
    gap = 2 * q**n - p * p
    if gap <= 0:
        raise DomainError(f"p^2 < 2 q^n fails for (p, q, n) = ({p}, {q}, {n})")
    s, D = squarefree_decompose(gap)
    delta = Discriminant(-4 * D, True, 1) if D % 4 == 1 else Discriminant.of(-4 * D)
    return FieldSpec(p, q, n, -gap, s, D, delta)


def view_disc(spec: FieldSpec, view: str = "field") -> int:
    """Discriminant for a view: "field" is -4D, "order" is 4d = -4 s^2 D."""
    if view == "field":
        return spec.delta.value
    if view == "order":
        return spec.order_disc
    raise DomainError(f"unknown view {view!r}; expected 'field' or 'order'")


def ideal_class_A(spec: FieldSpec, view: str = "field") -> QForm:
    """Reduced form for the class of P * Q, with P over 2 and Q over q.

    In the "order" view the same ideals are taken in Z[sqrt(d)]; 2 and q
    are prime to its conductor s, so the prime forms stay invertible.
    """
    disc = view_disc(spec, view)
    if gcd(spec.q, 2 * spec.D * spec.s) != 1 or kronecker(disc, spec.q) != 1:
        raise NotRepresentable(f"{spec.q} does not split in Q(sqrt(-{spec.D}))")
    return compose(prime_form(disc, 2), prime_form(disc, spec.q))


@dataclass(frozen=True)
class OrderCheck:
    order: int
    matches: bool
    h: int
    form: QForm = field(compare=False)


def verify_order_n(
    spec: FieldSpec,
    *,
    h: int | None = None,
    enum_bound: int | None = None,
    truncation: int = DEFAULT_TRUNCATION,
    require_hypotheses: bool = True,
    view: str = "field",
) -> OrderCheck:
    """Order of the class of P * Q, and whether it equals n."""
    if require_hypotheses:
        hyp = check_hypotheses(spec.p, spec.q, spec.n)
        if not hyp.all_ok:
            raise DomainError(f"hypotheses fail for {spec.label}: {hyp}")
    if h is None:
        h = group_structure(view_disc(spec, view), enum_bound=enum_bound, truncation=truncation).h
    form = ideal_class_A(spec, view)
    order = element_order(form, h)
    return OrderCheck(order, order == spec.n, h, form)


def _norm_solutions(D: int, target: int, bound: int) -> tuple[list[tuple[int, int]], int]:
    vmax = isqrt(target // D)
    if vmax + 1 > bound:
        raise ScaleLimit(f"search over |v| <= {vmax} exceeds the bound {bound}")
    sols = []
    for v in range(vmax + 1):
        rest = target - D * v * v
        u = isqrt(rest)
        if u * u == rest:
            for uu in {u, -u}:
                for vv in {v, -v}:
                    sols.append((uu, vv))
    return sorted(sols), vmax + 1


def proposition_oracle(spec: FieldSpec, ell: int, *, search_bound: int = DEFAULT_SEARCH_BOUND) -> ObstructionReport:
    """Is 2(p + s sqrt(-D)) an ell-th power in Z[sqrt(-D)]?

    Taking norms gives 8 q^n = (u^2 + D v^2)^ell, solvable only for ell = 3;
    then every (u, v) on u^2 + D v^2 = 2 q^(n/3) is tested against the
    coordinates of (u + v sqrt(-D))^3 = 2p + 2s sqrt(-D).
    """
    if not is_prime(ell) or spec.n % ell:
        raise DomainError(f"{ell} is not a prime divisor of n={spec.n}")
    m = spec.n // ell
    if not is_perfect_power(8 * spec.q**spec.n, ell):
        return ObstructionReport("norm", ell, m)
    # Only ell = 3 reaches this point: 8 q^n is then (2 q^m)^3.
    p, s, D = spec.p, spec.s, spec.D
    sols, searched = _norm_solutions(D, 2 * spec.q**m, search_bound)
    cands = []
    for u, v in sols:
        if u**3 - 3 * u * v * v * D == 2 * p and 3 * u * u * v - v**3 * D == 2 * s:
            t = s // v if v and s % v == 0 else None
            cands.append(ObstructionCandidate(u, v, ell, m, t))
    return ObstructionReport("search", ell, m, tuple(sols), tuple(cands), searched)


def oracle_all_primes(spec: FieldSpec, **kw) -> list[ObstructionReport]:
    return [proposition_oracle(spec, ell, **kw) for ell, _ in factor(spec.n).factors]


def is_principal_power(spec: FieldSpec, view: str = "field") -> bool:
    """pow(class of P*Q, n) is principal; holds for every spec regardless of hypotheses."""
    return pow(ideal_class_A(spec, view), spec.n) == principal_form(view_disc(spec, view))
