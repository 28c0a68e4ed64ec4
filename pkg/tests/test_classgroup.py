import random
import time
from math import prod

import pytest

from quadclass.classgroup import (
    ClassGroupStructure,
    analytic_interval,
    class_number,
    class_number_bsgs,
    element_order,
    enumerate_reduced_forms,
    euler_product_estimate,
    group_structure,
    sylow_parts,
    two_rank,
)
from quadclass.errors import DomainError, InvalidExponent, ScaleLimit
from quadclass.intcore import factor
from quadclass.qform import Discriminant, QForm, pow, principal_form

from test_qform import discriminants, reduced_forms


def brute_structure(d):
    """Invariant factors from counting solutions of x^(ell^k) = 1 over all reduced forms."""
    forms = reduced_forms(d)
    h = len(forms)
    e = principal_form(d)
    per_prime = {}
    for ell, a in factor(h).factors if h > 1 else ():
        counts = [1]
        k = 0
        while counts[-1] < ell**a:
            k += 1
            counts.append(sum(1 for f in forms if pow(f, ell**k) == e))
        # counts[k] = ell^(sum_i min(e_i, k)); number of cyclic factors with e_i >= k
        logs = [0]
        for c in counts[1:]:
            t = 0
            while c > 1:
                c //= ell
                t += 1
            logs.append(t)
        ge = [logs[j] - logs[j - 1] for j in range(1, len(logs))]
        exps = []
        for j in range(len(ge)):
            nxt = ge[j + 1] if j + 1 < len(ge) else 0
            exps += [j + 1] * (ge[j] - nxt)
        per_prime[ell] = sorted(exps, reverse=True)
    rank = max((len(v) for v in per_prime.values()), default=0)
    inv = [1] * rank
    for ell, exps in per_prime.items():
        for i, x in enumerate(exps):
            inv[i] *= ell**x
    return tuple(inv)


def test_known_class_numbers():
    assert [class_number(d) for d in (-3, -4, -23)] == [1, 1, 3]
    heegner = [-3, -4, -7, -8, -11, -19, -43, -67, -163]
    assert all(class_number(d) == 1 for d in heegner)
    two = [-15, -20, -24, -35, -40, -51, -52, -88, -91, -115, -123, -148, -187, -232, -235, -267, -403, -427]
    assert all(class_number(d) == 2 for d in two)


def test_small_structures():
    assert group_structure(-23).invariant_factors == (3,)
    assert group_structure(-964).invariant_factors == (12,)
    assert group_structure(-1300).invariant_factors == (6, 2)
    assert group_structure(-52).h == 2
    assert group_structure(-3).invariant_factors == ()
    assert group_structure(-4).invariant_factors == ()


def test_structure_matches_brute_force():
    for d in discriminants(3, 3000):
        assert group_structure(d).invariant_factors == brute_structure(d), d


def test_enumeration_count_matches_reference_counter():
    for d in discriminants(3, 3000):
        assert class_number(d) == len(reduced_forms(d))
    assert [f.tuple() for f in enumerate_reduced_forms(-23)] == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]


def test_bsgs_matches_enumeration_on_random_discriminants():
    rng = random.Random(11)
    seen = 0
    while seen < 100:
        d = -rng.randrange(10**4, 10**7)
        if d % 4 not in (0, 1):
            continue
        bsgs = group_structure(d, method="bsgs")
        enum = group_structure(d, method="enumerate")
        assert bsgs.invariant_factors == enum.invariant_factors, d
        assert class_number_bsgs(d) == enum.h
        seen += 1


def test_bsgs_non_fundamental_and_row_one():
    assert class_number_bsgs(-1300) == 12
    g = group_structure(-11358372, method="bsgs")
    assert g.invariant_factors == (20, 10, 2, 2)
    assert group_structure(-11358372, method="enumerate") == g


def test_generators_have_invariant_factor_orders():
    for d in (-11358372, -1300, -3 * 10**6 - 4, -9999991, -4 * 3 * 5 * 7 * 11 * 13 * 17):
        g = group_structure(d)
        assert len(g.generators) == len(g.invariant_factors)
        for form, m in zip(g.generators, g.invariant_factors):
            assert element_order(form, g.h) == m


def test_chain_property_random():
    rng = random.Random(12)
    for _ in range(200):
        d = -rng.randrange(10**3, 10**9)
        if d % 4 not in (0, 1):
            continue
        g = group_structure(d)
        fac = g.invariant_factors
        assert prod(fac) == g.h
        assert all(a % b == 0 for a, b in zip(fac, fac[1:]))


def test_genus_two_rank():
    for d in discriminants(3, 20000):
        D = Discriminant.of(d)
        if not D.fundamental:
            continue
        g = group_structure(d)
        even = sum(1 for x in g.invariant_factors if x % 2 == 0)
        assert even == two_rank(d).two_rank == len(factor(-d).factors) - 1, d


def test_two_rank_requires_fundamental():
    with pytest.raises(DomainError):
        two_rank(-1300)


def test_analytic_interval_contains_h():
    for d in (-23, -964, -11358372, -9999991, -79236624263247300):
        lo, hi = analytic_interval(d)
        h = group_structure(d).h
        assert lo <= h <= hi
    est = euler_product_estimate(-11358372)
    assert 800 / 1.5 < est < 800 * 1.5


def test_element_order_rejects_non_multiple():
    with pytest.raises(InvalidExponent):
        element_order(QForm(2, 1, 3), 2)


def test_enumeration_bound_and_env(monkeypatch):
    with pytest.raises(ScaleLimit):
        class_number(-10**6 - 3, enum_bound=1000)
    monkeypatch.setenv("QUADCLASS_ENUM_BOUND", "100")
    with pytest.raises(ScaleLimit):
        group_structure(-1003, method="enumerate")
    monkeypatch.setenv("QUADCLASS_ENUM_BOUND", "nope")
    with pytest.raises(DomainError):
        class_number(-23)


def test_bsgs_scale_limit():
    with pytest.raises(ScaleLimit):
        group_structure(-(10**30) - 3, method="bsgs")


def test_structure_validation():
    with pytest.raises(DomainError):
        ClassGroupStructure(-23, 4, (3,))
    with pytest.raises(DomainError):
        ClassGroupStructure(-23, 6, (2, 3))


def test_sylow_parts():
    assert sylow_parts((20, 10, 2, 2), 2) == (2, 2, 2, 4)
    assert sylow_parts((20, 10, 2, 2), 5) == (5, 5)


@pytest.mark.slow
def test_large_row_structure():
    t = time.time()
    g = group_structure(4 * (7**2 - 2 * 17**13))
    assert g.invariant_factors == (1084512, 6, 2, 2, 2, 2)
    assert time.time() - t < 60
