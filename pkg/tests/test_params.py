import itertools
from fractions import Fraction

import pytest

from relaystream.params import (
    RegimeTag,
    UndefinedParameterError,
    ZeroRateError,
    classify,
    constraint_divisible,
    constraint_extended,
    constraint_sr2,
    constraint_sr2_sufficient,
    derive,
    infeasible_region,
    optimal_rate,
)


def test_derive_example_1():
    p = derive(3, 4, 12)
    assert (p.u, p.v, p.p, p.q, p.k, p.n) == (4, 3, 2, 1, 9, 13)
    assert p.rate == Fraction(9, 13)


@pytest.mark.parametrize("b", [1, 2, 3, 5, 8])
def test_derive_boundary(b):
    p = derive(b, b, 2 * b)
    assert (p.u, p.v, p.p, p.q) == (b, b, 1, 0)


def test_derive_q_prime_convention():
    # T - b2 = 4 = 2*2 + 0, but 0 < q' <= b1 forces p'=1, q'=2.
    p = derive(2, 3, 7)
    assert (p.p_prime, p.q_prime) == (1, 2)
    assert p.p_prime * p.b1 + p.q_prime == p.T - p.b2
    # Direct-division sweep of the convention.
    for b1, b2 in itertools.product(range(1, 7), repeat=2):
        for t in range(b1 + b2, 40):
            q = derive(b1, b2, t)
            assert 0 < q.q_prime <= b1
            assert q.p_prime * b1 + q.q_prime == t - b2
            assert 0 <= q.q < b2 and q.p >= 1
            assert q.p * b2 + q.q == t - b1


def test_derive_rejects_zero_rate():
    with pytest.raises(ZeroRateError):
        derive(3, 4, 6)


def test_optimal_rate_values():
    assert optimal_rate(3, 4, 12) == Fraction(9, 13)
    assert optimal_rate(4, 3, 12) == Fraction(9, 13)
    assert optimal_rate(5, 5, 9) == 0


def test_optimal_rate_matches_k_over_n():
    for b1, b2 in itertools.product(range(1, 7), repeat=2):
        for t in range(b1 + b2, 40):
            reg = classify(b1, b2, t)
            if reg.constructible:
                assert derive(b1, b2, t).rate == optimal_rate(b1, b2, t)


@pytest.mark.parametrize("triple,expect", [
    ((3, 4, 12), True),
    ((3, 4, 13), False),
    ((3, 4, 7), True),
])
def test_constraint_extended(triple, expect):
    assert constraint_extended(derive(*triple)) is expect


@pytest.mark.parametrize("triple,expect", [
    ((3, 4, 7), True),
    ((3, 4, 12), False),
    ((3, 4, 11), True),
])
def test_constraint_divisible(triple, expect):
    assert constraint_divisible(derive(*triple)) is expect


@pytest.mark.parametrize("triple,expect", [
    ((3, 4, 10), True),
    ((2, 3, 7), True),
    ((3, 4, 12), False),
])
def test_constraint_sr2(triple, expect):
    assert constraint_sr2(derive(*triple)) is expect


@pytest.mark.parametrize("triple,expect", [
    ((3, 4, 19), True),
    ((3, 4, 18), False),
    ((1, 2, 5), True),
])
def test_constraint_sr2_sufficient(triple, expect):
    assert constraint_sr2_sufficient(derive(*triple)) is expect


def test_sr2_sufficient_rejects_equal_bounds():
    with pytest.raises(UndefinedParameterError):
        constraint_sr2_sufficient(derive(3, 3, 10))


@pytest.mark.parametrize("triple,expect", [
    ((3, 4, 8), True),
    ((3, 4, 9), True),
    ((3, 4, 7), False),
])
def test_infeasible_region(triple, expect):
    assert infeasible_region(derive(*triple)) is expect


def test_classify_tags():
    assert classify(3, 4, 12).tag is RegimeTag.EXTENDED_PROFILE
    reg = classify(2, 3, 7)
    assert reg.tag is RegimeTag.SR2_PROFILE and not reg.extended
    assert classify(3, 4, 8).tag is RegimeTag.INFEASIBLE
    assert classify(3, 4, 5).tag is RegimeTag.UNKNOWN


def _sweep(b_hi=8, t_hi=64):
    for b1, b2 in itertools.product(range(1, b_hi + 1), repeat=2):
        for t in range(b1 + b2, t_hi + 1):
            yield derive(b1, b2, t)


def test_divisible_implies_extended():
    strict_witness = 0
    for p in _sweep():
        if constraint_divisible(p):
            assert constraint_extended(p), (p.b1, p.b2, p.T)
        elif constraint_extended(p):
            strict_witness += 1
    assert strict_witness > 0  # the relaxed constraint is strictly larger


def test_sufficient_implies_sr2():
    for p in _sweep():
        if p.b1 == p.b2:
            continue
        if constraint_sr2_sufficient(p):
            assert constraint_sr2(p), (p.b1, p.b2, p.T)


def test_infeasible_excludes_constructions():
    for p in _sweep():
        if infeasible_region(p):
            assert not constraint_extended(p), (p.b1, p.b2, p.T)
            assert not constraint_sr2(p), (p.b1, p.b2, p.T)


def test_rate_symmetry():
    for b1, b2 in itertools.product(range(1, 9), repeat=2):
        for t in range(2, 65):
            assert optimal_rate(b1, b2, t) == optimal_rate(b2, b1, t)
