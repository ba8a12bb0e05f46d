import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import divisor_count, naive_tau
from twistlab.errors import CoverageError, EmptyTableError, FormNotAvailable
from twistlab.hecke import (
    build_integer_coefficients,
    delta_coefficients,
    pentagonal_series,
    poly_mul_trunc,
    satake,
    verify_deligne,
    verify_hecke,
)

# tau(1..13), standard table values
TAU_13 = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944, -577738]


def test_tau_reference_values():
    assert delta_coefficients(13)[1:] == TAU_13


def test_matches_quadratic_eta_product():
    assert delta_coefficients(300) == naive_tau(300)


def test_pentagonal_series():
    # prod (1 - q^n) = 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
    s = pentagonal_series(16)
    expect = [0] * 16
    for i, c in {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1}.items():
        expect[i] = c
    assert s == expect


@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30),
       st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30),
       st.integers(1, 40))
@settings(max_examples=60, deadline=None)
def test_poly_mul_trunc_schoolbook(a, b, length):
    ref = [0] * length
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < length:
                ref[i + j] += x * y
    assert poly_mul_trunc(a, b, length) == ref


def test_normalization(eigen_small):
    for n in (1, 2, 3, 10, 997):
        assert eigen_small.normalized[n] == pytest.approx(eigen_small.raw[n] / n ** 5.5, rel=1e-15)
    assert eigen_small.lam(1) == 1.0


def test_errors():
    with pytest.raises(FormNotAvailable):
        build_integer_coefficients(14, 10)
    with pytest.raises(EmptyTableError):
        build_integer_coefficients(12, 0)
    t = build_integer_coefficients(12, 10)
    with pytest.raises(CoverageError):
        t.lam(11)


def test_prime_power_extension(eigen_small):
    # beyond the table, a(p^r) continues by the exact recursion
    big = build_integer_coefficients(12, 3 ** 9)
    for r in range(1, 10):
        assert eigen_small.raw_prime_power(3, r) == big.raw[3 ** r]
        assert eigen_small.lam_prime_power(3, r) == pytest.approx(big.normalized[3 ** r], rel=1e-14)


def test_hecke_small(eigen_small):
    assert verify_hecke(eigen_small) == []


def test_hecke_detects_corruption():
    t = build_integer_coefficients(12, 200)
    raw = list(t.raw)
    raw[6] += 1
    bad = type(t)(t.weight, t.limit, raw, t.normalized)
    kinds = {v.kind for v in verify_hecke(bad)}
    assert "multiplicativity" in kinds


@given(st.integers(2, 2000), st.integers(2, 2000))
@settings(max_examples=200, deadline=None)
def test_multiplicativity_property(eigen_small, m, n):
    if m * n <= eigen_small.limit and math.gcd(m, n) == 1:
        assert eigen_small.raw[m * n] == eigen_small.raw[m] * eigen_small.raw[n]


def test_deligne_against_trial_division(eigen_small):
    assert verify_deligne(eigen_small) == []
    for n in range(1, 300):
        assert abs(eigen_small.normalized[n]) <= divisor_count(n)


def test_satake(eigen_small):
    for p in (2, 3, 5, 7, 11, 43, 1999):
        s = satake(eigen_small, p)
        assert abs(abs(s.alpha) - 1) < 1e-12 and abs(abs(s.beta) - 1) < 1e-12
        assert abs(s.alpha + s.beta - eigen_small.lam(p)) < 1e-12
        # lambda(p^2) = alpha^2 + 1 + beta^2
        lam2 = eigen_small.lam_prime_power(p, 2)
        assert abs((s.alpha ** 2 + 1 + s.beta ** 2).real - lam2) < 1e-12
