import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_moment, naive_twisted_sum
from twistlab.characters import sieve_fundamental
from twistlab.errors import CoverageError
from twistlab.hecke import build_integer_coefficients
from twistlab.moments import (
    envelope_exponent,
    holder_check,
    moment,
    moment_S,
    moment_T,
    scaling_scan,
    support_range,
    twisted_sum,
    twisted_sums,
)
from twistlab.weights import bump

W = bump(1, 2)


def test_support_range_open_interval():
    assert support_range(3, W) == (4, 5)
    assert support_range(0.4, W) == (1, 0)  # empty: no integer in (0.4, 0.8)


def test_twisted_sum_two_terms(eigen_small):
    lam = eigen_small.normalized
    expect = lam[4] * W(4 / 3) + lam[5] * W(5 / 3)
    got = twisted_sum(1, 3, eigen_small, W)
    assert got.terms_used == 2
    assert got.value == pytest.approx(expect, rel=1e-15)


def test_twisted_sum_empty_support(eigen_small):
    assert twisted_sum(5, 0.4, eigen_small, W).value == 0.0


def test_twisted_sum_independent_of_table_length(eigen_small):
    short = build_integer_coefficients(12, 40)
    for d in (1, 5, 8, 12, 13):
        assert twisted_sum(d, 20, short, W).value == twisted_sum(d, 20, eigen_small, W).value


def test_coverage_error():
    short = build_integer_coefficients(12, 10)
    with pytest.raises(CoverageError):
        moment_T(100, 10, 2, short, W)


@given(st.integers(1, 3000), st.floats(1.0, 60.0))
@settings(max_examples=100, deadline=None)
def test_twisted_sum_vs_oracle(eigen_small, d, Y):
    got = twisted_sum(d, Y, eigen_small, W).value
    ref = naive_twisted_sum(d, Y, eigen_small.normalized, W)
    n0, n1 = support_range(Y, W)
    scale = sum(abs(eigen_small.normalized[n]) for n in range(n0, n1 + 1)) or 1.0
    assert abs(got - ref) <= 1e-13 * scale


@pytest.mark.parametrize("family", ["fundamental", "odd-squarefree"])
@pytest.mark.parametrize("kind", ["T", "S", "T-sharp"])
def test_moment_vs_double_loop(eigen_small, kind, family):
    for X, Y, m in [(30, 3, 2), (30, 5, 2), (50, 10, 4), (50, 7.5, 3), (47, 9, 1)]:
        got = moment(kind, X, Y, m, eigen_small, W, family).moment
        ref = naive_moment(kind, X, Y, m, eigen_small.normalized, W, family)
        assert got == pytest.approx(ref, rel=1e-12)


def test_m_zero_counts_discriminants(eigen_small):
    r = moment_T(1000, 10, 0, eigen_small, W)
    assert r.moment == r.discriminant_count == sieve_fundamental(1000).count


def test_empty_support_gives_zero(eigen_small):
    assert moment_S(100, 0.4, 2, W).moment == 0.0
    assert moment_T(100, 0.4, 2, eigen_small, W).moment == 0.0


def test_thread_count_does_not_change_bits():
    eigen = build_integer_coefficients(12, 200)
    tops = sieve_fundamental(10**5).tops
    assert len(tops) > 16384  # more than one chunk
    n0, n1 = support_range(60, W)
    c = eigen.normalized[n0 : n1 + 1] * W(np.arange(n0, n1 + 1) / 60)
    a = twisted_sums(tops, n0, c, threads=1)
    b = twisted_sums(tops, n0, c, threads=4)
    assert a.tobytes() == b.tobytes()


def test_envelope_exponents():
    assert envelope_exponent("T", 4) == 2
    assert envelope_exponent("S", 4) == 6
    assert envelope_exponent("T-sharp", 4) == 4


def test_scan_rows_and_stability(eigen_small):
    single = scaling_scan(4, [2000], 0.4, eigen_small, W)
    assert len(single) == 1
    rows = scaling_scan(4, [10**4, 2 * 10**4, 4 * 10**4], 0.4, eigen_small, W)
    ratios = [r.ratio for r in rows]
    assert all(math.isfinite(r) and r > 0 for r in ratios)
    assert max(ratios) / min(ratios) < 2


def test_holder_small_instance(eigen_small):
    h = holder_check(1000, 100, 4, 0.3, eigen_small, W)
    assert h.slack >= 0 and 0 <= h.relative_slack <= 1


def test_holder_degenerate_all_zero(eigen_small):
    h = holder_check(1000, 0.2, 4, 0.9, eigen_small, W)  # both supports empty
    assert h.H1 == h.H2 == h.Tm == 0.0 and h.slack == 0.0


def test_holder_homogeneity(eigen_small):
    c = 2.5
    a = holder_check(1000, 100, 4, 0.3, eigen_small, W)
    b = holder_check(1000, 100, 4, 0.3, eigen_small, W.scaled(c))
    assert b.H2 == pytest.approx(c ** 4 * a.H2, rel=1e-12)
    assert b.slack >= 0


def test_holder_rejects_odd_m(eigen_small):
    with pytest.raises(ValueError):
        holder_check(100, 10, 3, 0.3, eigen_small, W)
