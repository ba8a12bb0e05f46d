import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import trapezoid_mellin
from twistlab.weights import bump, derivative_bounds, mellin, parse_weight, verify_decay

W = bump(1, 2)


def test_bump_values():
    assert W(1.0) == 0.0 and W(2.0) == 0.0 and W(0.5) == 0.0
    assert W(1.5) == pytest.approx(math.exp(-4.0), rel=1e-15)
    x = np.linspace(1, 2, 101)
    assert np.all(W(x) >= 0) and np.all(W(x[1:-1]) > 0)


@given(st.floats(0.0, 3.0))
def test_bump_symmetric(x):
    assert W(x) == pytest.approx(W(3 - x), rel=1e-12, abs=1e-300)


def test_parse_weight():
    assert parse_weight("bump:1,2") == W
    assert parse_weight("bump") == W
    with pytest.raises(ValueError):
        parse_weight("gauss:1,2")
    with pytest.raises(ValueError):
        parse_weight("bump:2,1")


@pytest.mark.parametrize("s", [1, 0.5, 2, 1 + 3j, 0.5 + 50j])
def test_mellin_against_trapezoid(s):
    got = mellin(W, s).value
    ref = trapezoid_mellin(W, s)
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-3)


def test_mellin_positive_and_linear():
    assert mellin(W, 1).value.real > 0
    assert mellin(W.scaled(0), 1).value == 0
    assert mellin(W.scaled(3), 0.7).value == pytest.approx(3 * mellin(W, 0.7).value, rel=1e-13)


def test_conjugate_symmetry():
    a = mellin(W, 0.5 + 7j).value
    b = mellin(W, 0.5 - 7j).value
    assert a == pytest.approx(b.conjugate(), rel=1e-13)


def test_decay_at_half_line_example():
    # |value| (1+|s|)^4 at s = 1/2 + 50i sits below the sup on Re s = 1/2
    rep = verify_decay(W, 4, sigma_range=(0.5, 0.5), n_sigma=1, t_max=100)
    s = 0.5 + 50j
    assert abs(mellin(W, s).value) * (1 + abs(s)) ** 4 <= rep.sup


def test_decay_E0_is_max_modulus():
    rep = verify_decay(W, 0, t_max=20)
    assert math.isfinite(rep.sup)
    assert rep.sup == pytest.approx(abs(mellin(W, rep.argmax).value))


@pytest.mark.slow
def test_decay_E3_bounded_and_E4_stable():
    r3 = verify_decay(W, 3, t_max=100)
    assert math.isfinite(r3.sup) and r3.sup < 1e3
    r50 = verify_decay(W, 4, t_max=50)
    r100 = verify_decay(W, 4, t_max=100)
    assert r100.sup < 1.05 * r50.sup


def test_derivative_bounds_finite():
    b = derivative_bounds(W, 4)
    assert len(b) == 5 and all(math.isfinite(v) and v > 0 for v in b)
    assert b[0] == pytest.approx(math.exp(-4.0), rel=1e-6)
