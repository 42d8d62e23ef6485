import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zdaction.laurent import LaurentPoly, evaluate, exp_norm, exp_vector, monomial_mul, shell_order
from zdaction.reals import Interval, imax, imin

from conftest import stock

fracs = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
pos = st.fractions(min_value=Fraction(1, 10**4), max_value=10**4, max_denominator=10**6)


def iv(a, b):
    return Interval(min(a, b), max(a, b))


@given(fracs, fracs, fracs, fracs, st.sampled_from(["+", "-", "*"]))
def test_interval_ops_enclose_every_pointwise_result(a, b, c, d, op):
    x, y = iv(a, b), iv(c, d)
    z = {"+": x + y, "-": x - y, "*": x * y}[op]
    for p in (x.lo, x.hi, x.mid):
        for q in (y.lo, y.hi, y.mid):
            assert z.contains({"+": p + q, "-": p - q, "*": p * q}[op])


@given(pos, pos)
def test_division_encloses(a, b):
    x, y = iv(a, 2 * a), iv(b, b + 1)
    z = x / y
    assert z.contains(a / b) and z.contains(2 * a / (b + 1))


@given(pos)
def test_log_exp_enclose_float_values(a):
    x = Interval(a)
    lg = x.log(96)
    assert lg.width < Fraction(1, 2**80)
    assert abs(float(lg) - math.log(a)) < 1e-12 * max(1, abs(math.log(a)))
    e = lg.exp(96)
    assert e.contains(a)


@given(st.fractions(min_value=0, max_value=10**6, max_denominator=1000))
def test_sqrt_encloses(a):
    r = Interval(a).sqrt(80)
    assert r.lo * r.lo <= a <= r.hi * r.hi
    assert r.width < Fraction(1, 2**70) * (1 + r.hi)


@given(fracs, fracs, st.integers(min_value=8, max_value=200))
def test_rounding_is_outward(a, b, prec):
    x = iv(a, b)
    assert x.rounded(prec).contains(x)


def test_certified_comparisons():
    x = Interval(1, 2)
    assert x.certainly_lt(3) and x.certainly_gt(0)
    assert not x.certainly_lt(2) and x.certainly_le(2)
    assert not x.certainly_gt(Interval(Fraction(3, 2), 5))
    assert imax([x, Interval(0, 3)]) == Interval(1, 3)
    assert imin([x, Interval(0, 3)]) == Interval(0, 2)


def test_render_rounds_outward():
    x = Interval(2).log(128)
    lo, hi = x.render().strip("[]").split(", ")
    assert Fraction(lo) <= x.lo and Fraction(hi) >= x.hi
    assert Interval(Fraction(1, 3)).render() == "1/3"


def test_log_rejects_nonpositive():
    with pytest.raises(ValueError):
        Interval(-1, 1).log()
    with pytest.raises(ValueError):
        Interval(2, 1)


def test_shell_order_is_complete_and_sorted():
    pts = shell_order(2, 3)
    brute = sorted(((a, b) for a in range(-3, 4) for b in range(-3, 4)
                    if 0 < a * a + b * b <= 9), key=lambda v: (v[0] ** 2 + v[1] ** 2, v))
    assert pts == brute
    assert shell_order(1, 2, include_zero=True) == [(0,), (-1,), (1,), (-2,), (2,)]
    assert exp_norm((3, 4)).exact == 5 and exp_norm((1, 1)).exact is None


def test_exp_vector_validation():
    assert exp_vector([1, -2]) == (1, -2)
    with pytest.raises(ValueError):
        exp_vector([1.5])
    with pytest.raises(ValueError):
        exp_vector([1, 2], d=3)
    with pytest.raises(ValueError):
        monomial_mul((1,), (1, 2))


polys = st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                        st.integers(-5, 5), max_size=5)


@given(polys, polys, polys, st.sampled_from([0, 2, 3]))
def test_laurent_ring_laws(a, b, c, q):
    A, B, C = (LaurentPoly(t, 2, q) for t in (a, b, c))
    assert A * (B + C) == A * B + A * C
    assert (A * B) * C == A * (B * C)
    assert A * B == B * A
    assert A - A == LaurentPoly({}, 2, q)


@given(polys, polys)
def test_evaluation_is_a_ring_map(a, b):
    pres = stock("x2x3")
    A, B = LaurentPoly(a, 2), LaurentPoly(b, 2)
    assert evaluate(A * B, pres) == evaluate(A, pres) * evaluate(B, pres)
    assert evaluate(A + B, pres) == evaluate(A, pres) + evaluate(B, pres)
