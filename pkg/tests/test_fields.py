from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import assume, given, strategies as st

from zdaction.errors import ConfigError, NotAnSUnit, RamifiedUnsupported, ReducibleMinPoly, ZeroGenerator
from zdaction.fields import (
    NumberField,
    abs_value,
    compare_abs,
    in_band,
    in_ring,
    is_s_unit,
    places_above,
    product_formula_check,
    to_str,
    valuation,
)
from zdaction.reals import Interval

from conftest import make, make_ff, stock

small = st.integers(-6, 6)
gauss = st.tuples(st.integers(-20, 20), st.integers(-20, 20)).filter(any)


@lru_cache(maxsize=None)
def gaussian_field():
    return NumberField([1, 0, 1])


@lru_cache(maxsize=None)
def gaussian_2i():
    """Z[i][1/(2+i)]: one complex place and the prime above 5 dividing 2+i."""
    return make([1, 0, 1], [[2, 1]])


def test_dedekind_splitting_in_gaussian_integers():
    K = gaussian_field()
    split = places_above(K, 5)
    assert [(v.ramification, v.residue_degree) for v in split] == [(1, 1), (1, 1)]
    assert [(v.ramification, v.residue_degree) for v in places_above(K, 2)] == [(2, 1)]
    assert [(v.ramification, v.residue_degree) for v in places_above(K, 3)] == [(1, 2)]
    for p in (2, 3, 5, 13):
        assert sum(v.ramification * v.residue_degree for v in places_above(K, p)) == 2
        for v in places_above(K, p):
            assert valuation(K.from_int(p), v) == v.ramification


def test_non_maximal_prime_is_refused():
    # Z[sqrt(5)] has index 2 in the ring of integers of Q(sqrt 5)
    K = NumberField([-5, 0, 1])
    with pytest.raises(RamifiedUnsupported):
        places_above(K, 2)
    assert len(places_above(K, 5)) == 1


def test_place_sets_of_stock_systems():
    assert stock("x2").places.labels == ["inf", "p=2"]
    assert stock("x2x3").places.labels == ["inf", "p=2", "p=3"]
    assert [v.kind for v in stock("fibonacci").places] == ["real", "real"]
    assert stock("ledrappier").places.labels == ["t", "t+1", "inf"]


@given(gauss, gauss)
def test_valuations_are_additive(a, b):
    K = gaussian_field()
    x, y = K.element(a), K.element(b)
    for p in (2, 3, 5):
        for v in places_above(K, p):
            assert valuation(x * y, v) == valuation(x, v) + valuation(y, v)
            assert valuation(x / y, v) == valuation(x, v) - valuation(y, v)


@given(gauss, gauss)
def test_archimedean_abs_is_multiplicative(a, b):
    pres = gaussian_2i()
    K = pres.field
    x, y = K.element(a), K.element(b)
    v = pres.places[0]
    assert v.kind == "complex"
    lhs = abs_value(x * y, v)
    rhs = abs_value(x, v) * abs_value(y, v)
    assert lhs.overlaps(rhs)
    # squared modulus: the norm form a^2 + b^2
    assert abs_value(x, v).contains(a[0] ** 2 + a[1] ** 2)


@given(small, small, st.booleans())
def test_product_formula_on_s_units_rational(a, b, neg):
    pres = stock("x2x3")
    x = pres.field.from_int((-1 if neg else 1) * Fraction(2) ** a * Fraction(3) ** b)
    assert product_formula_check(x, pres.places)
    prod = Fraction(1)
    for v in pres.places:
        enc = abs_value(x, v)
        assert enc.is_exact
        prod *= enc.lo
    assert prod == 1


@given(small, small)
def test_product_formula_on_s_units_number_field(a, b):
    pres = gaussian_2i()
    g, i = pres.generators[0], pres.field.gen
    x = g ** a * i ** (b % 4)
    assert is_s_unit(x, pres.places)
    assert product_formula_check(x, pres.places)


@given(small, small)
def test_product_formula_exact_in_function_field(a, b):
    pres = stock("ledrappier")
    x = pres.power((a, b))
    prod = Fraction(1)
    for v in pres.places:
        enc = abs_value(x, v)
        assert enc.is_exact
        prod *= enc.lo
    assert prod == 1


def test_product_formula_rejects_non_units():
    pres = stock("x2")
    with pytest.raises(NotAnSUnit):
        product_formula_check(pres.field.from_int(3), pres.places)


def test_compare_abs_resolves_exact_ties():
    pres = gaussian_2i()
    v = pres.places[0]
    x = pres.field.element([Fraction(3, 5), Fraction(4, 5)])
    assert compare_abs(x, v, 1) == 0
    assert compare_abs(x, v, Fraction(999, 1000)) == 1
    phi = stock("fibonacci")
    g = phi.generators[0]
    vals = sorted(float(abs_value(g, v)) for v in phi.places)
    assert vals[0] == pytest.approx(0.6180339887) and vals[1] == pytest.approx(1.6180339887)


def test_membership():
    x2 = stock("x2")
    K = x2.field
    assert in_ring(K.from_int(Fraction(3, 4)), x2)
    assert not in_ring(K.from_int(Fraction(1, 3)), x2)
    fib = stock("fibonacci")
    assert in_ring(fib.generators[0].inverse(), fib)
    assert not in_ring(fib.field.from_int(Fraction(1, 2)), fib)
    led = stock("ledrappier")
    t = led.field.gen
    assert in_ring((t + 1).inverse() * t.inverse(), led)
    assert not in_ring((t * t + t + 1).inverse(), led)
    assert in_band(K.from_int(Fraction(3, 2)), x2.places, 2)
    assert not in_band(K.from_int(3), x2.places, 2)
    assert not in_band(K.zero, x2.places, 2)


def test_function_field_valuations():
    K = stock("ledrappier").field
    t = K.gen
    x = t * t / (t + 1)
    led = stock("ledrappier").places
    assert [valuation(x, v) for v in led] == [2, -1, -1]
    assert sum(valuation(x, v) * v.residue_degree for v in led) == 0


def test_rendering():
    K = NumberField([-1, -1, 1])
    assert to_str(K.element([-1, -1])) == "-1 - x"
    assert to_str(K.element([3, 2])) == "3 + 2*x"
    assert to_str(K.zero) == "0"
    L = make_ff(2, [((1, 0), (1,))]).field
    assert to_str(L.gen / (L.gen + 1)) == "(t)/(t+1)"


def test_construction_errors():
    with pytest.raises(ReducibleMinPoly):
        NumberField([-4, 0, 1])
    with pytest.raises(ConfigError):
        NumberField([1, 2])
    with pytest.raises(ZeroGenerator):
        make([0, 1], [0])


@given(gauss)
def test_field_inverse(a):
    K = gaussian_field()
    x = K.element(a)
    assert x * x.inverse() == K.one
    assert (x ** 3) / x == x * x
