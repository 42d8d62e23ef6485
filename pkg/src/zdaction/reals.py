"""Closed intervals with exact rational endpoints.

Every transcendental quantity in the package (archimedean absolute values,
logarithms, Lyapunov coordinates) is carried as an :class:`Interval` whose
endpoints are :class:`fractions.Fraction`.  Arithmetic is exact on the
endpoints; :meth:`Interval.rounded` trims the endpoints outward to a bit
budget so that repeated products do not blow up denominators.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from mpmath.libmp import from_rational, mpf_log, mpf_exp, to_rational, from_int

__all__ = ["Interval", "as_fraction", "imax", "imin"]


def as_fraction(x) -> Fraction:
    """Exact conversion of ints, Fractions, floats and gmpy rationals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _round_down(x: Fraction, prec: int) -> Fraction:
    if x == 0:
        return x
    shift = prec - _ilog2(abs(x))
    if shift >= 0:
        scaled = x * (1 << shift)
        return Fraction(math.floor(scaled), 1 << shift)
    scale = 1 << (-shift)
    return Fraction(math.floor(x / scale) * scale)


def _round_up(x: Fraction, prec: int) -> Fraction:
    return -_round_down(-x, prec)


def _ilog2(x: Fraction) -> int:
    # floor(log2(x)) for x > 0, up to one unit
    return x.numerator.bit_length() - x.denominator.bit_length()


def _mpf_to_fraction(t) -> Fraction:
    p, q = to_rational(t)
    return Fraction(int(p), int(q))


class Interval:
    """A closed interval ``[lo, hi]`` of reals with rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = as_fraction(lo)
        hi = lo if hi is None else as_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def coerce(cls, x) -> "Interval":
        return x if isinstance(x, Interval) else cls(x)

    # -- inspection -----------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def rel_width(self) -> Fraction:
        """Width divided by the smallest magnitude in the interval (inf if 0 is inside)."""
        if self.contains(0):
            return Fraction(0) if self.is_exact else Fraction(10**9)
        m = min(abs(self.lo), abs(self.hi))
        return self.width / m

    def __repr__(self) -> str:
        if self.is_exact:
            return f"Interval({self.lo})"
        return f"Interval([{float(self.lo):.17g}, {float(self.hi):.17g}])"

    def __eq__(self, other) -> bool:
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    # -- certified comparisons -----------------------------------------
    def certainly_lt(self, x) -> bool:
        x = Interval.coerce(x)
        return self.hi < x.lo

    def certainly_gt(self, x) -> bool:
        x = Interval.coerce(x)
        return self.lo > x.hi

    def certainly_le(self, x) -> bool:
        x = Interval.coerce(x)
        return self.hi <= x.lo

    def certainly_ge(self, x) -> bool:
        x = Interval.coerce(x)
        return self.lo >= x.hi

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        if not isinstance(other, (Interval, Rational, float)):
            return NotImplemented
        o = Interval.coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Interval, Rational, float)):
            return NotImplemented
        o = Interval.coerce(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Interval, Rational, float)):
            return NotImplemented
        o = Interval.coerce(other)
        if self.is_exact and o.is_exact:
            return Interval(self.lo * o.lo)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(p), max(p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.coerce(other)
        if o.contains(0):
            raise ZeroDivisionError("interval division by an interval containing 0")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0:
            return Interval(1)
        if k % 2 == 0:
            a = abs(self)
            return Interval(a.lo**k, a.hi**k)
        return Interval(self.lo**k, self.hi**k)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi))

    def sq(self):
        return self**2

    def rounded(self, prec: int) -> "Interval":
        """Outward rounding of both endpoints to ``prec`` significant bits."""
        if self.is_exact and self.lo.denominator.bit_length() <= prec:
            return self
        return Interval(_round_down(self.lo, prec), _round_up(self.hi, prec))

    def sqrt(self, prec: int = 128) -> "Interval":
        if self.lo < 0:
            raise ValueError("sqrt of an interval with negative part")
        return Interval(_isqrt_down(self.lo, prec), _isqrt_up(self.hi, prec))

    def log(self, prec: int = 128) -> "Interval":
        """Enclosure of the natural logarithm (interval must be positive)."""
        if self.lo <= 0:
            raise ValueError("log of an interval that is not strictly positive")
        if self.is_exact and self.lo == 1:
            return Interval(0)
        wp = prec + 20
        lo = mpf_log(from_rational(self.lo.numerator, self.lo.denominator, wp, "f"), wp, "f")
        hi = mpf_log(from_rational(self.hi.numerator, self.hi.denominator, wp, "c"), wp, "c")
        lo_f, hi_f = _mpf_to_fraction(lo), _mpf_to_fraction(hi)
        # two-ulp safety margin on top of directed rounding
        slack = Fraction(1, 1 << (wp - 4)) * (1 + abs(lo_f) + abs(hi_f))
        return Interval(lo_f - slack, hi_f + slack).rounded(prec + 8)

    def exp(self, prec: int = 128) -> "Interval":
        wp = prec + 20
        lo = mpf_exp(from_rational(self.lo.numerator, self.lo.denominator, wp, "f"), wp, "f")
        hi = mpf_exp(from_rational(self.hi.numerator, self.hi.denominator, wp, "c"), wp, "c")
        lo_f, hi_f = _mpf_to_fraction(lo), _mpf_to_fraction(hi)
        slack = Fraction(1, 1 << (wp - 4)) * (lo_f + hi_f)
        return Interval(max(Fraction(0), lo_f - slack), hi_f + slack).rounded(prec + 8)

    def render(self, digits: int = 20) -> str:
        """Decimal rendering ``[lo, hi]`` with outward-rounded endpoints."""
        if self.is_exact:
            return str(self.lo)
        return f"[{_dec(self.lo, digits, False)}, {_dec(self.hi, digits, True)}]"


def _dec(x: Fraction, digits: int, up: bool) -> str:
    if x == 0:
        return "0"
    e = math.floor(math.log10(abs(float(x))))
    frac_digits = digits - 1 - e
    v = x * Fraction(10) ** frac_digits
    n = math.ceil(v) if up else math.floor(v)
    return _fmt_exact(n, frac_digits)


def _fmt_exact(n: int, frac_digits: int) -> str:
    sign = "-" if n < 0 else ""
    n = abs(n)
    if frac_digits <= 0:
        return sign + str(n * 10 ** (-frac_digits))
    s = str(n).rjust(frac_digits + 1, "0")
    return f"{sign}{s[:-frac_digits]}.{s[-frac_digits:]}"


def _isqrt_down(x: Fraction, prec: int) -> Fraction:
    if x == 0:
        return Fraction(0)
    k = prec + max(0, -_ilog2(x))
    return Fraction(math.isqrt(math.floor(x * (1 << (2 * k)))), 1 << k)


def _isqrt_up(x: Fraction, prec: int) -> Fraction:
    if x == 0:
        return Fraction(0)
    k = prec + max(0, -_ilog2(x))
    n = math.ceil(x * (1 << (2 * k)))
    r = math.isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, 1 << k)


def imax(items) -> Interval:
    items = [Interval.coerce(i) for i in items]
    return Interval(max(i.lo for i in items), max(i.hi for i in items))


def imin(items) -> Interval:
    items = [Interval.coerce(i) for i in items]
    return Interval(min(i.lo for i in items), min(i.hi for i in items))
