"""Periodic-point counts ``|Fix(alpha^n)| = |M/(u^n - 1)M|`` and the exact
character-sum forms of the mixing correlation and of the periodic-point
pairing for trigonometric polynomials.

Two independent count methods are provided: the product of ``|beta_n - 1|_v``
over ``S`` (certified enclosure rounded to an integer) and a direct quotient
computation per backend.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from . import polyfp as F
from .errors import (
    EnclosureNotIntegral,
    NotMixing,
    UnsupportedBackendShape,
)
from .fields import (
    NumberField,
    PlaceSet,
    Presentation,
    _primes_of,
    _vp,
    abs_value,
    in_ring,
    places_above,
    valuation,
)
from .laurent import shell_order
from .reals import Interval, as_fraction

__all__ = [
    "FixCount",
    "GaussQ",
    "TrigPolynomial",
    "correlation",
    "fix_count_oracle",
    "fix_count_product",
    "fix_count_table",
    "periodic_pairing",
]

PRECISION_CEILING = 8192


@dataclass(frozen=True)
class FixCount:
    n: tuple
    count: int
    method: str


def _gamma(pres: Presentation, n) -> object:
    n = tuple(n)
    if not any(n):
        raise ValueError("n must be nonzero")
    g = pres.power(n) - pres.field.one
    if g.is_zero():
        raise NotMixing(f"u^{n} acts trivially, so Fix is infinite")
    return g


def fix_count_product(pres: Presentation, S: PlaceSet | None, n, precision: int = 128) -> FixCount:
    """``prod_{v in S} |beta_n - 1|_v``, rounded from a certified enclosure."""
    S = pres.places if S is None else S
    gamma = _gamma(pres, n)
    prec = precision
    while prec <= PRECISION_CEILING:
        prod = Interval(1)
        for v in S:
            prod = (prod * abs_value(gamma, v, prec)).rounded(prec + 16)
        if prod.is_exact:
            if prod.lo.denominator != 1:
                raise EnclosureNotIntegral(f"exact product {prod.lo} is not an integer")
            return FixCount(tuple(n), int(prod.lo), "product")
        if prod.width < Fraction(1, 2):
            lo = -((-prod.lo.numerator) // prod.lo.denominator)
            hi = prod.hi.numerator // prod.hi.denominator
            if lo == hi:
                return FixCount(tuple(n), lo, "product")
            if lo > hi:
                raise EnclosureNotIntegral(f"enclosure {prod.render()} contains no integer")
        prec *= 2
    raise EnclosureNotIntegral(f"no unique integer in the enclosure at {PRECISION_CEILING} bits")


def fix_count_oracle(pres: Presentation, n) -> FixCount:
    """``|M/(beta_n - 1)M|`` by direct quotient arithmetic (no absolute values)."""
    S = pres.places
    if any(v.explicit_ords is not None for v in S):
        raise UnsupportedBackendShape("explicit places: the quotient cannot be formed directly")
    gamma = _gamma(pres, n)
    K = pres.field
    if isinstance(K, NumberField):
        if K.n == 1:
            num = abs(gamma.c[0].numerator)
            for p in S.finite_primes:
                while num % p == 0:
                    num //= p
            return FixCount(tuple(n), num, "oracle:integer")
        return FixCount(tuple(n), _snf_count(K, gamma, S), "oracle:smith")
    return FixCount(tuple(n), _ff_count(K, gamma, S), "oracle:polynomial")


def _snf_count(K: NumberField, gamma, S: PlaceSet) -> int:
    D, c = gamma.integral_form()
    # b = D*gamma differs from gamma only at primes under S, which are
    # handled by valuations below
    b = K.element(c)
    if any(p not in S.finite_primes for p in _primes_of(D)):
        raise UnsupportedBackendShape(f"beta_n - 1 = {gamma!r} has a denominator outside S")
    mat = Matrix([[int(x) for x in row] for row in K.mult_matrix(b)])
    diag = [abs(int(x)) for x in invariant_factors(mat, domain=ZZ)]
    count = 1
    for p in sorted({p for d in diag for p in _primes_of(d)}):
        if p not in S.finite_primes:
            count *= p ** sum(_vp(d, p) for d in diag)
            continue
        # p lies under S: only the places above p outside S survive localization
        for v in places_above(K, p):
            if v not in S:
                count *= v.residue_size ** valuation(gamma, v)
    return count


def _ff_count(K, gamma, S: PlaceSet) -> int:
    q = K.q
    num = gamma.num
    for v in S:
        if v.kind == "ff_finite":
            while True:
                quo, r = F.fp_divmod(num, v.poly, q)
                if r:
                    break
                num = quo
    exp = F.degree(num)
    if not S.has_infinity():
        exp += max(0, gamma.order_at_infinity())
    return q ** exp


def fix_count_table(pres: Presentation, radius: float, precision: int = 128) -> list[dict]:
    """Rows ``n, count, method, agree`` for ``n = 1..R`` (d = 1) or every
    nonzero ``n`` with ``|n| <= R`` in shell order."""
    if pres.d == 1:
        ns = [(k,) for k in range(1, int(radius) + 1)]
    else:
        ns = [n for n in shell_order(pres.d, radius) if any(n)]
    rows = []
    for n in ns:
        a = fix_count_product(pres, None, n, precision)
        try:
            b = fix_count_oracle(pres, n)
            method, agree = f"product+{b.method}", a.count == b.count
        except UnsupportedBackendShape:
            method, agree = "product", None
        rows.append({"n": n, "count": a.count, "method": method, "agree": agree})
    return rows


def fix_table_csv(rows: list[dict], d: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"n{i + 1}" for i in range(d)] + ["count", "method", "agree"])
    for r in rows:
        flag = "na" if r["agree"] is None else str(r["agree"]).lower()
        w.writerow(list(r["n"]) + [r["count"], r["method"], flag])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# trigonometric polynomials
# ---------------------------------------------------------------------------

class GaussQ(NamedTuple):
    """Exact Gaussian rational ``re + i*im``."""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, tuple):
            return cls(as_fraction(x[0]), as_fraction(x[1]))
        return cls(as_fraction(x), Fraction(0))

    def __add__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussQ.of(o))

    def __mul__(self, o):
        o = GaussQ.of(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def __bool__(self):
        return bool(self.re or self.im)

    def render(self) -> dict:
        return {"re": [self.re.numerator, self.re.denominator],
                "im": [self.im.numerator, self.im.denominator]}

    def __str__(self):
        return f"{self.re}" if not self.im else f"{self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i"


ZERO = GaussQ(Fraction(0))


class TrigPolynomial:
    """Finitely supported Fourier transform ``a -> f^(a)`` on module elements."""

    def __init__(self, coeffs: dict, pres: Presentation | None = None, real: bool = False):
        clean = {}
        for a, c in coeffs.items():
            c = GaussQ.of(c)
            if not c:
                continue
            if a in clean:
                raise ValueError(f"duplicate support element {a!r}")
            clean[a] = c
        if pres is not None:
            for a in clean:
                if not a.is_zero() and not in_ring(a, pres):
                    raise ValueError(f"support element {a!r} is not in M")
        if real:
            for a, c in clean.items():
                if clean.get(-a, ZERO) != c.conj():
                    raise ValueError(f"not real-valued: f^(-a) != conj f^(a) at a = {a!r}")
        self.coeffs = clean
        self.pres = pres
        self.real = real

    def __getitem__(self, a) -> GaussQ:
        return self.coeffs.get(a, ZERO)

    @property
    def support(self):
        return self.coeffs.keys()

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, ZERO) + c
        return TrigPolynomial(out, None)

    def scale(self, c) -> "TrigPolynomial":
        c = GaussQ.of(c)
        return TrigPolynomial({a: c * v for a, v in self.coeffs.items()}, None)


def correlation(f: TrigPolynomial, g: TrigPolynomial, n, pres: Presentation | None = None) -> GaussQ:
    """``int f(x) g(alpha^n x) dmu - int f int g`` by character orthogonality:
    ``sum over b != 0 with -beta_n b in supp f^ of f^(-beta_n b) g^(b)``."""
    pres = pres or f.pres or g.pres
    beta = pres.power(tuple(n))
    total = ZERO
    for b, gb in g.coeffs.items():
        if b.is_zero():
            continue
        fa = f.coeffs.get(-(beta * b))
        if fa is not None:
            total = total + fa * gb
    return total


def periodic_pairing(f: TrigPolynomial, pres: Presentation, S: PlaceSet | None, n) -> GaussQ:
    """``int f dmu_n - int f dmu``: the sum of ``f^(a)`` over nonzero ``a`` in
    ``supp f^`` that lie in ``(beta_n - 1)M``."""
    S = pres.places if S is None else S
    gamma = _gamma(pres, n)
    total = ZERO
    for a, c in f.coeffs.items():
        if a.is_zero():
            continue
        if in_ring(a / gamma, pres, S):
            total = total + c
    return total
