"""Global fields ``K(p) = Frac(R_d/p)`` with explicit arithmetic models.

Two backends are supported:

* :class:`NumberField` -- ``Q[x]/(f)`` for a monic irreducible integer
  polynomial ``f``.  Degree one (``f = x - c``) is the rational field.
* :class:`RationalFunctionField` -- ``F_q(t)`` for a prime ``q``.

A :class:`Presentation` fixes the images ``g_i = pi(u_i)`` of the
generators; :func:`discover_places` finds the finite set ``S`` of places at
which the generated ring is unbounded.  Absolute values are normalized so
that the product formula holds: complex places use the squared modulus and
a finite place ``P`` uses ``N(P) ** -ord_P``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, reduce

import sympy
from sympy import CRootOf, Poly, Symbol

from . import polyfp as F
from .errors import (
    CompositeCharacteristic,
    ConfigError,
    MaximalityNotAttested,
    NotAnSUnit,
    RamifiedUnsupported,
    ReducibleMinPoly,
    ZeroGenerator,
)
from .reals import Interval, as_fraction

__all__ = [
    "FFElement",
    "NFElement",
    "NumberField",
    "Place",
    "PlaceSet",
    "Presentation",
    "RationalFunctionField",
    "abs_value",
    "compare_abs",
    "discover_places",
    "in_band",
    "in_ring",
    "is_s_unit",
    "product_formula_check",
    "valuation",
]

DEFAULT_CEILING = 4096
TIE_TEST_BITS = 256  # enclosure bits tried before the algebraic equality test


# ---------------------------------------------------------------------------
# dense polynomials over Q and Z, coefficient lists low -> high
# ---------------------------------------------------------------------------

def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmul(a, b) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pmod_monic(a, f) -> list:
    """Remainder of ``a`` by the monic ``f`` (works over Z and Q)."""
    a = list(a)
    n = len(f) - 1
    for k in range(len(a) - 1, n - 1, -1):
        c = a[k]
        if c:
            for j in range(n + 1):
                a[k - n + j] -= c * f[j]
    return a[:n]


def _pdivmod(a, b):
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lc = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lc
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] -= c * y
        _trim(a)
    return q, a


def _pxgcd(a, b):
    """``(g, s)`` with ``s*a = g (mod b)``, ``g`` a gcd of a and b."""
    r0, r1 = _trim([Fraction(x) for x in a]), _trim([Fraction(x) for x in b])
    s0, s1 = [Fraction(1)], []
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        qs = _pmul(q, s1)
        ns = [Fraction(0)] * max(len(s0), len(qs))
        for i, x in enumerate(s0):
            ns[i] += x
        for i, x in enumerate(qs):
            ns[i] -= x
        s0, s1 = s1, _trim(ns)
    return r0, s0


def _primes_of(n: int) -> list[int]:
    n = abs(int(n))
    if n <= 1:
        return []
    return sorted(sympy.factorint(n))


def _vp(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# number fields
# ---------------------------------------------------------------------------

@dataclass
class _PrimeData:
    p: int
    maximal: bool
    factors: list  # [(phi high->low over F_p, e, f, h low->high ints)]


class NumberField:
    """``Q[x]/(f)`` for monic irreducible ``f`` (coefficients low -> high)."""

    characteristic = 0

    def __init__(self, min_poly, var: str = "x"):
        f = [int(c) for c in min_poly]
        if any(int(c) != c for c in min_poly):
            raise ConfigError("min_poly must have integer coefficients")
        _trim(f)
        if len(f) < 2:
            raise ConfigError("min_poly must have degree >= 1")
        if f[-1] != 1:
            raise ConfigError("min_poly must be monic")
        self.f = tuple(f)
        self.n = len(f) - 1
        self.var = var
        sym = Symbol(var)
        self._poly = Poly(list(reversed(f)), sym, domain="ZZ")
        if self.n > 1 and not self._poly.is_irreducible:
            fac = sympy.factor_list(self._poly.as_expr())
            raise ReducibleMinPoly(f"min_poly {self._poly.as_expr()} is reducible: {fac}")
        self.r1 = self._poly.count_roots() if self.n > 1 else 1
        self.r2 = (self.n - self.r1) // 2
        self._prime_cache: dict[int, _PrimeData] = {}
        self._root_iv: dict[int, object] = {}
        self._box_cache: dict[tuple[int, int], tuple[Interval, Interval]] = {}
        self._complex_upper: list[int] | None = None

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.f == other.f

    def __hash__(self):
        return hash(("NF", self.f))

    def __repr__(self):
        return f"NumberField({self._poly.as_expr()})"

    # -- elements -------------------------------------------------------
    def element(self, coeffs) -> "NFElement":
        c = [as_fraction(x) for x in coeffs]
        if len(c) > self.n:
            c = _pmod_monic(c, self.f)
        c = c + [Fraction(0)] * (self.n - len(c))
        return NFElement(self, tuple(c))

    def from_int(self, c) -> "NFElement":
        return self.element([as_fraction(c)])

    from_fraction = from_int

    @property
    def zero(self) -> "NFElement":
        return self.element([])

    @property
    def one(self) -> "NFElement":
        return self.element([1])

    @property
    def gen(self) -> "NFElement":
        return self.element([0, 1])

    def mult_matrix(self, a: "NFElement") -> list[list[Fraction]]:
        """Matrix (rows = output coordinate) of multiplication by ``a``."""
        cols = []
        for j in range(self.n):
            basis = [Fraction(0)] * j + [Fraction(1)]
            cols.append((a * self.element(basis)).c)
        return [[cols[j][i] for j in range(self.n)] for i in range(self.n)]

    def norm(self, a: "NFElement") -> Fraction:
        return _det(self.mult_matrix(a))

    def charpoly(self, a: "NFElement") -> Poly:
        y = Symbol("_y")
        x = Symbol(self.var)
        expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(a.c))
        return Poly(sympy.resultant(self._poly.as_expr(), y - expr, x), y)

    @cached_property
    def discriminant(self) -> int:
        if self.n == 1:
            return 1
        return int(sympy.discriminant(self._poly))

    # -- primes ---------------------------------------------------------
    def prime_data(self, p: int) -> _PrimeData:
        """Factorization of ``p`` via Dedekind-Kummer when ``Z[x]`` is p-maximal."""
        if p in self._prime_cache:
            return self._prime_cache[p]
        fbar = F.fp(reversed(self.f), p)
        _, facs = F.fp_factor(fbar, p)
        maximal = True
        if any(e > 1 for _, e in facs):
            # Dedekind criterion
            g = reduce(lambda a, b: F.fp_mul(a, b, p), (phi for phi, _ in facs), (1,))
            h = reduce(lambda a, b: F.fp_mul(a, b, p),
                       (F.fp_pow(phi, e - 1, p) for phi, e in facs), (1,))
            gz = list(reversed(g))
            hz = list(reversed(h))
            gh = _pmul(gz, hz)
            diff = [a - (gh[i] if i < len(gh) else 0) for i, a in enumerate(self.f)]
            Fz = [c // p for c in diff]
            assert all(c % p == 0 for c in diff)
            Fbar = F.fp(reversed(Fz), p)
            gcd = F.fp_gcd(F.fp_gcd(Fbar, g, p), h, p)
            maximal = F.degree(gcd) == 0
        factors = []
        if maximal:
            for i, (phi, e) in enumerate(facs):
                rest = (1,)
                for j, (psi, ej) in enumerate(facs):
                    rest = F.fp_mul(rest, F.fp_pow(psi, ej if j != i else ej - 1, p), p)
                factors.append((phi, e, F.degree(phi), [int(c) for c in reversed(rest)]))
        pd = _PrimeData(p, maximal, factors)
        self._prime_cache[p] = pd
        return pd

    def _val_int(self, c: list[int], p: int, phi, e: int, h) -> int:
        if not any(c):
            raise ValueError("valuation of zero")
        v = 0
        while True:
            if all(x % p == 0 for x in c):
                c = [x // p for x in c]
                v += e
                continue
            cbar = F.fp(reversed([x % p for x in c]), p)
            if F.fp_rem(cbar, phi, p):
                return v
            c = _pmod_monic(_pmul(c, h), self.f)
            c = [x // p for x in c]
            v += 1

    def valuation(self, a: "NFElement", place: "Place") -> int:
        if place.explicit_ords is not None:
            raise RamifiedUnsupported(place.prime, "explicit place: element valuations unavailable")
        D, c = a.integral_form()
        p = place.prime
        pd = self.prime_data(p)
        for phi, e, fdeg, h in pd.factors:
            if phi == place.poly:
                return self._val_int(c, p, phi, e, h) - e * _vp(D, p)
        raise ValueError(f"{place.label} is not a place of {self!r}")

    # -- archimedean embeddings ----------------------------------------
    def complex_indices(self) -> list[int]:
        """CRootOf indices of the roots with positive imaginary part."""
        if self._complex_upper is None:
            ups = []
            for i in range(self.r1, self.n):
                re, im = self.root_box(i, 8)
                if im.mid > 0:
                    ups.append(i)
            self._complex_upper = ups
        return self._complex_upper

    def root_box(self, index: int, bits: int) -> tuple[Interval, Interval]:
        """Rational box of width <= 2^-bits around root number ``index``."""
        key = (index, bits)
        if key in self._box_cache:
            return self._box_cache[key]
        if self.n == 1:
            box = (Interval(-self.f[0]), Interval(0))
            self._box_cache[key] = box
            return box
        iv = self._root_iv.get(index)
        if iv is None:
            iv = CRootOf(self._poly, index)._get_interval()
        eps = sympy.Rational(1, 2**bits)
        if index < self.r1:
            if iv.b - iv.a > eps:
                iv = iv.refine_size(eps)
            box = (Interval(as_fraction(iv.a), as_fraction(iv.b)), Interval(0))
        else:
            if iv.bx - iv.ax > eps or iv.by - iv.ay > eps:
                iv = iv.refine_size(eps, eps)
            box = (Interval(as_fraction(iv.ax), as_fraction(iv.bx)),
                   Interval(as_fraction(iv.ay), as_fraction(iv.by)))
        self._root_iv[index] = iv
        self._box_cache[key] = box
        return box

    def root_float(self, index: int) -> complex:
        re, im = self.root_box(index, 60)
        return complex(float(re.mid), float(im.mid))


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if m[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            if m[r][i]:
                fac = m[r][i] / m[i][i]
                for c in range(i, n):
                    m[r][c] -= fac * m[i][c]
    return det


class NFElement:
    """Element of a :class:`NumberField`; ``c`` holds the power-basis coordinates."""

    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, c: tuple):
        self.field = field
        self.c = c

    def _coerce(self, other):
        if isinstance(other, NFElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.field.n == 1:
            return NFElement(self.field, (self.c[0] * o.c[0],))
        return self.field.element(_pmod_monic(_pmul(self.c, o.c), self.field.f))

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if self.field.n == 1:
            return NFElement(self.field, (1 / self.c[0],))
        g, s = _pxgcd(list(self.c), list(self.field.f))
        return self.field.element([x / g[0] for x in s])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_int(other)
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.c == other.c and self.field == other.field

    def __hash__(self):
        return hash(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def integral_form(self) -> tuple[int, list[int]]:
        """``(D, c)`` with ``self = c(x)/D``, ``D > 0`` minimal."""
        D = 1
        for x in self.c:
            D = D * x.denominator // math.gcd(D, x.denominator)
        return D, [int(x * D) for x in self.c]

    def sort_key(self):
        return (sum(abs(x) for x in self.c), self.c)

    def __repr__(self):
        return to_str(self)


# ---------------------------------------------------------------------------
# rational function fields
# ---------------------------------------------------------------------------

class RationalFunctionField:
    """``F_q(t)`` for a prime ``q``."""

    def __init__(self, q: int, var: str = "t"):
        q = int(q)
        if q < 2 or not sympy.isprime(q):
            raise CompositeCharacteristic(f"characteristic {q} is not prime")
        self.q = q
        self.var = var

    @property
    def characteristic(self) -> int:
        return self.q

    def __eq__(self, other):
        return isinstance(other, RationalFunctionField) and self.q == other.q

    def __hash__(self):
        return hash(("FF", self.q))

    def __repr__(self):
        return f"F_{self.q}({self.var})"

    def element(self, num, den=(1,)) -> "FFElement":
        q = self.q
        num = F.fp(num, q)
        den = F.fp(den, q)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return FFElement(self, (), (1,))
        g = F.fp_gcd(num, den, q)
        if F.degree(g) > 0:
            num = F.fp_divmod(num, g, q)[0]
            den = F.fp_divmod(den, g, q)[0]
        lc, den = F.fp_monic(den, q)
        if lc != 1:
            num = F.fp_mul(num, (pow(lc, -1, q),), q)
        return FFElement(self, num, den)

    def from_int(self, c) -> "FFElement":
        c = as_fraction(c)
        if c.denominator % self.q == 0:
            raise ZeroDivisionError(f"{c} has no image in characteristic {self.q}")
        return self.element((c.numerator * pow(c.denominator, -1, self.q),))

    @property
    def zero(self) -> "FFElement":
        return self.element(())

    @property
    def one(self) -> "FFElement":
        return self.element((1,))

    @property
    def gen(self) -> "FFElement":
        return self.element((1, 0))


class FFElement:
    __slots__ = ("field", "num", "den")

    def __init__(self, field: RationalFunctionField, num: tuple, den: tuple):
        self.field = field
        self.num = num
        self.den = den

    def _coerce(self, other):
        if isinstance(other, FFElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        q = self.field.q
        num = F.fp_add(F.fp_mul(self.num, o.den, q), F.fp_mul(o.num, self.den, q), q)
        return self.field.element(num, F.fp_mul(self.den, o.den, q))

    __radd__ = __add__

    def __neg__(self):
        return FFElement(self.field, F.fp_neg(self.num, self.field.q), self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        q = self.field.q
        return self.field.element(F.fp_mul(self.num, o.num, q), F.fp_mul(self.den, o.den, q))

    __rmul__ = __mul__

    def inverse(self) -> "FFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        return self.field.element(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        q = self.field.q
        return FFElement(self.field, F.fp_pow(self.num, k, q), F.fp_pow(self.den, k, q)) \
            if self.num else (self.field.one if k == 0 else self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_int(other)
        if not isinstance(other, FFElement):
            return NotImplemented
        return self.num == other.num and self.den == other.den and self.field == other.field

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return not self.num

    def order_at(self, poly) -> int:
        """``ord_P`` at the finite place of the monic irreducible ``poly``."""
        if self.is_zero():
            raise ValueError("order of zero")
        q = self.field.q
        return _fp_mult(self.num, poly, q) - _fp_mult(self.den, poly, q)

    def order_at_infinity(self) -> int:
        return F.degree(self.den) - F.degree(self.num)

    def sort_key(self):
        return (F.degree(self.num) + F.degree(self.den), self.den, self.num)

    def __repr__(self):
        return to_str(self)


def _fp_mult(f, P, q) -> int:
    v = 0
    while True:
        quo, r = F.fp_divmod(f, P, q)
        if r:
            return v
        f = quo
        v += 1


def to_str(x) -> str:
    if isinstance(x, FFElement):
        var = x.field.var
        num = F.fp_to_str(x.num, var)
        if x.den == (1,):
            return num
        return f"({num})/({F.fp_to_str(x.den, var)})"
    var = x.field.var
    out = ""
    for i, c in enumerate(x.c):
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        body = str(mag) if i == 0 else (mono if mag == 1 else f"{mag}*{mono}")
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"


# ---------------------------------------------------------------------------
# places
# ---------------------------------------------------------------------------

_KIND_ORDER = {"real": 0, "complex": 1, "finite": 2, "ff_finite": 3, "ff_infinity": 4}


@dataclass(frozen=True)
class Place:
    """One place of the global field.

    ``prime`` is the rational prime below a finite place (or ``q`` for a
    function-field place), ``poly`` the factor of ``f`` mod p (resp. the
    monic irreducible polynomial over F_q), ``root_index`` the CRootOf
    index of an archimedean place.
    """

    kind: str
    prime: int = 0
    poly: tuple = ()
    residue_degree: int = 1
    ramification: int = 1
    root_index: int = -1
    explicit_ords: tuple | None = None
    name: str = ""

    @property
    def archimedean(self) -> bool:
        return self.kind in ("real", "complex")

    @property
    def residue_size(self) -> int:
        return self.prime ** self.residue_degree

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "real":
            return f"real[{self.root_index}]"
        if self.kind == "complex":
            return f"complex[{self.root_index}]"
        if self.kind == "finite":
            if self.explicit_ords is not None:
                return f"p={self.prime}:explicit(e={self.ramification},f={self.residue_degree})"
            return f"p={self.prime}:{F.fp_to_str(self.poly, 'x')}"
        if self.kind == "ff_finite":
            return F.fp_to_str(self.poly, "t")
        return "inf"

    def sort_key(self):
        return (_KIND_ORDER[self.kind], self.root_index if self.archimedean else 0,
                self.prime, len(self.poly), self.poly)


@dataclass(frozen=True)
class PlaceSet:
    """The finite set ``S`` of places where the generated ring is unbounded."""

    places: tuple

    def __iter__(self):
        return iter(self.places)

    def __len__(self):
        return len(self.places)

    def __getitem__(self, i):
        return self.places[i]

    def __contains__(self, v):
        return v in self.places

    @property
    def labels(self) -> list[str]:
        return [v.label for v in self.places]

    @property
    def finite_primes(self) -> set[int]:
        return {v.prime for v in self.places if v.kind == "finite"}

    def has_infinity(self) -> bool:
        return any(v.kind == "ff_infinity" for v in self.places)


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """Explicit model of a cyclic module ``R_d/p`` inside its global field."""

    name: str
    d: int
    field: object
    generators: tuple
    maximality_attested: bool = False
    explicit_places: tuple = ()
    _powers: dict = dc_field(default_factory=dict, compare=False, repr=False)
    _places: list = dc_field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if self.d < 1 or len(self.generators) != self.d:
            raise ConfigError(f"need d >= 1 generator images, got d={self.d}, "
                              f"{len(self.generators)} images")
        for i, g in enumerate(self.generators):
            if g.is_zero():
                raise ZeroGenerator(f"generator image {i + 1} is zero")

    @property
    def characteristic(self) -> int:
        return self.field.characteristic

    def power(self, n) -> object:
        """``beta_n = prod g_i ** n_i``, the image of ``u^n``."""
        n = tuple(n)
        if len(n) != self.d:
            raise ValueError(f"exponent has dimension {len(n)}, expected {self.d}")
        hit = self._powers.get(n)
        if hit is None:
            hit = self.field.one
            for g, e in zip(self.generators, n):
                if e:
                    hit = hit * g ** e
            if len(self._powers) < 100000:
                self._powers[n] = hit
        return hit

    @property
    def places(self) -> PlaceSet:
        if not self._places:
            self._places.append(discover_places(self))
        return self._places[0]


def _explicit_for(pres: Presentation, p: int) -> list[Place]:
    return [v for v in pres.explicit_places if v.prime == p]


def discover_places(pres: Presentation) -> PlaceSet:
    """Compute ``S``: every place where some ``g_i`` has absolute value != 1,
    plus all archimedean places in characteristic zero."""
    K = pres.field
    places: list[Place] = []
    if isinstance(K, NumberField):
        for i in range(K.r1):
            places.append(Place("real", root_index=i, name="inf" if K.n == 1 else ""))
        for i in K.complex_indices():
            places.append(Place("complex", root_index=i, residue_degree=2))
        primes = set()
        for g in pres.generators:
            D, _ = g.integral_form()
            N = K.norm(g)
            primes.update(_primes_of(D))
            primes.update(_primes_of(N.numerator))
            primes.update(_primes_of(N.denominator))
        for v in pres.explicit_places:
            primes.add(v.prime)
        for p in sorted(primes):
            explicit = _explicit_for(pres, p)
            if explicit:
                places.extend(v for v in explicit if any(v.explicit_ords))
                continue
            for v in places_above(K, p):
                if any(K.valuation(g, v) for g in pres.generators):
                    places.append(v)
    else:
        q = K.q
        polys = set()
        for g in pres.generators:
            for part in (g.num, g.den):
                _, facs = F.fp_factor(part, q) if F.degree(part) > 0 else (0, [])
                polys.update(P for P, _ in facs)
        for P in sorted(polys, key=lambda P: (len(P), P)):
            if any(g.order_at(P) for g in pres.generators):
                places.append(Place("ff_finite", prime=q, poly=P, residue_degree=F.degree(P)))
        if any(g.order_at_infinity() for g in pres.generators):
            places.append(Place("ff_infinity", prime=q))
    places.sort(key=Place.sort_key)
    return PlaceSet(tuple(places))


def places_above(K: NumberField, p: int) -> list[Place]:
    """All places of ``K`` above the rational prime ``p``."""
    pd = K.prime_data(p)
    if not pd.maximal:
        raise RamifiedUnsupported(p, "Z[x] is not p-maximal")
    out = []
    for phi, e, fdeg, _ in pd.factors:
        name = f"p={p}" if K.n == 1 else ""
        out.append(Place("finite", prime=p, poly=phi, residue_degree=fdeg, ramification=e,
                         name=name))
    return out


# ---------------------------------------------------------------------------
# valuations and absolute values
# ---------------------------------------------------------------------------

def valuation(x, v: Place) -> int:
    """Normalized order ``ord_v(x)`` at a non-archimedean place."""
    if v.kind == "finite":
        return x.field.valuation(x, v)
    if v.kind == "ff_finite":
        return x.order_at(v.poly)
    if v.kind == "ff_infinity":
        return x.order_at_infinity()
    raise ValueError("archimedean places carry no valuation")


def _exact_abs(x, v: Place) -> Fraction | None:
    if x.is_zero():
        return Fraction(0)
    if v.kind in ("finite", "ff_finite", "ff_infinity"):
        k = valuation(x, v)
        base = v.residue_size
        return Fraction(1, base**k) if k >= 0 else Fraction(base**(-k))
    if x.is_rational():
        r = abs(x.c[0])
        return r * r if v.kind == "complex" else r
    return None


def _eval_real(c, box: Interval, wp: int) -> Interval:
    acc = Interval(c[-1])
    for a in reversed(c[:-1]):
        acc = (acc * box + a).rounded(wp)
    return acc


def _eval_complex(c, re: Interval, im: Interval, wp: int):
    ar, ai = Interval(c[-1]), Interval(0)
    for a in reversed(c[:-1]):
        nr = ar * re - ai * im + a
        ni = ar * im + ai * re
        ar, ai = nr.rounded(wp), ni.rounded(wp)
    return ar, ai


def _arch_enclosure(x: NFElement, v: Place, bits: int) -> Interval:
    K = x.field
    re, im = K.root_box(v.root_index, bits)
    if v.kind == "real":
        return abs(_eval_real(x.c, re, bits + 16))
    ar, ai = _eval_complex(x.c, re, im, bits + 16)
    return ar.sq() + ai.sq()


def abs_value(x, v: Place, precision: int = 128) -> Interval:
    """Enclosure of ``|x|_v``; zero width whenever the value is rational.

    For archimedean places with irrational values the relative width is at
    most ``2 ** (1 - precision)``.
    """
    if v.explicit_ords is not None:
        raise RamifiedUnsupported(v.prime, "explicit place: element absolute values unavailable")
    ex = _exact_abs(x, v)
    if ex is not None:
        return Interval(ex)
    target = Fraction(2, 2**precision)
    bits = precision + 16
    while True:
        enc = _arch_enclosure(x, v, bits)
        if not enc.contains(0) and enc.width <= target * enc.lo:
            return enc.rounded(precision + 8)
        bits *= 2


def compare_abs(x, v: Place, t, ceiling: int = DEFAULT_CEILING) -> int:
    """Exact sign of ``|x|_v - t`` for a rational ``t``."""
    t = as_fraction(t)
    ex = _exact_abs(x, v)
    if ex is not None:
        return (ex > t) - (ex < t)
    bits = 64
    while bits <= min(ceiling, TIE_TEST_BITS):
        enc = _arch_enclosure(x, v, bits)
        if enc.certainly_gt(t):
            return 1
        if enc.certainly_lt(t):
            return -1
        bits *= 2
    return _exact_tie_break(x, v, t, bits)


def _exact_tie_break(x: NFElement, v: Place, t: Fraction, bits: int = 2 * DEFAULT_CEILING) -> int:
    """Decide ``|x|_v`` vs ``t`` once enclosures stall; an algebraic test
    settles equality and anything else is refined without a ceiling."""
    if v.kind == "real":
        if x == t or x == -t:
            return 0
        while True:
            enc = _arch_enclosure(x, v, bits)
            if enc.certainly_gt(t):
                return 1
            if enc.certainly_lt(t):
                return -1
            bits *= 2
    # complex place: |sigma(x)|^2 is a product of two conjugates of x, hence a
    # root of R(s) = Res_y(P(y), y^n P(s/y)) with P the characteristic polynomial.
    K = x.field
    P = K.charpoly(x)
    y, s = P.gens[0], Symbol("_s")
    n = P.degree()
    Q = sympy.expand(y**n * P.as_expr().subs(y, s / y))
    R = Poly(sympy.resultant(P.as_expr(), Q, y), s)
    tr = sympy.Rational(t.numerator, t.denominator)
    if R.eval(tr) != 0:
        while True:
            enc = _arch_enclosure(x, v, bits)
            if enc.certainly_gt(t):
                return 1
            if enc.certainly_lt(t):
                return -1
            bits *= 2
    Rs = Poly(sympy.quo(R, sympy.gcd(R, R.diff(s))), s)
    _, Rs = Rs.clear_denoms()
    N = Rs.degree()
    norm2 = math.sqrt(float(sum(int(c) ** 2 for c in Rs.all_coeffs())))
    # Mahler's root separation bound
    log_sep = 0.5 * math.log(3) - (N + 2) / 2 * math.log(N) - (N - 1) * math.log(norm2)
    bits = int(-log_sep / math.log(2)) + 4
    enc = _arch_enclosure(x, v, max(bits, 64))
    while enc.width * 2 >= Fraction(2) ** int(log_sep / math.log(2) - 1):
        bits *= 2
        enc = _arch_enclosure(x, v, bits)
    if enc.contains(t):
        return 0
    return 1 if enc.certainly_gt(t) else -1


def in_band(x, S: PlaceSet, theta) -> bool:
    """``theta^-1 <= |x|_v <= theta`` at every ``v`` in ``S`` (and ``x != 0``)."""
    if x.is_zero():
        return False
    theta = as_fraction(theta)
    inv = 1 / theta
    for v in S:
        if compare_abs(x, v, theta) > 0 or compare_abs(x, v, inv) < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# ring membership and the product formula
# ---------------------------------------------------------------------------

def _s_integral(x, S: PlaceSet) -> bool:
    if x.is_zero():
        return True
    K = x.field
    if isinstance(K, NumberField):
        D, _ = x.integral_form()
        rest = D
        for p in sorted(S.finite_primes):
            if rest % p:
                continue
            while rest % p == 0:
                rest //= p
            for v in places_above(K, p):
                if v not in S and valuation(x, v) < 0:
                    # explicit places in S replace the computed ones
                    if any(w.prime == p and w.explicit_ords is not None for w in S):
                        raise RamifiedUnsupported(p, "membership above an explicit place")
                    return False
        if rest == 1:
            return True
        # a prime outside S divides D; when Z[x] is p-maximal that alone
        # rules out integrality, so only primes of the discriminant need care
        g = math.gcd(rest, K.discriminant)
        for p in _primes_of(g):
            places_above(K, p)
        return False
    q = K.q
    den = x.den
    for v in S:
        if v.kind != "ff_finite":
            continue
        while F.degree(den) > 0:
            quo, r = F.fp_divmod(den, v.poly, q)
            if r:
                break
            den = quo
    if F.degree(den) > 0:
        return False
    if not S.has_infinity() and x.order_at_infinity() < 0:
        return False
    return True


def in_ring(x, pres: Presentation, S: PlaceSet | None = None) -> bool:
    """Membership of ``x`` in ``M = O_S`` (requires the maximality attestation)."""
    if not pres.maximality_attested:
        raise MaximalityNotAttested(
            f"presentation {pres.name!r} does not attest M = O_S; membership is undecidable here")
    return _s_integral(x, S if S is not None else pres.places)


def is_s_unit(x, S: PlaceSet) -> bool:
    return not x.is_zero() and _s_integral(x, S) and _s_integral(x.inverse(), S)


def product_formula_check(x, S: PlaceSet, precision: int = 128) -> bool:
    """``prod_{v in S} |x|_v == 1`` for an S-unit ``x`` (exact when possible)."""
    if not is_s_unit(x, S):
        raise NotAnSUnit(f"{x!r} is not an S-unit")
    prod = Interval(1)
    for v in S:
        prod = (prod * abs_value(x, v, precision)).rounded(precision + 16)
    return prod.contains(1)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_presentation(doc: dict) -> Presentation:
    """Build a validated :class:`Presentation` from a config document.

    ``doc`` is the parsed TOML/JSON mapping with ``system`` and ``field``
    tables (see the README for the schema).
    """
    from . import expr

    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    system = doc.get("system")
    fld = doc.get("field")
    if not isinstance(system, dict) or not isinstance(fld, dict):
        raise ConfigError("config needs [system] and [field] tables")
    name = str(system.get("name", "unnamed"))
    try:
        d = int(system["d"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("system.d: missing or not an integer") from None
    char = system.get("characteristic", fld.get("base_q", 0))
    try:
        char = int(char)
    except (TypeError, ValueError):
        raise ConfigError("system.characteristic: not an integer") from None
    if "base_q" in fld and int(fld["base_q"]) != char:
        raise ConfigError("field.base_q disagrees with system.characteristic")
    images = fld.get("generator_images")
    if not isinstance(images, list) or len(images) != d:
        raise ConfigError(f"field.generator_images: expected a list of {d} expressions")

    if char == 0:
        if "min_poly" not in fld:
            raise ConfigError("field.min_poly: required in characteristic 0")
        mp = fld["min_poly"]
        var = str(fld.get("variable", "x"))
        coeffs = expr.poly_coeffs(mp, var) if isinstance(mp, str) else [int(c) for c in mp]
        K = NumberField(coeffs, var)
    else:
        if char < 0:
            raise ConfigError("system.characteristic: must be 0 or a prime")
        K = RationalFunctionField(char, str(fld.get("variable", "t")))
    env = {K.var: K.gen}
    gens = []
    for i, text in enumerate(images):
        try:
            g = expr.evaluate(text, K, env)
        except ZeroDivisionError:
            raise ZeroGenerator(f"field.generator_images[{i}]: division by zero") from None
        except ConfigError as exc:
            raise ConfigError(f"field.generator_images[{i}]: {exc}") from None
        gens.append(g)

    explicit = []
    for j, ep in enumerate(fld.get("explicit_places", []) or []):
        try:
            p = int(ep["prime"])
            ords = tuple(int(o) for o in ep["ords"])
            e = int(ep.get("ramification", 1))
            f = int(ep.get("residue_degree", 1))
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"field.explicit_places[{j}]: need prime, ords "
                              "(and optional ramification, residue_degree)") from None
        if char != 0:
            raise ConfigError("field.explicit_places: only meaningful in characteristic 0")
        if len(ords) != d:
            raise ConfigError(f"field.explicit_places[{j}].ords: expected {d} entries")
        explicit.append(Place("finite", prime=p, residue_degree=f, ramification=e,
                              explicit_ords=ords, poly=(j,)))
    return Presentation(name=name, d=d, field=K, generators=tuple(gens),
                        maximality_attested=bool(fld.get("maximality_attested", False)),
                        explicit_places=tuple(explicit))
