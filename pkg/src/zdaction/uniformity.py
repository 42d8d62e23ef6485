"""Exhaustive sets ``H_k``, the trivial-intersection Properties I and II,
windowed radius scans and the rate functions ``phi`` and ``psi``.

``H_k`` is the set of nonzero module elements whose absolute values at every
``v`` in ``S`` lie in ``[theta(k)^-1, theta(k)]``.  Enumeration is exact; scans
first discard (n, a) pairs with a float log-profile screen (see
:mod:`zdaction._kernels`) and decide every survivor with exact arithmetic.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import _kernels
from . import polyfp as F
from .errors import ConfigError, MaximalityNotAttested, NotMixing, RamifiedUnsupported, SetTooLarge
from .fields import (
    NumberField,
    PlaceSet,
    Presentation,
    _primes_of,
    in_band,
    in_ring,
    to_str,
    valuation,
)
from .laurent import exp_norm, shell_order
from .reals import as_fraction

__all__ = [
    "ExhaustiveSet",
    "RadiusReport",
    "ThetaSchedule",
    "check_property_I",
    "check_property_II",
    "default_B",
    "default_C2",
    "enumerate_Hk",
    "exhaustion_index",
    "fit_rate",
    "log_profile",
    "phi_rate",
    "psi_rate",
    "reports_to_csv",
    "scan_radius",
]

DEFAULT_CAP = 10**6
_EPS = 2.0**-52


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaSchedule:
    """``theta(k)``: geometric ``base**k`` or a user list indexed from ``k = 1``."""

    kind: str
    base: Fraction | None = None
    values: tuple = ()

    @classmethod
    def geometric(cls, base=2) -> "ThetaSchedule":
        base = as_fraction(base)
        if base <= 1:
            raise ConfigError(f"schedule base must exceed 1, got {base}")
        return cls("geometric", base=base)

    @classmethod
    def user(cls, values) -> "ThetaSchedule":
        vals = tuple(as_fraction(v) for v in values)
        if not vals:
            raise ConfigError("theta list is empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("theta list must be strictly increasing")
        return cls("user", values=vals)

    def value(self, k: int) -> Fraction:
        if self.kind == "geometric":
            if k < 0:
                raise ValueError("k must be >= 0")
            return self.base ** k
        if not 1 <= k <= len(self.values):
            raise ValueError(f"theta list covers k = 1..{len(self.values)}, asked for k = {k}")
        return self.values[k - 1]

    __call__ = value


def _log(x) -> float:
    x = as_fraction(x)
    return math.log(x.numerator) - math.log(x.denominator)


def _max_power(base: int, bound: Fraction) -> int:
    """Largest ``t >= 0`` with ``base**t <= bound`` (``bound >= 1``)."""
    t, acc = 0, base
    while acc <= bound:
        t += 1
        acc *= base
    return t


# ---------------------------------------------------------------------------
# float log profiles for screening
# ---------------------------------------------------------------------------

def _roots(K: NumberField) -> list[complex]:
    cache = getattr(K, "_float_roots", None)
    if cache is None:
        cache = [K.root_float(i) for i in range(K.n)]
        K._float_roots = cache
    return cache


def log_profile(x, S: PlaceSet) -> tuple[np.ndarray, float]:
    """``(log|x|_v for v in S, error bound)`` in floating point.

    Non-archimedean entries are exact up to one rounding; archimedean ones
    carry an a-priori bound on the evaluation error, returned as the second
    component.
    """
    out = np.empty(len(S))
    err = 0.0
    for j, v in enumerate(S):
        if not v.archimedean:
            out[j] = -valuation(x, v) * math.log(v.residue_size)
            continue
        if x.is_rational():
            r = abs(x.c[0])
            out[j] = _log(r) * (2 if v.kind == "complex" else 1)
            continue
        r = _roots(x.field)[v.root_index]
        terms = [float(c) * r**i for i, c in enumerate(x.c)]
        val = sum(terms)
        scale = sum(abs(t) for t in terms)
        mag = abs(val)
        out[j] = math.log(mag) * (2 if v.kind == "complex" else 1)
        err = max(err, 8 * len(terms) * _EPS * scale / mag)
    return out, err


def _power_profile(pres: Presentation, S: PlaceSet, n, minus_one: bool) -> tuple[np.ndarray, float]:
    """Log profile of ``beta_n`` or ``beta_n - 1`` from generator embeddings."""
    beta = pres.power(n)
    target = beta - pres.field.one if minus_one else beta
    if target.is_zero():
        raise NotMixing(f"u^{tuple(n)} acts trivially")
    out = np.empty(len(S))
    err = 0.0
    for j, v in enumerate(S):
        if not v.archimedean:
            out[j] = -valuation(target, v) * math.log(v.residue_size)
            continue
        if target.is_rational():
            out[j] = _log(abs(target.c[0])) * (2 if v.kind == "complex" else 1)
            continue
        r = _roots(pres.field)[v.root_index]
        z = complex(1.0)
        for g, e in zip(pres.generators, n):
            gz = sum(float(c) * r**i for i, c in enumerate(g.c))
            z *= gz ** e
        w = z - 1 if minus_one else z
        out[j] = math.log(abs(w)) * (2 if v.kind == "complex" else 1)
        err = max(err, 16 * (1 + sum(abs(e) for e in n)) * _EPS * max(abs(z), 1) / abs(w))
    return out, err


# ---------------------------------------------------------------------------
# exhaustive sets
# ---------------------------------------------------------------------------

@dataclass
class ExhaustiveSet:
    """Nonzero members of ``H_k``; zero is implicit."""

    k: int | None
    theta: Fraction
    elements: tuple
    pres: Presentation
    S: PlaceSet
    _logs: np.ndarray | None = dc_field(default=None, repr=False)
    _err: float = dc_field(default=0.0, repr=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def log_theta(self) -> float:
        return _log(self.theta)

    def contains(self, x) -> bool:
        """Exact membership; ``0`` is a member."""
        if x.is_zero():
            return True
        return in_ring(x, self.pres, self.S) and in_band(x, self.S, self.theta)

    def profiles(self) -> tuple[np.ndarray, float]:
        if self._logs is None:
            rows, err = [], 0.0
            for a in self.elements:
                row, e = log_profile(a, self.S)
                rows.append(row)
                err = max(err, e)
            self._logs = np.array(rows, dtype=np.float64).reshape(len(self.elements), len(self.S))
            self._err = err
        return self._logs, self._err


def enumerate_Hk(pres: Presentation, S: PlaceSet | None = None, theta=2, cap: int = DEFAULT_CAP,
                 k: int | None = None) -> ExhaustiveSet:
    """Exact, duplicate-free enumeration of ``H_k`` at band parameter ``theta``.

    Raises :class:`SetTooLarge` once more than ``cap`` elements (or a
    candidate box far larger than ``cap``) would be produced.
    """
    if not pres.maximality_attested:
        raise MaximalityNotAttested(f"presentation {pres.name!r} does not attest M = O_S")
    S = pres.places if S is None else S
    theta = as_fraction(theta)
    if theta < 1:
        raise ConfigError(f"theta must be >= 1, got {theta}")
    if any(v.explicit_ords is not None for v in S):
        raise RamifiedUnsupported(next(v.prime for v in S if v.explicit_ords is not None),
                                  "enumeration needs element valuations")
    K = pres.field
    if isinstance(K, NumberField):
        elems = _enum_rational(K, S, theta, cap) if K.n == 1 else _enum_number_field(pres, S, theta, cap)
    else:
        elems = _enum_function_field(K, S, theta, cap)
    elems.sort(key=lambda a: a.sort_key())
    return ExhaustiveSet(k, theta, tuple(elems), pres, S)


def _too_large(count: int, cap: int, what: str = "elements"):
    raise SetTooLarge(f"H_k would exceed the cap ({count} {what} > {cap}); "
                      "lower theta or raise --cap")


def _enum_rational(field: NumberField, S: PlaceSet, theta: Fraction, cap: int) -> list:
    primes = sorted(S.finite_primes)
    P = math.prod(primes)
    out = []
    ranges = [range(-_max_power(p, theta), _max_power(p, theta) + 1) for p in primes]
    inv = 1 / theta
    for ts in itertools.product(*ranges):
        u = Fraction(1)
        for p, t in zip(primes, ts):
            u *= Fraction(p) ** t
        lo, hi = inv / u, theta / u
        mlo = max(1, -((-lo.numerator) // lo.denominator))
        mhi = hi.numerator // hi.denominator
        for m in range(mlo, mhi + 1):
            if math.gcd(m, P) != 1:
                continue
            out.append(field.from_int(m * u))
            out.append(field.from_int(-m * u))
            if len(out) > cap:
                _too_large(len(out), cap)
    return out


def _enum_number_field(pres: Presentation, S: PlaceSet, theta: Fraction, cap: int) -> list:
    K: NumberField = pres.field
    s_primes = sorted(S.finite_primes)
    for p in _primes_of(abs(K.discriminant)):
        if not K.prime_data(p).maximal:
            raise RamifiedUnsupported(p, "Z[x] is not p-maximal, so it is not an integral basis")
    # denominators: ord_P(a) >= -T_P at S-places above p
    D = 1
    for p in s_primes:
        kp = 0
        for v in S:
            if v.kind == "finite" and v.prime == p:
                T = _max_power(v.residue_size, theta)
                kp = max(kp, -(-T // v.ramification))
        D *= p ** kp
    # archimedean box -> coefficient box via the inverse Vandermonde matrix
    roots = np.array(_roots(K))
    V = np.vander(roots, K.n, increasing=True)
    Vinv = np.linalg.inv(V)
    th = float(theta)
    bounds = np.array([th if abs(r.imag) < 1e-300 or i < K.r1 else math.sqrt(th)
                       for i, r in enumerate(roots)])
    coef = np.abs(Vinv) @ bounds
    B = [int(math.floor(D * c * (1 + 1e-9) + 1e-9)) for c in coef]
    box = math.prod(2 * b + 1 for b in B)
    if box > 50 * cap:
        _too_large(box, 50 * cap, "lattice candidates")
    arch = [(j, v) for j, v in enumerate(S) if v.archimedean]
    lt = math.log(th)
    out = []
    first = np.arange(-B[0], B[0] + 1)
    rest = np.array(list(itertools.product(*(range(-b, b + 1) for b in B[1:]))), dtype=np.int64)
    rest = rest.reshape(-1, K.n - 1)
    powers = np.array([[r**i for r in roots] for i in range(K.n)])  # n x n (coef i, root j)
    for c0 in first:
        cand = np.hstack([np.full((rest.shape[0], 1), c0), rest])
        vals = cand.astype(np.float64) @ powers / D
        keep = np.ones(cand.shape[0], dtype=bool)
        for _, v in arch:
            mag = np.abs(vals[:, v.root_index])
            with np.errstate(divide="ignore"):
                lg = np.log(mag) * (2 if v.kind == "complex" else 1)
            keep &= np.abs(lg) <= lt + 1e-6
        for row in cand[keep]:
            a = K.element([Fraction(int(c), D) for c in row])
            if a.is_zero() or not in_ring(a, pres, S) or not in_band(a, S, theta):
                continue
            out.append(a)
            if len(out) > cap:
                _too_large(len(out), cap)
    return out


def _enum_function_field(K, S: PlaceSet, theta: Fraction, cap: int) -> list:
    q = K.q
    fin = [v for v in S if v.kind == "ff_finite"]
    T = [_max_power(v.residue_size, theta) for v in fin]
    inf_in_S = S.has_infinity()
    Tinf = _max_power(q, theta)
    s_polys = [v.poly for v in fin]
    out = []
    for ts in itertools.product(*(range(-t, t + 1) for t in T)):
        num, den = (1,), (1,)
        shift = 0
        for P, t in zip(s_polys, ts):
            shift += t * F.degree(P)
            if t > 0:
                num = F.fp_mul(num, F.fp_pow(P, t, q), q)
            elif t < 0:
                den = F.fp_mul(den, F.fp_pow(P, -t, q), q)
        lo, hi = (-Tinf - shift, Tinf - shift) if inf_in_S else (0, -shift)
        for db in range(max(lo, 0), hi + 1):
            for b in F.monic_polys(db, q):
                if any(F.degree(F.fp_gcd(b, P, q)) > 0 for P in s_polys):
                    continue
                base = F.fp_mul(num, b, q)
                for c in range(1, q):
                    out.append(K.element(F.fp_mul(base, (c,), q), den))
                    if len(out) > cap:
                        _too_large(len(out), cap)
    return out


def exhaustion_index(x, S: PlaceSet, schedule: ThetaSchedule) -> int:
    """Least ``k`` with ``x`` in ``H_k`` for a geometric schedule (``x != 0``)."""
    if schedule.kind != "geometric":
        raise ValueError("exhaustion_index needs a geometric schedule")
    row, _ = log_profile(x, S)
    lb = _log(schedule.base)
    k = max(0, math.ceil(float(np.abs(row).max()) / lb - 1e-9)) if len(row) else 0
    while not in_band(x, S, schedule.value(k)):
        k += 1
    while k > 0 and in_band(x, S, schedule.value(k - 1)):
        k -= 1
    return k


# ---------------------------------------------------------------------------
# Properties I and II
# ---------------------------------------------------------------------------

def _tol(err: float) -> float:
    return 1e-7 + 4 * err


def _violation_I(H: ExhaustiveSet, n) -> object | None:
    if not H.elements:
        return None
    logs, err = H.profiles()
    shift, e2 = _power_profile(H.pres, H.S, n, minus_one=False)
    mask = _kernels.screen_band(logs, shift[None, :], H.log_theta, _tol(err + e2))[0]
    beta = H.pres.power(n)
    for idx in np.flatnonzero(mask):
        a = H.elements[idx]
        if in_band(beta * a, H.S, H.theta):
            return a
    return None


def _violation_II(H: ExhaustiveSet, n, variant: str) -> object | None:
    if not H.elements:
        return None
    pres = H.pres
    logs, err = H.profiles()
    shift, e2 = _power_profile(pres, H.S, n, minus_one=True)
    gamma = pres.power(n) - pres.field.one
    if variant == "literal":
        mask = _kernels.screen_band(logs, shift[None, :], H.log_theta, _tol(err + e2))[0]
        for idx in np.flatnonzero(mask):
            a = H.elements[idx]
            if in_band(gamma * a, H.S, H.theta):
                return a
        return None
    if variant != "strong":
        raise ValueError(f"unknown variant {variant!r}")
    # h = gamma * a with a in M forces prod_S |h|_v >= prod_S |gamma|_v = |Fix|
    need = float(shift.sum()) - _tol(err + e2) * len(H.S)
    totals = logs.sum(axis=1)
    for idx in np.flatnonzero(totals >= need):
        h = H.elements[idx]
        a = h / gamma
        if in_ring(a, pres, H.S):
            return a
    return None


def check_property_I(H: ExhaustiveSet, n) -> bool:
    """``True`` iff ``H ∩ u^n H = {0}``."""
    if not any(n):
        raise ValueError("n must be nonzero")
    return _violation_I(H, tuple(n)) is None


def check_property_II(H: ExhaustiveSet, n, variant: str = "literal") -> bool:
    """``True`` iff ``H ∩ (u^n - 1)H = {0}`` (literal) or ``H ∩ (u^n - 1)M = {0}`` (strong)."""
    if not any(n):
        raise ValueError("n must be nonzero")
    return _violation_II(H, tuple(n), variant) is None


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

_PROPERTIES = {"I": ("I", ""), "II": ("II", "literal"), "II-literal": ("II", "literal"),
               "II-strong": ("II", "strong")}


@dataclass(frozen=True)
class RadiusReport:
    k: int | None
    theta: Fraction
    property: str
    variant: str
    scan_radius: float
    last_violation_sq: int | None
    boundary_hit: bool
    witness: tuple | None = None
    violations: int = 0

    @property
    def last_violation_norm(self) -> float | None:
        if self.last_violation_sq is None:
            return None
        return math.sqrt(self.last_violation_sq)

    @property
    def r(self) -> float:
        """Empirical radius; 0 when no violation was seen."""
        return self.last_violation_norm or 0.0

    def row(self) -> dict:
        w = ""
        if self.witness is not None:
            a, n = self.witness
            a = "(" + ", ".join(map(to_str, a)) + ")" if isinstance(a, tuple) else to_str(a)
            w = f"a={a};n=({','.join(map(str, n))})"
        return {
            "k": "" if self.k is None else self.k,
            "theta": str(self.theta),
            "property": self.property,
            "variant": self.variant or "-",
            "r": f"{self.r:.12f}",
            "r_sq": 0 if self.last_violation_sq is None else self.last_violation_sq,
            "boundary_hit": str(self.boundary_hit).lower(),
            "witness": w,
        }


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    rows = [r.row() for r in reports]
    fields = ["k", "theta", "property", "variant", "r", "r_sq", "boundary_hit", "witness"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def scan_radius(pres: Presentation, S: PlaceSet | None, H: ExhaustiveSet, property: str = "I",
                window_radius: float = 10) -> RadiusReport:
    """Check the property at every nonzero ``n`` with ``|n| <= window_radius``
    and report the largest violating norm."""
    if property not in _PROPERTIES:
        raise ConfigError(f"property must be one of I, II, II-strong; got {property!r}")
    if window_radius < 1:
        raise ConfigError("window radius must be >= 1")
    if H.theta <= 1:
        raise ConfigError("scans need theta > 1")
    prop, variant = _PROPERTIES[property]
    shells = [n for n in shell_order(pres.d, window_radius) if any(n)]
    outer = max(exp_norm(n).squared for n in shells)
    last, witness, count = None, None, 0
    for n in shells:
        bad = _violation_I(H, n) if prop == "I" else _violation_II(H, n, variant)
        if bad is None:
            continue
        count += 1
        sq = exp_norm(n).squared
        if last is None or sq > last:
            last, witness = sq, (bad, n)
    return RadiusReport(H.k, H.theta, prop, variant, float(window_radius), last,
                        last is not None and last == outer, witness, count)


# ---------------------------------------------------------------------------
# rate functions
# ---------------------------------------------------------------------------

def default_B(C: float) -> float:
    """``B = 2/C``: the smallest multiplier the band argument supports."""
    if not C > 0:
        raise NotMixing("separation constant must be positive")
    return 2.0 / C


def default_C2(C: float, sigma: int, eps: float = 1e-6) -> float:
    return C / sigma - eps


def phi_rate(B: float, theta) -> float:
    """``phi(k) = B log theta(k)``."""
    if not B > 0:
        raise ValueError("B must be positive")
    return B * _log(theta)


def psi_rate(sigma: int, A: float, C1: float, C2: float, theta) -> float:
    """``max{C1, ((sigma+1)/C2) log(theta / (A^sigma/2)^(1/(sigma+1)))}``."""
    if int(sigma) != sigma or sigma < 1:
        raise ValueError("sigma must be a positive integer")
    if not (A > 0 and C1 > 0 and C2 > 0):
        raise ValueError("A, C1 and C2 must be positive")
    inner = (sigma * math.log(A) - math.log(2)) / (sigma + 1)
    return max(C1, (sigma + 1) / C2 * (_log(theta) - inner))


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residuals: tuple


def fit_rate(thetas, radii) -> RateFit:
    """Ordinary least squares of ``r`` against ``log theta`` (advisory)."""
    x = np.array([_log(t) for t in thetas])
    y = np.array([float(r) for r in radii])
    if len(x) < 2:
        return RateFit(float("nan"), float("nan"), tuple(0.0 for _ in y))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (slope * x + icpt)
    return RateFit(float(slope), float(icpt), tuple(float(r) for r in res))
