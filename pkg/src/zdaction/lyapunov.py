"""Lyapunov vectors, the mixing test, directional entropy and the
separation constants ``C`` and ``C/sigma``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import NotMixing, ProductFormulaViolation, RankUndecidable
from .fields import NumberField, Place, PlaceSet, Presentation, abs_value, valuation
from .reals import Interval, as_fraction, imax, imin

__all__ = [
    "LogAbs",
    "LogReal",
    "LyapunovData",
    "directional_entropy",
    "is_mixing",
    "lyapunov_vectors",
    "one_sided_constant",
    "separation_constant",
]


@dataclass(frozen=True)
class LogAbs:
    """``log|g|_v`` as an enclosure; ``exact`` is ``|g|_v`` when rational."""

    enc: Interval
    exact: Fraction | None = None

    def __float__(self):
        return float(self.enc.mid)


@dataclass(frozen=True)
class LogReal:
    """A real number with enclosure ``enc``.

    When ``log_of`` is set the value is exactly ``scale * log(log_of)``.
    """

    enc: Interval
    log_of: Fraction | None = None
    scale: Fraction = Fraction(1)

    def __float__(self):
        return float(self.enc.mid)

    def __truediv__(self, k: int) -> "LogReal":
        return LogReal(self.enc / k, self.log_of, self.scale / k)

    def describe(self) -> str:
        if self.log_of is None:
            return self.enc.render()
        s = "" if self.scale == 1 else f"{self.scale}*"
        return f"{s}log({self.log_of})"


@dataclass
class LyapunovData:
    name: str
    d: int
    places: tuple
    vectors: tuple  # one tuple of LogAbs per place
    precision: int = 128
    mixing: bool | None = None
    separation_c: LogReal | None = None
    exact_valuations: tuple | None = None  # integer ord matrix when available

    @property
    def sigma(self) -> int:
        return len(self.vectors) - 1

    def matrix(self) -> np.ndarray:
        """Float matrix with one row per place."""
        return np.array([[float(c) for c in vec] for vec in self.vectors], dtype=np.float64)

    def zero_sum(self) -> list[Interval]:
        """Componentwise sums; each must contain 0."""
        return [sum((vec[i].enc for vec in self.vectors), Interval(0)) for i in range(self.d)]


def _log_abs(g, v: Place, precision: int) -> LogAbs:
    if v.explicit_ords is not None:
        raise AssertionError("explicit places are handled by the caller")
    a = abs_value(g, v, precision)
    if a.is_exact:
        return LogAbs(a.log(precision), a.lo)
    return LogAbs(a.log(precision), None)


def lyapunov_vectors(pres: Presentation, S: PlaceSet | None = None,
                     precision: int = 128) -> LyapunovData:
    """``l_v = (log|g_1|_v, ..., log|g_d|_v)`` for every ``v`` in ``S``.

    Raises :class:`ProductFormulaViolation` when some coordinate does not sum
    to zero over ``S`` (which flags inconsistent explicit place data).
    """
    S = pres.places if S is None else S
    vectors = []
    for v in S:
        if v.explicit_ords is not None:
            base = v.prime ** v.residue_degree
            row = []
            for o in v.explicit_ords:
                r = Fraction(1, base**o) if o >= 0 else Fraction(base**(-o))
                row.append(LogAbs(Interval(r).log(precision), r))
            vectors.append(tuple(row))
        else:
            vectors.append(tuple(_log_abs(g, v, precision) for g in pres.generators))
    data = LyapunovData(pres.name, pres.d, tuple(S), tuple(vectors), precision)

    tol = Fraction(1, 2 ** (precision - 24))
    for i in range(pres.d):
        col = [vec[i] for vec in vectors]
        if all(c.exact is not None for c in col):
            prod = math.prod(c.exact for c in col)
            if prod != 1:
                raise ProductFormulaViolation(
                    f"coordinate u{i + 1}: product of |g_{i + 1}|_v over S is {prod}, not 1")
        else:
            s = sum((c.enc for c in col), Interval(0))
            if not s.contains(0) or s.width > tol * (1 + sum(abs(c.enc.mid) for c in col)):
                raise ProductFormulaViolation(
                    f"coordinate u{i + 1}: sum of log|g_{i + 1}|_v over S is {s.render()}")

    data.exact_valuations = _valuation_matrix(pres, S)
    return data


def _valuation_matrix(pres: Presentation, S: PlaceSet):
    """Integer matrix whose rank equals the rank of the Lyapunov vectors.

    Available when at most one place of ``S`` is archimedean: the remaining
    rows are rescaled valuations and the archimedean row is minus their
    weighted sum.
    """
    arch = [v for v in S if v.archimedean]
    if len(arch) > 1:
        return None
    rows = []
    for v in S:
        if v.archimedean:
            continue
        if v.explicit_ords is not None:
            rows.append(tuple(v.explicit_ords))
        else:
            rows.append(tuple(valuation(g, v) for g in pres.generators))
    return tuple(rows)


def _rank_exact(rows, d: int) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    for col in range(d):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _idet(m: list[list[Interval]]) -> Interval:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Interval(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _idet(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def is_mixing(L: LyapunovData, pres: Presentation | None = None, ceiling: int = 2048) -> bool:
    """True iff the Lyapunov vectors span ``R^d``.

    The Lyapunov vectors are log-embeddings of S-units, which form a
    lattice, so real and rational linear dependence coincide.  With at most
    one archimedean place the rank is read off an exact valuation matrix;
    otherwise a nonzero minor certifies spanning and an exact multiplicative
    relation between the generators certifies its failure.
    """
    d = L.d
    if L.exact_valuations is not None:
        rows = L.exact_valuations
        mixing = bool(rows) and _rank_exact(rows, d) == d
        L.mixing = mixing
        return mixing
    if len(L.vectors) < d + 1:
        L.mixing = False
        return False
    for rows in itertools.combinations(range(len(L.vectors)), d):
        m = [[L.vectors[r][i].enc for i in range(d)] for r in rows]
        if not _idet(m).contains(0):
            L.mixing = True
            return True
    if pres is not None and _find_relation(L, pres):
        L.mixing = False
        return False
    if L.precision < ceiling and pres is not None:
        finer = lyapunov_vectors(pres, PlaceSet(L.places), L.precision * 2)
        result = is_mixing(finer, pres, ceiling)
        L.mixing = result
        return result
    raise RankUndecidable(f"rank of Lyapunov vectors of {L.name!r} undecided at "
                          f"{L.precision} bits")


def _find_relation(L: LyapunovData, pres: Presentation) -> bool:
    """Search a small integer ``c`` with ``prod g_i^c_i`` a root of unity."""
    A = L.matrix()
    _, s, vt = np.linalg.svd(A)
    w = vt[-1]
    if np.max(np.abs(w)) == 0:
        return False
    w = w / w[np.argmax(np.abs(w))]
    K = pres.field
    n = getattr(K, "n", 1)
    orders = [m for m in range(1, 4 * n * n + 7)]
    for den in range(1, 60):
        c = [round(x * den) for x in w]
        if not any(c) or max(abs(x - y / den) for x, y in zip(w, c)) > 1e-6:
            continue
        y = pres.power(tuple(c))
        if any(y ** m == K.one for m in orders):
            return True
    return False


def directional_entropy(L: LyapunovData, w) -> Interval:
    """``h(w) = sum_v max(l_v . w, 0)`` in nats."""
    w = [as_fraction(x) for x in w]
    if len(w) != L.d or not any(w):
        raise ValueError("direction must be a nonzero vector of dimension d")
    total = Interval(0)
    for vec in L.vectors:
        s = sum((c.enc * wi for c, wi in zip(vec, w)), Interval(0))
        total = total + Interval(max(s.lo, 0), max(s.hi, 0))
    return total


def separation_constant(L: LyapunovData, pres: Presentation | None = None) -> LogReal:
    """``C = min_{|z|=1} max_v |l_v . z|``.

    Exact in d=1, exact up to interval rounding for d=2 (the minimum of the
    envelope sits where two active forms tie), and a certified enclosure from
    branch-and-bound on the sphere for d >= 3.
    """
    if L.mixing is None:
        is_mixing(L, pres)
    if not L.mixing:
        raise NotMixing(f"{L.name!r} is not mixing; C = 0")
    if L.d == 1:
        C = _sep_d1(L)
    elif L.d == 2:
        C = _sep_d2(L)
    else:
        C = _sep_grid(L)
    L.separation_c = C
    return C


def _sep_d1(L: LyapunovData) -> LogReal:
    comps = [vec[0] for vec in L.vectors]
    enc = imax(abs(c.enc) for c in comps)
    if all(c.exact is not None for c in comps):
        best = max(max(c.exact, 1 / c.exact) for c in comps)
        return LogReal(Interval(best).log(L.precision), best)
    return LogReal(enc)


def _equal_forms(a, b, sign: int) -> bool:
    if all(x.exact is not None for x in a + b):
        if sign > 0:
            return all(x.exact == y.exact for x, y in zip(a, b))
        return all(x.exact * y.exact == 1 for x, y in zip(a, b))
    diff = [x.enc - sign * y.enc for x, y in zip(a, b)]
    return all(dd.contains(0) for dd in diff)


def _sep_d2(L: LyapunovData) -> LogReal:
    prec = L.precision
    vecs = L.vectors
    candidates = []
    for i, j in itertools.combinations_with_replacement(range(len(vecs)), 2):
        for sign in (1, -1):
            if i == j and sign == 1:
                continue
            if _equal_forms(vecs[i], vecs[j], sign):
                continue
            ux = vecs[i][0].enc - sign * vecs[j][0].enc
            uy = vecs[i][1].enc - sign * vecs[j][1].enc
            norm = (ux.sq() + uy.sq()).sqrt(prec + 8)
            if norm.contains(0):
                continue
            vals = []
            for vec in vecs:
                # direction z = (-uy, ux) / |u|
                num = abs(vec[1].enc * ux - vec[0].enc * uy)
                vals.append(num)
            candidates.append((imax(vals) / norm).rounded(prec + 8))
    if not candidates:
        raise RankUndecidable("no crossing directions found")
    enc = imin(candidates)
    if enc.lo <= 0:
        raise RankUndecidable("separation constant not certified positive")
    return LogReal(enc)


def _sep_grid(L: LyapunovData, tol: float = 1e-9, max_points: int = 4_000_000) -> LogReal:
    """Branch-and-bound over the faces of the cube ``[-1, 1]^d``.

    Radial projection from the cube surface onto the sphere is 1-Lipschitz,
    so a face cell of half-width ``hw`` maps into a chordal ball of radius
    ``hw * sqrt(d-1)`` around its projected center; ``max_v |l_v . z|`` is
    Lipschitz with constant ``max_v |l_v|``.
    """
    A = L.matrix()
    d = L.d
    lip = float(np.max(np.linalg.norm(A, axis=1))) * (1 + 1e-12)
    slack = 1e-12 * (1 + float(np.max(np.abs(A))))
    m = 8
    hw = 1.0 / m
    centers_1d = -1 + hw * (2 * np.arange(m) + 1)
    grid = np.array(list(itertools.product(centers_1d, repeat=d - 1)))
    pts, axes = [], []
    for axis in range(d):
        for sign in (-1.0, 1.0):
            pts.append(np.insert(grid, axis, sign, axis=1))
            axes.append(np.full(len(grid), axis))
    pts = np.concatenate(pts)
    axes = np.concatenate(axes)
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=d - 1)))
    upper = math.inf
    total = 0
    while True:
        z = pts / np.linalg.norm(pts, axis=1)[:, None]
        vals = _kernels.sphere_max_abs(A, z)
        upper = min(upper, float(vals.min()) + slack)
        lows = vals - lip * hw * math.sqrt(d - 1) - slack
        keep = lows < upper - tol
        total += len(pts)
        n_next = int(keep.sum()) * len(signs)
        if not keep.any() or total + n_next > max_points:
            lower = min(float(lows.min()), upper - tol)
            break
        kp, ka = pts[keep], axes[keep]
        children, child_axes = [], []
        for axis in range(d):
            sel = kp[ka == axis]
            if not len(sel):
                continue
            delta = np.insert(signs, axis, 0.0, axis=1) * (hw / 2)
            ch = (sel[:, None, :] + delta[None, :, :]).reshape(-1, d)
            children.append(ch)
            child_axes.append(np.full(len(ch), axis))
        pts = np.concatenate(children)
        axes = np.concatenate(child_axes)
        hw /= 2
    if lower <= 0:
        raise RankUndecidable("grid refinement could not certify C > 0")
    return LogReal(Interval(Fraction(lower), Fraction(upper)))


def one_sided_constant(L: LyapunovData, pres: Presentation | None = None) -> LogReal:
    """``C/sigma``: some place has ``l_w . n_hat > C/sigma`` for every ``n``."""
    C = L.separation_c if L.separation_c is not None else separation_constant(L, pres)
    if L.sigma < 1:
        raise NotMixing("sigma = |S| - 1 must be at least 1")
    return C / L.sigma
