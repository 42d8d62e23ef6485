"""Non-cyclic modules assembled from cyclic pieces.

Every composed module is concrete: as an abelian group it is the direct sum
of its leaf rings, elements are tuples of leaf field elements, and only the
``u``-action differs between shapes.  An extension ``0 -> L -> M -> Q -> 0``
acts by ``u_i (l, q) = (u_i l + c_i(q), u_i q)`` for additive cocycles
``c_i : Q -> L`` (upper-triangular matrices give towers).

``H_k`` of a sum is the product of the summands' sets (with zero allowed in
every coordinate); ``H_k`` of an extension is the union of ``x + H_k^L`` over
representatives ``x`` of ``H_k^Q``; ``H_k`` of a restriction is ``H_k^M ∩ L``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

from .errors import (
    ConfigError,
    NotMixing,
    PredicateNotInvariant,
    RepsMissingZero,
    RepsNotSection,
    SetTooLarge,
)
from .fields import Presentation, in_ring, to_str
from .laurent import exp_norm, shell_order
from .lyapunov import is_mixing, lyapunov_vectors, separation_constant
from .reals import as_fraction
from .uniformity import DEFAULT_CAP, RadiusReport, enumerate_Hk

__all__ = [
    "ComposedModule",
    "ComposedSet",
    "Cyclic",
    "DirectSum",
    "Extension",
    "Restriction",
    "ZeroModule",
    "InheritanceReport",
    "check_composed",
    "check_inheritance",
    "composed_rate",
    "composed_set",
    "direct_sum",
    "extension",
    "leaf_rates",
    "scan_composed",
    "submodule_restrict",
    "tower",
]


def _unit(d: int, i: int, sign: int) -> tuple:
    return tuple(sign if j == i else 0 for j in range(d))


class ComposedModule:
    """Common interface; elements are tuples of length ``dim``."""

    d: int
    dim: int

    @property
    def zero(self) -> tuple:
        raise NotImplementedError

    def act(self, n, x) -> tuple:
        raise NotImplementedError

    def in_module(self, x) -> bool:
        raise NotImplementedError

    def hk(self, theta, cap: int = DEFAULT_CAP) -> tuple:
        """Nonzero members of ``H_k`` at band parameter ``theta``, sorted."""
        raise NotImplementedError

    def solve_minus_one(self, n, h):
        """The ``a`` in ``M`` with ``(u^n - 1)a = h``, or ``None``."""
        raise NotImplementedError

    def leaves(self) -> list[Presentation]:
        raise NotImplementedError

    def components(self) -> list["ComposedModule"]:
        """Immediate pieces whose properties the module inherits."""
        return []

    def prefilter(self, H: "ComposedSet", n, prop: str):
        """Cheap necessary condition for ``x`` in ``H`` to witness a violation
        at ``n`` (a callable), or ``None`` when there is none."""
        return None

    # -- shared helpers -------------------------------------------------
    def is_zero(self, x) -> bool:
        return all(c.is_zero() for c in x)

    def minus_one(self, n, x) -> tuple:
        y = self.act(n, x)
        return tuple(a - b for a, b in zip(y, x))

    def render(self, x) -> str:
        return "(" + ", ".join(to_str(c) for c in x) + ")"


def _sort_key(x):
    return tuple(c.sort_key() for c in x)


def _part_test(part: "ComposedModule", n, prop: str, image_set: frozenset):
    """Memoized test that a projection can still take part in a violation."""
    memo: dict = {}

    def ok(y) -> bool:
        r = memo.get(y)
        if r is None:
            if prop == "I":
                r = part.act(n, y) in image_set
            elif prop == "II":
                r = part.minus_one(n, y) in image_set
            else:
                r = part.solve_minus_one(n, y) is not None
            memo[y] = r
        return r
    return ok


class Cyclic(ComposedModule):
    def __init__(self, pres: Presentation):
        if not pres.maximality_attested:
            raise ConfigError(f"leaf {pres.name!r} must attest maximality")
        L = lyapunov_vectors(pres)
        if not is_mixing(L, pres):
            raise NotMixing(f"leaf {pres.name!r} is not mixing")
        self.pres = pres
        self.d = pres.d
        self.dim = 1
        self._hk: dict = {}

    @property
    def zero(self):
        return (self.pres.field.zero,)

    def act(self, n, x):
        return (self.pres.power(tuple(n)) * x[0],)

    def in_module(self, x) -> bool:
        return x[0].is_zero() or in_ring(x[0], self.pres)

    def hk(self, theta, cap: int = DEFAULT_CAP) -> tuple:
        theta = as_fraction(theta)
        if theta not in self._hk:
            H = enumerate_Hk(self.pres, None, theta, cap)
            self._hk[theta] = tuple((a,) for a in H.elements)
        return self._hk[theta]

    def solve_minus_one(self, n, h):
        gamma = self.pres.power(tuple(n)) - self.pres.field.one
        if gamma.is_zero():
            return self.zero if h[0].is_zero() else None
        a = h[0] / gamma
        return (a,) if in_ring(a, self.pres) else None

    def leaves(self):
        return [self.pres]


class ZeroModule(ComposedModule):
    def __init__(self, d: int):
        self.d = d
        self.dim = 0

    @property
    def zero(self):
        return ()

    def act(self, n, x):
        return ()

    def in_module(self, x) -> bool:
        return x == ()

    def hk(self, theta, cap: int = DEFAULT_CAP) -> tuple:
        return ()

    def solve_minus_one(self, n, h):
        return ()

    def leaves(self):
        return []


class DirectSum(ComposedModule):
    def __init__(self, parts: list[ComposedModule]):
        if not parts:
            raise ConfigError("a direct sum needs at least one summand")
        ds = {p.d for p in parts}
        if len(ds) != 1:
            raise ConfigError(f"summands have different ranks d: {sorted(ds)}")
        self.parts = list(parts)
        self.d = ds.pop()
        self.dim = sum(p.dim for p in parts)
        self._cuts = []
        pos = 0
        for p in parts:
            self._cuts.append((pos, pos + p.dim))
            pos += p.dim

    def _split(self, x):
        return [x[a:b] for a, b in self._cuts]

    @property
    def zero(self):
        return sum((p.zero for p in self.parts), ())

    def act(self, n, x):
        return sum((p.act(n, y) for p, y in zip(self.parts, self._split(x))), ())

    def in_module(self, x) -> bool:
        return all(p.in_module(y) for p, y in zip(self.parts, self._split(x)))

    def hk(self, theta, cap: int = DEFAULT_CAP) -> tuple:
        sets = [(p.zero,) + p.hk(theta, cap) for p in self.parts]
        size = math.prod(len(s) for s in sets) - 1
        if size > cap:
            raise SetTooLarge(f"composed H_k has {size} elements > cap {cap}")
        out = [sum(combo, ()) for combo in itertools.product(*sets)]
        out = [x for x in out if not self.is_zero(x)]
        out.sort(key=_sort_key)
        return tuple(out)

    def prefilter(self, H, n, prop):
        tests = []
        for i, (p, (a, b)) in enumerate(zip(self.parts, self._cuts)):
            proj = H.projection(("sum", id(self), i), lambda x, a=a, b=b: x[a:b], p.zero)
            tests.append((a, b, _part_test(p, n, prop, proj)))
        return lambda x: all(t(x[a:b]) for a, b, t in tests)

    def solve_minus_one(self, n, h):
        out = ()
        for p, y in zip(self.parts, self._split(h)):
            a = p.solve_minus_one(n, y)
            if a is None:
                return None
            out += a
        return out

    def leaves(self):
        return [leaf for p in self.parts for leaf in p.leaves()]

    def components(self):
        return list(self.parts)


class Extension(ComposedModule):
    """``M = L ⊕ Q`` as groups with ``u_i (l, q) = (u_i l + c_i(q), u_i q)``.

    ``cocycles[i]`` is a ``dim(L) x dim(Q)`` matrix of field elements;
    ``reps`` maps a quotient tuple to a full lift in ``M`` (default: the zero
    lift ``q -> (0, q)``).
    """

    def __init__(self, sub: ComposedModule, quotient: ComposedModule, cocycles,
                 reps: Callable | dict | None = None):
        if sub.d != quotient.d:
            raise ConfigError("sub and quotient have different ranks d")
        self.sub, self.quot = sub, quotient
        self.d = sub.d
        self.dim = sub.dim + quotient.dim
        if len(cocycles) != self.d:
            raise ConfigError(f"need {self.d} cocycle matrices, got {len(cocycles)}")
        for m in cocycles:
            if len(m) != sub.dim or any(len(row) != quotient.dim for row in m):
                raise ConfigError("cocycle matrix has the wrong shape")
        self.cocycles = [tuple(tuple(row) for row in m) for m in cocycles]
        self._reps = reps
        self._mats: dict = {}
        self._check_commuting()

    def _split(self, x):
        return x[:self.sub.dim], x[self.sub.dim:]

    @property
    def zero(self):
        return self.sub.zero + self.quot.zero

    def _c(self, i: int, q) -> tuple:
        out = []
        for j, row in enumerate(self.cocycles[i]):
            acc = self.sub.zero[j]
            for c, y in zip(row, q):
                acc = acc + c * y
            out.append(acc)
        return tuple(out)

    def _step(self, i: int, sign: int, x) -> tuple:
        l, q = self._split(x)
        e = _unit(self.d, i, sign)
        if sign > 0:
            nl = self.sub.act(e, l)
            nl = tuple(a + b for a, b in zip(nl, self._c(i, q)))
            return nl + self.quot.act(e, q)
        q1 = self.quot.act(e, q)
        diff = tuple(a - b for a, b in zip(l, self._c(i, q1)))
        return self.sub.act(e, diff) + q1

    def _act_steps(self, n, x):
        for i, k in enumerate(n):
            for _ in range(abs(k)):
                x = self._step(i, 1 if k > 0 else -1, x)
        return x

    def _matrix(self, n) -> list:
        """Columns of ``u^n``; the action is linear over the leaf fields."""
        cols = self._mats.get(n)
        if cols is None:
            cols = []
            for j in range(self.dim):
                e = list(self.zero)
                e[j] = e[j] + 1
                cols.append(self._act_steps(n, tuple(e)))
            if len(self._mats) < 4096:
                self._mats[n] = cols
        return cols

    def act(self, n, x):
        cols = self._matrix(tuple(n))
        out = list(self.zero)
        for xj, col in zip(x, cols):
            if xj.is_zero():
                continue
            for i, c in enumerate(col):
                if not c.is_zero():
                    out[i] = out[i] + xj * c
        return tuple(out)

    def _check_commuting(self):
        if self.d < 2 or self.quot.dim == 0:
            return
        probes = []
        for j in range(self.dim):
            x = list(self.zero)
            x[j] = x[j] + 1
            probes.append(tuple(x))
        for i in range(self.d):
            for j in range(i + 1, self.d):
                for x in probes:
                    a = self._step(i, 1, self._step(j, 1, x))
                    b = self._step(j, 1, self._step(i, 1, x))
                    if a != b:
                        raise ConfigError(f"u_{i + 1} and u_{j + 1} do not commute on {self.render(x)}")

    def in_module(self, x) -> bool:
        l, q = self._split(x)
        return self.sub.in_module(l) and self.quot.in_module(q)

    def rep(self, q) -> tuple:
        if self._reps is None:
            return self.sub.zero + tuple(q)
        if callable(self._reps):
            r = self._reps(tuple(q))
        else:
            r = self._reps.get(tuple(q), self.sub.zero + tuple(q))
        return tuple(r)

    def _checked_rep(self, q) -> tuple:
        r = self.rep(q)
        if len(r) != self.dim or tuple(r[self.sub.dim:]) != tuple(q):
            raise RepsNotSection(f"representative {self.render(r)} does not project to "
                                 f"{'(' + ', '.join(to_str(c) for c in q) + ')'}")
        if not self.in_module(r):
            raise RepsNotSection(f"representative {self.render(r)} is not in M")
        return r

    def hk(self, theta, cap: int = DEFAULT_CAP) -> tuple:
        z = self._checked_rep(self.quot.zero)
        if not self.is_zero(z):
            raise RepsMissingZero(f"the zero coset is represented by {self.render(z)}, not 0")
        hq = (self.quot.zero,) + self.quot.hk(theta, cap)
        hl = (self.sub.zero,) + self.sub.hk(theta, cap)
        size = len(hq) * len(hl) - 1
        if size > cap:
            raise SetTooLarge(f"composed H_k has {size} elements > cap {cap}")
        out = []
        for q in hq:
            r = self._checked_rep(q)
            rl = r[:self.sub.dim]
            for h in hl:
                x = tuple(a + b for a, b in zip(rl, h)) + tuple(q)
                if not self.is_zero(x):
                    out.append(x)
        out.sort(key=_sort_key)
        return tuple(out)

    def prefilter(self, H, n, prop):
        k = self.sub.dim
        proj = H.projection(("ext", id(self)), lambda x: x[k:], self.quot.zero)
        test = _part_test(self.quot, n, prop, proj)
        return lambda x: test(x[k:])

    def solve_minus_one(self, n, h):
        hl, hq = self._split(h)
        q = self.quot.solve_minus_one(n, hq)
        if q is None:
            return None
        shifted = self.act(n, self.sub.zero + q)[:self.sub.dim]
        target = tuple(a - b for a, b in zip(hl, shifted))
        l = self.sub.solve_minus_one(n, target)
        if l is None:
            return None
        return l + q

    def leaves(self):
        return self.sub.leaves() + self.quot.leaves()

    def components(self):
        return [self.sub, self.quot]


class Restriction(ComposedModule):
    """``L = {x in M : predicate(x)}`` with ``H_k^L = H_k^M ∩ L``."""

    def __init__(self, parent: ComposedModule, predicate: Callable, name: str = "L"):
        self.parent = parent
        self.pred = predicate
        self.name = name
        self.d = parent.d
        self.dim = parent.dim

    @property
    def zero(self):
        return self.parent.zero

    def act(self, n, x):
        return self.parent.act(n, x)

    def in_module(self, x) -> bool:
        return self.parent.in_module(x) and bool(self.pred(x))

    def hk(self, theta, cap: int = DEFAULT_CAP) -> tuple:
        return tuple(x for x in self.parent.hk(theta, cap) if self.pred(x))

    def prefilter(self, H, n, prop):
        return self.parent.prefilter(H, n, prop)

    def solve_minus_one(self, n, h):
        a = self.parent.solve_minus_one(n, h)
        if a is None or not self.pred(a):
            return None
        return a

    def leaves(self):
        return self.parent.leaves()

    def components(self):
        return [self.parent]


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def direct_sum(parts) -> DirectSum:
    return DirectSum([p if isinstance(p, ComposedModule) else Cyclic(p) for p in parts])


def extension(sub, quotient, cocycles, reps=None) -> Extension:
    sub = sub if isinstance(sub, ComposedModule) else Cyclic(sub)
    quotient = quotient if isinstance(quotient, ComposedModule) else Cyclic(quotient)
    return Extension(sub, quotient, cocycles, reps)


def tower(leaves: list[Presentation], matrices) -> ComposedModule:
    """Module from commuting upper-triangular matrices ``A_i`` whose diagonal
    is the generator images of ``leaves`` and whose strict upper part lists
    the cocycle entries: ``u_i`` acts on coordinate vectors by ``A_i``.
    """
    r = len(leaves)
    if r == 0:
        raise ConfigError("a tower needs at least one leaf")
    d = leaves[0].d
    if len(matrices) != d:
        raise ConfigError(f"need {d} matrices, got {len(matrices)}")
    for i, A in enumerate(matrices):
        if len(A) != r or any(len(row) != r for row in A):
            raise ConfigError(f"matrix {i + 1} must be {r} x {r}")
        for j in range(r):
            if A[j][j] != leaves[j].generators[i]:
                raise ConfigError(f"matrix {i + 1}: diagonal entry {j + 1} must equal the "
                                  f"generator image of leaf {leaves[j].name!r}")
            for k in range(j):
                if not A[j][k].is_zero():
                    raise ConfigError(f"matrix {i + 1} is not upper triangular")
    # off-diagonal entries must map each leaf ring into the target leaf ring
    for i, A in enumerate(matrices):
        for j in range(r):
            for k in range(j + 1, r):
                c = A[j][k]
                if c.is_zero():
                    continue
                probes = [c] + [c * g for g in leaves[k].generators] + \
                    [c / g for g in leaves[k].generators]
                if not all(in_ring(p, leaves[j]) for p in probes):
                    raise ConfigError(f"matrix {i + 1}, entry ({j + 1},{k + 1}) does not map "
                                      f"leaf {k + 1} into leaf {j + 1}")
    return _tower(leaves, matrices, 0)


def _tower(leaves, matrices, start):
    head = Cyclic(leaves[start])
    if start == len(leaves) - 1:
        return head
    rest = _tower(leaves, matrices, start + 1)
    cocycles = [[list(A[start][start + 1:])] for A in matrices]
    return Extension(head, rest, cocycles)


def submodule_restrict(M: ComposedModule, predicate: Callable, theta=2, name: str = "L",
                       cap: int = DEFAULT_CAP) -> Restriction:
    """Restrict to a ``u``-invariant submodule, spot-checking invariance on
    ``H_k^M`` at ``theta`` under every ``u_i^{±1}``."""
    for x in M.hk(theta, cap):
        if not predicate(x):
            continue
        for i in range(M.d):
            for s in (1, -1):
                y = M.act(_unit(M.d, i, s), x)
                if not predicate(y):
                    raise PredicateNotInvariant(
                        f"{name} is not invariant: u_{i + 1}^{s} maps {M.render(x)} to "
                        f"{M.render(y)}", witness=x)
    return Restriction(M, predicate, name)


# ---------------------------------------------------------------------------
# rates and scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafRate:
    name: str
    C: float
    B: float


def leaf_rates(M: ComposedModule) -> list[LeafRate]:
    out = []
    for pres in M.leaves():
        L = lyapunov_vectors(pres)
        C = float(separation_constant(L, pres).enc.lo)
        out.append(LeafRate(pres.name, C, 2.0 / C))
    return out


def composed_rate(constants) -> float:
    """Max-combination of per-leaf rate constants."""
    vals = [float(c) for c in constants]
    if not vals:
        raise ValueError("no leaf constants")
    return max(vals)


@dataclass(frozen=True)
class ComposedSet:
    module: ComposedModule
    theta: object
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "_members", frozenset(self.elements))
        object.__setattr__(self, "_proj", {})

    def projection(self, key, fn, zero) -> frozenset:
        """Image of ``H ∪ {0}`` under a coordinate projection (cached)."""
        hit = self._proj.get(key)
        if hit is None:
            hit = frozenset(fn(x) for x in self.elements) | {zero}
            self._proj[key] = hit
        return hit

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._members or self.module.is_zero(x)


def composed_set(M: ComposedModule, theta, cap: int = DEFAULT_CAP) -> ComposedSet:
    return ComposedSet(M, as_fraction(theta), M.hk(theta, cap))


def _composed_violation(H: ComposedSet, n, prop: str):
    M = H.module
    if prop not in ("I", "II", "II-strong"):
        raise ConfigError(f"unknown property {prop!r}")
    keep = M.prefilter(H, n, prop) or (lambda x: True)
    for x in H.elements:
        if not keep(x):
            continue
        if prop == "I":
            y = M.act(n, x)
        elif prop == "II":
            y = M.minus_one(n, x)
        else:
            a = M.solve_minus_one(n, x)
            if a is not None and not M.is_zero(a):
                return a
            continue
        if not M.is_zero(y) and y in H:
            return x
    return None


def check_composed(H: ComposedSet, n, prop: str = "I") -> bool:
    if not any(n):
        raise ValueError("n must be nonzero")
    return _composed_violation(H, tuple(n), prop) is None


def scan_composed(H: ComposedSet, prop: str = "I", window_radius: float = 10) -> RadiusReport:
    if window_radius < 1:
        raise ConfigError("window radius must be >= 1")
    M = H.module
    shells = [n for n in shell_order(M.d, window_radius) if any(n)]
    outer = max(exp_norm(n).squared for n in shells)
    last, witness, count = None, None, 0
    for n in shells:
        bad = _composed_violation(H, n, prop)
        if bad is None:
            continue
        count += 1
        sq = exp_norm(n).squared
        if last is None or sq > last:
            last, witness = sq, (bad, n)
    p, variant = {"I": ("I", ""), "II": ("II", "literal"), "II-strong": ("II", "strong")}[prop]
    return RadiusReport(None, H.theta, p, variant, float(window_radius), last,
                        last is not None and last == outer, witness, count)


@dataclass(frozen=True)
class InheritanceReport:
    """Per-``n`` test of "every component has the property, so the module
    does".  ``failures`` lists the ``n`` where the premise held and the
    conclusion did not; it must be empty."""

    property: str
    checked: int
    premise_held: int
    failures: tuple


def check_inheritance(M: ComposedModule, theta, prop: str = "I", window_radius: float = 10,
                      cap: int = DEFAULT_CAP) -> InheritanceReport:
    parts = M.components()
    if not parts:
        raise ConfigError("a cyclic module has no components to inherit from")
    H = composed_set(M, theta, cap)
    part_sets = [composed_set(P, theta, cap) for P in parts]
    shells = [n for n in shell_order(M.d, window_radius) if any(n)]
    held, failures = 0, []
    for n in shells:
        if not all(check_composed(Hp, n, prop) for Hp in part_sets):
            continue
        held += 1
        if not check_composed(H, n, prop):
            failures.append(n)
    return InheritanceReport(prop, len(shells), held, tuple(failures))
