"""Exponent vectors and Laurent polynomials in ``Z[u_1^{±1}, ..., u_d^{±1}]``.

An exponent vector ``n`` is a plain tuple of ints; the monomial ``u^n`` acts
on a cyclic module by multiplication with ``prod(g_i ** n_i)``, where the
``g_i`` are the generator images of a presentation.
"""
from __future__ import annotations

import math
from typing import NamedTuple

__all__ = [
    "EuclideanNorm",
    "LaurentPoly",
    "evaluate",
    "exp_norm",
    "exp_vector",
    "monomial_mul",
    "shell_order",
]


def exp_vector(entries, d: int | None = None) -> tuple[int, ...]:
    n = tuple(int(e) for e in entries)
    if any(int(e) != e for e in entries):
        raise ValueError(f"exponent entries must be integers: {entries!r}")
    if len(n) < 1:
        raise ValueError("exponent vectors need dimension d >= 1")
    if d is not None and len(n) != d:
        raise ValueError(f"expected dimension {d}, got {len(n)}")
    return n


class EuclideanNorm(NamedTuple):
    """``||n||`` kept exactly as its square."""

    squared: int

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)

    @property
    def exact(self) -> int | None:
        """The norm itself when it is an integer, else ``None``."""
        r = math.isqrt(self.squared)
        return r if r * r == self.squared else None

    def __float__(self) -> float:
        return self.value


def exp_norm(n) -> EuclideanNorm:
    return EuclideanNorm(sum(int(x) * int(x) for x in n))


def monomial_mul(n, m) -> tuple[int, ...]:
    if len(n) != len(m):
        raise ValueError(f"dimension mismatch: {len(n)} vs {len(m)}")
    return tuple(a + b for a, b in zip(n, m))


def shell_order(d: int, radius: float, include_zero: bool = False) -> list[tuple[int, ...]]:
    """All integer vectors with ``||n|| <= radius`` sorted by (||n||^2, n).

    This is the fixed enumeration order used by every scan so that reports
    are reproducible.
    """
    r = int(math.floor(radius + 1e-12))
    r2 = radius * radius + 1e-9
    out = []

    def rec(prefix, acc):
        if len(prefix) == d:
            if include_zero or any(prefix):
                out.append(tuple(prefix))
            return
        for x in range(-r, r + 1):
            s = acc + x * x
            if s <= r2:
                rec(prefix + [x], s)

    rec([], 0)
    out.sort(key=lambda v: (sum(x * x for x in v), v))
    return out


class LaurentPoly:
    """Finitely supported map exponent vector -> coefficient.

    ``modulus`` is 0 for integer coefficients, or the prime characteristic
    ``q`` in which case coefficients are stored as residues in ``[0, q)``.
    Zero coefficients are never stored.
    """

    __slots__ = ("d", "modulus", "terms")

    def __init__(self, terms: dict, d: int, modulus: int = 0):
        self.d = d
        self.modulus = modulus
        clean = {}
        for n, c in terms.items():
            n = exp_vector(n, d)
            c = int(c)
            if modulus:
                c %= modulus
            if c:
                clean[n] = (clean.get(n, 0) + c) % modulus if modulus else clean.get(n, 0) + c
                if not clean[n]:
                    del clean[n]
        self.terms = clean

    @classmethod
    def monomial(cls, n, coeff: int = 1, modulus: int = 0) -> "LaurentPoly":
        return cls({tuple(n): coeff}, len(n), modulus)

    @classmethod
    def constant(cls, c: int, d: int, modulus: int = 0) -> "LaurentPoly":
        return cls({(0,) * d: c}, d, modulus)

    def _check(self, other: "LaurentPoly"):
        if self.d != other.d or self.modulus != other.modulus:
            raise ValueError("Laurent polynomials live in different rings")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        terms = dict(self.terms)
        for n, c in other.terms.items():
            terms[n] = terms.get(n, 0) + c
        return LaurentPoly(terms, self.d, self.modulus)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({n: -c for n, c in self.terms.items()}, self.d, self.modulus)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        terms: dict = {}
        for n, a in self.terms.items():
            for m, b in other.terms.items():
                k = monomial_mul(n, m)
                terms[k] = terms.get(k, 0) + a * b
        return LaurentPoly(terms, self.d, self.modulus)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.d, self.modulus, self.terms) == (other.d, other.modulus, other.terms)

    def __hash__(self):
        return hash((self.d, self.modulus, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for n in sorted(self.terms):
            mono = "*".join(f"u{i + 1}^{e}" for i, e in enumerate(n) if e) or "1"
            parts.append(f"{self.terms[n]}*{mono}")
        return " + ".join(parts)


def evaluate(p: LaurentPoly, pres):
    """Image of ``p`` under the quotient map ``R_d -> R_d/p`` of ``pres``."""
    if p.d != pres.d:
        raise ValueError(f"polynomial has d={p.d}, presentation has d={pres.d}")
    field = pres.field
    total = field.zero
    for n, c in p.terms.items():
        total = total + field.from_int(c) * pres.power(n)
    return total
