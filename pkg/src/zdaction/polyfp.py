"""Dense polynomials over the prime field F_p.

Polynomials are tuples of ints in ``[0, p)`` ordered from the leading
coefficient down (the convention of ``sympy.polys.galoistools``, which does
the factoring).  The zero polynomial is ``()``.
"""
from __future__ import annotations

from sympy.polys import galoistools as gf
from sympy.polys.domains import ZZ

__all__ = [
    "degree",
    "fp",
    "fp_add",
    "fp_divmod",
    "fp_factor",
    "fp_gcd",
    "fp_is_irreducible",
    "fp_is_squarefree",
    "fp_monic",
    "fp_mul",
    "fp_neg",
    "fp_pow",
    "fp_rem",
    "fp_sub",
    "fp_to_str",
    "monic_polys",
]


def _t(f) -> tuple[int, ...]:
    return tuple(int(c) for c in f)


def fp(coeffs_high_to_low, p: int) -> tuple[int, ...]:
    return _t(gf.gf_from_int_poly([int(c) for c in coeffs_high_to_low], p))


def degree(f) -> int:
    return len(f) - 1 if f else -1


def fp_add(f, g, p):
    return _t(gf.gf_add(list(f), list(g), p, ZZ))


def fp_sub(f, g, p):
    return _t(gf.gf_sub(list(f), list(g), p, ZZ))


def fp_neg(f, p):
    return _t(gf.gf_neg(list(f), p, ZZ))


def fp_mul(f, g, p):
    return _t(gf.gf_mul(list(f), list(g), p, ZZ))


def fp_divmod(f, g, p):
    q, r = gf.gf_div(list(f), list(g), p, ZZ)
    return _t(q), _t(r)


def fp_rem(f, g, p):
    return _t(gf.gf_rem(list(f), list(g), p, ZZ))


def fp_gcd(f, g, p):
    return _t(gf.gf_gcd(list(f), list(g), p, ZZ))


def fp_pow(f, e: int, p):
    return _t(gf.gf_pow(list(f), e, p, ZZ))


def fp_monic(f, p):
    """Return ``(lc, monic)``."""
    if not f:
        return 0, ()
    lc, g = gf.gf_monic(list(f), p, ZZ)
    return int(lc), _t(g)


def fp_is_squarefree(f, p) -> bool:
    return bool(gf.gf_sqf_p(list(f), p, ZZ))


def fp_is_irreducible(f, p) -> bool:
    return bool(gf.gf_irreducible_p(list(f), p, ZZ))


def fp_factor(f, p):
    """``(lc, [(monic irreducible, multiplicity), ...])`` sorted canonically."""
    lc, facs = gf.gf_factor(list(f), p, ZZ)
    out = sorted(((_t(g), int(e)) for g, e in facs), key=lambda fe: (len(fe[0]), fe[0]))
    return int(lc), out


def monic_polys(deg: int, p: int):
    """All monic polynomials of exact degree ``deg`` in lexicographic order."""
    if deg == 0:
        yield (1,)
        return
    for idx in range(p**deg):
        tail = []
        for _ in range(deg):
            idx, r = divmod(idx, p)
            tail.append(r)
        yield (1,) + tuple(reversed(tail))


def fp_to_str(f, var: str = "t") -> str:
    if not f:
        return "0"
    n = degree(f)
    parts = []
    for i, c in enumerate(f):
        e = n - i
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
        else:
            mono = var if e == 1 else f"{var}^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)
