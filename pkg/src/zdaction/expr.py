"""Parse textual expressions (``"x^2 - x - 1"``, ``"(t^2+t+1)/t"``,
``"u1*u2^-1 + 3/2"``) into field elements."""
from __future__ import annotations

from fractions import Fraction

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .errors import ConfigError

_TRANSFORMS = standard_transformations + (convert_xor,)


def parse(text: str, symbols: dict):
    """Sympy expression for ``text`` using only the given symbol names."""
    if isinstance(text, (int, Fraction)):
        return sympy.Rational(str(text))
    if not isinstance(text, str):
        raise ConfigError(f"expected an expression string, got {text!r}")
    local = {name: sympy.Symbol(name) for name in symbols}
    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of types here
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from None
    extra = {str(s) for s in expr.free_symbols} - set(symbols)
    if extra:
        raise ConfigError(f"unknown symbols {sorted(extra)} in {text!r}")
    return expr


def evaluate(text, field, env: dict):
    """Evaluate ``text`` in ``field`` with symbol name -> field element ``env``."""
    expr = parse(text, env)
    return _walk(expr, field, env, text)


def _walk(e, K, env, text):
    if e.is_Integer:
        return K.from_int(int(e))
    if e.is_Rational:
        return K.from_int(Fraction(int(e.p), int(e.q)))
    if e.is_Symbol:
        return env[str(e)]
    if e.is_Add:
        out = K.zero
        for a in e.args:
            out = out + _walk(a, K, env, text)
        return out
    if e.is_Mul:
        out = K.one
        for a in e.args:
            out = out * _walk(a, K, env, text)
        return out
    if e.is_Pow:
        base, ex = e.args
        if not ex.is_Integer:
            raise ConfigError(f"non-integer exponent in {text!r}")
        return _walk(base, K, env, text) ** int(ex)
    raise ConfigError(f"unsupported construct {e} in {text!r}")


def poly_coeffs(text: str, var: str) -> list[int]:
    """Integer coefficients (low -> high) of a polynomial given as text."""
    expr = parse(text, {var: None})
    try:
        p = sympy.Poly(expr, sympy.Symbol(var))
    except sympy.PolynomialError as exc:
        raise ConfigError(f"{text!r} is not a polynomial in {var}: {exc}") from None
    coeffs = [c for c in reversed(p.all_coeffs())]
    if any(not c.is_Integer for c in coeffs):
        raise ConfigError(f"{text!r} must have integer coefficients")
    return [int(c) for c in coeffs]
