"""Brute-force reference computations, independent of the library's
enumeration and screening code.  Only exact rational / F_2 arithmetic is used.
"""
import math
from fractions import Fraction

import numpy as np


def padic_abs(x: Fraction, p: int) -> Fraction:
    if x == 0:
        return Fraction(0)
    k, n, d = 0, x.numerator, x.denominator
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return Fraction(1, p**k) if k >= 0 else Fraction(p**(-k))


def rational_Hk(primes, theta) -> set:
    """Every nonzero x in Z[1/prod primes] with theta^-1 <= |x|_v <= theta at
    infinity and at each prime.  Complete scan: |x|_p <= theta bounds the
    denominator, |x|_inf <= theta then bounds the numerator."""
    theta = Fraction(theta)
    D = 1
    for p in primes:
        e = 0
        while Fraction(p) ** (e + 1) <= theta:
            e += 1
        D *= p**e
    out = set()
    for num in range(-math.floor(theta * D), math.floor(theta * D) + 1):
        x = Fraction(num, D)
        if x == 0 or abs(x) < 1 / theta or abs(x) > theta:
            continue
        if any(q not in primes for q in _prime_factors(x.denominator)):
            continue
        if all(1 / theta <= padic_abs(x, p) <= theta for p in primes):
            out.add(x)
    return out


def _prime_factors(n: int):
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def fibonacci_Hk(theta) -> set:
    """Pairs (a, b) for a + b*phi in Z[phi] with both |a + b phi| and
    |a + b phi'| in [1/theta, theta] (phi' = 1 - phi), scanned over a box
    that contains every solution: |b| * sqrt5 = |sigma1 - sigma2| <= 2 theta."""
    theta = float(theta)
    s5 = math.sqrt(5)
    phi, phib = (1 + s5) / 2, (1 - s5) / 2
    B = math.ceil(2 * theta / s5) + 1
    A = math.ceil(theta * 2 + B * phi) + 1
    out = set()
    for a in range(-A, A + 1):
        for b in range(-B, B + 1):
            s1, s2 = a + b * phi, a + b * phib
            if all(1 / theta - 1e-9 <= abs(s) <= theta + 1e-9 for s in (s1, s2)):
                out.add((a, b))
    return out


# -- F_2[t] helpers: polynomials as int bitmasks (bit i = coeff of t^i) --------

def f2_mul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def f2_divmod(a: int, b: int):
    q, db = 0, b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        s = a.bit_length() - 1 - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def f2_ord(a: int, P: int) -> int:
    k = 0
    while True:
        q, r = f2_divmod(a, P)
        if r:
            return k
        a, k = q, k + 1


def ledrappier_Hk(theta) -> set:
    """x = P / (t^i (1+t)^j) with |x|_t, |x|_{1+t}, |x|_inf in [1/theta, theta]
    (absolute values 2^-ord).  Returned as reduced (num, i, j) triples."""
    e = 0
    while 2 ** (e + 1) <= theta:
        e += 1
    out = set()
    for i in range(e + 1):
        for j in range(e + 1):
            den = f2_mul(1 << i, _pow(0b11, j))
            for P in range(1, 1 << (e + i + j + 1)):
                ot, o1 = f2_ord(P, 0b10) - i, f2_ord(P, 0b11) - j
                deg = (P.bit_length() - 1) - i - j
                if all(abs(o) <= e for o in (ot, o1, deg)):
                    # canonical form: strip common factors
                    num, ii, jj = P, i, j
                    while ii and f2_divmod(num, 0b10)[1] == 0:
                        num, ii = f2_divmod(num, 0b10)[0], ii - 1
                    while jj and f2_divmod(num, 0b11)[1] == 0:
                        num, jj = f2_divmod(num, 0b11)[0], jj - 1
                    out.add((num, ii, jj))
    return out


def _pow(a: int, k: int) -> int:
    r = 1
    for _ in range(k):
        r = f2_mul(r, a)
    return r


def _f2_rank(rows: list[int]) -> int:
    """Rank over F_2 of a matrix given as row bitmasks."""
    rank, rows = 0, [r for r in rows if r]
    while rows:
        pivot = rows.pop()
        rank += 1
        top = 1 << (pivot.bit_length() - 1)
        rows = [r ^ pivot if r & top else r for r in rows]
        rows = [r for r in rows if r]
    return rank


def _t_order(P: int) -> int:
    """Multiplicative order of t modulo P (P(0) != 0)."""
    x, k = 0b10, 1
    while f2_divmod(x, P)[1] != 1:
        x = f2_divmod(f2_mul(x, 0b10), P)[1]
        k += 1
    return k


def ledrappier_fix(a: int, b: int) -> int:
    """|Fix| of the shift by (a, b), b >= 1, a >= 0, counted on configurations.

    Points of the three-dot system satisfy x(i, j+1) = x(i, j) + x(i+1, j),
    so a point fixed by the (a, b) shift is fixed row 0 data r with
    S^a T^b r = r (S the left shift, T = 1 + S).  Solutions are periodic with
    period N = ord(t mod P0), P0 the recurrence polynomial without its t
    factors; count the kernel of the N x N circulant over F_2.
    """
    P = f2_mul(1 << a, _pow(0b11, b)) ^ 1
    while P and P & 1 == 0:
        P >>= 1
    if P == 1:
        return 1
    N = _t_order(P)
    # row i of (S^a T^b - I): r -> sum_k C(b,k) r[i+a+k] - r[i]
    coeff = f2_mul(1 << a, _pow(0b11, b))
    rows = []
    for i in range(N):
        row = 0
        for k in range(coeff.bit_length()):
            if coeff >> k & 1:
                row ^= 1 << ((i + k) % N)
        row ^= 1 << i
        rows.append(row)
    return 2 ** (N - _f2_rank(rows))


def sep_oracle_2d(A, grid=200_000):
    """min over the unit circle of max_v |l_v . z|: grid, then ternary search
    in the best cell (the envelope is unimodal there)."""
    f = lambda t: np.abs(A @ np.array([np.cos(t), np.sin(t)])).max()
    ts = np.linspace(0, np.pi, grid, endpoint=False)
    vals = np.abs(A @ np.vstack([np.cos(ts), np.sin(ts)])).max(axis=0)
    i = int(vals.argmin())
    lo, hi = ts[i] - np.pi / grid, ts[i] + np.pi / grid
    for _ in range(100):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if f(m1) < f(m2):
            hi = m2
        else:
            lo = m1
    return f((lo + hi) / 2)
