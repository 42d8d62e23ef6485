"""Acceptance criteria 1-10, each at its stated tolerance and time limit.

Each test records one PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``conftest.pytest_terminal_summary``).  Run alone
with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import functools
import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from zdaction.composition import (
    check_inheritance,
    composed_rate,
    composed_set,
    direct_sum,
    leaf_rates,
    scan_composed,
    tower,
)
from zdaction.config import load_document, load_presentation
from zdaction.fields import in_ring
from zdaction.laurent import exp_norm, shell_order
from zdaction.lyapunov import is_mixing, lyapunov_vectors, one_sided_constant, separation_constant
from zdaction.periodic import (
    GaussQ,
    TrigPolynomial,
    correlation,
    fix_count_oracle,
    fix_count_product,
    periodic_pairing,
)
from zdaction.uniformity import (
    check_property_I,
    default_C2,
    enumerate_Hk,
    phi_rate,
    psi_rate,
    scan_radius,
)

from golden import COMMANDS, GOLDEN_DIR
from oracles import ledrappier_fix, rational_Hk, sep_oracle_2d

RESULTS: dict[int, tuple[str, str, str]] = {}


def criterion(number: int, title: str, limit: float):
    """Time the test body; fail on error or on exceeding ``limit`` seconds."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                note = fn(*args, **kwargs) or ""
            except BaseException as exc:
                RESULTS[number] = ("FAIL", title, f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
                raise
            dt = time.perf_counter() - t0
            if dt > limit:
                RESULTS[number] = ("FAIL", title, f"took {dt:.2f}s > {limit:g}s")
                pytest.fail(f"criterion {number} exceeded its time limit: {dt:.2f}s > {limit:g}s")
            RESULTS[number] = ("PASS", title, f"{dt:.2f}s / {limit:g}s{'; ' + note if note else ''}")
        return run
    return wrap


def fresh(name):
    return load_presentation(load_document(name)[0])


STOCK = ("x2", "x3", "x2x3", "fibonacci", "ledrappier", "nonmix")


@criterion(1, "product formula: sum of Lyapunov vectors is 0", limit=6 * 1.0)
def test_c01_product_formula():
    worst = 0.0
    for name in STOCK:
        t0 = time.perf_counter()
        pres = fresh(name)
        L = lyapunov_vectors(pres, precision=128)
        if pres.characteristic:
            # exact: the product of the exact absolute values is 1 in every coordinate
            for i in range(pres.d):
                prod = Fraction(1)
                for vec in L.vectors:
                    assert vec[i].exact is not None
                    prod *= vec[i].exact
                assert prod == 1, (name, i, prod)
        else:
            for s in L.zero_sum():
                assert s.contains(0) and s.width < Fraction(1, 10**20), (name, s)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        assert dt < 1.0, f"{name}: {dt:.2f}s"
    return f"slowest system {worst:.2f}s (limit 1s each)"


@criterion(2, "mixing classification", limit=1.0)
def test_c02_mixing():
    expected = {"x2": True, "x2x3": True, "fibonacci": True, "ledrappier": True, "nonmix": False}
    for name, want in expected.items():
        pres = fresh(name)
        assert is_mixing(lyapunov_vectors(pres), pres) is want, name


@criterion(3, "separation constants", limit=5.0)
def test_c03_separation():
    pres = fresh("x2")
    C = separation_constant(lyapunov_vectors(pres), pres)
    assert C.log_of == 2 and C.scale == 1 and C.describe() == "log(2)"
    pres = fresh("x2x3")
    L = lyapunov_vectors(pres)
    C23 = separation_constant(L, pres)
    grid = sep_oracle_2d(L.matrix())
    assert abs(float(C23) - grid) < 1e-6
    for name in ("x3", "fibonacci", "ledrappier"):
        p = fresh(name)
        assert separation_constant(lyapunov_vectors(p), p).enc.lo > 0, name
    return f"C(x2x3) = {float(C23):.7f}, grid oracle {grid:.7f}"


@criterion(4, "fix counts: product formula = independent oracle", limit=30.0)
def test_c04_fix_counts():
    checked = 0
    for name in ("x2", "x3", "fibonacci"):
        pres = fresh(name)
        for n in range(1, 11):
            a, b = fix_count_product(pres, None, (n,)), fix_count_oracle(pres, (n,))
            assert a.count == b.count, (name, n, a, b)
            checked += 1
    for name in ("x2x3", "ledrappier"):
        pres = fresh(name)
        for n in shell_order(2, 6):
            a, b = fix_count_product(pres, None, n), fix_count_oracle(pres, n)
            assert a.count == b.count, (name, n, a, b)
            if name == "ledrappier" and n[0] >= 0 and n[1] >= 1:
                assert a.count == ledrappier_fix(*n), n
            checked += 1
    x23, fib, led = fresh("x2x3"), fresh("fibonacci"), fresh("ledrappier")
    assert fix_count_product(x23, None, (1, -1)).count == 1
    assert fix_count_product(x23, None, (5, -3)).count == 5
    assert fix_count_product(fib, None, (5,)).count == 11
    assert fix_count_product(led, None, (1, 1)).count == 4
    return f"{checked} directions"


@criterion(5, "H_k enumeration is complete", limit=60.0)
def test_c05_enumeration():
    H = enumerate_Hk(fresh("x2"), theta=2)
    assert {a.c[0] for a in H} == {Fraction(s * p, q) for s in (1, -1)
                                   for p, q in ((1, 1), (2, 1), (1, 2), (3, 2))}
    thetas = [Fraction(k, 2) for k in range(2, 25)]  # 1, 3/2, ..., 12
    for name, primes in (("x2", [2]), ("x2x3", [2, 3])):
        pres = fresh(name)
        for t in thetas:
            got = {a.c[0] for a in enumerate_Hk(pres, theta=t)}
            assert got == rational_Hk(primes, t), (name, t)
    return f"{len(thetas)} thetas in [1, 12] per system"


@criterion(6, "uniformity radii on x2", limit=120.0)
def test_c06_radii_x2():
    pres = fresh("x2")
    H = enumerate_Hk(pres, theta=2)
    rI = scan_radius(pres, None, H, "I", 10)
    rII = scan_radius(pres, None, H, "II", 10)
    assert (rI.r, rI.boundary_hit) == (2.0, False)
    assert (rII.r, rII.boundary_hit) == (2.0, False)
    C = float(separation_constant(lyapunov_vectors(pres), pres).enc.lo)
    radii = []
    for k in range(1, 7):
        rep = scan_radius(pres, None, enumerate_Hk(pres, theta=2**k, k=k), "I", 2 * k + 4)
        assert not rep.boundary_hit
        bound = (2 / C) * math.log(2**k)
        assert rep.r <= bound + 1e-9 and abs(bound - 2 * k) < 1e-9
        if k <= 3:
            assert rep.r == 2 * k
        radii.append(rep.r)
    return "r_I(k) = " + ",".join(f"{r:g}" for r in radii)


@criterion(7, "windowed verification on x2x3 at theta=6", limit=300.0)
def test_c07_x2x3_window():
    pres = fresh("x2x3")
    L = lyapunov_vectors(pres)
    C = float(separation_constant(L, pres).enc.lo)
    H = enumerate_Hk(pres, theta=6)
    window = 12
    rI = scan_radius(pres, None, H, "I", window)
    rII = scan_radius(pres, None, H, "II-strong", window)
    assert not rI.boundary_hit and not rII.boundary_hit
    # beyond each measured radius the property holds at every n, re-checked
    # against brute force (set intersection / direct membership)
    members = set(H.elements)
    for n in shell_order(2, window):
        beta = pres.power(n)
        gamma = beta - pres.field.one
        norm = math.sqrt(exp_norm(n).squared)
        if norm > rI.r:
            assert not any(beta * a in members for a in H.elements), n
        if norm > rII.r:
            assert not any(in_ring(h / gamma, pres) for h in H.elements), n
    phi = phi_rate(2 / C, 6)
    assert rI.r <= phi, (rI.r, phi)
    psi = psi_rate(L.sigma, 1.0, 1.0, default_C2(C, L.sigma), 6)
    assert rII.r <= psi, (rII.r, psi)
    return (f"r_I={rI.r:.4f} <= (2/C)log6={phi:.4f}; r_II-strong={rII.r:.4f} <= psi={psi:.4f} "
            f"(exceeds (2/C)log6: {rII.r > phi})")


@criterion(8, "correlation / pairing dichotomy", limit=60.0)
def test_c08_dichotomy():
    pres = fresh("x2")
    K = pres.field
    rng = random.Random(20240611)
    zero = GaussQ(Fraction(0))
    window = [n for n in shell_order(1, 12)]
    sets = {k: enumerate_Hk(pres, theta=2**k, k=k) for k in (1, 2, 3)}
    holds = {k: [n for n in window if check_property_I(sets[k], n)] for k in sets}
    checks = 0
    for trial in range(100):
        k = rng.choice((1, 2, 3))
        els = sets[k].elements

        def rand_poly():
            supp = rng.sample(els, rng.randint(1, min(6, len(els))))
            return TrigPolynomial({a: (Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                                       Fraction(rng.randint(-9, 9), rng.randint(1, 5))) for a in supp}, pres)

        f, g = rand_poly(), rand_poly()
        for n in holds[k]:
            assert correlation(f, g, n, pres) == zero, (trial, n)
            checks += 1
    f = TrigPolynomial({K.from_int(1): 1, K.from_int(-2): 1}, pres)
    g = TrigPolynomial({K.from_int(1): 1}, pres)
    assert correlation(f, g, (1,), pres) == GaussQ(Fraction(1))
    c3 = GaussQ(Fraction(2), Fraction(1))
    h = TrigPolynomial({K.zero: 5, K.from_int(3): c3}, pres)
    assert periodic_pairing(h, pres, None, (2,)) == c3
    assert periodic_pairing(h, pres, None, (3,)) == zero
    return f"{checks} (polynomial, n) pairs with Property I all gave 0"


@criterion(9, "composition: components' properties pass to the module", limit=120.0)
def test_c09_composition():
    x2, x3 = fresh("x2"), fresh("x3")
    K = x2.field
    q = lambda v: K.from_int(v)
    modules = {"x2+x3": direct_sum([x2, x3]),
               "[[2,1],[0,2]]": tower([x2, x2], [[[q(2), q(1)], [q(0), q(2)]]])}
    notes = []
    for label, M in modules.items():
        B = composed_rate([r.B for r in leaf_rates(M)])
        assert B == max(r.B for r in leaf_rates(M))
        for k in (1, 2, 3):
            theta = 2**k
            for prop in ("I", "II", "II-strong"):
                rep = check_inheritance(M, theta, prop, 10)
                assert rep.failures == (), (label, theta, prop, rep.failures)
            r = scan_composed(composed_set(M, theta), "I", 10)
            assert not r.boundary_hit and r.r <= phi_rate(B, theta) + 1e-9, (label, theta, r.r)
        notes.append(f"{label}: B={B:.4f}")
    return "; ".join(notes)


def _cli(argv, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    code = "import sys; from zdaction.cli import main; sys.exit(main(sys.argv[1:]))"
    out = subprocess.run([sys.executable, "-c", code, *argv], env=env, capture_output=True)
    assert out.returncode == 0, out.stderr.decode()
    return out.stdout


@criterion(10, "determinism of golden commands", limit=180.0)
def test_c10_determinism():
    for name, argv in COMMANDS.items():
        first, second = _cli(argv, 1), _cli(argv, 2)
        assert first == second, name
        assert first == (GOLDEN_DIR / f"{name}.out").read_bytes(), name
    return f"{len(COMMANDS)} commands, two processes each with different hash seeds"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
