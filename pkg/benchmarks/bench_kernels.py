"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Inputs are the real log-profiles of an x2x3 H_k and shift vectors from a
scan window, so the shapes match what ``scan_radius`` feeds the screen.
Also checks that both backends return identical masks.
"""
import argparse
import time

import numpy as np

from zdaction import _kernels as K
from zdaction.config import load_document, load_presentation
from zdaction.laurent import shell_order
from zdaction.uniformity import enumerate_Hk, log_profile


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--theta", type=int, default=36)
    ap.add_argument("--window", type=float, default=20)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is disabled or missing; nothing to compare")

    pres = load_presentation(load_document("x2x3")[0])
    H = enumerate_Hk(pres, None, args.theta)
    logabs = np.array([log_profile(x, pres.places)[0] for x in H.elements if not x.is_zero()])
    L = np.log([[2.0, 3.0], [0.5, 1.0], [1.0, 1 / 3]])  # places inf, 2, 3
    ns = np.array([n for n in shell_order(2, args.window) if any(n)], dtype=np.float64)
    shifts = ns @ L.T
    bound = float(np.log(args.theta))

    a = K._screen_band_nb(logabs, shifts, bound + 1e-7)
    b = K.screen_band_numpy(logabs, shifts, bound, 1e-7)
    assert np.array_equal(a, b), "backends disagree on screen_band"

    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 3))
    Z = rng.normal(size=(200_000, 3))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    assert np.allclose(K._sphere_max_abs_nb(A, Z), K.sphere_max_abs_numpy(A, Z))

    print(f"screen_band: {shifts.shape[0]} shifts x {logabs.shape[0]} elements x {logabs.shape[1]} places")
    t_nb = best_of(lambda: K._screen_band_nb(logabs, shifts, bound + 1e-7), args.repeat)
    t_np = best_of(lambda: K.screen_band_numpy(logabs, shifts, bound, 1e-7), args.repeat)
    print(f"  numba {t_nb * 1e3:9.2f} ms   numpy {t_np * 1e3:9.2f} ms   speedup {t_np / t_nb:5.1f}x")

    print(f"sphere_max_abs: {Z.shape[0]} directions x {A.shape[0]} places, d={A.shape[1]}")
    t_nb = best_of(lambda: K._sphere_max_abs_nb(A, Z), args.repeat)
    t_np = best_of(lambda: K.sphere_max_abs_numpy(A, Z), args.repeat)
    print(f"  numba {t_nb * 1e3:9.2f} ms   numpy {t_np * 1e3:9.2f} ms   speedup {t_np / t_nb:5.1f}x")


if __name__ == "__main__":
    main()
