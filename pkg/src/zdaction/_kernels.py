"""Float kernels for the two hot loops.

* :func:`sphere_max_abs` -- ``max_v |l_v . z|`` for a batch of directions
  (separation-constant refinement in d >= 3).
* :func:`screen_band` -- for each shift vector ``s_n`` and each element
  log-profile ``x_a``, whether ``|x_a + s_n|_inf <= bound + tol``.  Scans use
  it to discard (n, a) pairs that certainly leave the band before the exact
  absolute-value test runs on the survivors.

Both have a numba implementation and a pure numpy one.  Setting
``ZDACTION_DISABLE_NUMBA=1`` (or numba failing to import) selects numpy.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("ZDACTION_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# -- numpy ---------------------------------------------------------------

def sphere_max_abs_numpy(A: np.ndarray, Z: np.ndarray) -> np.ndarray:
    return np.abs(Z @ A.T).max(axis=1)


def screen_band_numpy(logabs: np.ndarray, shifts: np.ndarray, bound: float,
                      tol: float, chunk: int = 256) -> np.ndarray:
    out = np.zeros((shifts.shape[0], logabs.shape[0]), dtype=np.bool_)
    lim = bound + tol
    for start in range(0, shifts.shape[0], chunk):
        s = shifts[start:start + chunk]
        dev = np.abs(logabs[None, :, :] + s[:, None, :]).max(axis=2)
        out[start:start + chunk] = dev <= lim
    return out


# -- numba ---------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _sphere_max_abs_nb(A, Z):
        g, d = Z.shape
        m = A.shape[0]
        out = np.empty(g)
        for k in range(g):
            best = 0.0
            for v in range(m):
                s = 0.0
                for i in range(d):
                    s += A[v, i] * Z[k, i]
                if s < 0:
                    s = -s
                if s > best:
                    best = s
            out[k] = best
        return out

    @njit(cache=True)
    def _screen_band_nb(logabs, shifts, lim):
        nn, ns = shifts.shape
        na = logabs.shape[0]
        out = np.zeros((nn, na), dtype=np.bool_)
        for i in range(nn):
            for j in range(na):
                ok = True
                for v in range(ns):
                    x = logabs[j, v] + shifts[i, v]
                    if x > lim or x < -lim:
                        ok = False
                        break
                out[i, j] = ok
        return out


def sphere_max_abs(A, Z) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.float64)
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    if HAVE_NUMBA:
        return _sphere_max_abs_nb(A, Z)
    return sphere_max_abs_numpy(A, Z)


def screen_band(logabs, shifts, bound: float, tol: float) -> np.ndarray:
    logabs = np.ascontiguousarray(logabs, dtype=np.float64)
    shifts = np.ascontiguousarray(shifts, dtype=np.float64)
    if logabs.shape[0] == 0 or shifts.shape[0] == 0:
        return np.zeros((shifts.shape[0], logabs.shape[0]), dtype=np.bool_)
    if HAVE_NUMBA:
        return _screen_band_nb(logabs, shifts, float(bound + tol))
    return screen_band_numpy(logabs, shifts, bound, tol)
