"""Direct stencil convolution kernels: numba-jitted hot path, numpy fallback.

The fallback is selected by setting the environment variable NFIELD_NO_NUMBA
(or automatically when numba is missing). Both paths evaluate, per output
point, sum_d k[d] * v[x - d] * cell with v zero outside the box; results are
bitwise independent of the numba thread count because each output point keeps
a fixed accumulation order.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "NFIELD_NO_NUMBA"

try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False


def env_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


def default_backend() -> str:
    return "numba" if HAS_NUMBA and not env_disabled() else "numpy"


if HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _conv1_nb(v, k, m, cell):
        n = v.shape[0]
        out = np.empty(n)
        for i in prange(n):
            lo = max(0, i - m)
            hi = min(n - 1, i + m)
            acc = 0.0
            for y in range(lo, hi + 1):
                acc += k[m + i - y] * v[y]
            out[i] = acc * cell
        return out

    @njit(cache=True, parallel=True)
    def _conv2_nb(v, k, m0, m1, cell):
        n0, n1 = v.shape
        out = np.empty((n0, n1))
        for i in prange(n0):
            xlo = max(0, i - m0)
            xhi = min(n0 - 1, i + m0)
            for j in range(n1):
                ylo = max(0, j - m1)
                yhi = min(n1 - 1, j + m1)
                acc = 0.0
                for x in range(xlo, xhi + 1):
                    for y in range(ylo, yhi + 1):
                        acc += k[m0 + i - x, m1 + j - y] * v[x, y]
                out[i, j] = acc * cell
        return out

    @njit(cache=True, parallel=True)
    def _conv3_nb(v, k, m0, m1, m2, cell):
        n0, n1, n2 = v.shape
        out = np.empty((n0, n1, n2))
        for i in prange(n0):
            xlo = max(0, i - m0)
            xhi = min(n0 - 1, i + m0)
            for j in range(n1):
                ylo = max(0, j - m1)
                yhi = min(n1 - 1, j + m1)
                for l in range(n2):
                    zlo = max(0, l - m2)
                    zhi = min(n2 - 1, l + m2)
                    acc = 0.0
                    for x in range(xlo, xhi + 1):
                        for y in range(ylo, yhi + 1):
                            for z in range(zlo, zhi + 1):
                                acc += k[m0 + i - x, m1 + j - y, m2 + l - z] * v[x, y, z]
                    out[i, j, l] = acc * cell
        return out


def _conv_numpy(v: np.ndarray, k: np.ndarray, radius: tuple[int, ...],
                cell: float) -> np.ndarray:
    """Vectorized shift-and-add over the nonzero stencil entries."""
    out = np.zeros_like(v)
    for idx in np.ndindex(k.shape):
        kv = k[idx]
        if kv == 0.0:
            continue
        src, dst = [], []
        for n, i, m in zip(v.shape, idx, radius):
            d = i - m
            dst.append(slice(max(0, d), n + min(0, d)))
            src.append(slice(max(0, -d), n + min(0, -d)))
        out[tuple(dst)] += kv * v[tuple(src)]
    return out * cell


def direct_convolve(v: np.ndarray, k: np.ndarray, radius: tuple[int, ...], cell: float,
                    backend: str | None = None) -> np.ndarray:
    """Zero-extension direct convolution of v with the stencil k."""
    backend = backend or default_backend()
    if backend == "numpy":
        return _conv_numpy(v, k, radius, cell)
    if backend != "numba":
        raise ValueError(f"unknown backend {backend!r}")
    if not HAS_NUMBA:  # pragma: no cover
        raise RuntimeError("numba backend requested but numba is not importable")
    if v.ndim == 1:
        return _conv1_nb(v, k, radius[0], cell)
    if v.ndim == 2:
        return _conv2_nb(v, k, radius[0], radius[1], cell)
    return _conv3_nb(v, k, radius[0], radius[1], radius[2], cell)
