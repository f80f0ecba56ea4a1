"""Hot numeric kernels with a numba lane and a numpy/scipy fallback lane.

Set ``ONEBITLINK_DISABLE_NUMBA=1`` to force the fallback lane (useful for
debugging and for benchmarking one lane against the other). The selected
lane is reported in ``BACKEND``.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import signal as _sig

_DISABLE = os.environ.get("ONEBITLINK_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    if _DISABLE:
        raise ImportError("numba disabled via ONEBITLINK_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def sosfilt_numpy(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Zero-state causal biquad cascade (scipy lane)."""
    return _sig.sosfilt(sos, x)


def strided_dot_numpy(x, w, offset: int, stride: int, n_out: int) -> np.ndarray:
    """out[m] = sum_i w[i] * x[offset + m*stride + i] via full convolution."""
    conv = np.convolve(x, w[::-1])
    start = offset + len(w) - 1
    return conv[start : start + n_out * stride : stride]


if HAVE_NUMBA:

    @njit(cache=True)
    def _sosfilt_jit(sos, x):
        # direct form II transposed, one section at a time
        y = x.copy()
        for s in range(sos.shape[0]):
            b0 = sos[s, 0]
            b1 = sos[s, 1]
            b2 = sos[s, 2]
            a1 = sos[s, 4]
            a2 = sos[s, 5]
            w1 = 0.0 + 0.0j
            w2 = 0.0 + 0.0j
            for n in range(y.shape[0]):
                xn = y[n]
                yn = b0 * xn + w1
                w1 = b1 * xn - a1 * yn + w2
                w2 = b2 * xn - a2 * yn
                y[n] = yn
        return y

    @njit(cache=True)
    def _strided_dot_jit(x, w, offset, stride, n_out):
        out = np.empty(n_out, dtype=np.complex128)
        taps = w.shape[0]
        for m in range(n_out):
            base = offset + m * stride
            acc = 0.0 + 0.0j
            for i in range(taps):
                acc += w[i] * x[base + i]
            out[m] = acc
        return out

    def sosfilt_numba(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
        return _sosfilt_jit(
            np.ascontiguousarray(sos, dtype=np.float64),
            np.ascontiguousarray(x, dtype=np.complex128),
        )

    def strided_dot_numba(x, w, offset: int, stride: int, n_out: int) -> np.ndarray:
        return _strided_dot_jit(
            np.ascontiguousarray(x, dtype=np.complex128),
            np.ascontiguousarray(w, dtype=np.complex128),
            offset,
            stride,
            n_out,
        )

    BACKEND = "numba"
    _sosfilt_impl = sosfilt_numba
    _strided_dot_impl = strided_dot_numba
else:
    BACKEND = "numpy"
    _sosfilt_impl = sosfilt_numpy
    _strided_dot_impl = strided_dot_numpy


def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply a biquad cascade (shape (n, 6), a0 == 1) with zero initial state."""
    sos = np.asarray(sos, dtype=np.float64)
    if sos.ndim != 2 or sos.shape[1] != 6:
        raise ValueError(f"sos must have shape (n, 6), got {sos.shape}")
    x = np.asarray(x, dtype=np.complex128)
    if x.size == 0:
        return x.copy()
    return _sosfilt_impl(sos, x)


def strided_dot(x, w, offset: int, stride: int, n_out: int) -> np.ndarray:
    """Sliding dot product of ``w`` against ``x`` windows spaced ``stride`` apart."""
    x = np.asarray(x, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if n_out < 0:
        raise ValueError("n_out must be non-negative")
    if n_out == 0:
        return np.empty(0, dtype=np.complex128)
    last = offset + (n_out - 1) * stride + len(w)
    if offset < 0 or last > len(x):
        raise ValueError(
            f"window range [{offset}, {last}) exceeds signal length {len(x)}"
        )
    return _strided_dot_impl(x, w, offset, stride, n_out)
