"""Multidimensional DFT and discrete convolution.

Arrays are plain numpy ndarrays; the coordinate degree of an array is its
shape. ``dft``/``idft`` follow the textbook convention (the inverse carries the
1/N factor) and are computed one axis at a time with 1-D FFTs, which gives the
usual O(N log N) cost. ``fft_convolve`` is the fast path; ``naive_convolve`` is
the direct double sum, kept as an independent oracle.
"""

from __future__ import annotations

import numpy as np
from numpy import fft as _fft

from . import _kernels


def dft(f) -> np.ndarray:
    """Forward multidimensional DFT: f_hat[k] = sum_l f[l] exp(-2 pi i <k, l/n>)."""
    a = np.asarray(f, dtype=np.complex128)
    for ax in range(a.ndim):
        a = _fft.fft(a, axis=ax)
    return a


def idft(g) -> np.ndarray:
    """Inverse of :func:`dft`, including the 1/N normalisation."""
    a = np.asarray(g, dtype=np.complex128)
    for ax in range(a.ndim):
        a = _fft.ifft(a, axis=ax)
    return a


def fast_length(n: int) -> int:
    """Smallest 5-smooth integer >= n (lengths of the form 2^a 3^b 5^c)."""
    if n <= 1:
        return 1
    best = 1 << (n - 1).bit_length()
    p5 = 1
    while p5 < best:
        p35 = p5
        while p35 < best:
            q = p35
            while q < n:
                q *= 2
            best = min(best, q)
            p35 *= 3
        p5 *= 5
    return best


def _check_pair(f, g):
    f = np.asarray(f)
    g = np.asarray(g)
    if f.ndim != g.ndim:
        raise ValueError(f"dimension mismatch: {f.ndim}-D vs {g.ndim}-D")
    if f.ndim == 0:
        raise ValueError("convolution needs at least one axis")
    return f, g


def fft_convolve(f, g) -> np.ndarray:
    """Full linear convolution c[k] = sum_{j <= k} f[j] g[k - j].

    Output extent per axis is n_f + n_g - 1. Each axis is zero padded to a
    5-smooth length of at least that size before transforming. Real inputs go
    through real-to-complex transforms and give a real result.
    """
    f, g = _check_pair(f, g)
    out_shape = tuple(a + b - 1 for a, b in zip(f.shape, g.shape))
    padded = tuple(fast_length(s) for s in out_shape)
    same = f is g
    real = not (np.iscomplexobj(f) or np.iscomplexobj(g))
    if real:
        F = _forward_real(f, padded)
        G = F if same else _forward_real(g, padded)
        c = _inverse_real(F * G, padded)
    else:
        F = _forward_complex(f, padded)
        G = F if same else _forward_complex(g, padded)
        c = _inverse_complex(F * G)
    return c[tuple(slice(0, s) for s in out_shape)]


def _forward_real(a, padded):
    a = np.asarray(a, dtype=np.float64)
    last = a.ndim - 1
    out = _fft.rfft(a, n=padded[last], axis=last)
    for ax in range(last):
        out = _fft.fft(out, n=padded[ax], axis=ax)
    return out


def _inverse_real(A, padded):
    last = A.ndim - 1
    for ax in range(last):
        A = _fft.ifft(A, axis=ax)
    return _fft.irfft(A, n=padded[last], axis=last)


def _forward_complex(a, padded):
    a = np.asarray(a, dtype=np.complex128)
    for ax in range(a.ndim):
        a = _fft.fft(a, n=padded[ax], axis=ax)
    return a


def _inverse_complex(A):
    for ax in range(A.ndim):
        A = _fft.ifft(A, axis=ax)
    return A


def naive_convolve(f, g) -> np.ndarray:
    """Direct O(N_f N_g) convolution; exact for integer inputs."""
    f, g = _check_pair(f, g)
    out_shape = tuple(a + b - 1 for a, b in zip(f.shape, g.shape))
    dtype = np.result_type(f.dtype, g.dtype)
    if dtype == np.bool_:
        dtype = np.int64
    if np.issubdtype(dtype, np.integer):
        dtype = np.int64
    elif np.issubdtype(dtype, np.complexfloating):
        dtype = np.complex128
    else:
        dtype = np.float64
    out = np.zeros(int(np.prod(out_shape)), dtype=dtype)
    off_f = _flat_offsets(f.shape, out_shape)
    off_g = _flat_offsets(g.shape, out_shape)
    _kernels.conv_accumulate(np.ascontiguousarray(f, dtype=dtype).ravel(), off_f,
                             np.ascontiguousarray(g, dtype=dtype).ravel(), off_g, out)
    return out.reshape(out_shape)


def _flat_offsets(shape, out_shape) -> np.ndarray:
    """Flat index in ``out_shape`` of every multi-index of ``shape``."""
    strides = np.ones(len(out_shape), dtype=np.int64)
    for d in range(len(out_shape) - 2, -1, -1):
        strides[d] = strides[d + 1] * out_shape[d + 1]
    grids = np.indices(shape, dtype=np.int64).reshape(len(shape), -1)
    return np.ascontiguousarray(strides @ grids)
