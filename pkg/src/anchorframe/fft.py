"""Radix-2 FFT pair for the correlation tracker.

The forward transform is unnormalized; the inverse divides by the element
count so ``ifft2(fft2(x))`` reproduces ``x``. Both axes must be powers of
two. The butterflies are vectorized over rows so a 64x64 transform costs a
handful of numpy calls per stage rather than a Python-level loop per sample.
"""

from __future__ import annotations

import numpy as np

from .errors import SizeError

_rev_cache: dict[int, np.ndarray] = {}
_twiddle_cache: dict[tuple[int, bool], np.ndarray] = {}


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _bit_reversal(n: int) -> np.ndarray:
    perm = _rev_cache.get(n)
    if perm is None:
        bits = n.bit_length() - 1
        idx = np.arange(n)
        perm = np.zeros(n, dtype=np.intp)
        for b in range(bits):
            perm = (perm << 1) | ((idx >> b) & 1)
        _rev_cache[n] = perm
    return perm


def _twiddles(half: int, inverse: bool) -> np.ndarray:
    key = (half, inverse)
    tw = _twiddle_cache.get(key)
    if tw is None:
        sign = 1j if inverse else -1j
        tw = np.exp(sign * np.pi * np.arange(half) / half)
        _twiddle_cache[key] = tw
    return tw


def _fft_rows(a: np.ndarray, inverse: bool) -> np.ndarray:
    """Cooley-Tukey transform of every row of a 2-D complex array."""
    m, n = a.shape
    out = np.ascontiguousarray(a[:, _bit_reversal(n)], dtype=np.complex128)
    half = 1
    while half < n:
        tw = _twiddles(half, inverse)
        blocks = out.reshape(m, n // (2 * half), 2, half)
        even = blocks[:, :, 0, :]
        odd = blocks[:, :, 1, :] * tw
        out = np.stack((even + odd, even - odd), axis=2).reshape(m, n)
        half *= 2
    return out


def _check_2d_pow2(arr: np.ndarray) -> None:
    if arr.ndim != 2:
        raise SizeError(f"expected a 2-D array, got shape {arr.shape}")
    h, w = arr.shape
    if not (_is_pow2(h) and _is_pow2(w)):
        raise SizeError(f"array dimensions must be powers of two, got {h}x{w}")


def fft2(x: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2-D DFT of a real or complex array."""
    arr = np.asarray(x)
    _check_2d_pow2(arr)
    spec = _fft_rows(arr.astype(np.complex128, copy=False), inverse=False)
    return _fft_rows(spec.T, inverse=False).T


def ifft2(spectrum: np.ndarray) -> np.ndarray:
    """Inverse 2-D DFT including the 1/N^2 normalization.

    Returns the real part; for conjugate-symmetric spectra the discarded
    imaginary residue is at float rounding level.
    """
    arr = np.asarray(spectrum)
    _check_2d_pow2(arr)
    out = _fft_rows(arr.astype(np.complex128, copy=False), inverse=True)
    out = _fft_rows(out.T, inverse=True).T
    return (out / arr.size).real
