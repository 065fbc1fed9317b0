"""Walsh-Hadamard transform and exact XOR convolution of integer vectors."""

from __future__ import annotations

import numpy as np

_INT64_SAFE = 2**62


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis.

    Works for int64, float64 and object (Python int) arrays; the length must
    be a power of two.
    """
    a = np.array(a, copy=True)
    n = a.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < n:
        a = a.reshape(lead + (n // (2 * h), 2, h))
        x = a[..., 0, :]
        y = a[..., 1, :]
        a = np.stack((x + y, x - y), axis=-2)
        h *= 2
    return a.reshape(lead + (n,))


def _abs_sum(a: np.ndarray) -> int:
    if a.dtype == object:
        return sum(abs(int(v)) for v in a.ravel())
    return int(np.abs(a).sum(dtype=np.float64))


def xor_convolve(u, v) -> np.ndarray:
    """``w[c] = sum over a ^ b == c of u[a] * v[b]`` computed exactly.

    Falls back to Python integers when int64 could overflow.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    n = u.shape[-1]
    if v.shape[-1] != n:
        raise ValueError("length mismatch")
    su, sv = _abs_sum(u), _abs_sum(v)
    if n * su * sv < _INT64_SAFE and u.dtype != object and v.dtype != object:
        hu, hv = fwht(u.astype(np.int64)), fwht(v.astype(np.int64))
        w = fwht(hu * hv)
        return w // n
    hu, hv = fwht(u.astype(object)), fwht(v.astype(object))
    w = fwht(hu * hv)
    return np.array([int(x) // n for x in w.ravel()], dtype=object).reshape(w.shape)


def popcounts(n: int) -> np.ndarray:
    """Popcount of every index ``0 .. n-1``."""
    return np.bitwise_count(np.arange(n, dtype=np.uint64)).astype(np.int64)
