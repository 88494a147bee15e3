"""Block Hankel matrices and persistency-of-excitation checks.

For a vector signal w(0..T-1) in R^k and depth t, the Hankel matrix is
the kt x (T - t + 1) block matrix whose (r, c) block is w(r + c): column
c is the window w(c .. c+t-1) stacked sample-major. A signal is
persistently exciting of order t when that matrix has full row rank kt.
"""

from __future__ import annotations

import numpy as np

from .numeric import RANK_RTOL, numerical_rank

__all__ = ["hankel", "is_persistently_exciting", "pe_length_bound"]


def _as_signal(signal) -> np.ndarray:
    arr = np.asarray(signal, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("signal must be 1-d or shaped (time, dim)")
    return arr


def hankel(signal, depth: int) -> np.ndarray:
    """Stack sliding windows of a (T, k) signal into a (k*depth, T-depth+1) matrix."""
    sig = _as_signal(signal)
    length, width = sig.shape
    if depth < 1:
        raise ValueError("depth must be positive")
    if depth > length:
        raise ValueError(f"depth {depth} exceeds signal length {length}")
    cols = length - depth + 1
    out = np.empty((width * depth, cols))
    for r in range(depth):
        out[r * width:(r + 1) * width, :] = sig[r:r + cols, :].T
    return out


def pe_length_bound(dim: int, order: int) -> int:
    """Minimum signal length that can be persistently exciting: (k+1)t - 1."""
    return (dim + 1) * order - 1


def is_persistently_exciting(signal, order: int, rtol: float = RANK_RTOL) -> bool:
    """Numerical full-row-rank test on the depth-`order` Hankel matrix.

    An empty (zero-width) signal is never persistently exciting, and a
    signal shorter than the necessary length bound fails outright.
    """
    sig = _as_signal(signal)
    length, width = sig.shape
    if width == 0 or order < 1:
        return False
    if length < pe_length_bound(width, order):
        return False
    return numerical_rank(hankel(sig, order), rtol=rtol) == width * order
