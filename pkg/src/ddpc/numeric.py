"""Shared numerical-rank conventions.

One relative singular-value threshold is used everywhere a rank decision
is made (controllability, excitation checks, pseudoinverse norms) so the
modules agree on what counts as zero.
"""

from __future__ import annotations

import numpy as np

RANK_RTOL = 1e-8

__all__ = ["RANK_RTOL", "numerical_rank", "pinv_spectral_norm", "pinv_sqrt"]


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Rank by counting singular values above rtol * sigma_max."""
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def pinv_spectral_norm(a: np.ndarray, rtol: float = RANK_RTOL) -> float:
    """Spectral norm of the Moore-Penrose pseudoinverse.

    Equals the reciprocal of the smallest singular value counted as
    nonzero under the shared threshold. Infinite for a zero matrix.
    """
    if a.size == 0:
        return float("inf")
    s = np.linalg.svd(a, compute_uv=False)
    keep = s[s > rtol * s[0]] if s[0] > 0 else s[:0]
    if keep.size == 0:
        return float("inf")
    return float(1.0 / keep[-1])


def pinv_sqrt(sym: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Inverse square root of a symmetric PSD matrix on its range."""
    w, v = np.linalg.eigh(sym)
    wmax = float(w.max(initial=0.0))
    inv = np.where(w > rtol * wmax, 1.0 / np.sqrt(np.maximum(w, np.finfo(float).tiny)), 0.0)
    return (v * inv) @ v.T
