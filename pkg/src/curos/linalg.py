"""Dense matrix kernels: thin QR, truncated SVD, pseudoinverse, norms, skew exponential.

Thin wrappers over LAPACK-backed numpy/scipy routines that pin the conventions
used everywhere else in the package: reduced factorizations, descending
singular values, explicit shape checking.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def as_matrix(a, name="a"):
    """Coerce to a 2-D float array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def assert_finite(a, context=""):
    """Raise if the array has NaN/Inf entries."""
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite entries encountered {context}".strip())


def thin_qr(a):
    """Reduced QR of a tall matrix: A = Q R with Q (n, r) orthonormal, R (r, r) upper.

    Householder-based (numerically stable even for rank-deficient input, in
    which case R carries ~zero diagonal entries).
    """
    a = as_matrix(a)
    n, r = a.shape
    if n < r:
        raise ValueError(f"thin_qr needs n >= r, got shape {a.shape}")
    q, rmat = np.linalg.qr(a, mode="reduced")
    return q, rmat


def svd_truncated(a, r):
    """Rank-r truncated SVD: returns (U (n,r), sigma (r,) descending, V (s,r))."""
    a = as_matrix(a)
    n, s = a.shape
    if not 1 <= r <= min(n, s):
        raise ValueError(f"rank {r} out of range for shape {a.shape}")
    u, sig, vh = np.linalg.svd(a, full_matrices=False)
    return u[:, :r].copy(), sig[:r].copy(), vh[:r].T.copy()


def pinv(a, tol=None):
    """Moore-Penrose pseudoinverse; singular values below tol * sigma_max are zeroed.

    Default tol is machine epsilon times the larger dimension.
    """
    a = as_matrix(a)
    if tol is None:
        tol = np.finfo(float).eps * max(a.shape)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return np.linalg.pinv(a, rcond=tol)


def spectral_norm(a):
    """Largest singular value."""
    a = as_matrix(a)
    if a.size == 0 or not np.any(a):
        return 0.0
    return float(np.linalg.norm(a, 2))


def expm_skew(w):
    """Matrix exponential of a skew-symmetric matrix (result is orthogonal)."""
    w = as_matrix(w)
    n, m = w.shape
    if n != m:
        raise ValueError(f"expm_skew needs a square matrix, got {w.shape}")
    sym = np.linalg.norm(w + w.T)
    if sym > 1e-12 * max(np.linalg.norm(w), 1e-300):
        raise ValueError("matrix is not skew-symmetric")
    return scipy.linalg.expm(w)
