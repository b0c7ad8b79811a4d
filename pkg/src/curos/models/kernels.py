"""Squared-exponential kernel and its eigen-expansion for random fields."""

from __future__ import annotations

import numpy as np


def se_kernel(x, ell):
    """K_ij = exp(-|x_i - x_j|^2 / (2 ell^2)) on a 1-D grid."""
    x = np.asarray(x, dtype=float).ravel()
    if ell <= 0:
        raise ValueError("length scale must be positive")
    diff = x[:, None] - x[None, :]
    return np.exp(-(diff**2) / (2.0 * ell**2))


def se_kernel_kl(x, ell, d):
    """Leading d eigenpairs of the squared-exponential kernel matrix.

    Returns (lam, psi) with lam descending and clipped at zero (the kernel is
    PSD up to roundoff) and psi column-orthonormal.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not 1 <= d <= len(x):
        raise ValueError(f"d={d} out of range for {len(x)} grid points")
    k = se_kernel(x, ell)
    lam, vec = np.linalg.eigh(k)
    order = np.argsort(lam)[::-1][:d]
    return np.clip(lam[order], 0.0, None), vec[:, order]
