"""Index selection on basis matrices: DEIM, QDEIM, maxvol, and oversampled selection.

All selectors take an (n, r) basis matrix and return distinct 0-based row
indices in selection order. Argmax ties break to the lowest index so results
are reproducible across platforms.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DegeneracyError

_PIVOT_FLOOR = 1e-14
_EIG_CHUNK = 256


def _as_basis(u):
    u = np.asarray(u, dtype=float)
    if u.ndim != 2:
        raise ValueError(f"basis must be 2-D, got shape {u.shape}")
    n, r = u.shape
    if n < r:
        raise ValueError(f"basis must be tall, got shape {u.shape}")
    if r == 0:
        raise ValueError("basis must have at least one column")
    return u


def deim(u):
    """Greedy interpolation-point selection.

    First index is the argmax of |u[:, 0]|; index k is the argmax of the
    residual of column k after interpolating it at the previously selected
    rows. Interpolation systems are solved with partial-pivoted LU; a pivot
    below a relative floor raises :class:`DegeneracyError`.
    """
    u = _as_basis(u)
    n, r = u.shape
    p = [int(np.argmax(np.abs(u[:, 0])))]
    for k in range(1, r):
        sub = u[p, :k]
        lu, piv = scipy.linalg.lu_factor(sub, check_finite=False)
        scale = np.abs(sub).max()
        if scale == 0.0 or np.abs(np.diag(lu)).min() < _PIVOT_FLOOR * scale:
            raise DegeneracyError(
                f"deim interpolation system is singular at step {k}"
            )
        c = scipy.linalg.lu_solve((lu, piv), u[p, k], check_finite=False)
        res = u[:, k] - u[:, :k] @ c
        p.append(int(np.argmax(np.abs(res))))
    out = np.asarray(p, dtype=np.intp)
    if len(np.unique(out)) != r:
        raise DegeneracyError("deim selected a repeated index (degenerate basis)")
    return out


def qdeim(u):
    """Pivoted-QR selection: the first r column pivots of qr(u.T)."""
    u = _as_basis(u)
    r = u.shape[1]
    _, _, piv = scipy.linalg.qr(u.T, mode="economic", pivoting=True, check_finite=False)
    return np.asarray(piv[:r], dtype=np.intp)


def maxvol(u, max_iters=100, swap_tol=1.01):
    """Row selection maximizing |det(u[p, :])| by greedy row swaps.

    Starts from the LU row pivots, then repeatedly swaps in the row that most
    increases the selected volume until every entry of u @ inv(u[p]) is at
    most ``swap_tol`` in magnitude or ``max_iters`` is hit.
    """
    u = _as_basis(u)
    n, r = u.shape
    if swap_tol <= 1.0:
        raise ValueError("swap_tol must exceed 1")
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    if n == r:
        return np.arange(n, dtype=np.intp)

    perm, _, _ = scipy.linalg.lu(u, p_indices=True, check_finite=False)
    p = np.asarray(perm[:r], dtype=np.intp).copy()
    for _ in range(max_iters):
        try:
            b = np.linalg.solve(u[p].T, u.T).T
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError("maxvol hit a singular row submatrix") from exc
        flat = int(np.argmax(np.abs(b)))
        i, j = divmod(flat, r)
        if np.abs(b[i, j]) <= swap_tol:
            break
        p[j] = i
    return p


def gpode(u, k, prefix=None):
    """Oversampled selection of k >= r row indices.

    The first r indices are ``qdeim(u)`` (or ``prefix`` when supplied); each
    further index is chosen greedily to maximize the smallest singular value
    of the sampled basis ``u[sel, :]``. Selections are nested: the first m
    indices are the same for every k >= m.
    """
    u = _as_basis(u)
    n, r = u.shape
    if k > n:
        raise ValueError(f"cannot select {k} of {n} rows")
    if prefix is None:
        sel = list(qdeim(u))
    else:
        sel = [int(i) for i in np.asarray(prefix).ravel()]
        if len(set(sel)) != len(sel) or (sel and not (0 <= min(sel) and max(sel) < n)):
            raise ValueError("prefix must hold distinct in-range indices")
    if k < len(sel):
        raise ValueError(f"k={k} smaller than the {len(sel)} base indices")
    return greedy_extend(u, sel, k)


def greedy_extend(u, selected, k):
    """Extend ``selected`` to k indices, each maximizing sigma_min(u[sel, :])."""
    u = _as_basis(u)
    n, r = u.shape
    sel = [int(i) for i in selected]
    mask = np.ones(n, dtype=bool)
    mask[sel] = False
    gram = u[sel].T @ u[sel] if sel else np.zeros((r, r))
    while len(sel) < k:
        best_val, best_idx = -np.inf, -1
        cand = np.flatnonzero(mask)
        for lo in range(0, len(cand), _EIG_CHUNK):
            chunk = cand[lo : lo + _EIG_CHUNK]
            rows = u[chunk]
            stack = gram[None, :, :] + rows[:, :, None] * rows[:, None, :]
            lam = np.linalg.eigvalsh(stack)[:, 0]
            j = int(np.argmax(lam))
            if lam[j] > best_val:
                best_val, best_idx = float(lam[j]), int(chunk[j])
        sel.append(best_idx)
        mask[best_idx] = False
        gram = gram + np.outer(u[best_idx], u[best_idx])
    return np.asarray(sel, dtype=np.intp)
