"""CUR low-rank approximations built from sampled columns and rows.

Three constructions are provided:

* :func:`cur_cr` -- the cross (skeleton) form, needing only r columns, r rows
  and their intersection;
* :func:`cur_opt` -- the Frobenius-optimal core for given columns/rows,
  needing the full matrix;
* :func:`cur_cr_os` -- the cross form stabilized by oversampling extra
  row/column intersection entries, with the oversampling counts adapted so the
  amplification indicators stay below a threshold.

Supporting pieces: conversion of CUR factors to SVD form, the oblique
projectors in basis and element form, the a-priori spectral error bound, and
entry-count accounting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg, sampling
from .errors import DegeneracyError

#: Default ceiling for the amplification indicators during adaptation.
DEFAULT_EPS_OS = 10.0


@dataclass
class CurFactors:
    """CUR factors with orthonormal side bases: A_hat = q_col @ core @ q_row.T."""

    q_col: np.ndarray  # (n, r), orthonormal columns
    core: np.ndarray  # (r, r)
    q_row: np.ndarray  # (s, r), orthonormal columns

    @property
    def rank(self):
        return self.core.shape[0]

    def reconstruct(self):
        """Dense reconstruction (test/desk-scale use only)."""
        return self.q_col @ self.core @ self.q_row.T


@dataclass
class LowRankState:
    """Rank-r factorization A_hat = u @ diag(sigma) @ v.T with orthonormal u, v."""

    u: np.ndarray  # (n, r)
    sigma: np.ndarray  # (r,), descending, nonnegative
    v: np.ndarray  # (s, r)

    @property
    def rank(self):
        return len(self.sigma)

    @property
    def shape(self):
        return (self.u.shape[0], self.v.shape[0])

    def reconstruct(self):
        """Dense reconstruction (test/desk-scale use only)."""
        return (self.u * self.sigma) @ self.v.T

    def truncated(self, r):
        return LowRankState(self.u[:, :r].copy(), self.sigma[:r].copy(), self.v[:, :r].copy())

    def check(self, tol=1e-9):
        """Raise if orthonormality or the sigma ordering is violated."""
        r = self.rank
        for name, m in (("u", self.u), ("v", self.v)):
            err = np.linalg.norm(m.T @ m - np.eye(r))
            if err > tol:
                raise ValueError(f"{name} lost orthonormality ({err:.2e})")
        if np.any(self.sigma < -tol) or np.any(np.diff(self.sigma) > tol):
            raise ValueError("sigma must be descending and nonnegative")


@dataclass
class OversampleIndicators:
    """Amplification indicators and oversampling counts from cur_cr_os.

    eta_p / eta_s are the spectral norms of the pseudoinverses of the sampled
    row / column submatrices of the orthonormal bases; both are >= 1 whenever
    those submatrices have full column rank. row_capped / col_capped flag that
    the oversampling budget ran out before the indicator met the threshold.
    """

    eta_p: float
    eta_s: float
    m_r: int
    m_c: int
    row_capped: bool = False
    col_capped: bool = False


def subset_amplification(q, idx):
    """1 / sigma_min(q[idx, :]): the pinv spectral norm for full-rank submatrices."""
    sub = np.asarray(q)[np.asarray(idx, dtype=np.intp)]
    smin = float(np.linalg.svd(sub, compute_uv=False)[-1])
    if smin <= 0.0:
        return np.inf
    return 1.0 / smin


class _AdaptiveSelection:
    """Nested greedy selection over rows of an orthonormal basis, grown lazily."""

    def __init__(self, q, base=None):
        self.q = q
        self.r = q.shape[1]
        if base is None:
            sel = list(sampling.qdeim(q))
        else:
            sel = [int(i) for i in np.asarray(base).ravel()]
            if len(sel) != self.r:
                raise ValueError(
                    f"expected {self.r} base indices, got {len(sel)}"
                )
        self._sel = sel
        self._eta = {}

    def take(self, k):
        if k > len(self._sel):
            self._sel = list(sampling.greedy_extend(self.q, self._sel, k))
        return np.asarray(self._sel[:k], dtype=np.intp)

    def eta(self, k):
        if k not in self._eta:
            self._eta[k] = subset_amplification(self.q, self.take(k))
        return self._eta[k]


def _adapt_m(sel, r, m0, m_max, eps_os):
    """Grow/shrink the oversampling count until the indicator crosses eps_os.

    Returns (m, eta, capped). Growth stops at m_max (capped=True if the
    indicator is still above the threshold). The shrink phase stops at the
    smallest m whose indicator is still feasible: the printed recipe
    decrements one step past feasibility, so the last feasible count is
    restored.
    """
    m = int(np.clip(m0, 0, m_max))
    eta = sel.eta(r + m)
    capped = False
    if eta > eps_os:
        while eta > eps_os and m < m_max:
            m += 1
            eta = sel.eta(r + m)
        capped = eta > eps_os
    else:
        while eta < eps_os and m > 0:
            m -= 1
            eta = sel.eta(r + m)
        if eta > eps_os:
            m += 1
            eta = sel.eta(r + m)
    return m, eta, capped


def cur_cr(cols, rows, intersection):
    """Cross CUR from r columns, r rows, and their r-by-r intersection.

    Equivalent to C @ inv(A(p, s)) @ R expressed on the orthonormalized
    column/row bases, so the reconstruction interpolates the sampled rows and
    columns exactly. The intersection must be nonsingular; a condition number
    beyond 1/eps only warns (the factors are still returned, matching the
    known instability of the plain cross scheme).
    """
    cols = linalg.as_matrix(cols, "cols")
    rows = linalg.as_matrix(rows, "rows")
    x = linalg.as_matrix(intersection, "intersection")
    r = cols.shape[1]
    if rows.shape[0] != r or x.shape != (r, r):
        raise ValueError(
            f"inconsistent shapes: cols {cols.shape}, rows {rows.shape}, "
            f"intersection {x.shape}"
        )
    svals = np.linalg.svd(x, compute_uv=False)
    if svals[-1] == 0.0:
        raise DegeneracyError(
            f"singular intersection (sigma_min=0, sigma_max={svals[0]:.3e})"
        )
    cond = svals[0] / svals[-1]
    if cond > 1.0 / np.finfo(float).eps:
        warnings.warn(
            f"intersection condition number {cond:.3e} exceeds 1/eps; "
            "cross CUR may be inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    q_c, r_c = linalg.thin_qr(cols)
    q_r, r_r = linalg.thin_qr(rows.T)
    core = r_c @ np.linalg.solve(x, r_r.T)
    return CurFactors(q_c, core, q_r)


def _range_basis(m):
    """Orthonormal basis of the numerical range (singular values above cutoff)."""
    u, sv, _ = np.linalg.svd(m, full_matrices=False)
    if sv[0] == 0.0:
        return u[:, :0]
    k = int(np.sum(sv > max(m.shape) * np.finfo(float).eps * sv[0]))
    return u[:, :k]


def cur_opt(a, p, s):
    """Frobenius-optimal CUR for the given row/column index sets (needs full A).

    The reconstruction is C C^+ A R^+ R, evaluated through orthonormal range
    bases so effectively rank-deficient C or R degrade gracefully instead of
    amplifying roundoff through an ill-conditioned pseudoinverse product.
    """
    a = linalg.as_matrix(a)
    p = np.asarray(p, dtype=np.intp)
    s = np.asarray(s, dtype=np.intp)
    if len(p) != len(s):
        raise ValueError("row and column index sets must have equal size")
    c = a[:, s]
    rws = a[p, :]
    q_c, _ = linalg.thin_qr(c)
    q_r, _ = linalg.thin_qr(rws.T)
    bc = _range_basis(c)
    br = _range_basis(rws.T)
    # core = Q_c^T (C C^+ A R^+ R) Q_r; equals Q_c^T A Q_r for full-rank C, R
    core = (q_c.T @ bc) @ (bc.T @ a @ br) @ (br.T @ q_r)
    return CurFactors(q_c, core, q_r)


def cur_cr_os(
    cols,
    rows,
    cross_supplier,
    m_r0=0,
    m_c0=0,
    eps_os=DEFAULT_EPS_OS,
    base_rows=None,
    base_cols=None,
    adapt=True,
):
    """Cross CUR with adaptively oversampled intersection entries.

    Parameters
    ----------
    cols, rows : arrays (n, r) and (r, s)
        The sampled columns A(:, s) and rows A(p, :).
    cross_supplier : callable (pbar, sbar) -> array (len(pbar), len(sbar))
        Returns the matrix entries A(pbar, sbar). Called once, after the
        oversampling counts settle, so data acquisition stays proportional to
        the final m values.
    m_r0, m_c0 : int
        Starting oversampling counts (carry them between related calls).
    eps_os : float > 1
        Ceiling for the amplification indicators.
    base_rows, base_cols : index arrays, optional
        The r row indices p and column indices s that produced ``rows`` and
        ``cols``. When given, the oversampled sets extend them, which makes
        the zero-oversampling limit coincide with :func:`cur_cr` and keeps the
        extra data needed down to m_r * m_c entries. When omitted, the base
        indices are re-derived from the orthonormalized bases.
    adapt : bool
        Set False to pin m_r, m_c at their starting values.

    Returns
    -------
    (CurFactors, OversampleIndicators)
    """
    cols = linalg.as_matrix(cols, "cols")
    rows = linalg.as_matrix(rows, "rows")
    n, r = cols.shape
    r2, s = rows.shape
    if r2 != r:
        raise ValueError(f"cols {cols.shape} and rows {rows.shape} disagree on rank")
    if eps_os <= 1.0:
        raise ValueError("eps_os must exceed 1")

    q_c, _ = linalg.thin_qr(cols)
    q_r, _ = linalg.thin_qr(rows.T)
    sel_rows = _AdaptiveSelection(q_c, base_rows)
    sel_cols = _AdaptiveSelection(q_r, base_cols)

    m_r = int(np.clip(m_r0, 0, n - r))
    m_c = int(np.clip(m_c0, 0, s - r))
    if adapt:
        m_r, eta_p, row_capped = _adapt_m(sel_rows, r, m_r, n - r, eps_os)
        m_c, eta_s, col_capped = _adapt_m(sel_cols, r, m_c, s - r, eps_os)
    else:
        eta_p, row_capped = sel_rows.eta(r + m_r), False
        eta_s, col_capped = sel_cols.eta(r + m_c), False

    pbar = sel_rows.take(r + m_r)
    sbar = sel_cols.take(r + m_c)
    cross = np.asarray(cross_supplier(pbar, sbar), dtype=float)
    if cross.shape != (len(pbar), len(sbar)):
        raise ValueError(
            f"cross_supplier returned shape {cross.shape}, "
            f"expected {(len(pbar), len(sbar))}"
        )
    core = linalg.pinv(q_c[pbar]) @ cross @ linalg.pinv(q_r[sbar]).T
    ind = OversampleIndicators(eta_p, eta_s, m_r, m_c, row_capped, col_capped)
    return CurFactors(q_c, core, q_r), ind


def to_svd_form(f: CurFactors) -> LowRankState:
    """Rotate CUR factors into SVD form via the SVD of the small core matrix."""
    w, sig, vh = np.linalg.svd(f.core)
    return LowRankState(f.q_col @ w, sig, f.q_row @ vh.T)


def eta_exact(a, p, s, r):
    """Amplification factors on the exact leading-r singular vectors of A.

    Needs the dense matrix; intended for analysis/test harnesses, not for the
    solver path. Returns +inf for a singular sampled submatrix.
    """
    a = linalg.as_matrix(a)
    u, _, v = linalg.svd_truncated(a, r)
    eta_p = subset_amplification(u, np.asarray(p, dtype=np.intp)[:r])
    eta_s = subset_amplification(v, np.asarray(s, dtype=np.intp)[:r])
    return eta_p, eta_s


def error_bound(eta_p, eta_s, eta_bar_p, eta_bar_s, sigma_r1):
    """A-priori spectral-norm bound on the obliquely projected approximation error."""
    if min(eta_p, eta_s, eta_bar_p, eta_bar_s, sigma_r1) < 0:
        raise ValueError("all inputs must be nonnegative")
    return (
        min(eta_bar_p * (eta_s + eta_p * eta_bar_s), eta_bar_s * (eta_p + eta_bar_p * eta_s))
        * sigma_r1
    )


def oblique_projection_forms(a, p, s, pbar, sbar):
    """Both algebraic forms of the left/right oblique projectors.

    Returns (P_basis, P_elem, S_basis, S_elem). The basis forms are built from
    the orthonormalized sampled columns/rows; the element forms use only
    entries of A. They coincide when A(:, s) has full column rank and A(p, :)
    full row rank, and all four are idempotent.
    """
    a = linalg.as_matrix(a)
    n, s_dim = a.shape
    p = np.asarray(p, dtype=np.intp)
    s = np.asarray(s, dtype=np.intp)
    pbar = np.asarray(pbar, dtype=np.intp)
    sbar = np.asarray(sbar, dtype=np.intp)

    c = a[:, s]
    rws = a[p, :]
    for name, m in (("A(:, s)", c), ("A(p, :).T", rws.T)):
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] <= max(m.shape) * np.finfo(float).eps * sv[0]:
            raise DegeneracyError(f"{name} is numerically rank deficient")

    q_c, _ = linalg.thin_qr(c)
    q_r, _ = linalg.thin_qr(rws.T)

    p_basis = q_c @ linalg.pinv(q_c[pbar])
    p_basis_full = np.zeros((n, n))
    p_basis_full[:, pbar] = p_basis

    p_elem = c @ linalg.pinv(a[np.ix_(pbar, s)])
    p_elem_full = np.zeros((n, n))
    p_elem_full[:, pbar] = p_elem

    s_basis = linalg.pinv(q_r[sbar].T) @ q_r.T
    s_basis_full = np.zeros((s_dim, s_dim))
    s_basis_full[sbar, :] = s_basis

    s_elem = linalg.pinv(a[np.ix_(p, sbar)]) @ rws
    s_elem_full = np.zeros((s_dim, s_dim))
    s_elem_full[sbar, :] = s_elem

    return p_basis_full, p_elem_full, s_basis_full, s_elem_full


def entry_count(n, s, r, m_r, m_c):
    """Matrix entries needed by oversampled cross CUR: n*r + r*s - r^2 + m_r*m_c."""
    if min(n, s, r, m_r, m_c) < 0:
        raise ValueError("arguments must be nonnegative")
    if r > min(n, s):
        raise ValueError(f"rank {r} exceeds min dimension of ({n}, {s})")
    return n * r + r * s - r * r + m_r * m_c
