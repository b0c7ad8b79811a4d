"""Low-rank time integration of matrix ODEs through sampled CUR steps.

One step advances A_hat^{k-1} -> A_hat^k where the updated matrix
A^k = A_hat^{k-1} + dt * F(A_hat^{k-1}) is never formed: only its sampled
columns, rows, and a few cross entries are evaluated through a
:class:`RhsOracle`, and the rank-r representation is rebuilt with the
oversampled cross CUR. Rank adapts against a residual proxy measured on a
small probe block.

Also provides the dense full-order reference (:func:`fom_integrate`) and the
step-truncation SVD reference (:func:`svd_step_reference`) used to benchmark
the sampled integrator at desk scale.
"""

from __future__ import annotations

import time
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import cur, linalg, sampling
from .cur import LowRankState
from .errors import BlowUpError


class RhsOracle(ABC):
    """Supplies entries of F(A_hat) at requested rows, columns, and cross blocks.

    Implementations must be consistent: ``eval_cross(p, s)`` equals the
    corresponding restriction of ``eval_rows(p)`` and of ``eval_cols(s)``.
    They must read the current iterate only through the low-rank factors
    (use :meth:`low_rank_block`), never by materializing the full matrix.
    """

    #: scalar reads of low-rank factors, for instrumentation
    factor_reads: int = 0

    @abstractmethod
    def dims(self):
        """(n, s): ambient row and column dimensions."""

    @abstractmethod
    def eval_cols(self, state, t, col_idx):
        """F(A_hat) at all rows, selected columns: shape (n, len(col_idx))."""

    @abstractmethod
    def eval_rows(self, state, t, row_idx):
        """F(A_hat) at selected rows, all columns: shape (len(row_idx), s)."""

    @abstractmethod
    def eval_cross(self, state, t, row_idx, col_idx):
        """F(A_hat) at the (row_idx, col_idx) block."""

    def low_rank_block(self, state, row_idx=None, col_idx=None):
        """A_hat restricted to the given rows/columns, read through the factors."""
        u = state.u if row_idx is None else state.u[np.asarray(row_idx, dtype=np.intp)]
        v = state.v if col_idx is None else state.v[np.asarray(col_idx, dtype=np.intp)]
        self.factor_reads += (u.shape[0] + v.shape[0]) * state.rank
        return (u * state.sigma) @ v.T


def state_block(state, row_idx=None, col_idx=None):
    """A_hat restricted to rows x cols, straight from the factors."""
    u = state.u if row_idx is None else state.u[np.asarray(row_idx, dtype=np.intp)]
    v = state.v if col_idx is None else state.v[np.asarray(col_idx, dtype=np.intp)]
    return (u * state.sigma) @ v.T


@dataclass
class IntegratorConfig:
    """Settings for a sampled low-rank integration run."""

    dt: float
    t_final: float
    r0: int = 8
    eps_os: float = cur.DEFAULT_EPS_OS
    eps_u: float = 1e-8
    eps_l: float | None = None  # default: eps_u / 100
    scheme: str = "euler"
    rank_probe_fraction: float = 0.01
    max_rank_jump: int = 1
    min_rank: int = 1
    max_rank: int | None = None

    def __post_init__(self):
        if self.dt <= 0 or self.t_final <= 0 or self.dt > self.t_final:
            raise ValueError("need 0 < dt <= t_final")
        if self.eps_os <= 1.0:
            raise ValueError("eps_os must exceed 1")
        if self.eps_l is None:
            self.eps_l = 1e-2 * self.eps_u if np.isfinite(self.eps_u) else 0.0
        if not 0.0 <= self.eps_l < self.eps_u:
            raise ValueError("need 0 <= eps_l < eps_u")
        if self.scheme not in ("euler", "rk4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.rank_probe_fraction <= 1.0:
            raise ValueError("rank_probe_fraction must lie in (0, 1]")
        if self.max_rank_jump < 1 or self.min_rank < 1:
            raise ValueError("max_rank_jump and min_rank must be >= 1")

    @property
    def n_steps(self):
        return int(round(self.t_final / self.dt))


@dataclass
class StepCarry:
    """Per-run memory passed between steps: sampling rank and oversampling counts."""

    rank: int
    m_r: int = 0
    m_c: int = 0


@dataclass
class StepDiagnostics:
    """Per-step record of the sampled integrator."""

    t: float
    step: int
    rank: int  # sampling rank used in this step
    new_rank: int  # rank carried into the next step
    m_r: int
    m_c: int
    mbar_r: int
    mbar_c: int
    eps: float
    eta_p: float
    eta_s: float
    row_capped: bool
    col_capped: bool
    entries_accessed: int
    probe_overlap: int  # probe-block entries served from already sampled data
    wall_time: float


class _RhsSampler:
    """Memoized access to F(eval_state, t): each matrix entry is fetched once.

    Columns are stored whole; everything else lands in cross rectangles. A
    cross request is served from the stores where possible and the remaining
    cells are fetched as all-unknown rectangles (rows grouped by identical
    missing-column signatures), so the fetch tally counts every entry exactly
    once.
    """

    def __init__(self, oracle, eval_state, t):
        self.oracle = oracle
        self.state = eval_state
        self.t = t
        self.n, self.s = oracle.dims()
        self.entries = 0
        self._cols = {}
        self._rects = []

    def _check(self, block):
        if not np.all(np.isfinite(block)):
            raise BlowUpError("non-finite right-hand-side sample", t=self.t)
        return block

    def fcols(self, col_idx):
        col_idx = np.asarray(col_idx, dtype=np.intp)
        missing = [j for j in col_idx if j not in self._cols]
        if missing:
            block = self._check(
                np.asarray(self.oracle.eval_cols(self.state, self.t, np.asarray(missing)))
            )
            self.entries += block.size
            for k, j in enumerate(missing):
                self._cols[j] = block[:, k].copy()
        return np.column_stack([self._cols[j] for j in col_idx])

    def fcross(self, row_idx, col_idx):
        row_idx = np.asarray(row_idx, dtype=np.intp)
        col_idx = np.asarray(col_idx, dtype=np.intp)
        out = np.empty((len(row_idx), len(col_idx)))
        known = np.zeros(out.shape, dtype=bool)
        for jj, j in enumerate(col_idx):
            if j in self._cols:
                out[:, jj] = self._cols[j][row_idx]
                known[:, jj] = True
        for rows, cols, blk in self._rects:
            rpos = {int(i): k for k, i in enumerate(rows)}
            cpos = {int(j): k for k, j in enumerate(cols)}
            rsel = [(ii, rpos[int(i)]) for ii, i in enumerate(row_idx) if int(i) in rpos]
            csel = [(jj, cpos[int(j)]) for jj, j in enumerate(col_idx) if int(j) in cpos]
            for ii, ri in rsel:
                for jj, ci in csel:
                    out[ii, jj] = blk[ri, ci]
                    known[ii, jj] = True
        unknown = ~known
        if unknown.any():
            groups = {}
            for ii in range(len(row_idx)):
                sig = tuple(np.flatnonzero(unknown[ii]))
                if sig:
                    groups.setdefault(sig, []).append(ii)
            for sig, rows_ii in groups.items():
                ri = row_idx[rows_ii]
                ci = col_idx[list(sig)]
                blk = self._check(
                    np.asarray(self.oracle.eval_cross(self.state, self.t, ri, ci))
                )
                self.entries += blk.size
                out[np.ix_(rows_ii, list(sig))] = blk
                self._rects.append((ri, ci, blk))
        return out

    def frows(self, row_idx):
        return self.fcross(row_idx, np.arange(self.s))


def rank_probe_indices(u, v, r, fraction):
    """Oversampled probe index sets used by the rank-adaptivity residual proxy.

    Probe sizes are r plus a fixed fraction (at least one) of the ambient
    dimensions; the sets extend the base selection of the same bases and are
    clamped (with a warning) when they would exceed the ambient size.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    n, s = u.shape[0], v.shape[0]
    mbar_r = max(1, int(round(fraction * n)))
    mbar_c = max(1, int(round(fraction * s)))
    k_r, k_c = r + mbar_r, r + mbar_c
    if k_r > n or k_c > s:
        warnings.warn("rank probe set clamped to the ambient dimension", stacklevel=2)
        k_r, k_c = min(k_r, n), min(k_c, s)
    return sampling.gpode(u, k_r), sampling.gpode(v, k_c)


def _decide_rank(r_s, eps_val, cfg, n, s_dim):
    hi = min(n, s_dim) if cfg.max_rank is None else min(cfg.max_rank, n, s_dim)
    if eps_val > cfg.eps_u:
        return min(r_s + cfg.max_rank_jump, hi)
    if eps_val < cfg.eps_l:
        return max(r_s - 1, cfg.min_rank)
    return r_s


def tdb_step(state, oracle, t, cfg, carry):
    """One sampled CUR step of the matrix ODE.

    Returns (new_state, new_carry, diagnostics). ``carry`` brings the sampling
    rank and oversampling counts from the previous step.
    """
    if cfg.scheme == "euler":
        return _tdb_step_euler(state, oracle, t, cfg, carry)
    return _tdb_step_rk4(state, oracle, t, cfg, carry)


def _step_index_sets(state, cfg, n, s_dim, carry):
    r_s = int(np.clip(carry.rank, cfg.min_rank, min(n, s_dim)))
    if r_s < state.rank:
        state = state.truncated(r_s)
    p = sampling.gpode(state.u, r_s)
    s = sampling.gpode(state.v, r_s)
    pbar_r, sbar_r = rank_probe_indices(state.u, state.v, r_s, cfg.rank_probe_fraction)
    return state, r_s, p, s, pbar_r, sbar_r


def _finish_step(
    state, cand, samplers, t, cfg, carry, ind, r_s, p, s, pbar_r, sbar_r, weights, t0
):
    """Rank probe, rank decision, and diagnostics shared by both schemes."""
    n, s_dim = state.u.shape[0], state.v.shape[0]
    probe_size = len(pbar_r) * len(sbar_r)
    before = sum(sp.entries for sp in samplers)
    a_probe = state_block(state, pbar_r, sbar_r)
    for w, sp in zip(weights, samplers):
        a_probe = a_probe + w * sp.fcross(pbar_r, sbar_r)
    probe_fetched = sum(sp.entries for sp in samplers) - before
    recon = state_block(cand, pbar_r, sbar_r)
    eps_val = float(np.linalg.norm(a_probe - recon)) / probe_size

    new_rank = _decide_rank(r_s, eps_val, cfg, n, s_dim)
    if new_rank < r_s:
        cand = cand.truncated(new_rank)

    entries = sum(sp.entries for sp in samplers)
    diag = StepDiagnostics(
        t=t + cfg.dt,
        step=-1,
        rank=r_s,
        new_rank=new_rank,
        m_r=ind.m_r,
        m_c=ind.m_c,
        mbar_r=len(pbar_r) - r_s,
        mbar_c=len(sbar_r) - r_s,
        eps=eps_val,
        eta_p=ind.eta_p,
        eta_s=ind.eta_s,
        row_capped=ind.row_capped,
        col_capped=ind.col_capped,
        entries_accessed=entries,
        probe_overlap=probe_size - probe_fetched,
        wall_time=time.perf_counter() - t0,
    )
    return cand, StepCarry(rank=new_rank, m_r=ind.m_r, m_c=ind.m_c), diag


def _tdb_step_euler(state, oracle, t, cfg, carry):
    t0 = time.perf_counter()
    n, s_dim = oracle.dims()
    state, r_s, p, s, pbar_r, sbar_r = _step_index_sets(state, cfg, n, s_dim, carry)
    dt = cfg.dt

    sampler = _RhsSampler(oracle, state, t)
    cols_new = state_block(state, None, s) + dt * sampler.fcols(s)
    rows_new = state_block(state, p, None) + dt * sampler.frows(p)

    def supply(pbar, sbar):
        return state_block(state, pbar, sbar) + dt * sampler.fcross(pbar, sbar)

    factors, ind = cur.cur_cr_os(
        cols_new,
        rows_new,
        supply,
        m_r0=carry.m_r,
        m_c0=carry.m_c,
        eps_os=cfg.eps_os,
        base_rows=p,
        base_cols=s,
    )
    cand = cur.to_svd_form(factors)
    return _finish_step(
        state, cand, [sampler], t, cfg, carry, ind, r_s, p, s, pbar_r, sbar_r, [dt], t0
    )


def _tdb_step_rk4(state, oracle, t, cfg, carry):
    """Classical four-stage step; every stage is sampled at the step's index
    sets and compressed back to rank r before feeding the next stage."""
    t0 = time.perf_counter()
    n, s_dim = oracle.dims()
    state, r_s, p, s, pbar_r, sbar_r = _step_index_sets(state, cfg, n, s_dim, carry)
    dt = cfg.dt

    base_cols = state_block(state, None, s)
    base_rows = state_block(state, p, None)

    stage_coefs = [0.5 * dt, 0.5 * dt, dt]
    stage_times = [t, t + 0.5 * dt, t + 0.5 * dt, t + dt]
    weights = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0]

    samplers = []
    stage_state = state
    for i in range(4):
        sp = _RhsSampler(oracle, stage_state, stage_times[i])
        samplers.append(sp)
        if i == 3:
            break
        coef = stage_coefs[i]
        cols_i = base_cols + coef * sp.fcols(s)
        rows_i = base_rows + coef * sp.frows(p)

        def supply(pbar, sbar, sp=sp, coef=coef):
            return state_block(state, pbar, sbar) + coef * sp.fcross(pbar, sbar)

        factors_i, _ = cur.cur_cr_os(
            cols_i,
            rows_i,
            supply,
            m_r0=carry.m_r,
            m_c0=carry.m_c,
            eps_os=cfg.eps_os,
            base_rows=p,
            base_cols=s,
            adapt=False,
        )
        stage_state = cur.to_svd_form(factors_i)

    cols_new = base_cols.copy()
    rows_new = base_rows.copy()
    for w, sp in zip(weights, samplers):
        cols_new += w * sp.fcols(s)
        rows_new += w * sp.frows(p)

    def supply_final(pbar, sbar):
        out = state_block(state, pbar, sbar)
        for w, sp in zip(weights, samplers):
            out = out + w * sp.fcross(pbar, sbar)
        return out

    factors, ind = cur.cur_cr_os(
        cols_new,
        rows_new,
        supply_final,
        m_r0=carry.m_r,
        m_c0=carry.m_c,
        eps_os=cfg.eps_os,
        base_rows=p,
        base_cols=s,
    )
    cand = cur.to_svd_form(factors)
    return _finish_step(
        state, cand, samplers, t, cfg, carry, ind, r_s, p, s, pbar_r, sbar_r, weights, t0
    )


@dataclass
class IntegrationResult:
    times: list
    diagnostics: list
    state: LowRankState


def integrate(state0, oracle, cfg, checkpoint=None, validate=True):
    """Advance a low-rank state to t_final with sampled CUR steps.

    ``checkpoint(step, t, state, diag)`` is invoked after every step.
    State invariants (orthonormal factors, descending sigma) are re-checked
    each step unless ``validate`` is False.
    """
    state = state0
    carry = StepCarry(rank=state0.rank)
    diags = []
    times = []
    t = 0.0
    for k in range(cfg.n_steps):
        try:
            state, carry, diag = tdb_step(state, oracle, t, cfg, carry)
        except BlowUpError as exc:
            exc.step = k
            raise
        t = (k + 1) * cfg.dt
        diag.step = k
        diag.t = t
        if validate:
            state.check(1e-9)
        diags.append(diag)
        times.append(t)
        if checkpoint is not None:
            checkpoint(k, t, state, diag)
    return IntegrationResult(times, diags, state)


class InstrumentedOracle(RhsOracle):
    """Wrapper that tallies requested entries and rejects full-matrix requests.

    The assertion guards the data-efficiency contract: no single request may
    materialize the complete matrix.
    """

    def __init__(self, inner):
        self.inner = inner
        self.entries = 0
        self.factor_reads = 0

    def dims(self):
        return self.inner.dims()

    def eval_cols(self, state, t, col_idx):
        n, s = self.dims()
        assert len(col_idx) < s, "oracle request would materialize the full matrix"
        self.entries += n * len(col_idx)
        return self.inner.eval_cols(state, t, col_idx)

    def eval_rows(self, state, t, row_idx):
        n, s = self.dims()
        assert len(row_idx) < n, "oracle request would materialize the full matrix"
        self.entries += len(row_idx) * s
        return self.inner.eval_rows(state, t, row_idx)

    def eval_cross(self, state, t, row_idx, col_idx):
        n, s = self.dims()
        assert (
            len(row_idx) < n or len(col_idx) < s
        ), "oracle request would materialize the full matrix"
        self.entries += len(row_idx) * len(col_idx)
        return self.inner.eval_cross(state, t, row_idx, col_idx)

    def low_rank_block(self, state, row_idx=None, col_idx=None):
        return self.inner.low_rank_block(state, row_idx, col_idx)


def _dense_step(f, a, t, dt, scheme):
    if scheme == "euler":
        return a + dt * f(a, t)
    k1 = f(a, t)
    k2 = f(a + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(a + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(a + dt * k3, t + dt)
    return a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def fom_integrate(f, a0, cfg, store_every=1):
    """Dense full-order integration of dA/dt = f(A, t). Desk scale only.

    Returns (times, states) sampled every ``store_every`` steps (the initial
    matrix is always included).
    """
    a = np.array(a0, dtype=float)
    times = [0.0]
    states = [a.copy()]
    t = 0.0
    for k in range(cfg.n_steps):
        a = _dense_step(f, a, t, cfg.dt, cfg.scheme)
        t = (k + 1) * cfg.dt
        if not np.all(np.isfinite(a)):
            raise BlowUpError("full-order model blew up", step=k + 1, t=t)
        if (k + 1) % store_every == 0:
            times.append(t)
            states.append(a.copy())
    return times, states


def svd_step_reference(a0, f, cfg, rank, store_every=1):
    """Step-truncation reference: dense step, then rank truncation by SVD.

    ``rank`` may be an integer or a per-step sequence (to mirror an adaptive
    run). Materializes the dense right-hand side; desk scale only.
    """
    a0 = np.asarray(a0, dtype=float)
    n, s = a0.shape
    ranks = np.broadcast_to(np.asarray(rank, dtype=int), (cfg.n_steps,))
    r_init = min(int(ranks[0]), n, s)
    u, sig, v = linalg.svd_truncated(a0, r_init)
    state = LowRankState(u, sig, v)
    times = [0.0]
    states = [state]
    t = 0.0
    for k in range(cfg.n_steps):
        r_k = min(int(ranks[k]), n, s)
        b = _dense_step(f, state.reconstruct(), t, cfg.dt, cfg.scheme)
        t = (k + 1) * cfg.dt
        if not np.all(np.isfinite(b)):
            raise BlowUpError("step-truncation reference blew up", step=k + 1, t=t)
        u, sig, v = linalg.svd_truncated(b, r_k)
        state = LowRankState(u, sig, v)
        if (k + 1) % store_every == 0:
            times.append(t)
            states.append(state)
    return times, states
