"""Experiment execution: rank sweeps on toy matrices, PDE runs, heat runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import cur, linalg, sampling
from ..errors import BlowUpError, DegeneracyError
from ..integrator import (
    InstrumentedOracle,
    IntegratorConfig,
    fom_integrate,
    integrate,
    svd_step_reference,
)
from ..models import (
    SpdeSpec,
    ToySpec,
    build_spde,
    heat_model,
    load_heat_system,
    sample_corners,
    synthetic_heat_system,
    toy_matrix,
)
from .records import MetricRecord

_N_SIGMA = 10  # leading singular values kept per record


def _toy_selection(a, rank, selector):
    u, _, v = linalg.svd_truncated(a, rank)
    return selector(u), selector(v)


def _measured_errors(a, approx, norm2, norm_f_scale):
    diff = a - approx
    return (
        float(np.linalg.norm(diff, 2)) / norm2,
        float(np.linalg.norm(diff)) / norm_f_scale,
    )


def run_toy(cfg):
    """Rank sweep on a toy matrix; always includes the SVD baseline records."""
    cfg = cfg.resolved()
    spec = ToySpec(n=cfg.n, decay=cfg.decay, seed=cfg.seed)
    a = toy_matrix(spec)
    n = spec.n
    u_full, sig_full, vh_full = np.linalg.svd(a)
    v_full = vh_full.T
    norm2 = float(sig_full[0])
    nf = float(n * n)

    records = []
    for r in range(1, n + 1):
        svd_approx = (u_full[:, :r] * sig_full[:r]) @ v_full[:, :r].T
        e2, ef = _measured_errors(a, svd_approx, norm2, nf)
        records.append(
            MetricRecord(
                abscissa=float(r), method="svd", err_rel_l2=e2, err_frob_norm=ef, rank=r
            )
        )
        if cfg.method == "svd":
            continue
        records.append(_toy_method_record(cfg, a, u_full, v_full, r, norm2, nf))
    return records


def _toy_method_record(cfg, a, u_full, v_full, r, norm2, nf):
    n = a.shape[0]
    rec = MetricRecord(abscissa=float(r), method=cfg.method, rank=r)
    try:
        u_r, v_r = u_full[:, :r], v_full[:, :r]
        if cfg.method == "cur_cr_maxvol":
            p, s = sampling.maxvol(u_r), sampling.maxvol(v_r)
        else:
            p, s = sampling.deim(u_r), sampling.deim(v_r)

        if cfg.method in ("cur_cr_deim", "cur_cr_maxvol"):
            factors = cur.cur_cr(a[:, s], a[p, :], a[np.ix_(p, s)])
            rec.eta_bar_p = cur.subset_amplification(factors.q_col, p)
            rec.eta_bar_s = cur.subset_amplification(factors.q_row, s)
            rec.entries_accessed = cur.entry_count(n, n, r, 0, 0)
        elif cfg.method == "cur_cr_os":
            factors, ind = cur.cur_cr_os(
                a[:, s],
                a[p, :],
                lambda pb, sb: a[np.ix_(pb, sb)],
                eps_os=cfg.eps_os,
                base_rows=p,
                base_cols=s,
            )
            rec.eta_bar_p, rec.eta_bar_s = ind.eta_p, ind.eta_s
            rec.m_r, rec.m_c = ind.m_r, ind.m_c
            rec.entries_accessed = cur.entry_count(n, n, r, ind.m_r, ind.m_c)
        elif cfg.method == "cur_opt":
            factors = cur.cur_opt(a, p, s)
            rec.entries_accessed = n * n
        else:
            raise ValueError(f"method {cfg.method!r} not valid for the toy sweep")
        rec.err_rel_l2, rec.err_frob_norm = _measured_errors(
            a, factors.reconstruct(), norm2, nf
        )
        if not np.isfinite(rec.err_rel_l2):
            rec.diverged = True
    except (DegeneracyError, np.linalg.LinAlgError):
        rec.err_rel_l2 = rec.err_frob_norm = float("inf")
        rec.diverged = True
    return rec


@dataclass
class RunResult:
    """Everything a PDE/heat run emits."""

    records: list = field(default_factory=list)
    singular_rows: list = field(default_factory=list)  # (t, source, index, sigma)
    mean_rows: list = field(default_factory=list)  # (t, coord, mean, std, selected)
    diagnostics: list = field(default_factory=list)
    total_entries: int = 0


def _state_mean_std(state):
    """Column-average field and per-row sample std, computed from the factors."""
    s = state.v.shape[0]
    mean = (state.u * state.sigma) @ (state.v.mean(axis=0))
    gram = (state.v.T @ state.v) / s
    us = state.u * state.sigma
    second = np.einsum("ij,jk,ik->i", us, gram, us)
    var = np.maximum(second - mean**2, 0.0)
    return mean, np.sqrt(var)


def _spde_spec(cfg):
    return SpdeSpec(
        kind=cfg.experiment,
        n=cfg.n,
        s=cfg.s,
        d=cfg.d,
        nu_or_gamma=cfg.nu,
        dt=cfg.dt,
        t_final=cfg.t_final,
        sigma=cfg.sigma,
        ell=cfg.ell,
        seed=cfg.seed,
        r0=cfg.rank,
    )


def _integrator_config(cfg):
    return IntegratorConfig(
        dt=cfg.dt,
        t_final=cfg.t_final,
        r0=cfg.rank,
        eps_os=cfg.eps_os,
        eps_u=cfg.eps_u,
        eps_l=cfg.eps_l,
        scheme=cfg.scheme,
        rank_probe_fraction=cfg.rank_probe_fraction,
        max_rank_jump=cfg.max_rank_jump,
    )


def run_spde(cfg):
    """Sampled CUR run against dense references for one stochastic PDE."""
    cfg = cfg.resolved()
    spec = _spde_spec(cfg)
    oracle, state0 = build_spde(spec)
    icfg = _integrator_config(cfg)
    every = cfg.checkpoint_every
    result = RunResult()

    fom_times, fom_states = fom_integrate(oracle.full_rhs, state0.reconstruct(), icfg, every)
    if cfg.method == "fom":
        _record_reference(result, "fom", fom_times, fom_states, fom_states)
        return result

    guarded = InstrumentedOracle(oracle)
    checkpoints = {}

    def keep(step, t, state, diag):
        if (step + 1) % every == 0:
            checkpoints[step + 1] = (t, state, diag, guarded.entries)

    try:
        run = integrate(state0, guarded, icfg, checkpoint=keep)
    except BlowUpError as exc:
        result.records.append(
            MetricRecord(
                abscissa=float(exc.t or 0.0),
                method="cur_cr_os",
                err_rel_l2=float("inf"),
                err_frob_norm=float("inf"),
                diverged=True,
            )
        )
        return result
    result.diagnostics = run.diagnostics
    result.total_entries = guarded.entries

    rank_history = [d.rank for d in run.diagnostics]
    svd_times, svd_states = svd_step_reference(
        state0.reconstruct(), oracle.full_rhs, icfg, rank_history, every
    )

    x = oracle.x if hasattr(oracle, "x") else np.arange(oracle.dims()[0])
    nf = float(np.prod(fom_states[0].shape))
    for k, (t, a_fom) in enumerate(zip(fom_times, fom_states)):
        if k == 0:
            continue
        step = k * every
        t_chk, state, diag, entries = checkpoints[step]
        norm2 = float(np.linalg.norm(a_fom, 2))
        e2, ef = _measured_errors(a_fom, state.reconstruct(), norm2, nf)
        sig = tuple(float(v) for v in state.sigma[:_N_SIGMA])
        result.records.append(
            MetricRecord(
                abscissa=t_chk,
                method="cur_cr_os",
                err_rel_l2=e2,
                err_frob_norm=ef,
                eta_bar_p=diag.eta_p,
                eta_bar_s=diag.eta_s,
                m_r=diag.m_r,
                m_c=diag.m_c,
                rank=diag.rank,
                entries_accessed=entries,
                sigma_leading=sig,
            )
        )
        ref = svd_states[k]
        e2r, efr = _measured_errors(a_fom, ref.reconstruct(), norm2, nf)
        result.records.append(
            MetricRecord(
                abscissa=t_chk,
                method="svd",
                err_rel_l2=e2r,
                err_frob_norm=efr,
                rank=ref.rank,
                sigma_leading=tuple(float(v) for v in ref.sigma[:_N_SIGMA]),
            )
        )
        sig_fom = np.linalg.svd(a_fom, compute_uv=False)[:_N_SIGMA]
        for i, v in enumerate(sig_fom):
            result.singular_rows.append((t_chk, "fom", i, float(v)))
        for i, v in enumerate(sig):
            result.singular_rows.append((t_chk, "cur_cr_os", i, v))

        mean, std = _state_mean_std(state)
        selected = np.zeros(len(mean), dtype=int)
        selected[sampling.qdeim(state.u)] = 1
        for i in range(len(mean)):
            result.mean_rows.append(
                (t_chk, float(x[i]), float(mean[i]), float(std[i]), int(selected[i]))
            )
    return result


def _record_reference(result, method, times, states, fom_states):
    for k, t in enumerate(times):
        if k == 0:
            continue
        a = states[k] if isinstance(states[k], np.ndarray) else states[k].reconstruct()
        sig = np.linalg.svd(a, compute_uv=False)[:_N_SIGMA]
        result.records.append(
            MetricRecord(
                abscissa=float(t),
                method=method,
                err_rel_l2=0.0,
                err_frob_norm=0.0,
                rank=int(np.linalg.matrix_rank(a)),
                sigma_leading=tuple(float(v) for v in sig),
            )
        )


def run_heat(cfg):
    """Sampled CUR run on the lumped heat system with cylinder statistics."""
    cfg = cfg.resolved()
    if cfg.heat_dir:
        system = load_heat_system(cfg.heat_dir)
    else:
        system = synthetic_heat_system(nx=cfg.heat_nx, ny=cfg.heat_ny)
    corners = sample_corners(cfg.s, seed=cfg.seed)
    oracle, state0 = heat_model(system, corners, r0=cfg.rank)
    icfg = _integrator_config(cfg)
    every = cfg.checkpoint_every
    result = RunResult()

    guarded = InstrumentedOracle(oracle)
    cylinder = np.flatnonzero(system.g_i == 1)

    def keep(step, t, state, diag):
        if (step + 1) % every != 0:
            return
        mean, std = _state_mean_std(state)
        selected = np.zeros(len(mean), dtype=int)
        selected[sampling.qdeim(state.u)] = 1
        for i in cylinder:
            result.mean_rows.append(
                (t, float(i), float(mean[i]), float(std[i]), int(selected[i]))
            )
        sig = tuple(float(v) for v in state.sigma[:_N_SIGMA])
        for i, v in enumerate(sig):
            result.singular_rows.append((t, "cur_cr_os", i, v))
        result.records.append(
            MetricRecord(
                abscissa=t,
                method="cur_cr_os",
                eta_bar_p=diag.eta_p,
                eta_bar_s=diag.eta_s,
                m_r=diag.m_r,
                m_c=diag.m_c,
                rank=diag.rank,
                entries_accessed=guarded.entries,
                sigma_leading=sig,
            )
        )

    try:
        run = integrate(state0, guarded, icfg, checkpoint=keep)
    except BlowUpError as exc:
        result.records.append(
            MetricRecord(
                abscissa=float(exc.t or 0.0),
                method="cur_cr_os",
                err_rel_l2=float("inf"),
                err_frob_norm=float("inf"),
                diverged=True,
            )
        )
        return result
    result.diagnostics = run.diagnostics
    result.total_entries = guarded.entries
    return result
