"""Quick self-check battery behind the `verify` CLI subcommand.

Runs a compressed version of the property suites (factorization residuals,
selector invariants, limit consistency, the projector bound, model oracle
consistency) and prints one PASS/FAIL line per check.
"""

from __future__ import annotations

import numpy as np

from .. import cur, linalg, sampling
from ..models import SpdeSpec, ToySpec, build_spde, toy_matrix


def _checks():
    rng = np.random.default_rng(7)

    def qr_residual():
        a = rng.standard_normal((50, 8))
        q, r = linalg.thin_qr(a)
        return (
            np.linalg.norm(q @ r - a) <= 1e-12 * np.linalg.norm(a)
            and np.linalg.norm(q.T @ q - np.eye(8)) <= 1e-12
        )

    def pinv_identities():
        a = rng.standard_normal((7, 4))
        ap = linalg.pinv(a)
        return (
            np.linalg.norm(a @ ap @ a - a) <= 1e-10
            and np.linalg.norm(ap @ a @ ap - ap) <= 1e-10
        )

    def selector_invariants():
        u = linalg.thin_qr(rng.standard_normal((40, 5)))[0]
        p = sampling.deim(u)
        q = sampling.qdeim(u)
        g = sampling.gpode(u, 9)
        return (
            len(np.unique(p)) == 5
            and len(np.unique(q)) == 5
            and np.array_equal(g[:5], q)
        )

    def limit_consistency():
        a = rng.standard_normal((30, 20))
        u, _, v = linalg.svd_truncated(a, 5)
        p, s = sampling.deim(u), sampling.deim(v)
        f0 = cur.cur_cr(a[:, s], a[p, :], a[np.ix_(p, s)])
        f1, _ = cur.cur_cr_os(
            a[:, s], a[p, :], lambda pb, sb: a[np.ix_(pb, sb)],
            eps_os=1e6, base_rows=p, base_cols=s,
        )
        return np.linalg.norm(f0.reconstruct() - f1.reconstruct()) <= 1e-10 * np.linalg.norm(a)

    def projector_bound():
        a = toy_matrix(ToySpec(n=40, decay="slow", seed=3))
        r = 8
        u, sig_all = np.linalg.svd(a)[0], np.linalg.svd(a, compute_uv=False)
        v = np.linalg.svd(a)[2].T
        p, s = sampling.deim(u[:, :r]), sampling.deim(v[:, :r])
        holder = {}

        def supply(pb, sb):
            holder["pbar"], holder["sbar"] = pb, sb
            return a[np.ix_(pb, sb)]

        _, ind = cur.cur_cr_os(a[:, s], a[p, :], supply, eps_os=10.0, base_rows=p, base_cols=s)
        pm, _, sm, _ = cur.oblique_projection_forms(a, p, s, holder["pbar"], holder["sbar"])
        eta_p, eta_s = cur.eta_exact(a, p, s, r)
        measured = np.linalg.norm(a - pm @ a @ sm, 2)
        bound = cur.error_bound(eta_p, eta_s, ind.eta_p, ind.eta_s, sig_all[r])
        return measured <= bound

    def oracle_consistency():
        spec = SpdeSpec(kind="burgers", n=51, s=16, d=3, nu_or_gamma=2.5e-3,
                        dt=1e-3, t_final=0.01, seed=1, r0=4)
        oracle, state = build_spde(spec)
        rows = np.array([0, 3, 25, 50])
        cols = np.array([1, 7, 11])
        block = oracle.eval_cross(state, 0.1, rows, cols)
        full_rows = oracle.eval_rows(state, 0.1, rows)
        full_cols = oracle.eval_cols(state, 0.1, cols)
        return (
            np.allclose(block, full_rows[:, cols], atol=1e-12)
            and np.allclose(block, full_cols[rows, :], atol=1e-12)
        )

    return [
        ("thin_qr residual + orthonormality", qr_residual),
        ("pinv Penrose identities", pinv_identities),
        ("selector distinctness + nesting", selector_invariants),
        ("cross-CUR zero-oversampling limit", limit_consistency),
        ("oblique projector error bound", projector_bound),
        ("sampled-rhs oracle consistency", oracle_consistency),
    ]


def run_verify(print_fn=print):
    """Run all checks; returns the number of failures."""
    failures = 0
    for name, fn in _checks():
        try:
            ok = bool(fn())
        except Exception as exc:  # a crash is a failure, keep going
            ok = False
            print_fn(f"FAIL {name}: {exc!r}")
            failures += 1
            continue
        print_fn(f"{'PASS' if ok else 'FAIL'} {name}")
        failures += 0 if ok else 1
    return failures
