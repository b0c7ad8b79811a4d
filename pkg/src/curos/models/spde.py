"""Monte Carlo sampled 1-D stochastic PDEs discretized with central differences.

Each model bundles a :class:`~curos.integrator.RhsOracle` (sampled access to
the discrete right-hand side) and a rank-compressed initial state. One column
of the solution matrix is the field on the spatial grid for one random sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import linalg
from ..cur import LowRankState
from ..integrator import RhsOracle
from .kernels import se_kernel_kl

_DOMAIN_LENGTH = {"burgers": 1.0, "allen_cahn": 2.0 * np.pi, "kdv": 10.0}


@dataclass
class SpdeSpec:
    """Problem setup for one stochastic PDE run."""

    kind: str  # burgers | allen_cahn | kdv
    n: int
    s: int
    d: int
    nu_or_gamma: float
    dt: float
    t_final: float
    sigma: float = 1e-3
    ell: float | None = None  # kernel length scale; default 0.1 * domain length
    seed: int = 0
    r0: int = 8

    def __post_init__(self):
        if self.kind not in _DOMAIN_LENGTH:
            raise ValueError(f"unknown kind {self.kind!r}")
        if min(self.n, self.s, self.d) <= 0:
            raise ValueError("n, s, d must be positive")
        for name in ("nu_or_gamma", "dt", "t_final", "sigma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.ell is None:
            self.ell = 0.1 * _DOMAIN_LENGTH[self.kind]

    @property
    def domain_length(self):
        return _DOMAIN_LENGTH[self.kind]


class _Spde1dRhs(RhsOracle):
    """Shared sampled-access plumbing; subclasses implement `_block`."""

    def __init__(self, spec, x):
        self.spec = spec
        self.x = x
        self.n = len(x)
        self.s = spec.s

    def dims(self):
        return self.n, self.s

    def eval_cols(self, state, t, col_idx):
        return self._block(state, t, np.arange(self.n), np.asarray(col_idx, dtype=np.intp))

    def eval_rows(self, state, t, row_idx):
        return self._block(state, t, np.asarray(row_idx, dtype=np.intp), np.arange(self.s))

    def eval_cross(self, state, t, row_idx, col_idx):
        return self._block(
            state,
            t,
            np.asarray(row_idx, dtype=np.intp),
            np.asarray(col_idx, dtype=np.intp),
        )

    def full_rhs(self, a, t):
        """Dense right-hand side for reference integrations (desk scale only)."""
        raise NotImplementedError


class BurgersRhs(_Spde1dRhs):
    """Viscous conservative-form advection-diffusion on [0, 1].

    Dirichlet boundaries: the left value follows a per-sample time signal
    (its rate feeds the boundary rows of F), the right value is pinned at the
    deterministic initial value, zero.
    """

    def __init__(self, spec, x, xi):
        super().__init__(spec, x)
        self.xi = xi  # (d, s) standard normal draws
        self.dx = x[1] - x[0]
        self.nu = spec.nu_or_gamma

    def _left_rate(self, t):
        d = self.spec.d
        i = np.arange(1, d + 1, dtype=float)[:, None]
        det = -2.0 * np.pi * np.cos(2.0 * np.pi * t)
        stoch = np.sum(
            self.xi * (i * np.pi * np.cos(i * np.pi * t) * t + np.sin(i * np.pi * t)) / i**2,
            axis=0,
        )
        return det + self.spec.sigma * stoch

    def _block(self, state, t, rows, cols):
        n, dx, nu = self.n, self.dx, self.nu
        vm = self.low_rank_block(state, np.clip(rows - 1, 0, n - 1), cols)
        v0 = self.low_rank_block(state, rows, cols)
        vp = self.low_rank_block(state, np.clip(rows + 1, 0, n - 1), cols)
        out = -(vp**2 - vm**2) / (4.0 * dx) + nu * (vp - 2.0 * v0 + vm) / dx**2
        left = rows == 0
        if np.any(left):
            out[left] = self._left_rate(t)[cols]
        out[rows == n - 1] = 0.0
        return out

    def full_rhs(self, a, t):
        dx, nu = self.dx, self.nu
        out = np.zeros_like(a)
        out[1:-1] = -(a[2:] ** 2 - a[:-2] ** 2) / (4.0 * dx) + nu * (
            a[2:] - 2.0 * a[1:-1] + a[:-2]
        ) / dx**2
        out[0] = self._left_rate(t)
        out[-1] = 0.0
        return out


class _PeriodicRhs(_Spde1dRhs):
    def _shift(self, state, rows, cols, k):
        return self.low_rank_block(state, (rows + k) % self.n, cols)


class AllenCahnRhs(_PeriodicRhs):
    """Reaction-diffusion with cubic nonlinearity on [0, 2 pi], periodic."""

    def __init__(self, spec, x):
        super().__init__(spec, x)
        self.dx = spec.domain_length / spec.n
        self.nu = spec.nu_or_gamma

    def _block(self, state, t, rows, cols):
        vm = self._shift(state, rows, cols, -1)
        v0 = self._shift(state, rows, cols, 0)
        vp = self._shift(state, rows, cols, 1)
        return self.nu * (vp - 2.0 * v0 + vm) / self.dx**2 - v0**3 + v0

    def full_rhs(self, a, t):
        lap = np.roll(a, -1, axis=0) - 2.0 * a + np.roll(a, 1, axis=0)
        return self.nu * lap / self.dx**2 - a**3 + a


class KdvRhs(_PeriodicRhs):
    """Nonlinear advection with third-order dispersion on [0, 10], periodic."""

    def __init__(self, spec, x):
        super().__init__(spec, x)
        self.dx = spec.domain_length / spec.n
        self.gamma = spec.nu_or_gamma

    def _block(self, state, t, rows, cols):
        vmm = self._shift(state, rows, cols, -2)
        vm = self._shift(state, rows, cols, -1)
        v0 = self._shift(state, rows, cols, 0)
        vp = self._shift(state, rows, cols, 1)
        vpp = self._shift(state, rows, cols, 2)
        dv = (vp - vm) / (2.0 * self.dx)
        d3v = (vpp - 2.0 * vp + 2.0 * vm - vmm) / (2.0 * self.dx**3)
        return -v0 * dv + self.gamma * d3v

    def full_rhs(self, a, t):
        vp = np.roll(a, -1, axis=0)
        vm = np.roll(a, 1, axis=0)
        vpp = np.roll(a, -2, axis=0)
        vmm = np.roll(a, 2, axis=0)
        dv = (vp - vm) / (2.0 * self.dx)
        d3v = (vpp - 2.0 * vp + 2.0 * vm - vmm) / (2.0 * self.dx**3)
        return -a * dv + self.gamma * d3v


def _compress(v0, r0):
    r = min(r0, *v0.shape)
    return LowRankState(*linalg.svd_truncated(v0, r))


def burgers_deterministic_ic(x):
    x = np.asarray(x, dtype=float)
    return np.sin(2.0 * np.pi * x) * 0.5 * (np.exp(np.cos(2.0 * np.pi * x)) - 1.5)


def burgers_model(spec: SpdeSpec):
    """Build the sampled Burgers model: (oracle, initial low-rank state)."""
    if spec.kind != "burgers":
        raise ValueError("spec.kind must be 'burgers'")
    x = np.linspace(0.0, spec.domain_length, spec.n)
    rng = np.random.default_rng(spec.seed)
    xi = rng.standard_normal((spec.d, spec.s))
    lam, psi = se_kernel_kl(x, spec.ell, spec.d)
    noise = psi @ (np.sqrt(lam)[:, None] * xi)
    v0 = np.sin(2.0 * np.pi * x)[:, None] * (
        0.5 * (np.exp(np.cos(2.0 * np.pi * x)) - 1.5)[:, None] + spec.sigma * noise
    )
    return BurgersRhs(spec, x, xi), _compress(v0, spec.r0)


def allen_cahn_deterministic_ic(x):
    x = np.asarray(x, dtype=float)
    return (
        np.exp(-27.0 * (x - 4.2) ** 2)
        - np.exp(-23.5 * (x - np.pi / 2.0) ** 2)
        + np.exp(-38.0 * (x - 5.4) ** 2)
        + np.tanh(2.0 * np.sin(x)) / 3.0
    )


def allen_cahn_model(spec: SpdeSpec):
    """Build the sampled Allen-Cahn model: (oracle, initial low-rank state)."""
    if spec.kind != "allen_cahn":
        raise ValueError("spec.kind must be 'allen_cahn'")
    x = np.arange(spec.n) * (spec.domain_length / spec.n)
    rng = np.random.default_rng(spec.seed)
    xi = rng.standard_normal((spec.d, spec.s))
    lam, psi = se_kernel_kl(x, spec.ell, spec.d)
    v0 = allen_cahn_deterministic_ic(x)[:, None] + spec.sigma * (psi @ (lam[:, None] * xi))
    return AllenCahnRhs(spec, x), _compress(v0, spec.r0)


def kdv_deterministic_ic(x):
    x = np.asarray(x, dtype=float)
    return np.log(1.0 + np.cosh(20.0) ** 2 / np.cosh(20.0 * (x - 2.0)) ** 2) / 40.0


def kdv_model(spec: SpdeSpec):
    """Build the sampled KdV model: (oracle, initial low-rank state)."""
    if spec.kind != "kdv":
        raise ValueError("spec.kind must be 'kdv'")
    x = np.arange(spec.n) * (spec.domain_length / spec.n)
    rng = np.random.default_rng(spec.seed)
    xi = rng.standard_normal((spec.d, spec.s))
    lam, psi = se_kernel_kl(x, spec.ell, spec.d)
    v0 = kdv_deterministic_ic(x)[:, None] + spec.sigma * (psi @ (lam[:, None] * xi))
    return KdvRhs(spec, x), _compress(v0, spec.r0)


def build_spde(spec: SpdeSpec):
    """Dispatch to the model builder for spec.kind."""
    return {
        "burgers": burgers_model,
        "allen_cahn": allen_cahn_model,
        "kdv": kdv_model,
    }[spec.kind](spec)
