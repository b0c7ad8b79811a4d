"""Lumped-mass interior heat system with boundary coupling and surface radiation.

The model evolves the interior node temperatures of an assembled FEM system

    dT_i/dt = Minv (K_ii T_i + K_iB T_B - c_rad * g o (T_i^4 - T_inf^4)),

one column per parameter sample. Boundary temperatures T_B are fixed in time,
parameterized by four corner values varying linearly along each rectangle
edge. Matrices can be ingested from Matrix Market files or generated by the
built-in structured-grid assembler for self-contained desk-scale runs.
"""

from __future__ import annotations

import pathlib
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp

from ..cur import LowRankState
from ..errors import DegeneracyError
from ..integrator import RhsOracle

STEFAN_BOLTZMANN = 5.67e-8


@dataclass
class HeatSystem:
    """Assembled interior system plus boundary geometry."""

    mass_lumped_inv: np.ndarray  # (n_i,) inverse lumped interior mass
    k_ii: sp.csr_matrix  # (n_i, n_i) interior stiffness block
    k_ib: sp.csr_matrix  # (n_i, n_b) interior-boundary coupling
    g_i: np.ndarray  # (n_i,) 0/1 indicator of radiating nodes
    boundary_xy: np.ndarray  # (n_b, 2) boundary node coordinates
    emissivity: float = 0.2
    sigma_sb: float = STEFAN_BOLTZMANN
    t_inf: float = 273.0
    t_b: np.ndarray | None = None  # (n_b, s) boundary samples, set by heat_model
    interior_xy: np.ndarray | None = None  # (n_i, 2), optional, improves seeding

    def __post_init__(self):
        if np.any(self.mass_lumped_inv <= 0):
            raise DegeneracyError("lumped interior mass must be strictly positive")
        g = np.asarray(self.g_i)
        if not np.all((g == 0) | (g == 1)):
            raise ValueError("g_i entries must be 0 or 1")

    @property
    def n_interior(self):
        return len(self.mass_lumped_inv)


def lump_mass(m):
    """Diagonal-scaling mass lumping: c * diag(M) with c = sum(M) / sum(diag(M)).

    Preserves the total sum of entries exactly (up to summation roundoff).
    """
    if sp.issparse(m):
        diag = m.diagonal()
        total = float(m.sum())
    else:
        m = np.asarray(m, dtype=float)
        diag = np.diag(m).copy()
        total = float(m.sum())
    diag_sum = float(diag.sum())
    if diag_sum == 0.0:
        raise DegeneracyError("mass matrix has zero diagonal sum")
    return (total / diag_sum) * diag


def corner_boundary_temps(boundary_xy, corners):
    """Boundary temperatures from four corner values, linear along each edge.

    ``corners`` has shape (4, s): values at (bottom-right, top-right,
    top-left, bottom-left) of the bounding box, counterclockwise. Evaluated as
    the bilinear blend restricted to the boundary, which is linear on each
    edge and continuous at the corners.
    """
    xy = np.asarray(boundary_xy, dtype=float)
    corners = np.atleast_2d(np.asarray(corners, dtype=float))
    if corners.shape[0] != 4:
        raise ValueError("corners must have shape (4, s)")
    x, y = xy[:, 0], xy[:, 1]
    ux = (x - x.min()) / max(x.max() - x.min(), 1e-300)
    uy = (y - y.min()) / max(y.max() - y.min(), 1e-300)
    br, tr, tl, bl = corners
    return (
        np.outer(ux * (1.0 - uy), br)
        + np.outer(ux * uy, tr)
        + np.outer((1.0 - ux) * uy, tl)
        + np.outer((1.0 - ux) * (1.0 - uy), bl)
    )


class HeatRhs(RhsOracle):
    """Sampled access to the lumped interior heat right-hand side.

    A row evaluation touches one sparse stiffness row plus the pointwise
    radiation term, so factor reads stay proportional to the stencil size.
    """

    def __init__(self, system: HeatSystem):
        if system.t_b is None:
            raise ValueError("system.t_b must be set (use heat_model)")
        self.system = system
        self.coupling = np.asarray(system.k_ib @ system.t_b)  # (n_i, s), constant
        self.rad_coef = system.emissivity * system.sigma_sb
        self.t_inf4 = system.t_inf**4

    def dims(self):
        return self.system.n_interior, self.coupling.shape[1]

    def _block(self, state, t, rows, cols):
        sys = self.system
        k_rows = sys.k_ii[rows]
        needed = np.unique(np.concatenate([k_rows.indices, rows]))
        a_needed = self.low_rank_block(state, needed, cols)
        cond = k_rows[:, needed] @ a_needed
        self_pos = np.searchsorted(needed, rows)
        v_self = a_needed[self_pos]
        rad = self.rad_coef * sys.g_i[rows][:, None] * (v_self**4 - self.t_inf4)
        return sys.mass_lumped_inv[rows][:, None] * (
            cond + self.coupling[np.ix_(rows, cols)] - rad
        )

    def eval_cols(self, state, t, col_idx):
        n, _ = self.dims()
        return self._block(state, t, np.arange(n), np.asarray(col_idx, dtype=np.intp))

    def eval_rows(self, state, t, row_idx):
        _, s = self.dims()
        return self._block(state, t, np.asarray(row_idx, dtype=np.intp), np.arange(s))

    def eval_cross(self, state, t, row_idx, col_idx):
        return self._block(
            state,
            t,
            np.asarray(row_idx, dtype=np.intp),
            np.asarray(col_idx, dtype=np.intp),
        )

    def full_rhs(self, a, t):
        sys = self.system
        rad = self.rad_coef * sys.g_i[:, None] * (a**4 - self.t_inf4)
        return sys.mass_lumped_inv[:, None] * (sys.k_ii @ a + self.coupling - rad)


def heat_model(system: HeatSystem, corner_samples=None, r0=1):
    """Attach boundary samples and build (oracle, initial low-rank state).

    ``corner_samples`` has shape (4, s); when omitted the system must already
    carry ``t_b``. The initial temperature is the ambient value everywhere, an
    exactly rank-one state; for r0 > 1 the factors are padded at zero weight
    with smooth spread-out directions (coordinate polynomials on the row side,
    the corner-sample structure on the column side) so the first steps sample
    rows near every edge and capture the boundary-driven transient.
    """
    if corner_samples is not None:
        system.t_b = corner_boundary_temps(system.boundary_xy, corner_samples)
    oracle = HeatRhs(system)
    n_i, s = oracle.dims()
    r0 = int(min(max(r0, 1), n_i, s))
    u = _padded_basis(n_i, r0, coords=system.interior_xy)
    v_feats = None if corner_samples is None else corner_samples.T
    v = _padded_basis(s, r0, features=v_feats)
    sigma = np.zeros(r0)
    sigma[0] = system.t_inf * np.sqrt(n_i * s)
    return oracle, LowRankState(u, sigma, v)


def _poly_features(coords, count):
    """Monomials of the coordinates ordered by total degree (constant excluded)."""
    x, y = coords[:, 0], coords[:, 1]
    feats = []
    degree = 1
    while len(feats) < count:
        for j in range(degree + 1):
            feats.append((x ** (degree - j)) * (y**j))
            if len(feats) == count:
                break
        degree += 1
    return np.column_stack(feats)


def _padded_basis(n, r, coords=None, features=None):
    """Orthonormal (n, r) basis: constant vector first, smooth modes after.

    Extra directions come from ``features`` when given, then coordinate
    monomials when ``coords`` is given, and Chebyshev-like index polynomials
    otherwise.
    """
    cols = [np.ones(n)]
    if features is not None:
        for k in range(features.shape[1]):
            if len(cols) < r:
                cols.append(features[:, k])
    missing = r - len(cols)
    if missing > 0:
        if coords is not None:
            extra = _poly_features(np.asarray(coords, dtype=float), missing)
        else:
            t = np.linspace(-1.0, 1.0, n)
            extra = np.column_stack([t ** (k + 1) for k in range(missing)])
        cols.extend(extra.T)
    q, _ = np.linalg.qr(np.column_stack(cols))
    if q[0, 0] < 0:
        q = -q
    return q


def sample_corners(s, seed=0, lo=273.0, hi=373.0):
    """Uniform corner temperature draws, shape (4, s)."""
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, size=(4, s))


def _mass_1d(n, h):
    main = np.full(n, 4.0)
    main[0] = main[-1] = 2.0
    off = np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") * (h / 6.0)


def _stiffness_1d(n, h):
    main = np.full(n, 2.0)
    main[0] = main[-1] = 1.0
    off = -np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h


def synthetic_heat_system(
    nx=12,
    ny=10,
    lx=1.0,
    ly=1.0,
    conductivity=50.0,
    density=7850.0,
    heat_capacity=500.0,
    emissivity=0.2,
    t_inf=273.0,
    radius_fraction=0.25,
):
    """Structured-grid interior system: tensor-product mass + grid Laplacian.

    Nodes on the outer rectangle edge are Dirichlet boundary; interior nodes
    inside a disk around the center radiate (indicator g). A stand-in for an
    externally assembled mesh so desk-scale runs need no input files.
    """
    hx, hy = lx / (nx - 1), ly / (ny - 1)
    xs = np.linspace(0.0, lx, nx)
    ys = np.linspace(0.0, ly, ny)
    xx, yy = np.meshgrid(xs, ys, indexing="xy")
    coords = np.column_stack([xx.ravel(), yy.ravel()])  # x fastest

    m_full = density * heat_capacity * sp.kron(_mass_1d(ny, hy), _mass_1d(nx, hx), format="csr")
    k_full = -conductivity * (
        sp.kron(_mass_1d(ny, hy), _stiffness_1d(nx, hx), format="csr")
        + sp.kron(_stiffness_1d(ny, hy), _mass_1d(nx, hx), format="csr")
    )

    on_edge = (
        np.isclose(coords[:, 0], 0.0)
        | np.isclose(coords[:, 0], lx)
        | np.isclose(coords[:, 1], 0.0)
        | np.isclose(coords[:, 1], ly)
    )
    interior = np.flatnonzero(~on_edge)
    boundary = np.flatnonzero(on_edge)

    k_ii = k_full[np.ix_(interior, interior)].tocsr()
    k_ib = k_full[np.ix_(interior, boundary)].tocsr()
    m_ii = m_full[np.ix_(interior, interior)].tocsr()

    center = np.array([lx / 2.0, ly / 2.0])
    radius = radius_fraction * min(lx, ly)
    dist = np.linalg.norm(coords[interior] - center, axis=1)
    g = (dist <= radius).astype(float)

    return HeatSystem(
        mass_lumped_inv=1.0 / lump_mass(m_ii),
        k_ii=k_ii,
        k_ib=k_ib,
        g_i=g,
        boundary_xy=coords[boundary],
        emissivity=emissivity,
        t_inf=t_inf,
        interior_xy=coords[interior],
    )


def load_heat_system(directory, emissivity=0.2, t_inf=273.0):
    """Read an externally assembled system from a directory.

    Expected files: ``m_ii.mtx``, ``k_ii.mtx``, ``k_ib.mtx`` (Matrix Market,
    coordinate, real), ``g_i.txt`` (one 0/1 per line), ``boundary_xy.txt``
    (two coordinates per line, one row per boundary node).
    """
    path = pathlib.Path(directory)
    m_ii = sp.csr_matrix(scipy.io.mmread(path / "m_ii.mtx"))
    k_ii = sp.csr_matrix(scipy.io.mmread(path / "k_ii.mtx"))
    k_ib = sp.csr_matrix(scipy.io.mmread(path / "k_ib.mtx"))
    g = np.loadtxt(path / "g_i.txt", dtype=float).ravel()
    boundary_xy = np.atleast_2d(np.loadtxt(path / "boundary_xy.txt", dtype=float))
    interior_path = path / "interior_xy.txt"
    interior_xy = (
        np.atleast_2d(np.loadtxt(interior_path, dtype=float))
        if interior_path.exists()
        else None
    )
    return HeatSystem(
        mass_lumped_inv=1.0 / lump_mass(m_ii),
        k_ii=k_ii,
        k_ib=k_ib,
        g_i=g,
        boundary_xy=boundary_xy,
        emissivity=emissivity,
        t_inf=t_inf,
        interior_xy=interior_xy,
    )


#: Physical time horizon rho * c_p / k for the default material parameters.
DEFAULT_T_FINAL = 7850.0 * 500.0 / 50.0  # 78500 s
DEFAULT_DT = DEFAULT_T_FINAL / 8000.0
