"""Adaptive cross-oversampled CUR approximation and low-rank matrix ODE integration."""

__version__ = "0.1.0"

from .cur import (
    CurFactors,
    LowRankState,
    OversampleIndicators,
    cur_cr,
    cur_cr_os,
    cur_opt,
    entry_count,
    error_bound,
    eta_exact,
    oblique_projection_forms,
    to_svd_form,
)
from .errors import BlowUpError, DegeneracyError
from .integrator import (
    IntegratorConfig,
    RhsOracle,
    StepCarry,
    StepDiagnostics,
    fom_integrate,
    integrate,
    rank_probe_indices,
    svd_step_reference,
    tdb_step,
)
from .linalg import expm_skew, pinv, spectral_norm, svd_truncated, thin_qr
from .sampling import deim, gpode, maxvol, qdeim

__all__ = [
    "BlowUpError",
    "CurFactors",
    "DegeneracyError",
    "IntegratorConfig",
    "LowRankState",
    "OversampleIndicators",
    "RhsOracle",
    "StepCarry",
    "StepDiagnostics",
    "cur_cr",
    "cur_cr_os",
    "cur_opt",
    "deim",
    "entry_count",
    "error_bound",
    "eta_exact",
    "expm_skew",
    "fom_integrate",
    "gpode",
    "integrate",
    "maxvol",
    "oblique_projection_forms",
    "pinv",
    "qdeim",
    "rank_probe_indices",
    "spectral_norm",
    "svd_step_reference",
    "svd_truncated",
    "tdb_step",
    "thin_qr",
    "to_svd_form",
]
