"""Problem generators: toy matrices, stochastic PDEs, and the heat system."""

from .heat import (
    DEFAULT_DT,
    DEFAULT_T_FINAL,
    HeatRhs,
    HeatSystem,
    corner_boundary_temps,
    heat_model,
    load_heat_system,
    lump_mass,
    sample_corners,
    synthetic_heat_system,
)
from .kernels import se_kernel, se_kernel_kl
from .spde import (
    AllenCahnRhs,
    BurgersRhs,
    KdvRhs,
    SpdeSpec,
    allen_cahn_model,
    build_spde,
    burgers_model,
    kdv_model,
)
from .toy import ToySpec, decay_profile, toy_matrix

__all__ = [
    "AllenCahnRhs",
    "BurgersRhs",
    "DEFAULT_DT",
    "DEFAULT_T_FINAL",
    "HeatRhs",
    "HeatSystem",
    "KdvRhs",
    "SpdeSpec",
    "ToySpec",
    "allen_cahn_model",
    "build_spde",
    "burgers_model",
    "corner_boundary_temps",
    "decay_profile",
    "heat_model",
    "kdv_model",
    "load_heat_system",
    "lump_mass",
    "sample_corners",
    "se_kernel",
    "se_kernel_kl",
    "synthetic_heat_system",
    "toy_matrix",
]
