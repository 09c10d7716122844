"""Two-phase Stokes interface symbol, dispersion relation and function-space checks."""

from ._core import (
    Error,
    FluidParams,
    check_frechet,
    count_zeros_rhp,
    critical_wavenumber,
    curvature_identity_error,
    dispersion_curve,
    dispersion_symbol,
    extend_c1,
    extended_symbol,
    fourier_seminorm_p2,
    g_kappa,
    growth_rate,
    hardy_ratio,
    k_of_z,
    kernel_names,
    mean_curvature,
    mode_response,
    normal_velocity_response,
    partition_of_unity,
    poisson_seminorm,
    riesz_potential,
    slobodeckij_seminorm,
    verify_sandwich,
)

__all__ = [
    "Error",
    "FluidParams",
    "check_frechet",
    "count_zeros_rhp",
    "critical_wavenumber",
    "curvature_identity_error",
    "dispersion_curve",
    "dispersion_symbol",
    "extend_c1",
    "extended_symbol",
    "fourier_seminorm_p2",
    "g_kappa",
    "growth_rate",
    "hardy_ratio",
    "k_of_z",
    "kernel_names",
    "mean_curvature",
    "mode_response",
    "normal_velocity_response",
    "partition_of_unity",
    "poisson_seminorm",
    "riesz_potential",
    "slobodeckij_seminorm",
    "verify_sandwich",
]
