"""Reduction of geodesic systems under hyperpolar actions."""

from ._polarred import (
    ConfigError,
    DimensionError,
    Model,
    RegularityError,
    ValidationFailure,
    build_model,
    catalog_names,
    compare_flows,
    constraint_residual,
    density,
    derive_sutherland,
    inertia,
    integrate,
    measure_term,
    orbit_point,
    reduced_hamiltonian,
    spectrum,
    spin_potential,
    su2_character,
    verify,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "Model",
    "RegularityError",
    "ValidationFailure",
    "build_model",
    "catalog_names",
    "compare_flows",
    "constraint_residual",
    "density",
    "derive_sutherland",
    "inertia",
    "integrate",
    "measure_term",
    "orbit_point",
    "reduced_hamiltonian",
    "spectrum",
    "spin_potential",
    "su2_character",
    "verify",
]
