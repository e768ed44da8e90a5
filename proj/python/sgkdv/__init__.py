"""Python access to the sgkdv numerical lab."""

from ._core import (
    Error,
    InstabilityError,
    InvalidArgument,
    airy_propagate,
    airy_reference,
    energy,
    fractional_derivative,
    grid_frequencies,
    grid_points,
    mass,
    osc_integral_I,
    osc_integral_J,
    parse_manifest,
    predicted_exponent,
    run_manifest,
    sample_path,
    simulate,
    sobolev_norm,
    soliton,
    validate_kato,
    validate_strichartz,
)

__all__ = [
    "Error",
    "InstabilityError",
    "InvalidArgument",
    "airy_propagate",
    "airy_reference",
    "energy",
    "fractional_derivative",
    "grid_frequencies",
    "grid_points",
    "mass",
    "osc_integral_I",
    "osc_integral_J",
    "parse_manifest",
    "predicted_exponent",
    "run_manifest",
    "sample_path",
    "simulate",
    "sobolev_norm",
    "soliton",
    "validate_kato",
    "validate_strichartz",
]
