"""Exact graded invariants and pole order spectra of projective hypersurfaces
whose singular locus is finite."""

__version__ = "0.1.0"

from .poly import (
    HomogeneousPoly,
    NotHomogeneousError,
    PolySyntaxError,
    UnknownVariableError,
    generic_linear_form,
    parse_poly,
    partials,
    serialize_poly,
)
from .koszul import KoszulWindow, gamma_series, omega_dim
from .decomp import (
    AssumptionFailure,
    IdentityViolation,
    InvariantTable,
    NotStabilizedError,
    build_invariant_table,
    classify_type,
    verify_corollaries,
)
from .polespec import PoleSpectrum, TorsionProfile, pole_spectrum, stage_snapshot, torsion_profile
from .closedform import (
    BinaryFormFactorization,
    Series,
    binary_invariant_table,
    binary_pole_spectrum,
    binary_spectrum_multiplicities,
    degenerate_variable_oracle,
    isolated_bundle,
    ts_product,
)

__all__ = [
    "AssumptionFailure",
    "BinaryFormFactorization",
    "HomogeneousPoly",
    "IdentityViolation",
    "InvariantTable",
    "KoszulWindow",
    "NotHomogeneousError",
    "NotStabilizedError",
    "PoleSpectrum",
    "PolySyntaxError",
    "Series",
    "TorsionProfile",
    "UnknownVariableError",
    "__version__",
    "binary_invariant_table",
    "binary_pole_spectrum",
    "binary_spectrum_multiplicities",
    "build_invariant_table",
    "classify_type",
    "degenerate_variable_oracle",
    "gamma_series",
    "generic_linear_form",
    "isolated_bundle",
    "omega_dim",
    "parse_poly",
    "partials",
    "pole_spectrum",
    "serialize_poly",
    "stage_snapshot",
    "torsion_profile",
    "ts_product",
]
