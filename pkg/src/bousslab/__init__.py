"""bousslab: damped two-way long-wave systems, from symbol analysis to decay fits."""

from .decay import DecayFit, DegenerateSeriesError, NormRecord, NormSeries, fit, norms, rate_sequence
from .linear import SpectralPair, energy, energy_identity_residual, evolve_linear
from .solver import (
    BlowUpError,
    FieldState,
    Grid,
    SolverConfig,
    bootstrap_first_step,
    initial_soliton,
    rhs_spectral,
    run,
    step_leapfrog,
)
from .symbol import (
    Classification,
    EigenData,
    Klass,
    SymbolMatrix,
    classify,
    eigen,
    low_freq_threshold,
    semigroup_norm_bound,
    semigroup_norm_exact,
    symbol_matrix,
)
from .systems import (
    PRESETS,
    ConstraintViolation,
    Dissipation,
    MultiplierValues,
    OrderProfile,
    SystemSpec,
    make_spec,
    multipliers,
    orders,
    preset,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "Classification", "ConstraintViolation", "DecayFit",
    "DegenerateSeriesError", "Dissipation", "EigenData", "FieldState", "Grid",
    "Klass", "MultiplierValues", "NormRecord", "NormSeries", "OrderProfile",
    "PRESETS", "SolverConfig", "SpectralPair", "SymbolMatrix", "SystemSpec",
    "bootstrap_first_step", "classify", "eigen", "energy",
    "energy_identity_residual", "evolve_linear", "fit", "initial_soliton",
    "low_freq_threshold", "make_spec", "multipliers", "norms", "orders",
    "preset", "rate_sequence", "rhs_spectral", "run", "semigroup_norm_bound",
    "semigroup_norm_exact", "step_leapfrog", "symbol_matrix",
]
