"""Spectral PDE and Monte Carlo laboratory for FBSDEs with distributional drift.

The package solves the backward semilinear PDE with a negative-order Sobolev
drift by spectral mild-solution fixed-point iteration on a periodic grid, and
verifies the associated forward-backward SDE identities (virtual solutions,
Zvonkin-type transforms, nonlinear Feynman-Kac formulas) by seeded Monte
Carlo simulation.
"""

from .fields import PeriodicGrid, SpectralField, to_physical, to_spectral
from .params import SolverParams, ValidationReport, validate_standing_assumptions
from .ops import (
    bessel_power,
    gradient,
    heat_semigroup,
    partial_deriv,
    sobolev_norm,
    sup_norm,
    sup_norm_and_holder,
)
from .products import (
    CutoffBump,
    dealiased_multiply,
    finest_level,
    pointwise_product,
    smooth_cutoff,
)
from .specs import (
    DriftFractionalNoise,
    DriftPath,
    DriftSmooth,
    DriftSpec,
    DriftZero,
    DriverCustom,
    DriverLinear,
    DriverSinusoid,
    DriverSpec,
    DriverZero,
    GaussianBump,
    SinusoidProfile,
    TerminalSpec,
    ZeroProfile,
)
from .pde import (
    FixedPointConfig,
    MildSolution,
    duhamel_integral,
    duhamel_profile,
    holder_time_bound_check,
    solve_correction,
    solve_semilinear,
    solve_straightening,
    tune_straightening,
)

__version__ = "0.1.0"
