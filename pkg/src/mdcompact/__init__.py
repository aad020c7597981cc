"""Prefactored compact schemes with multidimensional dispersion correction."""

from .bench import SpeedupReport, run_bench
from .config import ConfigError, RunConfig, parse_config
from .scheme import (
    GridError,
    GridSpec,
    MdOperatorConfig,
    ScalarField,
    SchemeCoefficients,
    SpatialScheme,
    UnsupportedOrderError,
    backward_derivative_line,
    centered_derivative_line,
    forward_derivative_line,
    make_coefficients,
    md_backward_derivative,
    md_forward_derivative,
)
from .solver import (
    BlowUpError,
    MultivaluedSolutionError,
    ProblemSpec,
    TimeIntegrationConfig,
    advection_2d,
    advection_3d,
    burgers_2d,
    circular_advection,
    exact_burgers_diagonal,
    exact_circular,
    exact_translation,
    make_config,
    solve,
    stable_dt,
)
from .spectral import (
    IcfBracketError,
    anisotropy_gap,
    group_velocity,
    numerical_wavenumber,
    optimize_icf,
    phase_velocity,
    polar_diagram,
)
from .stability import (
    AllUnstableError,
    StabilityReport,
    amplification_factor,
    analytic_limits,
    empirical_cfl,
    hong_condition,
    max_amplification,
    stability_report,
    xi_max,
)

__all__ = [name for name in dir() if not name.startswith("_")]
