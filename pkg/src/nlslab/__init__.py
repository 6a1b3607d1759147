"""nlslab: a desk-scale laboratory for the radial energy-critical NLS.

Evolves  i u_t + lap u = mu |u|^{4/(n-2)} u  for spherically symmetric data
on R^n (n >= 3) with a spectrally exact free propagator, computes the
standard conserved quantities, localized-mass and virial-weight inequality
ratios, admissible-pair spacetime norms, and runs the interval-subdivision
concentration diagnostics, all behind a scenario-driven CLI with
deterministic, verifiable reports.
"""

from .concentration import (
    BubbleReport,
    IntervalDecomposition,
    NestResult,
    bourgain_nest,
    classify_exceptional,
    find_bubble,
    greedy_subdivide,
    half_norm_ratio,
    largest_fraction,
    linear_flow_check,
    synthetic_decomposition,
)
from .dynamics import (
    EvolutionConfig,
    Trajectory,
    blowup_monitor,
    duhamel_residual,
    evolve,
    linear_flows,
    nonlinear_phase_step,
)
from .functionals import (
    AdmissiblePair,
    MorawetzWeight,
    default_admissible_pairs,
    energy,
    hardy_bound_check,
    is_admissible,
    local_mass,
    mass_flux_check,
    momentum_flux_identity_check,
    morawetz_check,
    morawetz_weight_eval,
    spacetime_norm,
    strichartz_norm,
)
from .grid import (
    RadialField,
    RadialGrid,
    integrate,
    lp_norm,
    make_uniform_grid,
    radial_derivative,
    radial_laplacian,
    rescale,
)
from .persist import load_trajectory, save_trajectory
from .propagator import (
    dispersive_decay_fit,
    free_evolve,
    gaussian_field,
    gaussian_free_evolution,
    get_propagator,
)
from .scenario import normalize_scenario, run_scenario, verify_report
from .transform import fractional_power, get_transform, make_spectral_grid

__version__ = "0.1.0"

__all__ = [
    "AdmissiblePair",
    "BubbleReport",
    "EvolutionConfig",
    "IntervalDecomposition",
    "MorawetzWeight",
    "NestResult",
    "RadialField",
    "RadialGrid",
    "Trajectory",
    "blowup_monitor",
    "bourgain_nest",
    "classify_exceptional",
    "default_admissible_pairs",
    "dispersive_decay_fit",
    "duhamel_residual",
    "energy",
    "evolve",
    "find_bubble",
    "fractional_power",
    "free_evolve",
    "gaussian_field",
    "gaussian_free_evolution",
    "get_propagator",
    "get_transform",
    "greedy_subdivide",
    "half_norm_ratio",
    "hardy_bound_check",
    "integrate",
    "is_admissible",
    "largest_fraction",
    "linear_flow_check",
    "linear_flows",
    "load_trajectory",
    "local_mass",
    "lp_norm",
    "make_spectral_grid",
    "make_uniform_grid",
    "mass_flux_check",
    "momentum_flux_identity_check",
    "morawetz_check",
    "morawetz_weight_eval",
    "nonlinear_phase_step",
    "normalize_scenario",
    "radial_derivative",
    "radial_laplacian",
    "rescale",
    "run_scenario",
    "save_trajectory",
    "spacetime_norm",
    "strichartz_norm",
    "synthetic_decomposition",
    "verify_report",
]
