"""Radial NLS laboratory on the hyperbolic plane (with a Euclidean twin)."""

from .geometry import (GeometryBackend, RadialField, RadialGrid, make_grid,
                       morawetz_weight_gradient, volume_weight)
from .spectral import SpectralOperator, build_operator, build_or_load
from .heat_lp import band, bernstein_sweep, heat, high_pass, low_pass, make_ladder
from .dynamics import (FlowConfig, Trajectory, energy, evolve_linear,
                       evolve_nls, mass, solve_difference_zeta2)

__all__ = [
    "GeometryBackend", "RadialField", "RadialGrid", "make_grid",
    "morawetz_weight_gradient", "volume_weight",
    "SpectralOperator", "build_operator", "build_or_load",
    "band", "bernstein_sweep", "heat", "high_pass", "low_pass", "make_ladder",
    "FlowConfig", "Trajectory", "energy", "evolve_linear", "evolve_nls",
    "mass", "solve_difference_zeta2",
]

__version__ = "0.1.0"
