"""D1Q3 lattice Boltzmann scheme for diffusion under acoustic scaling, with a heat-equation
reference, a staggered acoustic solver, and wave-vector analysis."""

from .errors import EigenvalueConvergenceError, ParameterError, TimeAlignmentError
from .lattice import (
    DistributionField,
    Grid1D,
    MomentField,
    SchemeParams,
    derive_s_j,
    distributions_from_moments,
    equilibrium,
    init_at_equilibrium,
    lbm_step,
    moments_from_distributions,
    relax,
    stream,
)

__version__ = "0.1.0"

__all__ = [
    "DistributionField",
    "EigenvalueConvergenceError",
    "Grid1D",
    "MomentField",
    "ParameterError",
    "SchemeParams",
    "TimeAlignmentError",
    "derive_s_j",
    "distributions_from_moments",
    "equilibrium",
    "init_at_equilibrium",
    "lbm_step",
    "moments_from_distributions",
    "relax",
    "stream",
]
