"""All-Mach semi-implicit finite difference WENO solver for ideal MHD.

The package provides a uniform-grid finite difference library for the
non-dimensionalized ideal MHD equations with sonic Mach number eps in
[0, O(1)], plus a benchmark CLI.  Time integration is a semi-implicit
IMEX Runge-Kutta scheme whose implicit pressure stage is a linear
Helmholtz solve; space is 5th-order WENO with characteristic-wise
sweeps; the 2D magnetic field is kept discretely divergence-free by
evolving a vector potential and taking its discrete curl.
"""

from .core import (
    ConservedField,
    EpsilonParams,
    Grid,
    PrimitiveField,
    conserved_to_primitive,
    eos_total_energy,
    mean_pressure,
    pressure_from_conserved,
    primitive_to_conserved,
)
from .tableaux import ButcherPair, load_tableau, validate_tableau
from .integrator import compute_dt, imex_step, si_first_order_step
from .baseline import ssp_rk3_step
from .problems import available_problems, make_problem

__version__ = "0.1.0"

__all__ = [
    "ButcherPair",
    "ConservedField",
    "EpsilonParams",
    "Grid",
    "PrimitiveField",
    "available_problems",
    "compute_dt",
    "conserved_to_primitive",
    "eos_total_energy",
    "imex_step",
    "load_tableau",
    "make_problem",
    "mean_pressure",
    "pressure_from_conserved",
    "primitive_to_conserved",
    "si_first_order_step",
    "ssp_rk3_step",
    "validate_tableau",
]
