"""Boundary-perturbation operator-exponential stepping for 1-D difference problems.

A difference operator with non-periodic boundary conditions is split
into its periodic version, whose exponential is a pair of FFTs, and a
small correction supported on the boundary points.  See
:mod:`bpexp.steppers` for the schemes and :mod:`bpexp.analysis` for
error and spectrum tools.
"""
from .boundary import BoundaryExponential, BoundaryOperator, apply_boundary_exp, build_gkl, exp_boundary
from .errors import (
    BoundaryBlockError,
    BPExpError,
    BracketError,
    DenseCapError,
    ExtensionError,
    NumericalError,
    OracleMismatchError,
    SingularStepError,
    StencilError,
)
from .lattice import (
    BoundarySets,
    Custom,
    Domain,
    Periodic,
    Stencil,
    ThirdKind,
    apply_extended,
    classify_boundary,
    dense_matrix,
    dirichlet,
    neumann,
)
from .spectral import PeriodicSymbol, dft_forward, dft_inverse, exp_periodic, periodic_symbol
from .steppers import (
    EvolutionProblem,
    SchemeKind,
    evolve,
    exact_step,
    step,
    step_cn,
    step_euler,
    step_matrix,
    step_s1,
    step_s2,
)

__version__ = "0.1.0"
