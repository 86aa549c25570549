"""Numerical checks for the quantized Bateman damped oscillator.

Truncated two-mode Fock space, the pseudo-Bogoliubov barred operators and
vacuum, the complex spectrum, the Hermite-Gaussian eigenfunctions, and a
batch runner that turns every invariant into a pass/fail report.
"""

from .errors import (
    BatemanError,
    CapacityError,
    ConvergenceError,
    DegeneracyError,
    DimensionError,
    DomainError,
    NonConvergenceError,
    QuadratureError,
)
from .fockspace import (
    FockBasis,
    FockIndex,
    InteriorBlock,
    OperatorMatrix,
    StateVector,
    commutator,
    ladder_matrix,
    make_basis,
    matrix_exp,
    naive_inner,
)
from .model import (
    PhysParams,
    SignBranch,
    build_barred_conjugated,
    build_barred_linear,
    build_h_barred,
    build_h_original,
    build_x,
)
from .states import (
    BarredState,
    VacuumMethod,
    barred_fock_state,
    bogoliubov_vacuum,
    dual_vacuum,
    eigen_residual,
    eigenvalue_ft,
    eigenvalue_is,
    proper_inner,
)

__version__ = "0.1.0"

__all__ = [
    "BatemanError",
    "CapacityError",
    "ConvergenceError",
    "DegeneracyError",
    "DimensionError",
    "DomainError",
    "NonConvergenceError",
    "QuadratureError",
    "FockBasis",
    "FockIndex",
    "InteriorBlock",
    "OperatorMatrix",
    "StateVector",
    "commutator",
    "ladder_matrix",
    "make_basis",
    "matrix_exp",
    "naive_inner",
    "PhysParams",
    "SignBranch",
    "build_barred_conjugated",
    "build_barred_linear",
    "build_h_barred",
    "build_h_original",
    "build_x",
    "BarredState",
    "VacuumMethod",
    "barred_fock_state",
    "bogoliubov_vacuum",
    "dual_vacuum",
    "eigen_residual",
    "eigenvalue_ft",
    "eigenvalue_is",
    "proper_inner",
]
