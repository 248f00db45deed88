"""Quantum Fisher information of chaotic collective-spin dynamics.

The package builds collective spin operators and kicked-top, Ising and LMG
models, evolves coherent states, and compares time-averaged QFI with the
closed-form value set by the Krylov-space dimension.  Level statistics,
classical Lyapunov exponents and spin Wigner functions supply the
chaos diagnostics.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BasisMismatchError,
    CapacityError,
    KrylovQfiError,
    NumericalError,
    SymmetryMismatchError,
)

__all__ = [
    "BasisMismatchError",
    "CapacityError",
    "KrylovQfiError",
    "NumericalError",
    "SymmetryMismatchError",
    "__version__",
]
