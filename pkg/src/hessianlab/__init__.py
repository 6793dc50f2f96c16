"""hessianlab: a desk-scale numerical laboratory for sum-Hessian operators.

Evaluates elementary symmetric functions and the operators
S_k = sigma_k + sigma_{k-1} exactly, tests membership in the cones where
those operators are elliptic, runs randomized verification campaigns for the
concavity/ellipticity/comparability inequalities that govern them, provides
the closed-form change of variables between quotient and sum equations, an
explicit singular solution family, and a damped-Newton Dirichlet solver for
sigma_3 + alpha sigma_2 = f on a box.
"""

__version__ = "0.1.0"

from . import cones, fd_solver, grid, inequality_lab, oracles, reports, sampling, singular, symfun, transforms
from .symfun import OperatorJet, Spectrum, SymmetricMatrixValue

__all__ = [
    "__version__",
    "Spectrum",
    "SymmetricMatrixValue",
    "OperatorJet",
    "symfun",
    "cones",
    "sampling",
    "reports",
    "inequality_lab",
    "grid",
    "transforms",
    "singular",
    "fd_solver",
    "oracles",
]
