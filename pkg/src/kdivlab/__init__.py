"""Numerical laboratory for K-divisibility constants of two-dimensional couples.

Submodules
----------
numerics    quadrature, root finding, convex 1-D minimization, support tests
kfunc       K- and E-functionals of weighted L^1, l^inf and l^2 couples
hilbert     the Hilbert-space couples Y and G and the direct sum W
l2linf      the couple (l^2_2, l^inf_2): divisibility equations and kernels
calderon    Calderon-constant bounds and the finite-dimensional certificates
oracle      support-function convex oracle for minimal operator norms
acceptance  the acceptance suite used by the tests and ``kdivlab check-all``
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import DomainError, KdivError, NumericalError, StructureViolation  # noqa: E402

__all__ = ["__version__", "KdivError", "NumericalError", "DomainError", "StructureViolation"]
