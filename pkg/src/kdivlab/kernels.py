"""Sampled operator kernels ``T h = (int h g0, int h g1) + atom terms``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParam

try:
    from numpy import trapezoid as _trapz
except ImportError:  # numpy < 2
    from numpy import trapz as _trapz


@dataclass(frozen=True)
class OperatorKernel:
    """Kernel pair ``(g0, g1)`` sampled on a grid, plus optional atom coefficients.

    For a weighted L^1 couple carrying an end atom of mass ``atom_mass`` the
    operator acts on the characteristic function by

        T chi = (int g0 + beta1 * m, int g1 + beta2 * m).

    Kernels on the half-line are sampled in the compact variable
    ``u = s / (1 + s)`` (``compact=True``); integrals are then taken with
    respect to ``s`` through the Jacobian ``ds/du = 1 / (1 - u)^2``.
    """

    grid: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    atom_coeffs: tuple[float, float] | None = None
    atom_mass: float = 0.0
    compact: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        g0 = np.asarray(self.g0, dtype=float)
        g1 = np.asarray(self.g1, dtype=float)
        if not (grid.shape == g0.shape == g1.shape and grid.ndim == 1):
            raise BadParam("grid, g0 and g1 must be 1-D arrays of equal length")
        if len(grid) >= 2 and np.any(np.diff(grid) <= 0):
            raise BadParam("kernel grid must be strictly increasing")
        if not (np.all(np.isfinite(g0)) and np.all(np.isfinite(g1))):
            raise BadParam("kernel values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "g0", g0)
        object.__setattr__(self, "g1", g1)
        if self.compact and len(grid) and (grid[0] < 0.0 or grid[-1] >= 1.0):
            raise BadParam("compact grids must lie in [0, 1)")

    @property
    def s(self) -> np.ndarray:
        """Sample points in the original variable."""
        if self.compact:
            return self.grid / (1.0 - self.grid)
        return self.grid

    def integrals(self) -> tuple[float, float]:
        """Trapezoid integrals of ``g0`` and ``g1`` over the grid."""
        jac = 1.0 / (1.0 - self.grid) ** 2 if self.compact else 1.0
        return (float(_trapz(self.g0 * jac, self.grid)),
                float(_trapz(self.g1 * jac, self.grid)))

    @classmethod
    def zero(cls, grid: np.ndarray) -> "OperatorKernel":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.zeros_like(grid), np.zeros_like(grid))
