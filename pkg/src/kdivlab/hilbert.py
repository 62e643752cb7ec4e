"""Two-dimensional Hilbert couples.

Three families are covered here:

* ``Y = (l^2_2, l^2_1)``, whose second space is the first coordinate axis.
  Its K-divisibility constant is ``2/sqrt(3)``, attained at ``a = pi/6``.
* Bound arithmetic built on top of that value (John ellipsoid distance,
  rigid distance bounds, the Shvartsman bracket).
* The regular couple ``G = (l^2_2, G_1)`` with ``||(x, y)||_{G_1} =
  sqrt(x^2 + r y^2)``: Gagliardo boundary, weights, the circle/ellipse
  intersection kernel and its integral bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize as _spo

from .errors import BadAlpha, BadInput, BadParam, DegenerateCase
from .kernels import OperatorKernel
from .kfunc import ContinuousL1Couple, EndAtom, e_y, k_from_e, k_l1_continuous
from .numerics import ROOT_TOL, Interval, Tolerance, find_root, integrate
from .report import Check, CheckReport

TWO_OVER_SQRT3 = 2.0 / math.sqrt(3.0)


# ---------------------------------------------------------------------------
# the couple Y
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaPoint:
    """Unit vector ``(cos a, sin a)`` with ``a`` in ``[0, pi/2]``."""

    a: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.a <= math.pi / 2 + 1e-15):
            raise BadAlpha(f"angle {self.a} outside [0, pi/2]")

    @property
    def alpha1(self) -> float:
        return math.cos(self.a)

    @property
    def alpha2(self) -> float:
        return math.sin(self.a)

    @property
    def one_minus_alpha2(self) -> float:
        """``1 - sin a`` without cancellation near ``a = pi/2``."""
        return 2.0 * math.sin(math.pi / 4 - self.a / 2) ** 2

    @property
    def vector(self) -> tuple[float, float]:
        return (self.alpha1, self.alpha2)

    @property
    def interior(self) -> bool:
        return 0.0 < self.a < math.pi / 2

    @classmethod
    def from_vector(cls, alpha: Sequence[float]) -> "AlphaPoint":
        a1, a2 = float(alpha[0]), float(alpha[1])
        if abs(math.hypot(a1, a2) - 1.0) > 1e-12 or a1 < 0 or a2 < 0:
            raise BadAlpha("alpha must be a unit vector in the first quadrant")
        return cls(math.atan2(a2, a1))


@dataclass(frozen=True)
class YKernel:
    """Optimal operator for ``Y`` at a point ``alpha``.

    The density part is ``slope * w0`` in the first coordinate; the atom at
    ``alpha1`` is sent to ``(beta1, beta2)``.
    """

    alpha: AlphaPoint
    slope: float
    beta1: float
    beta2: float

    def image(self) -> tuple[float, float]:
        """``T chi``; the density integrates to ``int w0 = 1 - alpha2``."""
        return (self.slope * self.alpha.one_minus_alpha2 + self.beta1, self.beta2)

    @property
    def norm(self) -> float:
        """``max(slope, |(beta1, beta2)| / alpha2)``."""
        return max(self.slope, math.hypot(self.beta1, self.beta2) / self.alpha.alpha2)

    def sampled(self, n: int = 4097) -> OperatorKernel:
        a1, a2 = self.alpha.alpha1, self.alpha.alpha2
        grid = np.linspace(0.0, a1, n)
        w0 = (a1 - grid) / np.hypot(a1 - grid, a2)
        return OperatorKernel(grid, self.slope * w0, np.zeros_like(grid),
                              atom_coeffs=(self.beta1, self.beta2), atom_mass=1.0,
                              label="Y")


def _require_interior(alpha: AlphaPoint) -> None:
    if not alpha.interior:
        raise BadAlpha("degenerate angle; c_0 = c_{pi/2} = 1 by direct construction")


def y_weights(alpha: AlphaPoint) -> ContinuousL1Couple:
    """Weighted L^1 model of ``alpha`` in ``Y``.

    On ``[0, alpha1]``: ``w0(t) = (alpha1 - t) / sqrt((alpha1 - t)^2 + alpha2^2)``
    (minus the derivative of the E-functional) and ``w1 = 1``; plus a unit
    atom at ``alpha1`` with weights ``(alpha2, +inf)``.
    """
    _require_interior(alpha)
    a1, a2 = alpha.alpha1, alpha.alpha2

    def w0(t: float) -> float:
        return (a1 - t) / math.hypot(a1 - t, a2)

    return ContinuousL1Couple(Interval(0.0, a1), w0, lambda t: 1.0,
                              end_atom=EndAtom(a1, 1.0, a2, math.inf))


def k_y(t: float, alpha: AlphaPoint) -> float:
    """``K(t, alpha; Y)`` from the E-functional."""
    a1 = alpha.alpha1
    return k_from_e(lambda s: e_y(s, alpha.vector), t, Interval(0.0, a1), candidates=(a1,))


def _psi(alpha: AlphaPoint):
    a1, a2, d = alpha.alpha1, alpha.alpha2, alpha.one_minus_alpha2

    def psi(x: float) -> float:
        phi = (a1 - x) / d
        return a2 * math.sqrt(max(phi * phi - 1.0, 0.0)) - x

    return psi


def y_beta1(alpha: AlphaPoint, tol: Tolerance = ROOT_TOL) -> float:
    """Root ``beta1`` of ``alpha2 sqrt(phi(x)^2 - 1) = x`` on ``[0, alpha1 + alpha2 - 1]``.

    ``phi(x) = (alpha1 - x) / (1 - alpha2)``.
    """
    _require_interior(alpha)
    hi = alpha.alpha1 - alpha.one_minus_alpha2
    psi = _psi(alpha)
    if psi(hi) > 0.0:
        # phi(hi) = 1 exactly; a positive value is rounding in sqrt(phi^2 - 1)
        return hi
    return find_root(psi, Interval(0.0, hi), tol)


def y_c_a(alpha: AlphaPoint, tol: Tolerance = ROOT_TOL) -> float:
    """Minimal operator norm ``C_a = (alpha1 - beta1) / (1 - alpha2)``."""
    if not alpha.interior:
        return 1.0
    return (alpha.alpha1 - y_beta1(alpha, tol)) / alpha.one_minus_alpha2


def ojoj_residual(alpha: AlphaPoint, c: float) -> float:
    """Residual of ``C + K2 sqrt(C^2 - 1) = K1``, ``Kj = alpha_j / (1 - alpha2)``."""
    k1 = alpha.alpha1 / alpha.one_minus_alpha2
    k2 = alpha.alpha2 / alpha.one_minus_alpha2
    return c + k2 * math.sqrt(max(c * c - 1.0, 0.0)) - k1


def y_c_a_quadratic(alpha: AlphaPoint) -> float:
    """Closed-form cross-check of :func:`y_c_a` via the squared equation.

    Squaring ``K2 sqrt(C^2 - 1) = K1 - C`` gives
    ``(K2^2 - 1) C^2 + 2 K1 C - (K1^2 + K2^2) = 0``; the admissible root is
    the one in ``[1, K1]``.
    """
    _require_interior(alpha)
    k1 = alpha.alpha1 / alpha.one_minus_alpha2
    k2 = alpha.alpha2 / alpha.one_minus_alpha2
    A, B, C = k2 * k2 - 1.0, 2.0 * k1, -(k1 * k1 + k2 * k2)
    if abs(A) < 1e-14:
        return -C / B
    disc = math.sqrt(B * B - 4 * A * C)
    roots = [(-B + disc) / (2 * A), (-B - disc) / (2 * A)]
    ok = [x for x in roots if 1.0 - 1e-12 <= x <= k1 + 1e-12]
    if not ok:
        raise BadAlpha("no admissible root of the quadratic")
    return min(ok, key=lambda x: abs(ojoj_residual(alpha, x)))


def y_kernel(alpha: AlphaPoint) -> YKernel:
    """Optimal kernel for ``Y`` at ``alpha``: slope ``C_a``, atom image ``(beta1, alpha2)``."""
    _require_interior(alpha)
    b1 = y_beta1(alpha)
    slope = (alpha.alpha1 - b1) / alpha.one_minus_alpha2
    return YKernel(alpha, slope, b1, alpha.alpha2)


def y_lower_chain(c: float) -> float:
    """``c + sqrt(c^2 - 1) - sqrt(3)``: nonnegative iff ``c >= 2/sqrt(3)``.

    At ``a = pi/6`` any admissible operator norm must satisfy
    ``alpha1 <= c (1 - alpha2) + alpha2 sqrt(c^2 - 1)``, which rescales to
    ``sqrt(3) <= c + sqrt(c^2 - 1)``.
    """
    return c + math.sqrt(max(c * c - 1.0, 0.0)) - math.sqrt(3.0)


def gamma_y(grid_size: int = 4096) -> CheckReport:
    """Sweep ``C_a`` over an interior grid of ``(0, pi/2)`` and refine the maximum."""
    if grid_size < 3:
        raise BadParam("grid_size must be at least 3")
    grid = np.linspace(0.0, math.pi / 2, grid_size + 2)[1:-1]
    vals = np.array([y_c_a(AlphaPoint(float(a))) for a in grid])
    k = int(np.argmax(vals))
    h = grid[1] - grid[0]
    res = _spo.minimize_scalar(lambda a: -y_c_a(AlphaPoint(a)),
                               bounds=(grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]),
                               method="bounded", options={"xatol": 1e-10})
    a_star, c_star = float(res.x), -float(res.fun)
    if vals[k] > c_star:
        a_star, c_star = float(grid[k]), float(vals[k])
    rep = CheckReport("gamma_y")
    rep.add(Check.close("max C_a = 2/sqrt(3)", c_star, TWO_OVER_SQRT3, 1e-9))
    rep.add(Check.leq("grid C_a <= 2/sqrt(3)", float(vals.max()), TWO_OVER_SQRT3, 1e-12))
    rep.add(Check.close("argmax near pi/6", a_star, math.pi / 6, max(2e-3, h)))
    rep.add(Check("lower chain violated at 2/sqrt(3) - 1e-6",
                  y_lower_chain(TWO_OVER_SQRT3 - 1e-6) < 0, y_lower_chain(TWO_OVER_SQRT3 - 1e-6), 0.0))
    rep.add(Check.close("lower chain tight at 2/sqrt(3)", y_lower_chain(TWO_OVER_SQRT3), 0.0, 1e-12))
    rep.results = {"gamma": c_star, "argmax_a": a_star, "grid_max": float(vals[k]),
                   "grid_argmax_a": float(grid[k]), "grid_size": grid_size,
                   "a": grid, "C_a": vals}
    return rep


# ---------------------------------------------------------------------------
# bound arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpropBound:
    upper: float
    shvartsman_lower: float
    shvartsman_upper: float


def bound_bcont(gamma_b: float, distance: float) -> float:
    """``gamma(A) <= gamma(B) d(A; B)``."""
    if gamma_b < 1 or distance < 1:
        raise BadInput("gamma and Banach-Mazur distance are both at least 1")
    return gamma_b * distance


def bound_cccont(d_a: float, c_2: float, d_b: float) -> float:
    """``c(A1; B1) <= d(A1; A2) c(A2; B2) d(B1; B2)``."""
    if d_a < 1 or d_b < 1 or c_2 < 0:
        raise BadInput("distances are at least 1 and constants nonnegative")
    return d_a * c_2 * d_b


def bound_sprop() -> SpropBound:
    """Upper bound ``2 sqrt(2/3)`` for two-dimensional couples and the Shvartsman bracket."""
    upper = bound_bcont(TWO_OVER_SQRT3, math.sqrt(2.0))
    lower = (3.0 + 2.0 * math.sqrt(2.0)) / (1.0 + 2.0 * math.sqrt(2.0))
    return SpropBound(upper, lower, upper)


def gamma_g_distance_bound(r: float) -> float:
    """``gamma(G) <= max(sqrt r, 1/sqrt r)`` from the distance to the trivial couple."""
    if r <= 0:
        raise BadParam("r must be positive")
    return bound_bcont(1.0, max(math.sqrt(r), 1.0 / math.sqrt(r)))


# ---------------------------------------------------------------------------
# the couple G
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GCouple:
    """Couple ``(l^2_2, G_1)`` with the point ``(b, c)`` on the unit circle.

    Use :meth:`make` to normalize ``(b, c)`` and canonicalize ``r < 1`` to
    ``1/r`` (swapping ``b`` and ``c``), which is a rigid change of couple and
    leaves ``c_a`` unchanged.
    """

    r: float
    b: float
    c: float
    swapped: bool = False

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise BadParam("r must be positive")
        if self.b < 0 or self.c < 0:
            raise BadParam("b and c must be nonnegative")
        if abs(math.hypot(self.b, self.c) - 1.0) > 1e-12:
            raise BadParam("(b, c) must be a unit vector")

    @classmethod
    def make(cls, r: float, b: float, c: float, normalize: bool = True) -> "GCouple":
        if b < 0 or c < 0 or (b == 0 and c == 0):
            raise BadParam("(b, c) must be a nonzero vector in the first quadrant")
        if normalize:
            n = math.hypot(b, c)
            b, c = b / n, c / n
        if r < 1:
            return cls(1.0 / r, c, b, swapped=True)
        return cls(r, b, c)

    @property
    def gamma1_at_zero(self) -> float:
        return math.sqrt(self.b ** 2 + self.r * self.c ** 2)


def g_boundary(s: float, g: GCouple) -> tuple[float, float]:
    """Boundary point ``(gamma0(s), gamma1(s))`` of the Gagliardo diagram."""
    b, c, r = g.b, g.c, g.r
    A = b * b / (1 + s) ** 2
    B = c * c / (1 + r * s) ** 2
    return s * math.sqrt(A + r * r * B), math.sqrt(A + r * B)


def g_weights(s: float, g: GCouple) -> tuple[float, float]:
    """``w0 = gamma0'`` and ``w1 = -gamma1'`` in closed form."""
    b, c, r = g.b, g.c, g.r
    num = b * b / (1 + s) ** 3 + r * r * c * c / (1 + r * s) ** 3
    q0 = math.sqrt(b * b / (1 + s) ** 2 + r * r * c * c / (1 + r * s) ** 2)
    q1 = math.sqrt(b * b / (1 + s) ** 2 + r * c * c / (1 + r * s) ** 2)
    return num / q0, num / q1


def g_weights_array(s: np.ndarray, g: GCouple) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`g_weights`."""
    s = np.asarray(s, dtype=float)
    b, c, r = g.b, g.c, g.r
    num = b * b / (1 + s) ** 3 + r * r * c * c / (1 + r * s) ** 3
    q0 = np.sqrt(b * b / (1 + s) ** 2 + r * r * c * c / (1 + r * s) ** 2)
    q1 = np.sqrt(b * b / (1 + s) ** 2 + r * c * c / (1 + r * s) ** 2)
    return num / q0, num / q1


def g_couple_l1(g: GCouple) -> ContinuousL1Couple:
    """Weighted L^1 model ``(L^1_{w0}, L^1_{w1})`` on ``(0, inf)``."""
    return ContinuousL1Couple(Interval(0.0, math.inf),
                              lambda s: g_weights(s, g)[0], lambda s: g_weights(s, g)[1])


def g_ratio_limits(g: GCouple) -> tuple[float, float]:
    """Limits of ``w0/w1`` at ``s -> 0`` and ``s -> inf``."""
    b2, c2, r = g.b ** 2, g.c ** 2, g.r
    return math.sqrt((b2 + r * c2) / (b2 + r * r * c2)), math.sqrt(b2 + c2 / r)


def g_k_boundary(t: float, g: GCouple, n_scan: int = 2049) -> float:
    """``K(t, (b, c); G)`` as the minimum of ``x0 + t x1`` over the boundary.

    The boundary is the curve ``(gamma0, gamma1)`` plus the two axis rays,
    which contribute the values ``1`` and ``t sqrt(b^2 + r c^2)``.
    """
    def f(u: float) -> float:
        s = u / (1.0 - u)
        g0, g1 = g_boundary(s, g)
        return g0 + t * g1

    u = np.linspace(0.0, 1.0, n_scan)[1:-1]
    vals = np.array([f(float(x)) for x in u])
    k = int(np.argmin(vals))
    lo = u[max(k - 1, 0)]
    hi = u[min(k + 1, len(u) - 1)]
    res = _spo.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    best = min(float(vals[k]), float(res.fun))
    return min(best, 1.0, t * g.gamma1_at_zero)


def g_k_equality_check(g: GCouple, t_grid: Sequence[float],
                       tol: Tolerance = Tolerance(1e-12, 1e-12, 400)) -> CheckReport:
    """Compare the weighted-L^1 K-functional with the Gagliardo-boundary K-functional."""
    couple = g_couple_l1(g)
    rows = []
    worst = 0.0
    for t in t_grid:
        lhs = k_l1_continuous(float(t), couple, tol)
        rhs = g_k_boundary(float(t), g)
        rel = abs(lhs - rhs) / max(abs(rhs), 1e-300)
        worst = max(worst, rel)
        rows.append((float(t), lhs, rhs, rel))
    rep = CheckReport("g_k_equality")
    rep.add(Check.leq("max relative discrepancy", worst, 1e-7))
    rep.results = {"r": g.r, "b": g.b, "c": g.c, "rows": rows, "max_rel": worst}
    return rep


def _denominator(s: float, g: GCouple, j: int) -> float:
    b, c, r = g.b, g.c, g.r
    return math.sqrt(b * b * (1 + r * s) ** 2 + r ** (1 + j) * c * c * (1 + s) ** 2)


def g_intersection(s: float, g: GCouple, j: int | None = None) -> tuple[float, float]:
    """Normalized intersection ``(x(s)/c_a, y(s)/c_a)`` of circle and ellipse.

    Solves ``x^2 + y^2 = w0^2`` and ``x^2 + r y^2 = w1^2``.  Both closed forms
    (``j = 0, 1``) share the denominator
    ``sqrt(b^2 (1+rs)^2 + r^{1+j} c^2 (1+s)^2)``.  With ``j=None`` both are
    evaluated and required to agree.
    """
    if g.r == 1.0:
        raise DegenerateCase("circle and ellipse coincide when r = 1")
    b, c, r = g.b, g.c, g.r
    w = g_weights(s, g)
    out = []
    for jj in ((0, 1) if j is None else (j,)):
        d = _denominator(s, g, jj)
        out.append((w[jj] * b * (1 + r * s) / d, w[jj] * c * math.sqrt(r) * (1 + s) / d))
    if j is None:
        (x0, y0), (x1, y1) = out
        if abs(x0 - x1) > 1e-10 * max(1.0, abs(x0)) or abs(y0 - y1) > 1e-10 * max(1.0, abs(y0)):
            raise DegenerateCase(f"j=0 and j=1 forms disagree at s={s}")
    return out[0]


def g_intersection_printed_y(s: float, g: GCouple, j: int) -> float:
    """The y-formula with the denominator exactly as printed (kept for the record).

    ``c sqrt(r) (1+s) w_j / sqrt(b^2 (1+s)^2 + r^{1+j} c^2 (1+rs)^2)``; it does
    not satisfy the defining system, see :func:`g_intersection`.
    """
    b, c, r = g.b, g.c, g.r
    w = g_weights(s, g)[j]
    return w * c * math.sqrt(r) * (1 + s) / math.sqrt(b * b * (1 + s) ** 2 + r ** (1 + j) * c * c * (1 + r * s) ** 2)


def intersection_residuals(s: float, g: GCouple) -> tuple[float, float]:
    """Residuals of the circle and ellipse equations at ``(x, y)/c_a``."""
    x, y = g_intersection(s, g)
    w0, w1 = g_weights(s, g)
    return x * x + y * y - w0 * w0, x * x + g.r * y * y - w1 * w1


def g_u(s: float, g: GCouple, j: int) -> float:
    return (1 + g.r * s) / _denominator(s, g, j)


def g_v(s: float, g: GCouple, j: int) -> float:
    return math.sqrt(g.r) * (1 + s) / _denominator(s, g, j)


def _half_line(f, tol: Tolerance) -> float:
    return integrate(f, Interval(0.0, math.inf), tol)


def g_intersection_integrals(g: GCouple, tol: Tolerance = Tolerance(1e-12, 1e-12, 400)) -> tuple[float, float]:
    """``int x/(b c_a)`` and ``int y/(c c_a)`` over ``(0, inf)``."""
    ix = _half_line(lambda s: g_intersection(s, g, 0)[0], tol) / g.b
    iy = _half_line(lambda s: g_intersection(s, g, 0)[1], tol) / g.c
    return ix, iy


def g_bugly_check(g: GCouple, tol: Tolerance = Tolerance(1e-12, 1e-12, 400)) -> CheckReport:
    """Both intersection integrals exceed ``2/(1 + sqrt r)``."""
    if g.r <= 1 or g.b <= 0 or g.c <= 0:
        raise BadParam("needs r > 1 and b, c > 0")
    ix, iy = g_intersection_integrals(g, tol)
    thr = 2.0 / (1.0 + math.sqrt(g.r))
    rep = CheckReport("g_bugly")
    rep.add(Check.geq("x integral > 2/(1+sqrt r)", ix, thr, 0.0))
    rep.add(Check.geq("y integral > 2/(1+sqrt r)", iy, thr, 0.0))
    rep.add(Check("x integral strictly above", ix > thr, ix - thr, 0.0))
    rep.add(Check("y integral strictly above", iy > thr, iy - thr, 0.0))
    c_bound = (1.0 + math.sqrt(g.r)) / 2.0
    rep.results = {"x_integral": ix, "y_integral": iy, "threshold": thr,
                   "c_a_upper": c_bound, "gamma_upper": min(c_bound, math.sqrt(2.0)),
                   "xy_kernel_norm": max(1.0 / ix, 1.0 / iy)}
    return rep


def remark_bad_integral(r: float = 1000.0, b: float = math.sqrt(3) / 2, c: float = 0.5,
                        tol: Tolerance = Tolerance(1e-12, 1e-12, 400)) -> float:
    """``int_0^inf x(s) / (c_a b) ds``; below ``1/sqrt 2`` for large ``r``."""
    return g_intersection_integrals(GCouple.make(r, b, c), tol)[0]


def g_sq2_kernel(g: GCouple, grid: np.ndarray | None = None) -> OperatorKernel:
    """Kernel ``g0 = b w0``, ``g1 = c w1 / sqrt(b^2 + r c^2)`` sampled in ``u = s/(1+s)``."""
    u = np.linspace(0.0, 1.0, 20001)[1:-1] if grid is None else np.asarray(grid)
    s = u / (1 - u)
    w = np.array([g_weights(float(x), g) for x in s])
    g0 = g.b * w[:, 0]
    g1 = g.c * w[:, 1] / g.gamma1_at_zero
    return OperatorKernel(u, g0, g1, compact=True, label="sq2")


def g_xy_kernel(g: GCouple, n: int = 20001) -> OperatorKernel:
    """Normalized intersection kernel ``(x/c_a, y/c_a)`` sampled in ``u = s/(1+s)``."""
    u = np.linspace(0.0, 1.0, n)[:-1]
    xy = np.array([g_intersection(float(x / (1 - x)), g, 0) for x in u])
    return OperatorKernel(u, xy[:, 0], xy[:, 1], compact=True, label="xy")


def g_sq2_kernel_check(g: GCouple, n_grid: int = 20001) -> CheckReport:
    """Certify ``c_a < sqrt(1 + b^2)`` with the explicit kernel."""
    rep = CheckReport("g_sq2_kernel")
    if g.b == 0 or g.c == 0:
        rep.results = {"c_a": 1.0, "note": "endpoint case, c_a = 1 by direct construction"}
        rep.add(Check("endpoint c_a = 1", True, 1.0, 1.0, 0.0))
        return rep
    tol = Tolerance(1e-12, 1e-12, 400)
    t0 = _half_line(lambda s: g.b * g_weights(s, g)[0], tol)
    t1 = _half_line(lambda s: g.c * g_weights(s, g)[1] / g.gamma1_at_zero, tol)
    u = np.linspace(0.0, 1.0, n_grid)[1:-1]
    s = u / (1 - u)
    s = np.concatenate([np.geomspace(1e-9, 1e-3, 200), s, np.geomspace(1e4, 1e9, 200)])
    worst = 0.0
    bound = 1.0 + g.b ** 2
    for x in s:
        w0, w1 = g_weights(float(x), g)
        g0, g1 = g.b * w0, g.c * w1 / g.gamma1_at_zero
        worst = max(worst, (g0 * g0 + g1 * g1) / w0 ** 2, (g0 * g0 + g.r * g1 * g1) / w1 ** 2)
    rep.add(Check.close("Tf first coordinate", t0, g.b, 1e-9))
    rep.add(Check.close("Tf second coordinate", t1, g.c, 1e-9))
    rep.add(Check("sup ratio < 1 + b^2", worst < bound, worst, bound, 0.0))
    rep.add(Check("norm bound < sqrt 2", math.sqrt(worst) < math.sqrt(2.0), math.sqrt(worst), math.sqrt(2.0), 0.0))
    rep.results = {"sup_ratio": worst, "norm_bound": math.sqrt(worst), "sqrt_1_plus_b2": math.sqrt(bound)}
    return rep


def g_weight_integrals(g: GCouple, tol: Tolerance = Tolerance(1e-13, 1e-13, 400)) -> CheckReport:
    """Quadrature of ``int w0 = 1`` and ``int w1 = sqrt(b^2 + r c^2)`` over ``(0, inf)``.

    Both follow from ``w0 = gamma0'``, ``w1 = -gamma1'`` and the boundary
    limits ``gamma0(inf) = |(b, c)| = 1`` and ``gamma1(0) = sqrt(b^2 + r c^2)``.
    """
    i0 = _half_line(lambda s: g_weights(s, g)[0], tol)
    i1 = _half_line(lambda s: g_weights(s, g)[1], tol)
    rep = CheckReport("g_weight_integrals")
    rep.add(Check.close("int w0 = 1", i0, 1.0, 1e-9))
    rep.add(Check.close("int w1 = sqrt(b^2 + r c^2)", i1, g.gamma1_at_zero, 1e-9))
    rep.results = {"int_w0": i0, "int_w1": i1, "closed_w1": g.gamma1_at_zero}
    return rep


def g_weight_properties(g: GCouple, n: int = 10000) -> CheckReport:
    """Grid checks of the weight inequalities and of the u/v monotonicity."""
    s = np.geomspace(1e-6, 1e6, n)
    w = np.array([g_weights(float(x), g) for x in s])
    bd = np.array([g_boundary(float(x), g) for x in s])
    rep = CheckReport("g_weights")
    rep.add(Check("gamma0 strictly increasing", bool(np.all(np.diff(bd[:, 0]) > 0)), None, None))
    rep.add(Check("gamma1 strictly decreasing", bool(np.all(np.diff(bd[:, 1]) < 0)), None, None))
    if g.r > 1 and g.b > 0 and g.c > 0:
        ratio = w[:, 0] / w[:, 1]
        rep.add(Check("w0 < w1", bool(np.all(w[:, 0] < w[:, 1])), None, None))
        rep.add(Check("w0 > w1/sqrt(r)", bool(np.all(w[:, 0] > w[:, 1] / math.sqrt(g.r))), None, None))
        rep.add(Check("w0/w1 strictly increasing", bool(np.all(np.diff(ratio) > 0)), None, None))
        for j in (0, 1):
            uj = np.array([g_u(float(x), g, j) for x in s])
            vj = np.array([g_v(float(x), g, j) for x in s])
            rep.add(Check(f"u_{j} increasing", bool(np.all(np.diff(uj) >= -1e-15)), None, None))
            rep.add(Check(f"v_{j} decreasing", bool(np.all(np.diff(vj) <= 1e-15)), None, None))
    return rep


# ---------------------------------------------------------------------------
# direct sum W = (U + V, U)
# ---------------------------------------------------------------------------

def k_w_direct(t: float, alpha: AlphaPoint, u: Sequence[float] = (0.6, 0.8),
               v: Sequence[float] = (0.0, 1.0), n_grid: int = 64) -> float:
    """4-D oracle for ``K(t, alpha1 u + alpha2 v; (U + V, U))`` with ``U = V = l^2_2``.

    Minimizes ``||x - z||_{l^2_4} + t ||z||`` over ``z`` in the copy of ``U``
    by a deterministic polar grid followed by Nelder-Mead polishing.
    """
    u = np.asarray(u, float) / np.linalg.norm(u)
    v = np.asarray(v, float) / np.linalg.norm(v)
    x = np.concatenate([alpha.alpha1 * u, alpha.alpha2 * v])

    def obj(z: np.ndarray) -> float:
        zz = np.array([z[0], z[1], 0.0, 0.0])
        return float(np.linalg.norm(x - zz) + t * np.hypot(z[0], z[1]))

    rad = np.linspace(0.0, 1.0, n_grid)
    ang = np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False)
    best, best_z = obj(np.zeros(2)), np.zeros(2)
    for rr in rad[1:]:
        for th in ang:
            z = np.array([rr * math.cos(th), rr * math.sin(th)])
            val = obj(z)
            if val < best:
                best, best_z = val, z
    res = _spo.minimize(obj, best_z, method="Nelder-Mead",
                        options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 20000})
    return min(best, float(res.fun), obj(np.zeros(2)))


def gamma_w_direct_sum(t_grid: Sequence[float] = (0.05, 0.3, 1.0, 2.5, 10.0),
                       angles: Sequence[float] = (math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3),
                       tol: float = 1e-6) -> CheckReport:
    """Identity ``K(t, alpha1 u + alpha2 v; W) = K(t, alpha; Y)`` on a grid."""
    rep = CheckReport("gamma_w_direct_sum")
    worst = 0.0
    for a in angles:
        al = AlphaPoint(a)
        for t in t_grid:
            worst = max(worst, abs(k_w_direct(t, al) - k_y(t, al)))
    deg = max(abs(k_w_direct(t, AlphaPoint(0.0)) - min(1.0, t)) for t in t_grid)
    rep.add(Check.leq("K_W = K_Y", worst, tol))
    rep.add(Check.leq("alpha2 = 0 gives min(1, t)", deg, tol))
    rep.results = {"max_abs_discrepancy": worst, "gamma_W": TWO_OVER_SQRT3}
    return rep


def canonical_note(g: GCouple) -> str:
    return f"swapped to r={g.r:g}" if g.swapped else ""

