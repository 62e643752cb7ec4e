"""The couple ``X = (l^2_2, l^inf_2)`` at the point ``(a, 1)``.

The optimal operator is parametrized by a number ``xi_a`` in ``(0, 1)``:
below ``xi_a`` the kernel sits on the vertical edge of the box
``[0, c]^2``, above it on the circle of radius ``c w`` at the fixed angle
``theta_a = arccos(1 / w(xi_a))``.  Matching the two moments gives

* ``c_a = (a^2 + a - 2 a xi) / (a^2 - a xi + 1 - xi)`` (first moment), and
* a scalar equation ``f(xi) = 0`` (second moment).

Two forms of ``f`` are implemented.  ``"printed"`` is the expression used
to produce the published table; its second term carries the factor
``a + 1 - 2 xi`` inside the square root.  ``"corrected"`` is what the
second moment actually reduces to, with that factor outside the root.
Only the corrected form yields kernels with ``int g1 = 1``; see
:func:`x_kernel_report` and the oracle cross-checks.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadParam, NoRoot, OutOfDomain, StructureViolation
from .kernels import OperatorKernel
from .kfunc import ContinuousL1Couple, e_x, k_from_e
from .numerics import ROOT_TOL, Interval, Tolerance, find_root, integrate
from .report import Check, CheckReport

UPPER_CONSTANT = (4.0 + 3.0 * math.sqrt(2.0)) / (4.0 + 2.0 * math.sqrt(2.0))
VARIANTS = ("printed", "corrected")
QUAD_TOL = Tolerance(1e-13, 1e-13, 400)


@dataclass(frozen=True)
class XParam:
    """Point ``(a, 1)``, ``a >= 1``, in decreasing order."""

    a: float

    def __post_init__(self) -> None:
        if not (self.a >= 1.0) or not math.isfinite(self.a):
            raise BadParam("a must be a finite number >= 1")

    @property
    def alpha(self) -> tuple[float, float]:
        return (self.a, 1.0)


def _p(p: XParam | float) -> XParam:
    return p if isinstance(p, XParam) else XParam(float(p))


def w_x(t: float, p: XParam | float) -> float:
    """Weight ``-dE/dt``: ``(a + 1 - 2t) / sqrt((t-a)^2 + (t-1)^2)`` on ``(0, 1)``, ``1`` on ``[1, a)``."""
    p = _p(p)
    a = p.a
    if not (0.0 <= t < a) and not (a == 1.0 and 0.0 <= t < 1.0):
        raise OutOfDomain(f"t={t} outside (0, {a})")
    if t < 1.0:
        return (a + 1.0 - 2.0 * t) / math.hypot(t - a, t - 1.0)
    return 1.0


def w_x_array(t: np.ndarray, a: float) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    m = t < 1.0
    tt = t[m]
    out[m] = (a + 1.0 - 2.0 * tt) / np.hypot(tt - a, tt - 1.0)
    return out


def x_couple(p: XParam | float) -> ContinuousL1Couple:
    """Weighted L^1 model on ``(0, a)``: ``w0 = w``, ``w1 = 1``."""
    p = _p(p)
    return ContinuousL1Couple(Interval(0.0, p.a), lambda t: w_x(t, p), lambda t: 1.0,
                              breakpoints=(1.0,) if p.a > 1 else ())


def k_x(t: float, p: XParam | float) -> float:
    """``K(t, (a, 1); X)`` through the E-functional."""
    p = _p(p)
    return k_from_e(lambda s: e_x(s, p.a), t, Interval(0.0, p.a), candidates=(1.0, p.a))


def integrand_agac(xi: float, p: XParam | float) -> float:
    """``2 (a - xi)(1 - xi) / ((a - xi)^2 + (1 - xi)^2)``; equals ``w(xi)^2 - 1``."""
    a = _p(p).a
    if not (0.0 <= xi <= 1.0):
        raise OutOfDomain("xi must lie in [0, 1]")
    d = (a - xi) ** 2 + (1.0 - xi) ** 2
    if d == 0.0:
        return 1.0
    return 2.0 * (a - xi) * (1.0 - xi) / d


def _sqrt_agac(t: float, a: float) -> float:
    d = (a - t) ** 2 + (1.0 - t) ** 2
    return math.sqrt(max(2.0 * (a - t) * (1.0 - t) / d, 0.0))


def lower_bound_integral(p: XParam | float, tol: Tolerance = QUAD_TOL) -> float:
    """``I(a) = int_0^1 sqrt(w^2 - 1)``."""
    p = _p(p)
    if p.a == 1.0:
        return 1.0
    return integrate(lambda t: _sqrt_agac(t, p.a), Interval(0.0, 1.0), tol)


def lower_bound_check(p: XParam | float, tol: Tolerance = QUAD_TOL) -> CheckReport:
    """``I(a) < 1`` shows ``c_a > 1``.

    An admissible kernel has ``g0 <= c`` and ``g0^2 + g1^2 <= c^2 w^2``, hence
    ``g1 <= c sqrt(w^2 - 1)`` wherever ``g0 = c``; with ``c = 1`` the
    constraint ``int_0^a g0 = a`` forces ``g0 = 1`` and then ``int g1 <= I(a)``,
    contradicting ``int g1 = 1``.
    """
    p = _p(p)
    val = lower_bound_integral(p, tol)
    rep = CheckReport("lower_bound")
    if p.a == 1.0:
        rep.add(Check.close("I(1) = 1", val, 1.0, 0.0))
        rep.results = {"a": 1.0, "I": val, "c_a_at_1": 1.0}
    else:
        rep.add(Check("I(a) < 1", val < 1.0, val, 1.0, 0.0, "implies c_a > 1"))
        rep.results = {"a": p.a, "I": val}
    return rep


def c_a_of_xi(xi: float, p: XParam | float) -> float:
    """``(a^2 + a - 2 a xi) / (a^2 - a xi + 1 - xi)``."""
    a = _p(p).a
    if not (0.0 <= xi <= 1.0):
        raise OutOfDomain("xi must lie in [0, 1]")
    return (a * a + a - 2.0 * a * xi) / (a * a - a * xi + 1.0 - xi)


def _tail_term(x: float, a: float, variant: str) -> float:
    d = (a - x) ** 2 + (1.0 - x) ** 2
    num = 2.0 * (a - x) * (1.0 - x) * d
    den = a + 1.0 - 2.0 * x
    if variant == "printed":
        return math.sqrt(max(num / den, 0.0))
    if variant == "corrected":
        return math.sqrt(max(num, 0.0)) / den
    raise BadParam(f"unknown residual variant {variant!r}; expected one of {VARIANTS}")


class _Antiderivative:
    """Cumulative table of ``int_0^x sqrt(w^2 - 1)`` on a fixed grid.

    Evaluation at an arbitrary ``x`` adds one short quadrature from the
    nearest tabulated node below, so a root search never integrates from 0.
    """

    def __init__(self, a: float, grid: np.ndarray, tol: Tolerance = QUAD_TOL) -> None:
        self.a = a
        self.nodes = [float(x) for x in grid]
        self.tol = tol
        pieces = [integrate(self._f, Interval(lo, hi), tol)
                  for lo, hi in zip(self.nodes[:-1], self.nodes[1:])]
        self.table = np.concatenate([[0.0], np.cumsum(pieces)])

    def _f(self, t: float) -> float:
        return _sqrt_agac(t, self.a)

    def __call__(self, x: float) -> float:
        k = min(max(bisect_right(self.nodes, x) - 1, 0), len(self.nodes) - 1)
        lo = self.nodes[k]
        base = float(self.table[k])
        if x == lo:
            return base
        return base + integrate(self._f, Interval(lo, x), self.tol)


def vsmb_residual(xi: float, p: XParam | float, tol: Tolerance = QUAD_TOL,
                  variant: str = "printed") -> float:
    """Residual of the second-moment equation.

    ``f(xi) = int_0^xi sqrt(w^2 - 1) + T(xi) - 1 / c_a(xi)`` where
    ``1 / c_a(xi) = (a^2 - a xi + 1 - xi) / (a^2 + a - 2 a xi)`` and

    * printed:   ``T = sqrt(2 (a-xi)(1-xi) D / (a + 1 - 2 xi))``
    * corrected: ``T = sqrt(2 (a-xi)(1-xi) D) / (a + 1 - 2 xi)``

    with ``D = (a - xi)^2 + (1 - xi)^2``.
    """
    p = _p(p)
    if not (0.0 <= xi <= 1.0):
        raise OutOfDomain("xi must lie in [0, 1]")
    if p.a <= 1.0:
        raise BadParam("the residual is defined for a > 1")
    a = p.a
    head = integrate(lambda t: _sqrt_agac(t, a), Interval(0.0, xi), tol) if xi > 0 else 0.0
    return head + _tail_term(xi, a, variant) - 1.0 / c_a_of_xi(xi, p)


def _residual_fn(p: XParam, variant: str, n_grid: int, tol: Tolerance):
    grid = np.linspace(0.0, 1.0, n_grid + 1)
    anti = _Antiderivative(p.a, grid, tol)
    a = p.a

    def f(x: float) -> float:
        return anti(x) + _tail_term(x, a, variant) - 1.0 / c_a_of_xi(x, p)

    nodes = anti.table + np.array([_tail_term(float(x), a, variant) for x in grid]) \
        - np.array([1.0 / c_a_of_xi(float(x), p) for x in grid])
    return f, grid, nodes


@dataclass
class XSolution:
    """Solution of the divisibility system at one ``a``."""

    a: float
    xi_a: float
    c_a: float
    residual: float
    theta_a: float
    variant: str = "printed"
    roots: list[tuple[float, float]] = field(default_factory=list)
    multiple: bool = False
    kernel: OperatorKernel | None = field(default=None, repr=False)
    kernel_report: CheckReport | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"a": self.a, "xi": self.xi_a, "c_a": self.c_a, "residual": self.residual,
                "theta_a": self.theta_a, "variant": self.variant,
                "roots": [list(r) for r in self.roots], "multiple_roots": self.multiple,
                "kernel_checks_pass": None if self.kernel_report is None else self.kernel_report.passed}


def solve_x(p: XParam | float, tol: Tolerance = ROOT_TOL, variant: str = "printed",
            n_grid: int = 1024, build_kernel: bool = True) -> XSolution:
    """Root ``xi_a`` of the second-moment residual and the induced ``c_a``.

    The residual is tabulated on ``n_grid`` panels of ``[0, 1]``; every sign
    change is refined with Brent's method.  If several roots exist, the one
    with the largest ``c_a`` is designated primary and ``multiple`` is set.

    Raises
    ------
    NoRoot
        If the residual has no sign change on ``[0, 1]``.
    """
    p = _p(p)
    if p.a <= 1.0:
        raise BadParam("solve_x needs a > 1; a = 1 is the trivial case c_a = 1")
    if variant not in VARIANTS:
        raise BadParam(f"unknown residual variant {variant!r}")
    f, grid, vals = _residual_fn(p, variant, n_grid, QUAD_TOL)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0 and 0.0 < grid[i] < 1.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(find_root(f, Interval(float(grid[i]), float(grid[i + 1])), tol))
    if not roots:
        raise NoRoot(f"no sign change of the residual on (0, 1) for a={p.a}")
    pairs = [(x, c_a_of_xi(x, p)) for x in roots]
    xi, c = max(pairs, key=lambda rc: rc[1])
    sol = XSolution(a=p.a, xi_a=xi, c_a=c, residual=f(xi),
                    theta_a=math.acos(1.0 / w_x(xi, p)), variant=variant,
                    roots=pairs, multiple=len(pairs) > 1)
    if build_kernel:
        sol.kernel, sol.kernel_report = x_kernel(sol, strict=False, with_report=True)
    return sol


def trivial_solution() -> XSolution:
    """``a = 1``: ``w = sqrt 2`` and ``g0 = g1 = 1`` give ``c_1 = 1``."""
    grid = np.linspace(0.0, 1.0, 2049)
    k = OperatorKernel(grid, np.ones_like(grid), np.ones_like(grid), label="X")
    return XSolution(a=1.0, xi_a=1.0, c_a=1.0, residual=0.0, theta_a=math.pi / 4,
                     variant="exact", roots=[(1.0, 1.0)], kernel=k)


def _kernel_grid(xi: float, a: float, n: int) -> np.ndarray:
    """Nodes on ``[0, a]`` clustered at ``xi`` and at the corner ``t = 1``."""
    m = max(n // 4, 16)
    u = (1.0 - np.cos(np.linspace(0.0, math.pi, m))) / 2.0
    segs = [xi * u, xi + (1.0 - xi) * u]
    if a > 1.0:
        segs.append(1.0 + (a - 1.0) * u)
    g = np.unique(np.concatenate(segs))
    return g


def _kernel_values(t: np.ndarray, sol: XSolution) -> tuple[np.ndarray, np.ndarray]:
    w = w_x_array(t, sol.a)
    c = sol.c_a
    low = t < sol.xi_a
    g0 = np.where(low, c, c * w * math.cos(sol.theta_a))
    g1 = np.where(low, c * np.sqrt(np.maximum(w * w - 1.0, 0.0)), c * w * math.sin(sol.theta_a))
    return g0, g1


def x_kernel_moments(sol: XSolution, tol: Tolerance = QUAD_TOL) -> tuple[float, float]:
    """Exact (adaptive quadrature) moments ``int g0`` and ``int g1`` of the kernel."""
    a, c, xi, th = sol.a, sol.c_a, sol.xi_a, sol.theta_a
    m0 = c * xi + c * math.cos(th) * integrate(lambda t: w_x(t, a), Interval(xi, a), tol, points=(1.0,))
    m1 = c * integrate(lambda t: _sqrt_agac(t, a), Interval(0.0, xi), tol) \
        + c * math.sin(th) * integrate(lambda t: w_x(t, a), Interval(xi, a), tol, points=(1.0,))
    return m0, m1


def x_kernel_report(sol: XSolution, kernel: OperatorKernel) -> CheckReport:
    """Moment identities, box and disk constraints and angular structure."""
    rep = CheckReport("x_kernel")
    m0, m1 = x_kernel_moments(sol)
    t = kernel.grid
    w = w_x_array(np.minimum(t, np.nextafter(sol.a, 0.0)), sol.a)
    g0, g1 = kernel.g0, kernel.g1
    c = sol.c_a
    theta = np.arctan2(g1, g0)
    psi = np.arccos(np.clip(1.0 / w, -1.0, 1.0))
    rep.add(Check.close("int g0 = a", m0, sol.a, 1e-7))
    rep.add(Check.close("int g1 = 1", m1, 1.0, 1e-7))
    rep.add(Check.leq("max(g0, g1) <= c", float(np.max(np.maximum(g0, g1)) - c), 0.0, 1e-10))
    rep.add(Check.leq("g0^2 + g1^2 <= c^2 w^2",
                      float(np.max(np.hypot(g0, g1) - c * w)), 0.0, 1e-10))
    rep.add(Check.geq("g0 >= g1", float(np.min(g0 - g1)), 0.0, 1e-10))
    rep.add(Check.geq("theta >= arccos(1/w)", float(np.min(theta - psi)), 0.0, 1e-10))
    rep.add(Check.leq("theta <= pi/4", float(np.max(theta)), math.pi / 4, 1e-10))
    rep.add(Check("0 < theta_a < pi/4", 0.0 < sol.theta_a < math.pi / 4, sol.theta_a, math.pi / 4))
    tr0, tr1 = kernel.integrals()
    rep.results = {"int_g0": m0, "int_g1": m1, "trapezoid_g0": tr0, "trapezoid_g1": tr1,
                   "kernel_norm": float(np.max(np.maximum(np.maximum(g0, g1), np.hypot(g0, g1) / w)))}
    return rep


def x_kernel(sol: XSolution, n: int = 16384, strict: bool = True, with_report: bool = False):
    """Reconstruct the kernel ``(g0, g1)`` on ``(0, a)``.

    ``g0 = c``, ``g1 = c sqrt(w^2 - 1)`` below ``xi_a``; ``(g0, g1) = c w
    (cos theta_a, sin theta_a)`` above.  With ``strict`` a failed
    postcondition raises :class:`StructureViolation`.
    """
    if sol.a == 1.0:
        k = trivial_solution().kernel
        return (k, CheckReport("x_kernel")) if with_report else k
    t = _kernel_grid(sol.xi_a, sol.a, n)
    g0, g1 = _kernel_values(t, sol)
    kernel = OperatorKernel(t, g0, g1, label="X")
    rep = x_kernel_report(sol, kernel)
    if strict and not rep.passed:
        names = ", ".join(c.name for c in rep.failures())
        raise StructureViolation(f"kernel for a={sol.a} ({sol.variant}) violates: {names}")
    return (kernel, rep) if with_report else kernel


def gamma_x_estimate(a_range: Interval = Interval(1.05, 4.0), steps: int = 64,
                     tol: Tolerance = ROOT_TOL, variant: str = "printed",
                     jobs: int = 1) -> CheckReport:
    """Sweep ``c_a`` over ``a_range`` and compare with the analytic bounds."""
    if steps < 8:
        raise BadParam("steps must be at least 8")
    if a_range.lo <= 1.0:
        raise BadParam("a_range must lie in (1, inf)")
    grid = np.linspace(a_range.lo, a_range.hi, steps)
    sols, errors = _sweep(grid, tol, variant, jobs)
    rep = CheckReport("gamma_x")
    ok = [s for s in sols if s is not None]
    cs = np.array([s.c_a for s in ok])
    k = int(np.argmax(cs)) if len(cs) else 0
    rep.add(Check("every c_a > 1", bool(np.all(cs > 1.0)) and len(cs) > 0, float(cs.min()) if len(cs) else None, 1.0))
    rep.add(Check.leq("every c_a below upper constant", float(cs.max()) if len(cs) else math.inf,
                      UPPER_CONSTANT, 1e-12))
    rep.add(Check("no sweep errors", not errors, len(errors), 0))
    rep.results = {"gamma_estimate": float(cs[k]) if len(cs) else None,
                   "argmax_a": float(ok[k].a) if ok else None,
                   "upper_constant": UPPER_CONSTANT, "variant": variant,
                   "a": [s.a for s in ok], "xi": [s.xi_a for s in ok], "c_a": cs.tolist(),
                   "errors": errors}
    return rep


def _solve_point(args):
    a, tol, variant = args
    try:
        return solve_x(XParam(a), tol, variant, build_kernel=False), None
    except Exception as exc:  # collected, sweep continues
        return None, f"a={a}: {type(exc).__name__}: {exc}"


def _sweep(grid: Sequence[float], tol: Tolerance, variant: str, jobs: int):
    args = [(float(a), tol, variant) for a in grid]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_solve_point, args))
    else:
        out = [_solve_point(x) for x in args]
    return [o[0] for o in out], [o[1] for o in out if o[1] is not None]


TABLE_ROWS = (
    ("1.2", 1.2), ("1.25", 1.25), ("1.3", 1.3), ("1.275", 1.275), ("1.5", 1.5), ("1.6", 1.6),
    ("1.8", 1.8), ("2", 2.0), ("2.2", 2.2), ("1+sqrt(2)", 1.0 + math.sqrt(2.0)), ("3", 3.0),
)


def x_table(variant: str = "printed", jobs: int = 1) -> list[XSolution]:
    """Solve at the tabulated values of ``a`` (the repeated 1.2 row taken once)."""
    sols, errors = _sweep([a for _, a in TABLE_ROWS], ROOT_TOL, variant, jobs)
    if errors:
        raise NoRoot("; ".join(errors))
    return sols


__all__ = [
    "UPPER_CONSTANT", "VARIANTS", "TABLE_ROWS", "XParam", "XSolution", "w_x", "w_x_array",
    "x_couple", "k_x", "integrand_agac", "lower_bound_integral", "lower_bound_check",
    "c_a_of_xi", "vsmb_residual", "solve_x", "trivial_solution", "x_kernel",
    "x_kernel_report", "x_kernel_moments", "gamma_x_estimate", "x_table",
]

