"""Deterministic scalar numerics used throughout kdivlab.

The heavy lifting is delegated to :mod:`scipy` (QUADPACK for quadrature,
Brent's method for roots and bounded minimization).  This module adds the
bits that the rest of the package relies on: explicit tolerance objects,
strict error reporting, a half-line change of variables, a direction
sampled support-function feasibility test and the decreasing rearrangement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate as _spi
from scipy import optimize as _spo

from .errors import BadParam, Budget, NoBracket, NonFinite

Func = Callable[[float], float]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair plus an iteration budget."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self) -> None:
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise BadParam("tolerances must be nonnegative")
        if not (self.abs_tol > 0 or self.rel_tol > 0):
            raise BadParam("at least one of abs_tol, rel_tol must be positive")
        if self.max_iter < 1:
            raise BadParam("max_iter must be at least 1")

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(self.abs_tol * factor, self.rel_tol * factor, self.max_iter)


DEFAULT_TOL = Tolerance()
ROOT_TOL = Tolerance(abs_tol=1e-14, rel_tol=4 * np.finfo(float).eps, max_iter=500)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; ``hi`` may be ``+inf``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise BadParam("interval endpoints must not be NaN")
        if not math.isfinite(self.lo):
            raise BadParam("lower endpoint must be finite")
        if self.lo > self.hi:
            raise BadParam(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def half_infinite(self) -> bool:
        return math.isinf(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def _guarded(f: Func) -> Func:
    def g(x: float) -> float:
        v = f(x)
        if not math.isfinite(v):
            raise NonFinite(f"integrand is {v} at x={x!r}")
        return v

    return g


def integrate(
    f: Func,
    domain: Interval,
    tol: Tolerance = DEFAULT_TOL,
    points: Iterable[float] | None = None,
) -> float:
    """Integrate ``f`` over ``domain`` with adaptive Gauss-Kronrod quadrature.

    Half-infinite domains are mapped to ``(0, 1)`` through
    ``s = lo + u / (1 - u)`` before integration, so integrands decaying like
    ``s**-2`` become bounded.

    Parameters
    ----------
    f : callable
        Scalar integrand; must be finite inside the domain.
    domain : Interval
        Integration interval.
    tol : Tolerance
        Absolute/relative targets and the subdivision budget.
    points : iterable of float, optional
        Interior points where ``f`` has kinks; the interval is split there.

    Raises
    ------
    NonFinite
        If ``f`` returns NaN or an infinity at a sample point.
    Budget
        If the subdivision limit is hit before the tolerance is met.
    """
    g = _guarded(f)
    lo, hi = float(domain.lo), float(domain.hi)
    if lo == hi:
        return 0.0
    pts = sorted(p for p in (points or ()) if lo < p < hi)
    if domain.half_infinite:
        def h(u: float) -> float:
            return g(lo + u / (1.0 - u)) / (1.0 - u) ** 2

        edges = [0.0] + [(p - lo) / (1.0 + p - lo) for p in pts] + [1.0]
        integrand = h
    else:
        edges = [lo] + pts + [hi]
        integrand = g
    edges = sorted(set(edges))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val, err = _spi.quad(
                integrand, a, b, epsabs=tol.abs_tol, epsrel=tol.rel_tol,
                limit=tol.max_iter, full_output=1,
            )[:2]
        target = max(tol.abs_tol, tol.rel_tol * abs(val))
        if not math.isfinite(val):
            raise NonFinite("quadrature returned a non-finite value")
        if err > max(1e3 * target, 1e-7):
            raise Budget(f"quadrature error estimate {err:.3g} exceeds target {target:.3g} on [{a}, {b}]")
        total += val
    return total


def find_root(f: Func, bracket: Interval, tol: Tolerance = ROOT_TOL) -> float:
    """Root of ``f`` inside ``bracket`` by Brent's method.

    Raises
    ------
    NoBracket
        If ``f`` has the same strict sign at both endpoints.
    Budget
        If Brent's method does not converge within ``tol.max_iter`` steps.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo, fhi = f(lo), f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise NonFinite("non-finite function value at a bracket endpoint")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoBracket(f"f({lo})={flo:.3g} and f({hi})={fhi:.3g} have the same sign")
    rtol = max(tol.rel_tol, 4 * np.finfo(float).eps)
    try:
        x, res = _spo.brentq(f, lo, hi, xtol=tol.abs_tol, rtol=rtol,
                              maxiter=tol.max_iter, full_output=True, disp=False)
    except RuntimeError as exc:  # pragma: no cover - scipy raises only when disp=True
        raise Budget(str(exc)) from exc
    if not res.converged:
        raise Budget(f"brentq did not converge within {tol.max_iter} iterations")
    return float(x)


def minimize_convex_1d(
    f: Func,
    domain: Interval,
    tol: Tolerance = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=500),
    candidates: Sequence[float] = (),
) -> tuple[float, float]:
    """Minimize a convex function on a finite interval.

    Bounded Brent search (golden section with parabolic steps) followed by a
    comparison with the endpoints and any caller supplied ``candidates``
    (typically known kinks), so minima sitting on a corner are found exactly.

    Returns
    -------
    (argmin, min)
    """
    lo, hi = float(domain.lo), float(domain.hi)
    if not math.isfinite(hi):
        raise ValueError("minimize_convex_1d needs a finite domain")
    best_x, best_v = lo, f(lo)
    for x in (hi, *candidates):
        if lo <= x <= hi:
            v = f(x)
            if v < best_v:
                best_x, best_v = float(x), v
    if hi > lo:
        res = _spo.minimize_scalar(
            f, bounds=(lo, hi), method="bounded",
            options={"xatol": max(tol.abs_tol, 1e-14), "maxiter": tol.max_iter},
        )
        if not res.success and res.status == 1:
            raise Budget("bounded minimization exhausted its iteration budget")
        if res.fun < best_v:
            best_x, best_v = float(res.x), float(res.fun)
    return best_x, float(best_v)


def unit_directions(n_dirs: int, offset: float = 0.0) -> np.ndarray:
    """``n_dirs`` equally spaced unit vectors as an ``(n_dirs, 2)`` array."""
    th = offset + 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    return np.column_stack([np.cos(th), np.sin(th)])


def _eval_support(support_fn: Callable, dirs: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(support_fn(dirs), dtype=float)
    except (TypeError, ValueError, IndexError):
        vals = None
    if vals is None or vals.shape != (len(dirs),):
        vals = np.array([float(support_fn(d)) for d in dirs])
    return vals


def support_feasible(
    support_fn: Callable,
    target: Sequence[float],
    n_dirs: int = 4096,
    abs_tol: float = 1e-8,
    refine: bool = True,
) -> tuple[bool, float]:
    """Test whether ``target`` lies in a compact convex planar set.

    The set is given through its support function ``h``.  A point ``p``
    belongs to the set iff ``<u, p> <= h(u)`` for all unit ``u``; the test is
    carried out on ``n_dirs`` equally spaced directions, followed (when
    ``refine``) by a local one-dimensional maximization of the violation
    around the worst sampled direction.

    Parameters
    ----------
    support_fn : callable
        Either vectorized, mapping an ``(n, 2)`` array of unit directions to
        ``n`` values, or scalar on a single 2-vector.
    target : 2-vector
    n_dirs : int
        Number of sampled directions (at least 8).
    abs_tol : float
        Feasibility slack.

    Returns
    -------
    feasible : bool
    worst_margin : float
        ``min_u h(u) - <u, target>``.
    """
    if n_dirs < 8:
        raise ValueError("n_dirs must be at least 8")
    p = np.asarray(target, dtype=float)
    dirs = unit_directions(n_dirs)
    margins = _eval_support(support_fn, dirs) - dirs @ p
    k = int(np.argmin(margins))
    worst = float(margins[k])
    if refine:
        step = 2.0 * np.pi / n_dirs
        th0 = 2.0 * np.pi * k / n_dirs

        def m(th: float) -> float:
            u = np.array([[math.cos(th), math.sin(th)]])
            return float(_eval_support(support_fn, u)[0] - u[0] @ p)

        res = _spo.minimize_scalar(m, bounds=(th0 - step, th0 + step), method="bounded",
                                   options={"xatol": 1e-12})
        worst = min(worst, float(res.fun))
    return worst >= -abs_tol, worst


def decreasing_rearrangement(x: Sequence[float]) -> np.ndarray:
    """Absolute values of ``x`` sorted in nonincreasing order."""
    a = np.abs(np.asarray(x, dtype=float))
    return np.sort(a)[::-1].copy()


def gauss_legendre_nodes(edges: Sequence[float], order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on the panels ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    e = np.asarray(edges, dtype=float)
    a, b = e[:-1, None], e[1:, None]
    nodes = (a + b) / 2 + (b - a) / 2 * x
    weights = (b - a) / 2 * w
    return nodes.ravel(), weights.ravel()


def relative_error(value: float, reference: float, floor: float = 1e-300) -> float:
    return abs(value - reference) / max(abs(reference), floor)
