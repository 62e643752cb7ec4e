"""Couple descriptors and K- and E-functionals.

Conventions
-----------
* ``K(t, x) = inf_{x = y + z} ||y||_0 + t ||z||_1``.
* ``E(t, x) = inf { ||x - y||_0 : ||y||_1 <= t }``; ``K(t) = inf_s E(s) + t s``.
* Weighted L^1 couples allow the weight ``+inf`` (the atom is then absent
  from that space); ``min(+inf, a) = a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadAlpha, BadParam
from .numerics import (DEFAULT_TOL, Interval, Tolerance, find_root, integrate,
                       minimize_convex_1d)
from .report import Check, CheckReport

Weight = Callable[[float], float]


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteCouple:
    """Weighted couple over finitely many atoms.

    ``masses[k]`` is the measure of atom ``k``; ``w0[k]`` and ``w1[k]`` are
    its weights in the two spaces (``inf`` allowed, but not both).
    """

    masses: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    p0: float = 1
    p1: float = 1

    def __post_init__(self) -> None:
        m = np.asarray(self.masses, dtype=float)
        a = np.asarray(self.w0, dtype=float)
        b = np.asarray(self.w1, dtype=float)
        if not (m.shape == a.shape == b.shape and m.ndim == 1):
            raise BadParam("masses, w0 and w1 must be 1-D arrays of equal length")
        if np.any(m <= 0):
            raise BadParam("atom masses must be positive")
        if np.any(a <= 0) or np.any(b <= 0) or np.any(np.isnan(a)) or np.any(np.isnan(b)):
            raise BadParam("weights must lie in (0, +inf]")
        if np.any(np.isinf(a) & np.isinf(b)):
            raise BadParam("an atom may not have both weights infinite")
        for p in (self.p0, self.p1):
            if p not in (1, 2, math.inf):
                raise BadParam(f"exponent {p} not in {{1, 2, inf}}")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "w0", a)
        object.__setattr__(self, "w1", b)

    @classmethod
    def unit(cls, w0: Sequence[float], w1: Sequence[float]) -> "DiscreteCouple":
        return cls(np.ones(len(w0)), np.asarray(w0, float), np.asarray(w1, float))

    @property
    def n(self) -> int:
        return len(self.masses)


@dataclass(frozen=True)
class EndAtom:
    location: float
    mass: float
    w0: float
    w1: float

    def k_contribution(self, t: float) -> float:
        return self.mass * _min_inf(self.w0, t * self.w1)


@dataclass(frozen=True)
class ContinuousL1Couple:
    """``(L^1_{w0}, L^1_{w1})`` on an interval, optionally with an end atom.

    ``breakpoints`` lists interior points where a weight has a kink, so the
    quadrature can split there.
    """

    domain: Interval
    w0: Weight
    w1: Weight
    end_atom: EndAtom | None = None
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.end_atom is not None:
            loc = self.end_atom.location
            if loc not in (self.domain.lo, self.domain.hi):
                raise BadParam("the end atom must sit at an endpoint of the domain")
            if self.end_atom.mass <= 0:
                raise BadParam("atom mass must be positive")
            if math.isinf(self.end_atom.w0) and math.isinf(self.end_atom.w1):
                raise BadParam("an atom may not have both weights infinite")


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

K_CURVE = "K-curve"
E_CURVE = "E-curve"
BOUNDARY = "boundary"


@dataclass
class MonotoneCurve:
    """Sampled K- or E-curve with shape checks.

    Attributes
    ----------
    t, values : arrays
        Sample abscissae (strictly increasing) and values.
    kind : str
        ``"K-curve"``, ``"E-curve"`` or ``"boundary"``.
    """

    t: np.ndarray
    values: np.ndarray
    kind: str = K_CURVE
    fn: Callable[[float], float] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.t.shape != self.values.shape or self.t.ndim != 1:
            raise BadParam("t and values must be 1-D of equal length")
        if np.any(np.diff(self.t) <= 0):
            raise BadParam("sample points must be strictly increasing")
        if self.kind not in (K_CURVE, E_CURVE, BOUNDARY):
            raise BadParam(f"unknown curve kind {self.kind!r}")

    @classmethod
    def from_function(cls, fn: Callable[[float], float], t: Sequence[float],
                      kind: str = K_CURVE) -> "MonotoneCurve":
        t = np.asarray(t, dtype=float)
        return cls(t, np.array([fn(float(s)) for s in t]), kind, fn)

    def __call__(self, s: float) -> float:
        if self.fn is not None:
            return float(self.fn(s))
        return float(np.interp(s, self.t, self.values))

    def check_shape(self, tol: float = 1e-9) -> CheckReport:
        """Verify the structural invariants for the curve kind.

        K-curves: concave, nondecreasing, ``K(t)/t`` nonincreasing.
        E-curves: convex, nonincreasing.  Tolerances are relative to
        ``max(1, |value|)``.
        """
        t, v = self.t, self.values
        rep = CheckReport(f"{self.kind} shape")
        scale = np.maximum(1.0, np.abs(v))
        dv = np.diff(v)
        if len(t) >= 3:
            t0, t1, t2 = t[:-2], t[1:-1], t[2:]
            chord = v[:-2] + (v[2:] - v[:-2]) * (t1 - t0) / (t2 - t0)
            gap = (v[1:-1] - chord) / scale[1:-1]
        else:
            gap = np.zeros(0)
        if self.kind == K_CURVE:
            mono = dv / scale[1:]
            ratio = v / t
            dr = np.diff(ratio) / np.maximum(1.0, np.abs(ratio[1:]))
            rep.add(Check.geq("nondecreasing", float(mono.min(initial=0.0)), 0.0, tol))
            rep.add(Check.geq("concave", float(gap.min(initial=0.0)), 0.0, tol))
            rep.add(Check.leq("K(t)/t nonincreasing", float(dr.max(initial=0.0)), 0.0, tol))
        elif self.kind == E_CURVE:
            mono = dv / scale[1:]
            rep.add(Check.leq("nonincreasing", float(mono.max(initial=0.0)), 0.0, tol))
            rep.add(Check.leq("convex", float(gap.max(initial=0.0)), 0.0, tol))
        else:
            rep.add(Check.leq("nonincreasing", float((dv / scale[1:]).max(initial=0.0)), 0.0, tol))
        return rep


# ---------------------------------------------------------------------------
# K-functionals
# ---------------------------------------------------------------------------

def _min_inf(a: float, b: float) -> float:
    return b if math.isinf(a) else (a if math.isinf(b) else min(a, b))


def k_l1_discrete(t: float, x: Sequence[float], couple: DiscreteCouple) -> float:
    """``K(t, x)`` for a discrete weighted L^1 couple.

    ``sum_k mass_k * min(w0_k, t * w1_k) * |x_k|`` with ``min(inf, a) = a``.
    """
    if t <= 0:
        raise BadParam("t must be positive")
    if couple.p0 != 1 or couple.p1 != 1:
        raise BadParam("k_l1_discrete needs p0 = p1 = 1")
    x = np.abs(np.asarray(x, dtype=float))
    if x.shape != couple.masses.shape:
        raise BadParam("coefficient vector has the wrong length")
    w = np.minimum(couple.w0, t * couple.w1)
    terms = np.where(x == 0, 0.0, couple.masses * w * np.where(x == 0, 1.0, x))
    return float(terms.sum())


def _crossings(h: Callable[[float], float], domain: Interval, n_scan: int = 257) -> list[float]:
    lo, hi = domain.lo, domain.hi
    if domain.half_infinite:
        grid = lo + np.concatenate([[0.0], np.geomspace(1e-10, 1e10, n_scan)])
        grid = grid[1:]
    else:
        grid = np.linspace(lo, hi, n_scan + 2)[1:-1]
    vals = np.array([h(float(s)) for s in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(find_root(h, Interval(float(grid[i]), float(grid[i + 1]))))
    return roots


def k_l1_continuous(t: float, couple: ContinuousL1Couple, tol: Tolerance = DEFAULT_TOL) -> float:
    """``K(t, chi)`` for a continuous weighted L^1 couple and ``f = 1``.

    ``int min(w0, t w1) + atom mass * min(w0_atom, t w1_atom)``.  Crossing
    points of ``w0 = t w1`` are located first so the quadrature never has to
    resolve an unannounced kink.
    """
    if t <= 0:
        raise BadParam("t must be positive")
    w0, w1 = couple.w0, couple.w1

    def h(s: float) -> float:
        return w0(s) - t * w1(s)

    pts = list(couple.breakpoints) + _crossings(h, couple.domain)
    val = integrate(lambda s: min(w0(s), t * w1(s)), couple.domain, tol, points=pts)
    if couple.end_atom is not None:
        val += couple.end_atom.k_contribution(t)
    return val


def k_linf_weighted(t: float, x: Sequence[float], u: Sequence[float], v: Sequence[float]) -> float:
    """Exact ``K(t, x)`` for the couple of weighted l^inf norms.

    ``K(t, x) = inf_{x = y + z} max_k u_k |y_k| + t max_k v_k |z_k|``.  For a
    budget ``s = max u|y|`` the best ``z`` is the clipping residual, so

        K(t, x) = min_{0 <= s <= max u|x|} s + t max_k v_k (|x_k| - s/u_k)_+ .

    The objective is convex and piecewise linear in ``s``; its minimum is
    attained at one of the finitely many breakpoints, all of which are
    enumerated.
    """
    x = np.abs(np.asarray(x, dtype=float))
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (x.shape == u.shape == v.shape):
        raise BadParam("x, u, v must have the same shape")
    if np.any(u <= 0) or np.any(v <= 0):
        raise BadParam("weights must be positive")
    if t <= 0:
        return 0.0
    S = float(np.max(u * x, initial=0.0))
    if S == 0.0:
        return 0.0

    def obj(s: float) -> float:
        return s + t * float(np.max(v * np.maximum(x - s / u, 0.0)))

    cands = [0.0, S, *(u * x)]
    a = v * x          # z-part at s = 0
    b = v / u          # slope of the z-part in s
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            if b[i] != b[j]:
                s = (a[i] - a[j]) / (b[i] - b[j])
                if 0.0 < s < S:
                    cands.append(float(s))
    return min(obj(float(s)) for s in cands)


def k_from_e(e_curve: Callable[[float], float], t: float, s_domain: Interval,
             tol: Tolerance = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=500),
             candidates: Sequence[float] = ()) -> float:
    """``K(t) = inf_{s in s_domain} E(s) + t s`` for a convex nonincreasing E."""
    _, val = minimize_convex_1d(lambda s: e_curve(s) + t * s, s_domain, tol, candidates)
    return val


# ---------------------------------------------------------------------------
# E-functionals
# ---------------------------------------------------------------------------

def _unit_alpha(alpha: Sequence[float]) -> tuple[float, float]:
    a1, a2 = float(alpha[0]), float(alpha[1])
    if abs(math.hypot(a1, a2) - 1.0) > 1e-12:
        raise BadAlpha("alpha must be a unit vector")
    if a1 < 0 or a2 < 0:
        raise BadAlpha("alpha must lie in the closed first quadrant")
    return a1, a2


def e_y(t: float, alpha: Sequence[float]) -> float:
    """E-functional of ``alpha`` for ``(l^2_2, l^2_1)``.

    The second space is the first coordinate axis with the Euclidean norm.
    """
    a1, a2 = _unit_alpha(alpha)
    if t < 0:
        raise BadParam("t must be nonnegative")
    if t <= a1:
        return math.hypot(t - a1, a2)
    return a2


def e_x(t: float, a: float) -> float:
    """E-functional of ``(a, 1)`` for ``(l^2_2, l^inf_2)`` with ``a >= 1``."""
    if a < 1:
        raise BadParam("a must be at least 1")
    if t < 0:
        raise BadParam("t must be nonnegative")
    if t <= 1:
        return math.hypot(a - t, 1 - t)
    if t <= a:
        return a - t
    return 0.0


def e_l2_linf(t: float, x: Sequence[float]) -> float:
    """E-functional for ``(l^2, l^inf)``: the error of coordinatewise clipping."""
    y = np.abs(np.asarray(x, dtype=float))
    return float(np.sqrt(np.sum(np.maximum(y - t, 0.0) ** 2)))


# ---------------------------------------------------------------------------
# rigid rescaling
# ---------------------------------------------------------------------------

def rigid_transform(k: Callable[[float], float], c0: float, c1: float) -> Callable[[float], float]:
    """K-functional of the image under a rigid map with constants ``c0, c1``."""
    return lambda t: c0 * k(c0 * t / c1)


def rigid_k_identity_check(k_curve: Callable[[float], float], c0: float, c1: float,
                           grid: Sequence[float], tol: float = 1e-9) -> CheckReport:
    """Check that rigid rescaling preserves K-curve shape and is invertible."""
    if c0 <= 0 or c1 <= 0:
        raise BadParam("rigid constants must be positive")
    grid = np.asarray(grid, dtype=float)
    tk = rigid_transform(k_curve, c0, c1)
    back = rigid_transform(tk, 1.0 / c0, 1.0 / c1)
    rep = CheckReport("rigid K identity")
    curve = MonotoneCurve.from_function(tk, grid, K_CURVE)
    rep.extend(curve.check_shape(tol), "transformed")
    orig = np.array([k_curve(float(s)) for s in grid])
    rt = np.array([back(float(s)) for s in grid])
    err = float(np.max(np.abs(rt - orig) / np.maximum(1.0, np.abs(orig))))
    rep.add(Check.leq("round trip", err, tol))
    rep.results = {"c0": c0, "c1": c1, "round_trip_error": err}
    return rep


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)
