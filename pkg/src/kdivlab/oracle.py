"""Independent verification layer.

Two kinds of tools live here:

* Norm evaluation of sampled kernels directly from the pointwise norm
  conditions, with no reference to how a kernel was obtained.
* A support-function oracle for the minimal operator norm.  An operator
  ``T`` of norm ``<= c`` from the weighted L^1 model corresponds to a
  measurable selection ``(g0(x), g1(x))`` of planar convex sets
  ``S_x(c)``; ``T chi = target`` for some such operator iff ``target``
  lies in the Aumann integral ``int S_x(c) dx``.  That integral is the
  compact convex set whose support function is ``int h_{S_x(c)}``, so
  feasibility is a direction-wise inequality.  All sets are cones in ``c``
  (``S_x(c) = c S_x(1)``), which makes feasibility monotone in ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import hilbert as _h
from . import l2linf as _x
from .errors import BadParam, DomainMismatch, Infeasible
from .kernels import OperatorKernel
from .kfunc import ContinuousL1Couple
from .numerics import Tolerance, gauss_legendre_nodes, support_feasible, unit_directions
from .report import Check, CheckReport

X_SET, G_SET, Y_SET = "X-set", "G-set", "Y-set"
ORACLE_TOL = Tolerance(abs_tol=1e-10, rel_tol=0.0, max_iter=200)


# ---------------------------------------------------------------------------
# kernel norms
# ---------------------------------------------------------------------------

def kernel_norm_x(k: OperatorKernel, p: _x.XParam | float, c_probe: float | None = None) -> float:
    """Smallest ``c`` with ``|g_j| <= c`` and ``g0^2 + g1^2 <= c^2 w^2`` on the grid.

    ``c_probe`` is accepted for interface symmetry; the norm itself does not
    depend on it.
    """
    a = p.a if isinstance(p, _x.XParam) else float(p)
    t = np.minimum(k.s, np.nextafter(a, 0.0))
    w = _x.w_x_array(t, a) if a > 1 else np.full_like(t, math.sqrt(2.0))
    g0, g1 = np.abs(k.g0), np.abs(k.g1)
    if len(t) == 0:
        return 0.0
    return float(np.max(np.maximum(np.maximum(g0, g1), np.hypot(g0, g1) / w)))


def kernel_norm_g(k: OperatorKernel, g: _h.GCouple) -> float:
    """``max_j sup_s sqrt(g0^2 + r^j g1^2) / w_j``."""
    s = k.s
    m = s > 0
    if not np.any(m):
        return 0.0
    w0, w1 = _h.g_weights_array(s[m], g)
    g0, g1 = k.g0[m], k.g1[m]
    n0 = np.hypot(g0, g1) / w0
    n1 = np.sqrt(g0 ** 2 + g.r * g1 ** 2) / w1
    return float(max(n0.max(), n1.max()))


def kernel_apply(k: OperatorKernel, couple: ContinuousL1Couple) -> tuple[float, float]:
    """``T chi`` for the sampled kernel, by the trapezoid rule on its grid."""
    s = k.s
    lo, hi = couple.domain.lo, couple.domain.hi
    eps = 1e-12 * max(1.0, abs(lo), 0.0 if math.isinf(hi) else abs(hi))
    if len(s) and (s[0] < lo - eps or s[-1] > hi + eps):
        raise DomainMismatch("kernel grid extends beyond the couple's domain")
    i0, i1 = k.integrals()
    if k.atom_coeffs is not None:
        m = couple.end_atom.mass if couple.end_atom is not None else k.atom_mass
        i0 += k.atom_coeffs[0] * m
        i1 += k.atom_coeffs[1] * m
    return i0, i1


# ---------------------------------------------------------------------------
# pointwise sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointwiseConstraintSet:
    """One of the planar sets ``S_x(c)`` (arrays allowed for ``w0``, ``w1``).

    * ``X-set``: ``[0, c]^2`` intersected with the disk of radius ``c w0``.
    * ``G-set``: disk ``x^2 + y^2 <= (c w0)^2`` intersected with the
      ellipse ``x^2 + r y^2 <= (c w1)^2`` in the first quadrant.
    * ``Y-set``: the segment ``[0, c w0] x {0}`` (finite ``w1``) or the
      quarter disk of radius ``c w0`` (atom with ``w1 = inf``).
    """

    kind: str
    w0: np.ndarray | float
    w1: np.ndarray | float = 1.0
    r: float | None = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (X_SET, G_SET, Y_SET):
            raise BadParam(f"unknown set kind {self.kind!r}")
        if self.scale < 0:
            raise BadParam("scale must be nonnegative")
        if self.kind == G_SET and (self.r is None or self.r < 1):
            raise BadParam("G-sets need r >= 1 (canonicalize first)")

    def with_scale(self, c: float) -> "PointwiseConstraintSet":
        return PointwiseConstraintSet(self.kind, self.w0, self.w1, self.r, c)


def _positive_part(d: np.ndarray) -> np.ndarray:
    d = np.atleast_2d(np.asarray(d, dtype=float))
    return np.maximum(d, 0.0)


def _support_x(u1, u2, w):
    nrm = np.hypot(u1, u2)
    safe = np.where(nrm > 0, nrm, 1.0)
    px = w * u1 / safe
    py = w * u2 / safe
    e = np.minimum(np.sqrt(np.maximum(w * w - 1.0, 0.0)), 1.0)
    h = w * nrm
    h = np.where(px > 1.0, u1 + u2 * e, h)
    h = np.where(py > 1.0, u1 * e + u2, h)
    return h


def _support_g(u1, u2, w0, w1, r):
    nrm = np.hypot(u1, u2)
    safe = np.where(nrm > 0, nrm, 1.0)
    # disk maximizer and its ellipse feasibility
    cx, cy = w0 * u1 / safe, w0 * u2 / safe
    circ_ok = cx * cx + r * cy * cy <= w1 * w1 * (1 + 1e-14)
    h_circ = w0 * nrm
    # ellipse maximizer: semi-axes A = w1, B = w1/sqrt(r)
    A2, B2 = w1 * w1, w1 * w1 / r
    q = np.sqrt(A2 * u1 * u1 + B2 * u2 * u2)
    qs = np.where(q > 0, q, 1.0)
    ex, ey = A2 * u1 / qs, B2 * u2 / qs
    ell_ok = ex * ex + ey * ey <= w0 * w0 * (1 + 1e-14)
    h_ell = q
    # intersection point of the two boundaries
    if r > 1:
        xs = np.sqrt(np.maximum(r * w0 * w0 - w1 * w1, 0.0) / (r - 1.0))
        ys = np.sqrt(np.maximum(w1 * w1 - w0 * w0, 0.0) / (r - 1.0))
    else:
        xs, ys = w0 * u1 / safe, w0 * u2 / safe
    h_pt = u1 * xs + u2 * ys
    return np.where(circ_ok, h_circ, np.where(ell_ok, h_ell, np.maximum(h_pt, 0.0)))


def _support_matrix(kind: str, dirs: np.ndarray, w0, w1, r) -> np.ndarray:
    """Support values of unit-scale sets: shape ``(n_dirs, n_sets)``."""
    d = _positive_part(dirs)
    u1, u2 = d[:, 0:1], d[:, 1:2]
    w0 = np.atleast_1d(np.asarray(w0, dtype=float))[None, :]
    if kind == X_SET:
        return _support_x(u1, u2, w0)
    if kind == G_SET:
        w1 = np.atleast_1d(np.asarray(w1, dtype=float))[None, :]
        return _support_g(u1, u2, w0, w1, float(r))
    w1 = np.atleast_1d(np.asarray(w1, dtype=float))[None, :]
    return np.where(np.isinf(w1), w0 * np.hypot(u1, u2), np.minimum(w0, w1) * u1 + 0.0 * u2)


def support_value(s: PointwiseConstraintSet, direction: Sequence[float] | np.ndarray) -> float | np.ndarray:
    """Support function ``max_{p in S} <direction, p>`` in closed form.

    Negative direction components are replaced by zero: the sets lie in
    the first quadrant and contain the projections of their points onto
    the axes.
    """
    d = np.asarray(direction, dtype=float)
    single = d.ndim == 1
    vals = s.scale * _support_matrix(s.kind, d.reshape(-1, 2), s.w0, s.w1, s.r)
    if single:
        return float(vals[0, 0]) if vals.shape[1] == 1 else vals[0]
    return vals[:, 0] if vals.shape[1] == 1 else vals


def support_maximizer(s: PointwiseConstraintSet, direction: Sequence[float]) -> np.ndarray:
    """A point of ``S`` attaining the support value (for diagnostics)."""
    u = np.maximum(np.asarray(direction, dtype=float), 0.0)
    w0 = np.atleast_1d(np.asarray(s.w0, dtype=float))
    out = np.zeros((len(w0), 2))
    nrm = math.hypot(u[0], u[1])
    if nrm == 0:
        return out * s.scale
    if s.kind == X_SET:
        p = np.outer(w0, u / nrm)
        e = np.minimum(np.sqrt(np.maximum(w0 ** 2 - 1.0, 0.0)), 1.0)
        over_x = p[:, 0] > 1.0
        over_y = p[:, 1] > 1.0
        p[over_x] = np.column_stack([np.ones(over_x.sum()), e[over_x]])
        p[over_y] = np.column_stack([e[over_y], np.ones(over_y.sum())])
        return s.scale * p
    if s.kind == G_SET:
        w1 = np.atleast_1d(np.asarray(s.w1, dtype=float))
        r = float(s.r)
        circ = np.outer(w0, u / nrm)
        A2, B2 = w1 ** 2, w1 ** 2 / r
        q = np.sqrt(A2 * u[0] ** 2 + B2 * u[1] ** 2)
        ell = np.column_stack([A2 * u[0] / q, B2 * u[1] / q])
        pt = np.column_stack([np.sqrt(np.maximum(r * w0 ** 2 - w1 ** 2, 0) / (r - 1)),
                              np.sqrt(np.maximum(w1 ** 2 - w0 ** 2, 0) / (r - 1))]) if r > 1 else circ
        c_ok = circ[:, 0] ** 2 + r * circ[:, 1] ** 2 <= w1 ** 2 * (1 + 1e-14)
        e_ok = ell[:, 0] ** 2 + ell[:, 1] ** 2 <= w0 ** 2 * (1 + 1e-14)
        p = np.where(c_ok[:, None], circ, np.where(e_ok[:, None], ell, pt))
        return s.scale * p
    w1 = np.atleast_1d(np.asarray(s.w1, dtype=float))
    p = np.where(np.isinf(w1)[:, None], np.outer(w0, u / nrm), np.column_stack([np.minimum(w0, w1), 0 * w0]))
    return s.scale * p


# ---------------------------------------------------------------------------
# Aumann integral support functional
# ---------------------------------------------------------------------------

@dataclass
class SupportFunctional:
    """``u -> sum_k weights_k h_k(u)`` for a sampled family of unit-scale sets.

    ``nodes`` are the sample locations (for kernel recovery), ``weights``
    the quadrature weights; ``atoms`` are extra sets with their masses.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    r: float | None
    target: np.ndarray
    atoms: list[tuple[PointwiseConstraintSet, float]]
    chunk: int = 128

    def __call__(self, dirs: np.ndarray) -> np.ndarray:
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        out = np.empty(len(dirs))
        for i in range(0, len(dirs), self.chunk):
            d = dirs[i:i + self.chunk]
            out[i:i + self.chunk] = _support_matrix(self.kind, d, self.w0, self.w1, self.r) @ self.weights
        for s, mass in self.atoms:
            out += mass * _support_matrix(s.kind, dirs, s.w0, s.w1, s.r)[:, 0]
        return out


def _x_functional(a: float, n_panels: int = 2048, order: int = 8) -> SupportFunctional:
    if a < 1:
        raise BadParam("a must be at least 1")
    m = np.linspace(0.0, 1.0, n_panels + 1)
    edges = 1.0 - (1.0 - m) ** 2          # cluster panels toward the corner at 1
    x, w = gauss_legendre_nodes(edges, order)
    w0 = _x.w_x_array(x, a) if a > 1 else np.full_like(x, math.sqrt(2.0))
    atoms = []
    if a > 1:
        # w = 1 on [1, a): a single set with mass a - 1
        atoms.append((PointwiseConstraintSet(X_SET, np.array([1.0])), a - 1.0))
    return SupportFunctional(X_SET, x, w, w0, np.ones_like(w0), None, np.array([a, 1.0]), atoms)


def _g_functional(g: _h.GCouple, n_panels: int = 2048, order: int = 8,
                  tau: tuple[float, float] = (-25.0, 25.0)) -> SupportFunctional:
    # integrate in log s; the weights decay like s^-2, so the tails beyond
    # e^{+-25} contribute below 1e-10
    edges = np.linspace(tau[0], tau[1], n_panels + 1)
    tt, wt = gauss_legendre_nodes(edges, order)
    s = np.exp(tt)
    w0, w1 = _h.g_weights_array(s, g)
    return SupportFunctional(G_SET, s, wt * s, w0, w1, g.r, np.array([g.b, g.c]), [])


def _y_functional(alpha: _h.AlphaPoint, n_panels: int = 512, order: int = 8) -> SupportFunctional:
    a1, a2 = alpha.alpha1, alpha.alpha2
    x, w = gauss_legendre_nodes(np.linspace(0.0, a1, n_panels + 1), order)
    w0 = (a1 - x) / np.hypot(a1 - x, a2)
    atom = PointwiseConstraintSet(Y_SET, np.array([a2]), np.array([np.inf]))
    return SupportFunctional(Y_SET, x, w, w0, np.ones_like(w0), None, np.array([a1, a2]), [(atom, 1.0)])


def support_functional(couple_kind: str, params: dict) -> SupportFunctional:
    kind = couple_kind.upper()
    if kind == "X":
        return _x_functional(float(params["a"]))
    if kind == "Y":
        a = params.get("a")
        return _y_functional(_h.AlphaPoint(float(a)))
    if kind == "G":
        g = params["g"] if "g" in params else _h.GCouple.make(params["r"], params["b"], params["c"])
        return _g_functional(g)
    raise BadParam(f"unknown couple kind {couple_kind!r}")


@dataclass
class OracleResult:
    c_a: float
    gauge: float
    direction: np.ndarray
    margin: float
    bisection_steps: int
    functional: SupportFunctional

    def to_dict(self) -> dict:
        return {"c_a": self.c_a, "gauge": self.gauge, "direction": self.direction.tolist(),
                "margin_at_c_a": self.margin, "bisection_steps": self.bisection_steps}


def oracle_solve(couple_kind: str, params: dict, tol: Tolerance = ORACLE_TOL,
                 n_dirs: int = 4096, bracket: tuple[float, float] = (1.0, 2.0)) -> OracleResult:
    """Minimal ``c`` with ``target`` in the Aumann integral, by bisection on ``c``."""
    F = support_functional(couple_kind, params)
    target = F.target
    dirs = unit_directions(n_dirs)
    H = F(dirs)
    cache = {"H": H}

    def feasible(c: float) -> tuple[bool, float]:
        def h(d: np.ndarray) -> np.ndarray:
            d = np.atleast_2d(d)
            if d.shape == dirs.shape and np.array_equal(d, dirs):
                return c * cache["H"]
            return c * F(d)
        return support_feasible(h, target, n_dirs=n_dirs, abs_tol=1e-12)

    lo, hi = bracket
    ok_hi, _ = feasible(hi)
    if not ok_hi:
        raise Infeasible(f"target not reachable even at c={hi}")
    ok_lo, m_lo = feasible(lo)
    steps = 0
    if ok_lo:
        hi = lo
    else:
        while hi - lo > tol.abs_tol and steps < tol.max_iter:
            mid = 0.5 * (lo + hi)
            if feasible(mid)[0]:
                hi = mid
            else:
                lo = mid
            steps += 1
    pos = H > 0
    ratio = np.where(pos, (dirs @ target) / np.where(pos, H, 1.0), -np.inf)
    k = int(np.argmax(ratio))
    _, margin = feasible(hi)
    return OracleResult(hi, float(max(ratio[k], bracket[0])), dirs[k], margin, steps, F)


def oracle_c_a(couple_kind: str, params: dict, tol: Tolerance = ORACLE_TOL,
               n_dirs: int = 4096) -> float:
    """Minimal operator norm from the support-function feasibility test.

    ``couple_kind`` is ``"X"`` (``params = {"a": ...}``), ``"Y"``
    (``{"a": angle}``) or ``"G"`` (``{"r", "b", "c"}`` or ``{"g": GCouple}``).
    """
    return oracle_solve(couple_kind, params, tol, n_dirs).c_a


def oracle_kernel(res: OracleResult) -> tuple[OperatorKernel, CheckReport]:
    """Recover a kernel from the certifying direction (diagnostic only).

    At every node the support-maximizing point of ``S_x(c_a)`` for the tight
    direction is taken.  When the supporting face of the Aumann integral
    is a single point this selection integrates to the target.
    """
    F = res.functional
    u = res.direction
    base = PointwiseConstraintSet(F.kind, F.w0, F.w1, F.r, res.c_a)
    pts = support_maximizer(base, u)
    i0 = float(pts[:, 0] @ F.weights)
    i1 = float(pts[:, 1] @ F.weights)
    for s, mass in F.atoms:
        q = support_maximizer(s.with_scale(res.c_a), u)[0]
        i0 += mass * q[0]
        i1 += mass * q[1]
    rep = CheckReport("oracle_kernel")
    rep.results = {"image": [i0, i1], "target": F.target.tolist()}
    if F.kind == X_SET:
        rep.add(Check.geq("g0 >= g1", float(np.min(pts[:, 0] - pts[:, 1])), 0.0, 1e-9))
    # boundary membership: each selected point lies on the outer boundary
    scale = np.maximum(1e-300, _support_matrix(F.kind, np.atleast_2d(u), F.w0, F.w1, F.r)[0] * res.c_a)
    on_bdry = np.abs(pts @ np.maximum(u, 0) - scale) <= 1e-9 * np.maximum(1.0, scale)
    rep.add(Check("selection on the support boundary", bool(np.all(on_bdry)), float(np.mean(on_bdry)), 1.0))
    order = np.argsort(F.nodes)
    kern = OperatorKernel(F.nodes[order], pts[order, 0], pts[order, 1], label=f"oracle {F.kind}")
    return kern, rep


def oracle_report(couple_kind: str, params: dict, reference: float | None = None,
                  ref_tol: float = 1e-3) -> CheckReport:
    res = oracle_solve(couple_kind, params)
    rep = CheckReport(f"oracle_{couple_kind}")
    rep.add(Check.close("bisection matches sampled gauge", res.c_a, res.gauge, 1e-6))
    rep.add(Check.geq("margin at c_a", res.margin, 0.0, 1e-12))
    if reference is not None:
        rep.add(Check.close("agrees with closed form", res.c_a, reference, ref_tol))
    _, krep = oracle_kernel(res)
    rep.extend(krep)
    rep.results = res.to_dict() | {"kernel": krep.results}
    return rep
