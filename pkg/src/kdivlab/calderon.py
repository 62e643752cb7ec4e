"""Calderon-constant arithmetic for finite-dimensional couples.

Three groups of computations live here:

* the rearrangement inequality ``int_0^t f*^2 >= int_0^t g*^2`` that decides
  whether the Lorentz-Shimogaki construction applies to ``(l^2_n, l^inf_n)``,
* the two appendix instances (``n = 2`` exact Calderon, ``n = 8`` not),
* the weighted ``l^1`` / ``l^inf`` comparison behind the lower bound
  ``c_n >= n (sqrt(q) - 1) / (sqrt(q) + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadParam
from .kfunc import DiscreteCouple, e_l2_linf, k_l1_discrete, k_linf_weighted
from .numerics import decreasing_rearrangement
from .report import Check, CheckReport

MAJORIZATION_SLACK = 1e-12
POWERS_OF_Q = "powers_of_q"
DENSE = "dense"

# the 8-d instance
F8 = (3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
G8 = (2.0, 2.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class JinxxInstance:
    """The vector ``h_k = q^{k/2}``, ``k = 1..n``, in the couples weighted by ``q^{-k}``."""

    n: int
    q: float
    h: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise BadParam("n must be a positive integer")
        if not (self.q > 1.0 and math.isfinite(self.q)):
            raise BadParam("q must be a finite real > 1")
        k = np.arange(1, self.n + 1, dtype=float)
        object.__setattr__(self, "h", self.q ** (k / 2.0))

    @property
    def w1(self) -> np.ndarray:
        return self.q ** -np.arange(1, self.n + 1, dtype=float)

    @property
    def factor_printed(self) -> float:
        sq = math.sqrt(self.q)
        return (sq - 1.0) / (sq + 1.0)

    @property
    def factor_reciprocal(self) -> float:
        return 1.0 / self.factor_printed

    def lhs(self, t: float) -> float:
        couple = DiscreteCouple.unit(np.ones(self.n), self.w1)
        return k_l1_discrete(t, self.h, couple)

    def k_inf(self, t: float) -> float:
        return k_linf_weighted(t, self.h, np.ones(self.n), self.w1)


@dataclass
class MajorizationReport:
    t_grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    verdict: bool
    integer_verdict: bool
    first_failure: float | None = None

    @property
    def consistent(self) -> bool:
        """Grid and integer-checkpoint verdicts agree (both sides are affine per cell)."""
        return self.verdict == self.integer_verdict

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "integer_verdict": self.integer_verdict,
                "first_failure": self.first_failure,
                "worst_gap": float(np.min(self.lhs - self.rhs)) if len(self.lhs) else 0.0}


def _pad(f: Sequence[float], g: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    f = np.abs(np.asarray(f, dtype=float).ravel())
    g = np.abs(np.asarray(g, dtype=float).ravel())
    n = max(len(f), len(g))
    return np.pad(f, (0, n - len(f))), np.pad(g, (0, n - len(g)))


def cumulative_sq(x: Sequence[float], t: float) -> float:
    """``int_0^t (x*)^2`` for the step function taking the value ``x*_k`` on ``[k-1, k)``."""
    if t < 0:
        raise BadParam("t must be nonnegative")
    sq = decreasing_rearrangement(np.abs(np.asarray(x, dtype=float))) ** 2
    n = len(sq)
    m = int(min(math.floor(t), n))
    total = float(np.sum(sq[:m]))
    if m < n:
        total += (t - m) * float(sq[m])
    return total


def _cum_many(x: np.ndarray, ts: np.ndarray) -> np.ndarray:
    sq = decreasing_rearrangement(x) ** 2
    cs = np.concatenate([[0.0], np.cumsum(sq)])
    n = len(sq)
    m = np.minimum(np.floor(ts), n).astype(int)
    frac = np.where(m < n, ts - m, 0.0)
    nxt = np.concatenate([sq, [0.0]])[m]
    return cs[m] + frac * nxt


def majorization_check(f: Sequence[float], g: Sequence[float], grid: int = 1001) -> MajorizationReport:
    """Compare ``int_0^t f*^2`` with ``int_0^t g*^2`` on a dense grid and at integers.

    Both sides are affine on every cell ``[k-1, k]`` and constant after
    ``n``, so the integer points ``0..n`` decide the question; the dense grid
    is an independent confirmation.
    """
    fa, ga = _pad(f, g)
    n = len(fa)
    slack = MAJORIZATION_SLACK * max(1.0, float(np.sum(fa ** 2)), float(np.sum(ga ** 2)))
    ts = np.linspace(0.0, n + 1.0, max(int(grid), 2))
    lhs, rhs = _cum_many(fa, ts), _cum_many(ga, ts)
    ok = lhs >= rhs - slack
    ints = np.arange(0, n + 1, dtype=float)
    iok = _cum_many(fa, ints) >= _cum_many(ga, ints) - slack
    first = None
    if not iok.all():
        first = float(ints[np.argmin(iok)])
    elif not ok.all():
        first = float(ts[np.argmin(ok)])
    return MajorizationReport(ts, lhs, rhs, bool(ok.all()), bool(iok.all()), first)


def _e_dominance(f: np.ndarray, g: np.ndarray, ts: np.ndarray, slack: float) -> tuple[bool, float, float]:
    """Return (holds, worst gap E(g) - E(f), where)."""
    gaps = np.array([e_l2_linf(t, g) - e_l2_linf(t, f) for t in ts])
    i = int(np.argmax(gaps))
    return bool(gaps[i] <= slack), float(gaps[i]), float(ts[i])


def exact_calderon_check_2d(f: Sequence[float], g: Sequence[float], grid: int = 1000,
                            slack: float = 1e-12) -> CheckReport:
    """Check the Lorentz-Shimogaki hypothesis chain for ``(l^2_2, l^inf_2)``.

    (i) ``E(t, g) <= E(t, f)`` on a dense grid, (ii) ``f*_1 >= g*_1`` and
    (iii) the squared-rearrangement majorization.  When (i) holds, (ii) and
    (iii) follow in two dimensions; the report records all three.
    """
    fa, ga = _pad(f, g)
    if len(fa) != 2:
        raise BadParam("exact_calderon_check_2d is for 2-vectors")
    top = 1.05 * max(float(fa.max()), float(ga.max()), 1e-300)
    ts = np.unique(np.concatenate([np.linspace(0.0, top, grid), fa, ga,
                                   [(fa.max() + ga.max()) / 2]]))
    rep = CheckReport("exact calderon 2d")
    holds, gap, where = _e_dominance(fa, ga, ts, slack)
    rep.add(Check("E dominance", holds, gap, 0.0, slack, f"worst at t={where:.6g}"))
    f1, g1 = float(fa.max()), float(ga.max())
    rep.add(Check.geq("largest coordinate", f1, g1, slack))
    maj = majorization_check(fa, ga, grid)
    rep.add(Check("majorization", maj.verdict, maj.first_failure, None, MAJORIZATION_SLACK))
    rep.add(Check("majorization grid agrees with checkpoints", maj.consistent,
                  maj.verdict, maj.integer_verdict))
    rep.results = {"f": fa, "g": ga,
                   "orbit_condition": rep.passed,
                   "verdict": ("orbit condition satisfied, Lorentz-Shimogaki applies"
                               if rep.passed else "hypothesis fails")}
    return rep


def forced_functional(f: Sequence[float], g: Sequence[float], rows: int) -> np.ndarray:
    """Functional forced by ``Tf = g`` through the Cauchy-Schwarz equality case.

    ``lambda(h) = (1/rows) sum_{i <= rows} (Th)_i`` obeys
    ``lambda(h) <= ||h||_2 / sqrt(rows)``; if ``lambda(f)`` attains that bound
    then ``lambda`` is a multiple of ``f``.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    val = float(np.sum(g[:rows])) / rows
    return (val / float(f @ f)) * f


def non_calderon_certificate_8d(f: Sequence[float] = F8, g: Sequence[float] = G8,
                                grid: int = 3501, slack: float = 1e-8) -> CheckReport:
    """Certificate that ``(l^2_8, l^inf_8)`` is not an exact Calderon couple.

    ``slack`` absorbs rounding at the two equality points ``t = 0, 1`` of the
    E-comparison.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (8,) or g.shape != (8,):
        raise BadParam("the certificate is for 8-vectors")
    rep = CheckReport("non calderon 8d")
    ts = np.linspace(0.0, 3.5, grid)
    holds, gap, where = _e_dominance(f, g, ts, slack)
    rep.add(Check("E dominance on grid", holds, gap, 0.0, slack, f"worst at t={where:.6g}"))
    bp = np.array([0.0, 1.0, 2.0, 3.0])
    bholds, bgap, _ = _e_dominance(f, g, bp, slack)
    rep.add(Check("E dominance at breakpoints", bholds, bgap, 0.0, slack))
    rows = 4
    lam = forced_functional(f, g, rows)
    lam_f = float(lam @ f)
    target = float(np.sum(g[:rows])) / rows
    rep.add(Check.close("lambda(f) from Tf = g", lam_f, target, 1e-12))
    # equality in 2 lambda(h) <= ||h||_2 at h = f
    rep.add(Check.close("Cauchy-Schwarz equality at f", 2.0 * lam_f, float(np.linalg.norm(f)), slack))
    l1 = float(np.sum(np.abs(lam)))
    rep.add(Check.geq("sum |lambda| exceeds 1", l1, 1.0 + slack))
    maj = majorization_check(f, g)
    rep.results = {
        "E_f_at_1": e_l2_linf(1.0, f), "E_g_at_1": e_l2_linf(1.0, g),
        "E_f_at_2.5": e_l2_linf(2.5, f), "E_g_at_2.5": e_l2_linf(2.5, g),
        "norm_f": float(np.linalg.norm(f)),
        "lambda": lam, "lambda_times_8": 8.0 * lam, "sum_abs_lambda": l1,
        "majorization": maj.to_dict(),
        "E_dominance_holds": holds and bholds,
        "worst_E_gap": gap, "worst_E_gap_t": where,
        "verdict": ("not an exact Calderon couple" if rep.passed else
                    "certificate incomplete: " + ", ".join(c.name for c in rep.failures())),
    }
    return rep


def appendix_report() -> CheckReport:
    rep = CheckReport("appendix")
    d2 = exact_calderon_check_2d((2.0, 1.0), (1.5, 1.5))
    d8 = non_calderon_certificate_8d()
    rep.extend(d2, "dim2")
    rep.extend(d8, "dim8")
    rep.results = {"dim2": d2.results, "dim8": d8.results}
    return rep


def _t_grid(inst: JinxxInstance, mode: str, n_dense: int = 100) -> np.ndarray:
    if mode == POWERS_OF_Q:
        return inst.q ** np.arange(0, inst.n + 1, dtype=float)
    if mode == DENSE:
        return np.geomspace(inst.q ** -1, inst.q ** (inst.n + 1), n_dense)
    raise BadParam(f"unknown t-grid mode {mode!r}")


def jinxx_check(inst: JinxxInstance, t_grid_mode: str = POWERS_OF_Q, rtol: float = 1e-12) -> CheckReport:
    """Compare ``sum_k h_k min(1, q^-k t)`` against the weighted l^inf K-functional.

    Orientation A uses the factor ``(sqrt q - 1)/(sqrt q + 1)``, orientation B
    its reciprocal.  Both are always reported.
    """
    ts = _t_grid(inst, t_grid_mode)
    lhs = np.array([inst.lhs(float(t)) for t in ts])
    rhs = np.array([inst.k_inf(float(t)) for t in ts])
    ratio = lhs / rhs
    worst = float(ratio.max())
    at = float(ts[int(ratio.argmax())])
    fa, fb = inst.factor_printed, inst.factor_reciprocal
    ok_a = bool(np.all(lhs <= fa * rhs * (1 + rtol)))
    ok_b = bool(np.all(lhs <= fb * rhs * (1 + rtol)))
    rep = CheckReport(f"jinxx n={inst.n} q={inst.q:g} {t_grid_mode}")
    rep.add(Check.leq("orientation B", worst, fb, rtol * fb,
                      note="factor (sqrt q + 1)/(sqrt q - 1)"))
    rep.results = {"n": inst.n, "q": inst.q, "mode": t_grid_mode,
                   "orientation_A_holds": ok_a, "orientation_B_holds": ok_b,
                   "factor_A": fa, "factor_B": fb,
                   "worst_ratio": worst, "worst_t": at,
                   "t": ts, "lhs": lhs, "k_inf": rhs}
    return rep


def weighted_norm(x: Sequence[float], q: float, r: float, p: float) -> float:
    """``||x||`` in ``l^{p,r}_n(q)``: the l^p norm of ``q^{-k r} x_k``, ``k = 1..n``."""
    x = np.asarray(x, dtype=float)
    k = np.arange(1, len(x) + 1, dtype=float)
    y = np.abs(q ** (-k * r) * x)
    if math.isinf(p):
        return float(y.max(initial=0.0))
    return float(np.sum(y ** p) ** (1.0 / p))


def calderon_lower_bound(n: int, q: float) -> float:
    """``n (sqrt q - 1)/(sqrt q + 1)``."""
    inst = JinxxInstance(n, q)
    sq = math.sqrt(inst.q)
    return n * (sq - 1.0) / (sq + 1.0)


def calderon_bound_report(n: int, q: float) -> CheckReport:
    inst = JinxxInstance(n, q)
    n1 = weighted_norm(inst.h, q, 0.5, 1)
    ninf = weighted_norm(inst.h, q, 0.5, math.inf)
    bound = calderon_lower_bound(n, q)
    limit = calderon_lower_bound(n, 1e8)
    rep = CheckReport("calderon bound")
    rep.add(Check.close("norm in l^{1,1/2}", n1, float(n), 1e-12 * n, rel=False))
    rep.add(Check.close("norm in l^{inf,1/2}", ninf, 1.0, 1e-12))
    rep.add(Check.leq("bound below n", bound, float(n)))
    rep.add(Check.geq("q=1e8 limit near n", limit, n * (1 - 3e-4)))
    rep.results = {"n": n, "q": q, "bound": bound, "limit_q_1e8": limit,
                   "bracket_real": [n / math.sqrt(2.0), float(n)]}
    return rep


__all__ = [
    "JinxxInstance", "MajorizationReport", "cumulative_sq", "majorization_check",
    "exact_calderon_check_2d", "non_calderon_certificate_8d", "appendix_report",
    "forced_functional", "jinxx_check", "weighted_norm", "calderon_lower_bound",
    "calderon_bound_report", "POWERS_OF_Q", "DENSE", "F8", "G8",
]
