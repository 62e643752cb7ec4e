"""The ten acceptance criteria, shared by the test-suite and ``kdivlab check-all``.

Each criterion is a function returning a :class:`CheckReport`; expected
values are read from the golden data file so that a corrupted file is
detected as a failure.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import calderon as _c
from . import hilbert as _h
from . import l2linf as _x
from . import oracle as _o
from .kfunc import (DiscreteCouple, E_CURVE, K_CURVE, MonotoneCurve, e_l2_linf, e_x, e_y,
                    k_from_e, k_l1_continuous, k_l1_discrete, k_linf_weighted)
from .numerics import Interval
from .report import Check, CheckReport

G_PARAMS = (
    (4.0, math.sqrt(3.0) / 2.0, 0.5),
    (100.0, math.sqrt(2.0) / 2.0, math.sqrt(2.0) / 2.0),
    (1.5, 0.6, 0.8),
)


def load_golden(path: str | Path | None = None) -> dict:
    """Read the golden values; ``path=None`` uses the packaged file."""
    if path is None:
        text = resources.files("kdivlab").joinpath("data/golden.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _timed(rep: CheckReport, t0: float, limit: float | None) -> CheckReport:
    dt = time.perf_counter() - t0
    rep.results["runtime_s"] = dt
    if limit is not None:
        rep.add(Check.leq(f"runtime < {limit:g} s", dt, limit))
    return rep


def criterion_1(golden: dict) -> CheckReport:
    gy = golden["gamma_y"]
    t0 = time.perf_counter()
    g = _h.gamma_y(4096)
    rep = CheckReport("gamma(Y) = 2/sqrt(3)")
    rep.add(Check.close("max C_a", g.results["gamma"], gy["value"], gy["tol"]))
    rep.add(Check.close("argmax", g.results["argmax_a"], gy["argmax"], gy["argmax_tol"]))
    rep.add(Check.leq("every grid C_a <= 2/sqrt(3)", float(np.max(g.results["C_a"])),
                      _h.TWO_OVER_SQRT3, 1e-12))
    rep.results = {"gamma": g.results["gamma"], "argmax_a": g.results["argmax_a"]}
    return _timed(rep, t0, 10.0)


def criterion_2(golden: dict, jobs: int = 1) -> CheckReport:
    tab = golden["x_table"]
    t0 = time.perf_counter()
    rep = CheckReport("x table reproduction")
    rows = []
    for name, a, xi, c in tab["rows"]:
        sol = _x.solve_x(float(a), build_kernel=False)
        rep.add(Check.close(f"a={name} xi", sol.xi_a, xi, tab["xi_tol"]))
        rep.add(Check.close(f"a={name} c_a", sol.c_a, c, tab["c_a_tol"]))
        rows.append((name, sol.xi_a, sol.c_a))
    rep.results = {"rows": rows}
    return _timed(rep, t0, 30.0)


def criterion_3(golden: dict, jobs: int = 1) -> CheckReport:
    gx, uc = golden["gamma_x"], golden["upper_constant"]
    g = _x.gamma_x_estimate(Interval(1.05, 4.0), steps=64, jobs=jobs)
    rep = CheckReport("gamma(X) bracket")
    rep.add(Check.close("max c_a", g.results["gamma_estimate"], gx["value"], gx["tol"]))
    rep.add(Check("every c_a > 1", bool(np.all(np.array(g.results["c_a"]) > 1.0)),
                  float(np.min(g.results["c_a"])), 1.0))
    rep.add(Check.close("upper constant", _x.UPPER_CONSTANT, uc["value"], uc["tol"]))
    rep.add(Check("sweep without errors", not g.results["errors"], len(g.results["errors"]), 0))
    rep.results = {"gamma_estimate": g.results["gamma_estimate"], "argmax_a": g.results["argmax_a"],
                   "upper_constant": _x.UPPER_CONSTANT}
    return rep


def criterion_4(golden: dict) -> CheckReport:
    rb = golden["remark_bad"]
    v = _h.remark_bad_integral(rb["r"], rb["b"], rb["c"])
    rep = CheckReport("0.6896 quadrature")
    rep.add(Check.close("integral", v, rb["value"], rb["tol"]))
    rep.add(Check.leq("below 1/sqrt(2)", v, 1.0 / math.sqrt(2.0)))
    rep.results = {"x_integral": v}
    return rep


def criterion_5(golden: dict) -> CheckReport:
    rep = CheckReport("couple G identities")
    ts = np.geomspace(1e-3, 1e3, 25)
    worst = {}
    for r, b, c in G_PARAMS:
        g = _h.GCouple.make(r, b, c)
        tag = f"r={r:g}"
        eq = _h.g_k_equality_check(g, ts)
        rep.extend(eq, f"{tag} K equality")
        rep.extend(_h.g_weight_integrals(g), f"{tag} weight integrals")
        rep.extend(_h.g_bugly_check(g), f"{tag} intersection integrals")
        worst[tag] = eq.results["max_rel"]
    rep.results = {"max_rel_discrepancy": worst}
    return rep


def criterion_6(golden: dict) -> CheckReport:
    t0 = time.perf_counter()
    rep = CheckReport("oracle equivalence")
    vals = {}
    for a in (1.25, 2.0, 3.0):
        oc = _o.oracle_c_a("X", {"a": a})
        ref = _x.solve_x(a, build_kernel=False).c_a
        rep.add(Check.close(f"X a={a:g} vs solve_x", oc, ref, 1e-3))
        vals[f"X a={a:g}"] = {"oracle": oc, "solve_x": ref,
                              "solve_x_corrected": _x.solve_x(a, variant="corrected",
                                                              build_kernel=False).c_a}
    for name, ang in (("pi/6", math.pi / 6), ("pi/4", math.pi / 4)):
        oc = _o.oracle_c_a("Y", {"a": ang})
        ref = _h.y_c_a(_h.AlphaPoint(ang))
        rep.add(Check.close(f"Y a={name} vs y_c_a", oc, ref, 1e-3))
        vals[f"Y a={name}"] = {"oracle": oc, "y_c_a": ref}
    tr = golden["oracle_x_trivial"]
    oc1 = _o.oracle_c_a("X", {"a": tr["a"]})
    rep.add(Check.close("X a=1 trivial", oc1, tr["value"], tr["tol"]))
    vals["X a=1"] = oc1
    rep.results = vals
    return _timed(rep, t0, 120.0)


def criterion_7(golden: dict, n_random: int = 100, seed: int = 20240611) -> CheckReport:
    ap = golden["appendix"]
    rep = CheckReport("appendix certificates")
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n_random):
        f = rng.uniform(0.0, 5.0, 2)
        g = f * rng.uniform(0.0, 1.0, 2)
        if not _c.exact_calderon_check_2d(f, g).passed:
            bad.append(i)
    rep.add(Check("2d shrinkage instances", not bad, len(bad), 0))
    cert = _c.non_calderon_certificate_8d()
    rep.extend(cert, "8d")
    lam8 = cert.results["lambda_times_8"]
    rep.add(Check.close("8d forced functional is f/8",
                        float(np.max(np.abs(np.asarray(lam8) - np.asarray(ap["lambda_times_8"])))),
                        0.0, 1e-12))
    rep.add(Check.close("8d sum |lambda|", cert.results["sum_abs_lambda"], ap["sum_abs_lambda"], 1e-12))
    rep.results = {"dim8": cert.results, "failed_2d": bad}
    return rep


def criterion_8(golden: dict) -> CheckReport:
    ji, cb = golden["jinxx_instance"], golden["calderon_bound"]
    rep = CheckReport("jinxx finding")
    worst = {}
    a_failures_n1 = 0
    for q in (2.0, 4.0, 9.0, 100.0):
        for n in range(1, 7):
            inst = _c.JinxxInstance(n, q)
            for mode in (_c.POWERS_OF_Q, _c.DENSE):
                r = _c.jinxx_check(inst, mode)
                rep.extend(r)
                worst[r.name] = r.results["worst_ratio"]
                if n == 1 and not r.results["orientation_A_holds"]:
                    a_failures_n1 += 1
    rep.add(Check("orientation A fails at n=1 for every q and grid", a_failures_n1 == 8,
                  a_failures_n1, 8))
    inst = _c.JinxxInstance(ji["n"], ji["q"])
    rep.add(Check.close("instance LHS", inst.lhs(ji["t"]), ji["lhs"], 1e-12))
    rep.add(Check.close("instance K_inf", inst.k_inf(ji["t"]), ji["k_inf"], 1e-12))
    rep.add(Check.close("lower bound n=3 q=9", _c.calderon_lower_bound(cb["n"], cb["q"]), cb["value"], 1e-12))
    rep.results = {"worst_ratios": worst}
    return rep


def _round_trip(exact: Callable[[float], float], from_e: Callable[[float], float],
                ts: np.ndarray) -> float:
    errs = [abs(exact(float(t)) - from_e(float(t))) / max(1.0, abs(exact(float(t)))) for t in ts]
    return float(max(errs))


def criterion_9(golden: dict, tol: float = 1e-9) -> CheckReport:
    rep = CheckReport("curve shapes")
    ts = np.geomspace(1e-2, 1e2, 49)
    k_curves: dict[str, Callable[[float], float]] = {}
    e_curves: dict[str, tuple[Callable[[float], float], np.ndarray]] = {}
    for a in (1.0, 1.25, 2.0, 3.0):
        k_curves[f"X a={a:g}"] = lambda t, a=a: _x.k_x(t, a)
        e_curves[f"X a={a:g}"] = (lambda s, a=a: e_x(s, a), np.linspace(0.0, a + 0.5, 97))
    for ang in (math.pi / 6, math.pi / 4, 1.0):
        al = _h.AlphaPoint(ang)
        k_curves[f"Y a={ang:.4f}"] = lambda t, al=al: _h.k_y(t, al)
        e_curves[f"Y a={ang:.4f}"] = (lambda s, al=al: e_y(s, al.vector), np.linspace(0.0, 1.2, 97))
    for r, b, c in G_PARAMS:
        g = _h.GCouple.make(r, b, c)
        k_curves[f"G r={r:g}"] = lambda t, g=g: _h.g_k_boundary(t, g)
    cpl = DiscreteCouple.unit([1.0, 2.0, 0.5], [3.0, 1.0, 0.25])
    k_curves["discrete l1"] = lambda t: k_l1_discrete(t, [1.0, -2.0, 3.0], cpl)
    k_curves["weighted linf"] = lambda t: k_linf_weighted(t, [2.0, 4.0, 8.0], [1.0, 1.0, 1.0],
                                                           [0.25, 1 / 16, 1 / 64])
    e_curves["l2 linf 8d"] = (lambda s: e_l2_linf(s, _c.F8), np.linspace(0.0, 3.5, 141))
    for name, fn in k_curves.items():
        rep.extend(MonotoneCurve.from_function(fn, ts, K_CURVE).check_shape(tol), f"K {name}")
    for name, (fn, grid) in e_curves.items():
        rep.extend(MonotoneCurve.from_function(fn, grid, E_CURVE).check_shape(tol), f"E {name}")
    errs = {}
    for a in (1.25, 2.0, 3.0):
        couple = _x.x_couple(a)
        err = _round_trip(lambda t: k_l1_continuous(t, couple),
                          lambda t: k_from_e(lambda s: e_x(s, a), t, Interval(0.0, a), candidates=(1.0, a)),
                          ts)
        errs[f"X a={a:g}"] = err
        rep.add(Check.leq(f"X a={a:g} k_from_e round trip", err, 1e-7))
    for ang in (math.pi / 6, math.pi / 4, 1.0):
        al = _h.AlphaPoint(ang)
        couple = _h.y_weights(al)
        err = _round_trip(lambda t: k_l1_continuous(t, couple), lambda t: _h.k_y(t, al), ts)
        errs[f"Y a={ang:.4f}"] = err
        rep.add(Check.leq(f"Y a={ang:.4f} k_from_e round trip", err, 1e-7))
    rep.results = {"round_trip_errors": errs}
    return rep


def criterion_10(golden: dict) -> CheckReport:
    rep = CheckReport("x kernel structure")
    out = {}
    for name, a, _, _ in golden["x_table"]["rows"]:
        sol = _x.solve_x(float(a))
        rep.extend(sol.kernel_report, f"a={name}")
        out[name] = {"int_g0": sol.kernel_report.results["int_g0"],
                     "int_g1": sol.kernel_report.results["int_g1"],
                     "theta_a": sol.theta_a}
    rep.results = {"variant": "printed", "moments": out}
    return rep


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[..., CheckReport]


CRITERIA = (
    Criterion(1, "gamma(Y) = 2/sqrt(3)", criterion_1),
    Criterion(2, "x table reproduction", criterion_2),
    Criterion(3, "gamma(X) bracket", criterion_3),
    Criterion(4, "0.6896 quadrature", criterion_4),
    Criterion(5, "couple G identity suite", criterion_5),
    Criterion(6, "oracle equivalence", criterion_6),
    Criterion(7, "appendix certificates", criterion_7),
    Criterion(8, "jinxx orientation finding", criterion_8),
    Criterion(9, "curve-shape suite", criterion_9),
    Criterion(10, "x kernel structure", criterion_10),
)


def run_criterion(number: int, golden: dict | None = None) -> CheckReport:
    golden = load_golden() if golden is None else golden
    crit = CRITERIA[number - 1]
    rep = crit.run(golden)
    rep.name = f"{crit.number}. {crit.title}"
    return rep


def summary_line(rep: CheckReport) -> str:
    status = "PASS" if rep.passed else "FAIL"
    line = f"[{status}] criterion {rep.name}"
    if not rep.passed:
        names = [c.name for c in rep.failures()]
        more = f" (+{len(names) - 4} more)" if len(names) > 4 else ""
        line += ": " + "; ".join(names[:4]) + more
    return line


def run_all(golden: dict | None = None) -> list[CheckReport]:
    golden = load_golden() if golden is None else golden
    return [run_criterion(c.number, golden) for c in CRITERIA]


__all__ = ["CRITERIA", "Criterion", "load_golden", "run_criterion", "run_all", "summary_line",
           "G_PARAMS"] + [f"criterion_{i}" for i in range(1, 11)]
