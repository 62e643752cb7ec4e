from __future__ import annotations

import math

import numpy as np
import pytest

from kdivlab.errors import BadParam
from kdivlab.hilbert import TWO_OVER_SQRT3, AlphaPoint, GCouple, y_c_a
from kdivlab.kernels import OperatorKernel
from kdivlab.l2linf import solve_x, x_couple
from kdivlab.oracle import (G_SET, X_SET, Y_SET, PointwiseConstraintSet, kernel_apply,
                            kernel_norm_g, kernel_norm_x, oracle_c_a, oracle_kernel,
                            oracle_report, oracle_solve, support_maximizer, support_value)

# independent second-order cone program values for the couple X
CONE = {1.25: 1.0126364967, 2.0: 1.0191521232}


class TestSupportSets:
    def test_x_set_square_corner(self):
        # w large: the square [0, 1]^2 wins, h(u) = u1 + u2 for u >= 0
        s = PointwiseConstraintSet(X_SET, 10.0)
        assert support_value(s, (0.6, 0.8)) == pytest.approx(1.4)

    def test_x_set_disk(self):
        s = PointwiseConstraintSet(X_SET, 1.0)
        assert support_value(s, (0.6, 0.8)) == pytest.approx(1.0)

    def test_negative_directions_give_zero(self):
        s = PointwiseConstraintSet(X_SET, 1.0)
        assert support_value(s, (-1.0, 0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_g_set_matches_brute_force(self):
        r, w0, w1 = 4.0, 1.0, 1.5
        s = PointwiseConstraintSet(G_SET, w0, w1, r)
        th = np.linspace(0, math.pi / 2, 20001)
        rad = np.linspace(0, 1.0, 2001)
        x = np.outer(rad, np.cos(th)).ravel()
        y = np.outer(rad, np.sin(th)).ravel()
        ok = x ** 2 + r * y ** 2 <= w1 ** 2
        u = np.array([0.3, 0.95]) / math.hypot(0.3, 0.95)
        assert support_value(s, u) == pytest.approx(float(np.max(u[0] * x[ok] + u[1] * y[ok])), abs=2e-4)

    def test_maximizer_attains_support(self):
        s = PointwiseConstraintSet(G_SET, 1.0, 1.5, 4.0)
        u = np.array([0.2, 0.98])
        p = support_maximizer(s, u)[0]
        assert float(p @ u) == pytest.approx(float(support_value(s, u)), abs=1e-12)

    def test_y_atom_is_quarter_disk(self):
        s = PointwiseConstraintSet(Y_SET, 0.5, math.inf)
        assert support_value(s, (0.6, 0.8)) == pytest.approx(0.5)

    @pytest.mark.parametrize("kw", [dict(kind="Z", w0=1.0), dict(kind=G_SET, w0=1.0, r=0.5),
                                    dict(kind=X_SET, w0=1.0, scale=-1.0)])
    def test_invalid_sets(self, kw):
        with pytest.raises(BadParam):
            PointwiseConstraintSet(**kw)


class TestOracleValues:
    def test_x_trivial(self):
        assert oracle_c_a("X", {"a": 1.0}) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("a", sorted(CONE))
    def test_x_matches_cone_program(self, a):
        assert oracle_c_a("X", {"a": a}) == pytest.approx(CONE[a], abs=1e-7)

    def test_x_matches_corrected_solver(self):
        assert oracle_c_a("X", {"a": 2.0}) == pytest.approx(solve_x(2.0, variant="corrected").c_a, abs=1e-7)

    def test_x_below_printed_table(self):
        # the printed row at a = 1.25 is 1.0304, above the true minimal norm
        assert oracle_c_a("X", {"a": 1.25}) < 1.0304 - 1e-3

    @pytest.mark.parametrize("a", [math.pi / 6, math.pi / 4, 1.2])
    def test_y_matches_closed_form(self, a):
        assert oracle_c_a("Y", {"a": a}) == pytest.approx(y_c_a(AlphaPoint(a)), abs=1e-7)

    def test_y_maximum(self):
        assert oracle_c_a("Y", {"a": math.pi / 6}) == pytest.approx(TWO_OVER_SQRT3, abs=1e-7)

    def test_g_bracket(self):
        c = oracle_c_a("G", {"r": 4.0, "b": math.sqrt(3) / 2, "c": 0.5})
        assert 1.0 < c < math.sqrt(2)

    def test_unknown_couple(self):
        with pytest.raises(BadParam):
            oracle_c_a("Q", {})


class TestOracleReport:
    def test_x_report(self):
        rep = oracle_report("X", {"a": 2.0}, reference=CONE[2.0])
        assert rep.passed, [c.name for c in rep.failures()]
        assert rep.results["margin_at_c_a"] >= 0.0

    def test_recovered_kernel_integrates_to_target(self):
        res = oracle_solve("Y", {"a": math.pi / 4})
        _, rep = oracle_kernel(res)
        assert rep.passed
        # one sampled direction out of 4096 certifies the face, so the
        # selection is only accurate to about the angular spacing
        assert rep.results["image"] == pytest.approx(rep.results["target"], abs=1e-3)


class TestKernelNorms:
    def test_corrected_x_kernel(self):
        sol = solve_x(2.0, variant="corrected")
        assert kernel_norm_x(sol.kernel, 2.0) == pytest.approx(sol.c_a, abs=1e-9)
        assert kernel_apply(sol.kernel, x_couple(2.0)) == pytest.approx((2.0, 1.0), abs=1e-6)

    def test_printed_x_kernel_misses_target(self):
        sol = solve_x(2.0)
        i0, i1 = kernel_apply(sol.kernel, x_couple(2.0))
        assert i0 == pytest.approx(2.0, abs=1e-6)
        assert abs(i1 - 1.0) > 1e-2

    def test_g_kernel_norm_of_identity_like_kernel(self):
        g = GCouple.make(4.0, math.sqrt(3) / 2, 0.5)
        s = np.geomspace(1e-3, 1e3, 50)
        from kdivlab.hilbert import g_weights_array
        w0, w1 = g_weights_array(s, g)
        k = OperatorKernel(s, 0.5 * w0, np.zeros_like(s), label="test")
        assert kernel_norm_g(k, g) == pytest.approx(max(0.5, float(np.max(0.5 * w0 / w1))))
