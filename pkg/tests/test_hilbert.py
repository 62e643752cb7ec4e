from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdivlab.errors import BadAlpha, BadInput, DegenerateCase
from kdivlab.hilbert import (TWO_OVER_SQRT3, AlphaPoint, GCouple, bound_bcont, bound_cccont,
                             bound_sprop, canonical_note, g_boundary, g_bugly_check,
                             g_intersection, g_intersection_printed_y, g_k_boundary,
                             g_k_equality_check, g_ratio_limits, g_sq2_kernel_check,
                             g_weight_integrals, g_weight_properties, g_weights,
                             gamma_g_distance_bound, gamma_w_direct_sum, gamma_y,
                             intersection_residuals, k_y, ojoj_residual, remark_bad_integral,
                             y_beta1, y_c_a, y_c_a_quadratic, y_kernel, y_lower_chain)

SQ3_2 = math.sqrt(3.0) / 2.0
G_SETS = [(4.0, SQ3_2, 0.5), (100.0, math.sqrt(0.5), math.sqrt(0.5)), (1.5, 0.6, 0.8)]


class TestCoupleY:
    def test_gamma_equals_two_over_sqrt3(self):
        rep = gamma_y(4096)
        assert rep.passed
        assert rep.results["gamma"] == pytest.approx(2 / math.sqrt(3), abs=1e-9)
        assert rep.results["argmax_a"] == pytest.approx(math.pi / 6, abs=2e-3)

    def test_coarse_grid_respects_upper_bound(self):
        rep = gamma_y(8)
        assert max(rep.results["C_a"]) <= TWO_OVER_SQRT3 + 1e-12

    def test_value_at_pi_over_6(self):
        assert y_c_a(AlphaPoint(math.pi / 6)) == pytest.approx(TWO_OVER_SQRT3, abs=1e-12)

    @pytest.mark.parametrize("a", [math.pi / 4, math.pi / 3, 1.0, 0.2])
    def test_root_and_quadratic_agree(self, a):
        al = AlphaPoint(a)
        c = y_c_a(al)
        assert c == pytest.approx(y_c_a_quadratic(al), abs=1e-12)
        assert ojoj_residual(al, c) == pytest.approx(0.0, abs=1e-12)

    def test_beta1_solves_its_equation(self):
        al = AlphaPoint(math.pi / 4)
        b = y_beta1(al)
        phi = (al.alpha1 - b) / (1 - al.alpha2)
        assert al.alpha2 * math.sqrt(phi * phi - 1) == pytest.approx(b, abs=1e-13)

    def test_endpoints_are_trivial(self):
        assert y_c_a(AlphaPoint(0.0)) == 1.0
        assert y_c_a(AlphaPoint(math.pi / 2)) == 1.0

    def test_limits_tend_to_one(self):
        assert y_c_a(AlphaPoint(1e-6)) == pytest.approx(1.0, abs=1e-3)
        assert y_c_a(AlphaPoint(math.pi / 2 - 1e-6)) == pytest.approx(1.0, abs=1e-3)

    def test_kernel_maps_alpha_to_target(self):
        al = AlphaPoint(math.pi / 5)
        k = y_kernel(al)
        assert k.image() == pytest.approx((al.alpha1, al.alpha2), abs=1e-12)
        assert k.norm == pytest.approx(y_c_a(al), abs=1e-12)

    def test_lower_chain(self):
        assert y_lower_chain(TWO_OVER_SQRT3) == pytest.approx(0.0, abs=1e-14)
        assert y_lower_chain(1.15) < 0

    def test_k_y_small_t(self):
        # the second coordinate can only be carried by the first space
        al = AlphaPoint(math.pi / 6)
        assert k_y(1e-9, al) == pytest.approx(al.alpha2, abs=1e-8)
        assert k_y(1e9, al) == pytest.approx(1.0, abs=1e-9)

    def test_bad_angle(self):
        with pytest.raises(BadAlpha):
            AlphaPoint(2.0)

    def test_direct_sum_identity(self):
        assert gamma_w_direct_sum().passed


@given(st.floats(0.01, math.pi / 2 - 0.01))
@settings(max_examples=60, deadline=None)
def test_y_constant_bracket(a):
    c = y_c_a(AlphaPoint(a))
    assert 1.0 <= c <= TWO_OVER_SQRT3 + 1e-12


class TestBounds:
    def test_sprop(self):
        b = bound_sprop()
        assert b.upper == pytest.approx(2 * math.sqrt(2 / 3), abs=1e-15)
        assert b.shvartsman_lower == pytest.approx((3 + 2 * math.sqrt(2)) / (1 + 2 * math.sqrt(2)))
        assert b.shvartsman_lower < b.upper

    def test_cccont(self):
        assert bound_cccont(1.5, 2.0, 1.2) == pytest.approx(3.6)

    def test_bcont_rejects_distance_below_one(self):
        with pytest.raises(BadInput):
            bound_bcont(1.0, 0.5)

    def test_distance_bound_is_symmetric(self):
        assert gamma_g_distance_bound(4.0) == gamma_g_distance_bound(0.25) == 2.0


class TestCoupleG:
    def test_canonicalization(self):
        g = GCouple.make(0.25, 0.6, 0.8)
        assert (g.r, g.b, g.c, g.swapped) == (4.0, 0.8, 0.6, True)
        assert canonical_note(g) == "swapped to r=4"

    def test_normalization(self):
        g = GCouple.make(2.0, 3.0, 4.0)
        assert (g.b, g.c) == pytest.approx((0.6, 0.8))

    def test_weights_are_boundary_derivatives(self):
        g = GCouple.make(4.0, SQ3_2, 0.5)
        for s in (1e-3, 0.3, 2.0, 50.0):
            h = 1e-6 * max(1.0, s)
            d0 = (g_boundary(s + h, g)[0] - g_boundary(s - h, g)[0]) / (2 * h)
            d1 = (g_boundary(s + h, g)[1] - g_boundary(s - h, g)[1]) / (2 * h)
            w0, w1 = g_weights(s, g)
            assert d0 == pytest.approx(w0, rel=1e-6)
            assert -d1 == pytest.approx(w1, rel=1e-6)

    def test_weight_integrals_closed_form(self):
        g = GCouple.make(4.0, math.sqrt(0.5), math.sqrt(0.5))
        rep = g_weight_integrals(g)
        assert rep.passed
        assert rep.results["int_w1"] == pytest.approx(math.sqrt(2.5), abs=1e-9)

    @pytest.mark.parametrize("params", G_SETS)
    def test_k_equality(self, params):
        rep = g_k_equality_check(GCouple.make(*params), np.geomspace(1e-3, 1e3, 25))
        assert rep.passed
        assert rep.results["max_rel"] < 1e-7

    def test_k_boundary_limits(self):
        g = GCouple.make(4.0, SQ3_2, 0.5)
        # |(b, c)| = 1 in the first space, sqrt(b^2 + r c^2) in the second
        assert g_k_boundary(1e6, g) == pytest.approx(1.0, rel=1e-9)
        assert g_k_boundary(1e-6, g) == pytest.approx(1e-6 * g.gamma1_at_zero, rel=1e-9)

    @pytest.mark.parametrize("params", G_SETS)
    def test_intersection_integrals(self, params):
        g = GCouple.make(*params)
        rep = g_bugly_check(g)
        assert rep.passed
        thr = 2 / (1 + math.sqrt(g.r))
        assert rep.results["x_integral"] > thr and rep.results["y_integral"] > thr

    def test_intersection_solves_both_equations(self):
        g = GCouple.make(4.0, SQ3_2, 0.5)
        for s in (1e-4, 0.1, 1.0, 10.0, 1e4):
            r0, r1 = intersection_residuals(s, g)
            assert r0 == pytest.approx(0.0, abs=1e-13)
            assert r1 == pytest.approx(0.0, abs=1e-13)

    def test_printed_y_denominator_misses_the_ellipse(self):
        g = GCouple.make(4.0, SQ3_2, 0.5)
        s = 1.0
        y = g_intersection(s, g, 0)[1]
        assert abs(g_intersection_printed_y(s, g, 0) - y) > 1e-3

    def test_intersection_degenerate_at_r_one(self):
        with pytest.raises(DegenerateCase):
            g_intersection(1.0, GCouple.make(1.0, SQ3_2, 0.5))

    def test_remark_bad_value(self):
        v = remark_bad_integral()
        assert v == pytest.approx(0.6896, abs=5e-4)
        assert v < 1 / math.sqrt(2)

    @pytest.mark.parametrize("params", [(4.0, SQ3_2, 0.5), (1000.0, SQ3_2, 0.5), (1.5, 0.6, 0.8)])
    def test_sq2_kernel(self, params):
        rep = g_sq2_kernel_check(GCouple.make(*params), n_grid=4001)
        assert rep.passed
        assert rep.results["norm_bound"] < math.sqrt(2)

    def test_weight_properties(self):
        assert g_weight_properties(GCouple.make(4.0, SQ3_2, 0.5), n=2000).passed

    def test_ratio_limits(self):
        g = GCouple.make(9.0, 0.6, 0.8)
        lo, hi = g_ratio_limits(g)
        w0, w1 = g_weights(1e-10, g)
        assert w0 / w1 == pytest.approx(lo, rel=1e-8)
        w0, w1 = g_weights(1e10, g)
        assert w0 / w1 == pytest.approx(hi, rel=1e-8)


@given(st.floats(1.05, 60.0), st.floats(0.05, math.pi / 2 - 0.05), st.floats(-2.5, 2.5))
@settings(max_examples=25, deadline=None)
def test_g_k_equality_random(r, ang, logt):
    g = GCouple.make(r, math.cos(ang), math.sin(ang))
    rep = g_k_equality_check(g, [10.0 ** logt])
    assert rep.results["max_rel"] < 1e-7
