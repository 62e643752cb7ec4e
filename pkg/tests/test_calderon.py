from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdivlab.calderon import (DENSE, F8, G8, POWERS_OF_Q, JinxxInstance, appendix_report,
                              calderon_bound_report, calderon_lower_bound, cumulative_sq,
                              exact_calderon_check_2d, forced_functional, jinxx_check,
                              majorization_check, non_calderon_certificate_8d, weighted_norm)
from kdivlab.errors import BadParam
from kdivlab.kfunc import e_l2_linf


def brute_cumulative(x, t):
    """Sum over cells of the covered length of ``[k, k+1)`` times ``x*_k^2``."""
    x = sorted((abs(v) for v in x), reverse=True)
    return sum(min(1.0, max(0.0, t - k)) * v * v for k, v in enumerate(x))


class TestCumulative:
    @pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 2.3, 7.9, 12.0])
    def test_matches_cellwise_sum(self, t):
        x = (-1.0, 3.0, 0.5, 2.0, 0.0, 1.5, 2.5, 1.0)
        assert cumulative_sq(x, t) == pytest.approx(brute_cumulative(x, t), abs=1e-12)

    def test_saturates_at_squared_norm(self):
        assert cumulative_sq(F8, 100.0) == pytest.approx(16.0)

    def test_negative_t(self):
        with pytest.raises(BadParam):
            cumulative_sq(F8, -1.0)


class TestMajorization:
    def test_first_example_holds(self):
        rep = majorization_check((3, 1, 1, 1, 1, 1, 1, 1), (2, 2, 1, 1, 1, 1, 1, 1))
        assert rep.verdict and rep.integer_verdict and rep.first_failure is None

    def test_eight_dim_pair_fails_at_three(self):
        # cumulative sums 9, 10, 11 for f against 4, 8, 12 for g
        rep = majorization_check(F8, G8)
        assert not rep.verdict
        assert rep.first_failure == 3.0
        assert rep.consistent

    def test_length_mismatch_is_padded(self):
        assert majorization_check((2.0,), (1.0, 1.0)).verdict

    def test_report_dict(self):
        d = majorization_check(F8, G8).to_dict()
        # 12 against 16 once both vectors are exhausted
        assert d["worst_gap"] == pytest.approx(-4.0, abs=1e-2)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8),
       st.lists(st.floats(-10, 10), min_size=1, max_size=8))
@settings(max_examples=200, deadline=None)
def test_grid_and_integer_verdicts_agree(f, g):
    rep = majorization_check(f, g, grid=1001)
    assert rep.consistent


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8))
@settings(max_examples=100, deadline=None)
def test_permutation_invariance(f):
    a = majorization_check(f, list(reversed(f)))
    assert a.verdict and a.integer_verdict


class TestExactCalderon2d:
    def test_example_pair(self):
        rep = exact_calderon_check_2d((2.0, 1.0), (1.5, 1.5))
        assert rep.passed
        assert rep.results["orbit_condition"]

    def test_dominated_pair_fails(self):
        rep = exact_calderon_check_2d((1.0, 1.0), (2.0, 0.0))
        assert not rep.passed

    def test_rejects_other_dimensions(self):
        with pytest.raises(BadParam):
            exact_calderon_check_2d((1.0, 1.0, 1.0), (1.0, 1.0, 1.0))

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.0, 1.0))
    @settings(max_examples=100, deadline=None)
    def test_shrinkage_is_always_dominated(self, x1, x2, s):
        f = (x1, x2)
        g = (s * x1, s * x2)
        rep = exact_calderon_check_2d(f, g, grid=400, slack=1e-9)
        assert rep.passed


class TestCertificate8d:
    def test_e_values(self):
        assert e_l2_linf(1.0, F8) == pytest.approx(2.0)
        assert e_l2_linf(1.0, G8) == pytest.approx(2.0)
        assert e_l2_linf(2.5, F8) == pytest.approx(0.5)
        assert e_l2_linf(2.5, G8) == 0.0

    @pytest.mark.parametrize("t", [0.1, 0.25, 0.5, 0.75, 0.9])
    def test_e_gap_closed_form_on_unit_interval(self, t):
        # E(t, f)^2 - E(t, g)^2 = 4 t (t - 1) < 0 on (0, 1)
        diff = e_l2_linf(t, F8) ** 2 - e_l2_linf(t, G8) ** 2
        assert diff == pytest.approx(4 * t * (t - 1), abs=1e-12)
        assert e_l2_linf(t, G8) > e_l2_linf(t, F8)

    def test_forced_functional(self):
        lam = forced_functional(F8, G8, rows=4)
        assert lam == pytest.approx(np.asarray(F8) / 8.0)
        assert float(np.sum(np.abs(lam))) == pytest.approx(1.25)
        assert float(lam @ np.asarray(F8)) == pytest.approx(2.0)

    def test_certificate_report(self):
        rep = non_calderon_certificate_8d()
        status = {c.name: c.passed for c in rep.checks}
        assert status["E dominance at breakpoints"]
        assert status["lambda(f) from Tf = g"]
        assert status["Cauchy-Schwarz equality at f"]
        assert status["sum |lambda| exceeds 1"]
        # the dense comparison exposes E(g) > E(f) inside (0, 1)
        assert not status["E dominance on grid"]
        assert 0.0 < rep.results["worst_E_gap_t"] < 1.0
        assert rep.results["sum_abs_lambda"] == pytest.approx(1.25)

    def test_verdict_stable_under_perturbation(self):
        base = non_calderon_certificate_8d()
        rng = np.random.default_rng(7)
        for _ in range(10):
            f = np.asarray(F8) + 1e-9 * rng.standard_normal(8)
            g = np.asarray(G8) + 1e-9 * rng.standard_normal(8)
            rep = non_calderon_certificate_8d(f, g)
            assert [c.passed for c in rep.checks] == [c.passed for c in base.checks]

    def test_rejects_wrong_shape(self):
        with pytest.raises(BadParam):
            non_calderon_certificate_8d((1.0,), (1.0,))

    def test_appendix_report_combines_both(self):
        rep = appendix_report()
        names = [c.name for c in rep.checks]
        assert any(n.startswith("dim2") for n in names)
        assert any(n.startswith("dim8") for n in names)
        assert rep.results["dim2"]["orbit_condition"]


class TestJinxx:
    def test_two_dim_instance(self):
        inst = JinxxInstance(2, 4.0)
        assert inst.lhs(4.0) == pytest.approx(3.0)
        assert inst.k_inf(4.0) == pytest.approx(2.0)

    def test_reciprocal_orientation_holds(self):
        rep = jinxx_check(JinxxInstance(2, 4.0))
        assert rep.passed
        assert rep.results["orientation_B_holds"]
        assert not rep.results["orientation_A_holds"]

    @pytest.mark.parametrize("n,q", [(1, 4.0), (3, 9.0), (4, 100.0), (6, 2.0)])
    @pytest.mark.parametrize("mode", [POWERS_OF_Q, DENSE])
    def test_orientation_b_everywhere(self, n, q, mode):
        assert jinxx_check(JinxxInstance(n, q), mode).passed

    def test_bad_mode(self):
        with pytest.raises(BadParam):
            jinxx_check(JinxxInstance(2, 4.0), "other")

    @pytest.mark.parametrize("n,q", [(0, 4.0), (2, 1.0), (2, math.inf)])
    def test_bad_instance(self, n, q):
        with pytest.raises(BadParam):
            JinxxInstance(n, q)


class TestBound:
    def test_value(self):
        assert calderon_lower_bound(3, 9.0) == pytest.approx(1.5)

    def test_norms(self):
        inst = JinxxInstance(5, 3.0)
        assert weighted_norm(inst.h, 3.0, 0.5, 1) == pytest.approx(5.0)
        assert weighted_norm(inst.h, 3.0, 0.5, math.inf) == pytest.approx(1.0)

    def test_report(self):
        rep = calderon_bound_report(3, 9.0)
        assert rep.passed
        assert rep.results["bracket_real"] == pytest.approx([3 / math.sqrt(2), 3.0])

    @given(st.integers(1, 50), st.floats(1.001, 1e6))
    @settings(max_examples=60, deadline=None)
    def test_bound_below_n(self, n, q):
        assert 0.0 < calderon_lower_bound(n, q) < n
