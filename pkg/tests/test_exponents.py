import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liptrunc.exponents import (
    ExponentState,
    exponent_alpha,
    exponent_iterate,
    improvement_step,
    q3_feasibility,
)


class TestAlphaAndStep:
    def test_reference_values(self):
        assert exponent_alpha(1.5, 2.0) == pytest.approx(2.5 / 3.0, abs=1e-15)
        assert improvement_step(1.5, 2.0) == pytest.approx(5.0 / 3.0, abs=1e-15)

    def test_limit_toward_q(self):
        q = 2.0
        for r in (1.9, 1.99, 1.999):
            assert 0.0 < 1.0 - exponent_alpha(r, q) < (q - r)
            assert q - improvement_step(r, q) < (q - r)

    @given(st.floats(1.01, 9.0), st.floats(0.01, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_step_between_r_and_q(self, r, gap):
        q = r + gap
        s = improvement_step(r, q)
        assert r < s < q
        # the gap identity s - r = (q - r)/(q + 1)
        assert s - r == pytest.approx((q - r) / (q + 1.0), rel=1e-12)

    def test_ordering_validated(self):
        with pytest.raises(ValueError):
            exponent_alpha(2.0, 1.5)
        with pytest.raises(ValueError):
            improvement_step(0.9, 2.0)


class TestIterate:
    def test_already_converged(self):
        traj, k = exponent_iterate(1.9, 2.0, 0.1)
        assert k == 0
        assert traj == [1.9]

    def test_reference_trajectory(self):
        traj, k = exponent_iterate(1.5, 2.0, 0.1)
        assert k == 4
        assert traj[1] == pytest.approx(5.0 / 3.0, abs=1e-15)
        assert traj[2] == pytest.approx(16.0 / 9.0, abs=1e-15)

    @given(st.floats(1.05, 3.0), st.floats(0.05, 2.0), st.floats(0.01, 0.4))
    @settings(max_examples=100, deadline=None)
    def test_matches_geometric_count(self, r0, gap, delta):
        q = r0 + gap
        if q - delta <= r0:
            expected = 0
        else:
            ratio = q / (q + 1.0)
            expected = math.ceil(math.log(delta / (q - r0)) / math.log(ratio))
            # guard the boundary case where floating point sits on the edge
        traj, k = exponent_iterate(r0, q, delta)
        assert abs(k - expected) <= 1
        assert traj[-1] >= q - delta
        if k > 0:
            assert traj[-2] < q - delta
        diffs = np.diff(traj)
        assert (diffs > 0).all()

    def test_gap_contracts_at_fixed_rate(self):
        q = 2.5
        traj, _ = exponent_iterate(1.6, q, 1e-6)
        gaps = q - np.asarray(traj)
        ratios = gaps[1:] / gaps[:-1]
        np.testing.assert_allclose(ratios, q / (q + 1.0), rtol=1e-9)


class TestQ3Feasibility:
    def test_equality_pattern_at_alpha_one(self):
        p, q, eps = 3.0, 2.5, 1.2
        state = ExponentState(p=p, r=2.2, q=q, s=q, eps=eps, alpha=1.0)
        rep = q3_feasibility(state)
        for lhs in rep["lhs"]:
            assert lhs == pytest.approx(q, rel=1e-14)
        assert rep["feasible"]

    def test_reference_binding(self):
        r, q, p = 2.1, 2.5, 3.0
        alpha = exponent_alpha(r, q)
        s = improvement_step(r, q)
        state = ExponentState(p=p, r=r, q=q, s=s, eps=r - 1.0, alpha=alpha)
        rep = q3_feasibility(state)
        assert rep["binding"] == "s_over_alpha"
        assert rep["feasible"]
        assert rep["s_le_alpha_q"]

    def test_small_alpha_infeasible(self):
        state = ExponentState(p=3.0, r=2.1, q=2.5, s=2.3, eps=1.0, alpha=0.01)
        rep = q3_feasibility(state)
        assert not rep["feasible"]
        assert rep["binding"] == "s_over_alpha"

    @given(st.floats(2.05, 3.5), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
    @settings(max_examples=150, deadline=None)
    def test_last_condition_always_binds(self, p, g1, g2):
        r = max(1.0, p - 1.0) + g1
        q = r + g2
        if not q < p:
            return
        alpha = exponent_alpha(r, q)
        s = improvement_step(r, q)
        state = ExponentState(p=p, r=r, q=q, s=s, eps=r - 1.0, alpha=alpha)
        rep = q3_feasibility(state)
        m = rep["margins"]
        assert m[2] <= m[0] + 1e-12
        assert m[2] <= m[1] + 1e-12

    def test_q_derived_values(self):
        state = ExponentState(p=3.0, r=2.1, q=2.5, s=2.3, eps=0.5, alpha=0.9)
        assert state.q1 == max(3.0 - 2.0 + 0.9, 2.0 * 0.9)
        assert state.q2 == max(2.0, 1.0 + 1.0 * 0.9)
        assert state.q3 == max(state.q2, 3.0 - 1.5 * 0.9 + 0.5)

    def test_state_validation(self):
        with pytest.raises(ValueError):
            ExponentState(p=3.0, r=1.5, q=2.5, s=2.0, eps=0.5, alpha=0.9)  # r <= p-1
        with pytest.raises(ValueError):
            ExponentState(p=2.2, r=1.5, q=2.5, s=2.0, eps=0.5, alpha=0.9)  # q >= p
        with pytest.raises(ValueError):
            ExponentState(p=3.0, r=2.1, q=2.5, s=2.0, eps=0.5, alpha=1.5)
