import numpy as np
import pytest

from liptrunc.field import GridSpec, ScalarField, gradient
from liptrunc.generators import gen_sawtooth
from liptrunc.maximal import RadiusSet
from liptrunc.truncate import (
    ConvexPolytope,
    TruncationParams,
    asym_truncate,
    asym_truncate_zero_boundary,
    changed_set_bound,
    l1_gradient_magnitude,
    lipschitz_truncate,
    part_box_maxima,
)


def tent_1d(n=64, up=1.0, down=0.5, h=1.0):
    """Compactly supported tent rising at `up`, falling at `down`."""
    spec = GridSpec((n,), (h,))
    peak_h = min(up, down) * n * h / 8.0
    rise = int(peak_h / (up * h))
    fall = int(peak_h / (down * h))
    u = np.zeros(n)
    start = n // 3
    for i in range(rise):
        u[start + i + 1] = u[start + i] + up * h
    for i in range(fall):
        u[start + rise + i + 1] = max(u[start + rise + i] - down * h, 0.0)
    return ScalarField(spec, u)


def assert_slope_bounds(result, u_spec):
    """Discrete T1/T2 in the sweep's own associativity, zero tolerance."""
    f = result.field.values
    for axis in range(u_spec.dim):
        lead = np.moveaxis(f, axis, 0)[1:]
        head = np.moveaxis(f, axis, 0)[:-1]
        assert (lead <= head + result.steps_up[axis]).all()
        assert (head <= lead + result.steps_down[axis]).all()


class TestLipschitzTruncate:
    def test_huge_level_is_identity(self):
        u = tent_1d()
        res = lipschitz_truncate(u, 1e9, RadiusSet.dyadic(u.spec))
        assert res.kept_mask.all()
        np.testing.assert_array_equal(res.field.values, u.values)
        assert res.agrees
        assert res.changed_measure == 0.0

    def test_spike_flattened(self):
        n = 33
        spec = GridSpec((n,), (1.0,))
        vals = np.zeros(n)
        vals[16] = 1.0
        u = ScalarField(spec, vals)
        lam = 0.1
        res = lipschitz_truncate(u, lam, RadiusSet.dyadic(spec))
        assert res.field.values.max() < 1.0
        assert_slope_bounds(res, spec)
        assert not res.kept_mask[16]

    def test_compact_support_preserved(self):
        u = tent_1d()
        lam = 0.6
        res = lipschitz_truncate(u, lam, RadiusSet.dyadic(u.spec))
        # support of the output is inside (bad set) union (support of u)
        outside = (res.field.values != 0.0) & (u.values == 0.0)
        assert (outside <= ~res.kept_mask).all()
        assert_slope_bounds(res, u.spec)

    def test_empty_keep_mask_rejected(self):
        u = tent_1d()
        with pytest.raises(ValueError, match="lambda below"):
            lipschitz_truncate(u, 1e-9, RadiusSet.dyadic(u.spec),
                               keep_mask=np.zeros(u.spec.sizes, dtype=bool))

    def test_kept_mask_is_gate_sublevel(self):
        u = tent_1d()
        rs = RadiusSet.dyadic(u.spec)
        from liptrunc.maximal import hl_maximal

        gate = hl_maximal(l1_gradient_magnitude(u), rs).values
        res = lipschitz_truncate(u, 0.7, rs)
        np.testing.assert_array_equal(res.kept_mask, gate <= 0.7)


class TestAsymTruncate:
    def test_admissible_field_untouched(self):
        u = tent_1d(up=1.0, down=0.25)
        rs = RadiusSet.dyadic(u.spec)
        pos, neg = part_box_maxima(u, rs)
        params = TruncationParams(lam=2.0 * pos.max(), mu=2.0 * neg.max())
        res = asym_truncate(u, params, rs)
        assert res.kept_mask.all()
        np.testing.assert_array_equal(res.field.values, u.values)
        assert res.t4_lhs == 0.0

    def test_sawtooth_spikes_removed_downslopes_kept(self):
        u, info = gen_sawtooth(9.0, 1.0, 0.1, 240)
        rs = RadiusSet.dyadic(u.spec)
        params = TruncationParams(lam=4.0, mu=50.0)
        res = asym_truncate(u, params, rs)
        assert res.agrees
        assert_slope_bounds(res, u.spec)
        g = gradient(res.field)[0].values[:-1] * u.spec.spacings[0]
        gu = gradient(u)[0].values[:-1] * u.spec.spacings[0]
        # up-slopes now below the inflated level, strictly below the spikes
        assert g.max() < 9.0 * u.spec.spacings[0]
        # the spike cells are exactly the changed gradient region
        spikes = gu > 4.0 * u.spec.spacings[0]
        assert spikes.any()
        assert not res.kept_mask[:-1][spikes].any()
        # down-slope sup is unchanged: no new descent steeper than the base
        assert g.min() >= gu.min() - 1e-15

    def test_symmetric_reduction_matches_lipschitz(self):
        rng = np.random.default_rng(0)
        spec = GridSpec((48,), (0.5,))
        vals = np.zeros(48)
        vals[8:40] = np.cumsum(rng.uniform(-0.6, 0.6, 32))
        vals[8:40] -= np.linspace(0, vals[39], 32)
        u = ScalarField(spec, vals)
        rs = RadiusSet.dyadic(spec)
        lam = 0.4
        sym = lipschitz_truncate(u, lam, rs)
        forced = asym_truncate(u, TruncationParams(lam=lam, mu=lam), rs,
                               keep_mask=sym.kept_mask)
        np.testing.assert_array_equal(forced.field.values, sym.field.values)

    def test_kept_mask_monotone_in_levels(self):
        u, _ = gen_sawtooth(9.0, 1.0, 0.1, 240)
        rs = RadiusSet.dyadic(u.spec)
        prev = None
        for lam in (2.0, 4.0, 8.0, 16.0):
            res = asym_truncate(u, TruncationParams(lam=lam, mu=64.0), rs)
            if prev is not None:
                assert (prev <= res.kept_mask).all()
            prev = res.kept_mask

    def test_explicit_inflation_respected(self):
        u, _ = gen_sawtooth(9.0, 1.0, 0.1, 240)
        rs = RadiusSet.dyadic(u.spec)
        res = asym_truncate(u, TruncationParams(lam=4.0, mu=50.0, inflation=3.0), rs)
        assert res.inflation == 3.0
        assert_slope_bounds(res, u.spec)


class TestZeroBoundary:
    def test_zero_field(self):
        spec = GridSpec((20,), (1.0,))
        u = ScalarField.zeros(spec)
        dom = ConvexPolytope.box([4.0], [15.0])
        res = asym_truncate_zero_boundary(u, dom, TruncationParams(1.0, 1.0),
                                          RadiusSet.dyadic(spec))
        np.testing.assert_array_equal(res.field.values, 0.0)

    def test_tent_inside_domain_kept(self):
        n = 40
        spec = GridSpec((n,), (1.0,))
        dom = ConvexPolytope.box([9.5], [30.5])
        inside = dom.cell_mask(spec)
        vals = np.zeros(n)
        vals[12:20] = 0.25 * np.arange(8)
        vals[20:28] = 0.25 * np.arange(8)[::-1]
        u = ScalarField(spec, vals)
        rs = RadiusSet.dyadic(spec)
        pos, neg = part_box_maxima(u, rs)
        res = asym_truncate_zero_boundary(
            u, dom, TruncationParams(lam=2 * pos.max(), mu=2 * neg.max()), rs
        )
        assert res.agrees
        np.testing.assert_array_equal(res.field.values, u.values)
        np.testing.assert_array_equal(res.field.values[~inside], 0.0)

    def test_2d_product_tent_small_level(self):
        n = 32
        spec = GridSpec((n, n), (1.0, 1.0))
        dom = ConvexPolytope.box([7.5, 7.5], [23.5, 23.5])
        inside = dom.cell_mask(spec)
        t = np.zeros(n)
        t[10:16] = np.arange(6)
        t[16:22] = np.arange(6)[::-1]
        u = ScalarField(spec, np.outer(t, t) / 5.0)
        assert (u.values[~inside] == 0.0).all()
        res = asym_truncate_zero_boundary(
            u, dom, TruncationParams(lam=0.3, mu=0.3), RadiusSet.dyadic(spec)
        )
        np.testing.assert_array_equal(res.field.values[~inside], 0.0)
        assert res.changed_measure > 0.0
        assert_slope_bounds(res, spec)

    def test_nonzero_outside_rejected(self):
        spec = GridSpec((20,), (1.0,))
        u = ScalarField(spec, np.ones(20))
        dom = ConvexPolytope.box([4.0], [15.0])
        with pytest.raises(ValueError, match="vanish"):
            asym_truncate_zero_boundary(u, dom, TruncationParams(1.0, 1.0),
                                        RadiusSet.dyadic(spec))

    def test_domain_off_grid_rejected(self):
        spec = GridSpec((20,), (1.0,))
        u = ScalarField.zeros(spec)
        dom = ConvexPolytope.box([100.0], [120.0])
        with pytest.raises(ValueError, match="no grid cell"):
            asym_truncate_zero_boundary(u, dom, TruncationParams(1.0, 1.0),
                                        RadiusSet.dyadic(spec))

    def test_polytope_json_roundtrip(self):
        dom = ConvexPolytope.box([0.0, -1.0], [2.0, 3.0])
        back = ConvexPolytope.from_json(dom.to_json())
        np.testing.assert_array_equal(back.normals, dom.normals)
        np.testing.assert_array_equal(back.offsets, dom.offsets)


class TestChangedSetBound:
    def test_kept_all_gives_zero_lhs(self):
        u = tent_1d(up=0.5, down=0.5)
        rs = RadiusSet.dyadic(u.spec)
        params = TruncationParams(lam=100.0, mu=100.0)
        res = asym_truncate(u, params, rs)
        lhs, _ = changed_set_bound(u, params, res)
        assert lhs == 0.0

    def test_rhs_zero_implies_lhs_zero(self):
        # all gradient mass below half the levels: tails empty, kept all
        u = tent_1d(up=0.25, down=0.25)
        rs = RadiusSet.dyadic(u.spec)
        params = TruncationParams(lam=10.0, mu=10.0)
        res = asym_truncate(u, params, rs)
        assert res.t4_rhs == 0.0
        assert res.t4_lhs == 0.0

    def test_lhs_monotone_in_level(self):
        u, _ = gen_sawtooth(9.0, 1.0, 0.1, 240)
        rs = RadiusSet.dyadic(u.spec)
        prev = np.inf
        for lam in (2.0, 4.0, 8.0, 16.0):
            res = asym_truncate(u, TruncationParams(lam=lam, mu=64.0), rs)
            assert res.t4_lhs <= prev
            prev = res.t4_lhs


class TestParamsValidation:
    def test_bad_params(self):
        with pytest.raises(ValueError):
            TruncationParams(lam=-1.0, mu=1.0)
        with pytest.raises(ValueError):
            TruncationParams(lam=1.0, mu=1.0, eps=0.0)
        with pytest.raises(ValueError):
            TruncationParams(lam=1.0, mu=1.0, inflation=0.5)

    def test_polytope_validation(self):
        with pytest.raises(ValueError):
            ConvexPolytope(np.array([[0.0, 0.0]]), np.array([1.0]))
        with pytest.raises(ValueError):
            ConvexPolytope(np.array([[1.0, 0.0]]), np.array([1.0, 2.0]))
