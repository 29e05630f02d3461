import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liptrunc.field import (
    FieldFormatError,
    GridSpec,
    OrliczWeight,
    ScalarField,
    gradient,
    log_integral,
    negative_part,
    orlicz_integral,
    positive_part,
    read_field,
    superlevel_measure,
    write_field,
)


def f1d(values, h=1.0):
    return ScalarField(GridSpec((len(values),), (h,)), np.asarray(values, dtype=float))


class TestGridSpec:
    def test_basic(self):
        spec = GridSpec((4, 5), (0.5, 0.25), (0.0, -1.0))
        assert spec.dim == 2
        assert spec.num_cells == 20
        assert spec.cell_volume == 0.125
        np.testing.assert_allclose(spec.axis_coords(1), -1.0 + 0.25 * np.arange(5))

    @pytest.mark.parametrize(
        "sizes,spacings",
        [((1,), (1.0,)), ((4, 4), (1.0, -1.0)), ((4,) * 4, (1.0,) * 4), ((4, 0), (1.0, 1.0))],
    )
    def test_invalid(self, sizes, spacings):
        with pytest.raises(ValueError):
            GridSpec(sizes, spacings)

    def test_values_must_be_finite(self):
        with pytest.raises(ValueError):
            ScalarField(GridSpec((3,), (1.0,)), [0.0, np.nan, 1.0])


class TestGradient:
    def test_zero_field(self):
        g = gradient(f1d([0.0, 0.0, 0.0]))
        np.testing.assert_array_equal(g[0].values, 0.0)

    def test_1d_with_zero_extension(self):
        g = gradient(f1d([0.0, 1.0, 3.0]))
        np.testing.assert_array_equal(g[0].values, [1.0, 2.0, -3.0])

    def test_2d_linear_interior(self):
        spec = GridSpec((6, 6), (0.5, 0.5))
        xx, _ = np.meshgrid(*[spec.axis_coords(i) for i in range(2)], indexing="ij")
        g = gradient(ScalarField(spec, xx))
        np.testing.assert_allclose(g[0].values[:-1, :], 1.0)
        np.testing.assert_array_equal(g[1].values[:, :-1], 0.0)


class TestParts:
    def test_scalar_cases(self):
        v = f1d([-2.0, 0.0])
        np.testing.assert_array_equal(positive_part(v).values, [0.0, 0.0])
        np.testing.assert_array_equal(negative_part(v).values, [2.0, 0.0])
        w = f1d([3.0, -1.0])
        np.testing.assert_array_equal(positive_part(w).values, [3.0, 0.0])
        np.testing.assert_array_equal(negative_part(w).values, [0.0, 1.0])

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_decomposition_identities(self, values):
        v = f1d(values)
        pos = positive_part(v).values
        neg = negative_part(v).values
        np.testing.assert_array_equal(pos - neg, v.values)
        np.testing.assert_array_equal(pos * neg, 0.0)


class TestIntegrals:
    def test_orlicz_unit(self):
        spec = GridSpec((10, 10), (0.1, 0.1))
        g = ScalarField(spec, np.ones((10, 10)))
        assert orlicz_integral(g, OrliczWeight(2.0, 0.0)) == pytest.approx(1.0, rel=1e-12)

    def test_orlicz_zero(self):
        spec = GridSpec((4,), (1.0,))
        assert orlicz_integral(ScalarField.zeros(spec), OrliczWeight(2.0, -3.0)) == 0.0

    def test_orlicz_point_value(self):
        # one-point evaluation of |g|^p log(1+g)^alpha at g = e-1, alpha = 2
        spec = GridSpec((8, 8), (0.125, 0.125))
        g = ScalarField(spec, np.full((8, 8), math.e - 1.0))
        expected = (math.e - 1.0) ** 1.5 * math.log1p(math.e - 1.0) ** 2
        assert orlicz_integral(g, OrliczWeight(1.5, 2.0)) == pytest.approx(expected, rel=1e-12)

    def test_orlicz_rejects_bad_p(self):
        with pytest.raises(ValueError):
            OrliczWeight(1.0, 0.0)

    def test_orlicz_zero_cells_with_negative_alpha(self):
        g = f1d([0.0, 1.0])
        val = orlicz_integral(g, OrliczWeight(2.0, -1.5))
        assert math.isfinite(val) and val > 0.0

    @given(st.floats(0.25, 8.0), st.floats(1.1, 4.0))
    @settings(max_examples=40, deadline=None)
    def test_orlicz_scaling_homogeneity(self, c, p):
        rng = np.random.default_rng(5)
        g = f1d(rng.uniform(0.0, 3.0, 16))
        scaled = f1d(c * g.values)
        w = OrliczWeight(p, 0.0)
        assert orlicz_integral(scaled, w) == pytest.approx(
            c**p * orlicz_integral(g, w), rel=1e-11
        )

    def test_orlicz_monotone_for_nonneg_alpha(self):
        rng = np.random.default_rng(6)
        a = rng.uniform(0.0, 2.0, 32)
        g, bigger = f1d(a), f1d(a + rng.uniform(0.0, 1.0, 32))
        w = OrliczWeight(2.5, 1.0)
        assert orlicz_integral(g, w) <= orlicz_integral(bigger, w)

    def test_log_integral_cases(self):
        spec = GridSpec((5, 5), (0.2, 0.2))
        assert log_integral(ScalarField.zeros(spec), OrliczWeight(2.0, 0.0)) == 0.0
        g = ScalarField(spec, np.full((5, 5), math.e - 1.0))
        assert log_integral(g, OrliczWeight(2.0, 0.0)) == pytest.approx(
            math.e - 1.0, rel=1e-12
        )
        with pytest.raises(ValueError):
            log_integral(f1d([-0.1, 1.0]), OrliczWeight(2.0, 0.0))

    def test_log_integral_zero_cells_negative_exponent(self):
        g = f1d([0.0, 2.0])
        val = log_integral(g, OrliczWeight(2.0, -3.0))
        assert math.isfinite(val)


class TestSuperlevel:
    def test_cases(self):
        spec = GridSpec((10, 10), (0.1, 0.1))
        assert superlevel_measure(ScalarField.zeros(spec), 1.0) == 0.0
        assert superlevel_measure(ScalarField(spec, np.full((10, 10), 2.0)), 1.0) == pytest.approx(1.0)
        assert superlevel_measure(f1d([0.0, 3.0, 5.0]), 4.0) == 1.0

    def test_step_structure(self):
        g = f1d([0.0, 1.0, 1.0, 2.0])
        ts = [-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0]
        meas = [superlevel_measure(g, t) for t in ts]
        assert meas == sorted(meas, reverse=True)
        # jumps only at attained values
        assert superlevel_measure(g, 0.5) == superlevel_measure(g, 0.99)


class TestFieldIO:
    def test_binary_roundtrip(self, tmp_path):
        rng = np.random.default_rng(7)
        spec = GridSpec((64, 64), (0.3, 0.7), (1.0, -2.0))
        u = ScalarField(spec, rng.standard_normal((64, 64)))
        path = tmp_path / "u.trnc"
        write_field(u, path)
        back = read_field(path)
        np.testing.assert_array_equal(back.values, u.values)
        assert back.spec.sizes == spec.sizes
        assert back.spec.spacings == spec.spacings

    def test_csv_roundtrip(self, tmp_path):
        rng = np.random.default_rng(8)
        u = ScalarField(GridSpec((5, 7), (0.25, 1.5)), rng.standard_normal((5, 7)))
        path = tmp_path / "u.csv"
        write_field(u, path, fmt="csv")
        back = read_field(path)
        np.testing.assert_array_equal(back.values, u.values)

    def test_truncated_file_rejected(self, tmp_path):
        u = ScalarField(GridSpec((8,), (1.0,)), np.arange(8.0))
        path = tmp_path / "u.trnc"
        write_field(u, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 8])
        with pytest.raises(FieldFormatError):
            read_field(path)
        short = tmp_path / "short.trnc"
        short.write_bytes(data[:12])
        with pytest.raises(FieldFormatError):
            read_field(short)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.trnc"
        path.write_bytes(b"NOPE" + b"\x00" * 40)
        with pytest.raises(FieldFormatError):
            read_field(path, fmt="binary")

    def test_nan_payload_rejected(self, tmp_path):
        u = ScalarField(GridSpec((4,), (1.0,)), np.ones(4))
        path = tmp_path / "u.trnc"
        write_field(u, path)
        data = bytearray(path.read_bytes())
        data[-8:] = np.float64("nan").tobytes()
        path.write_bytes(bytes(data))
        with pytest.raises(FieldFormatError):
            read_field(path)

    def test_size_mismatch_rejected(self, tmp_path):
        u = ScalarField(GridSpec((4,), (1.0,)), np.ones(4))
        path = tmp_path / "u.trnc"
        write_field(u, path)
        path.write_bytes(path.read_bytes() + np.float64(1.0).tobytes())
        with pytest.raises(FieldFormatError):
            read_field(path)

    def test_csv_header_errors(self, tmp_path):
        path = tmp_path / "u.csv"
        path.write_text("1.0\n2.0\n")
        with pytest.raises(FieldFormatError):
            read_field(path, fmt="csv")
        path.write_text("# dims=2 sizes=2 spacings=1.0\n1\n2\n")
        with pytest.raises(FieldFormatError):
            read_field(path, fmt="csv")
