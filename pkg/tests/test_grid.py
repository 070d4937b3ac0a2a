import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfield.errors import (
    BadMagicError,
    EmptyInteriorError,
    NonFiniteError,
    ParameterError,
    ShapeMismatchError,
    TruncatedSnapshotError,
    UnsupportedVersionError,
)
from nfield.grid import (
    Field,
    GridSpec,
    centered_grid,
    constant_field,
    interior_mask,
    quadrature,
    read_snapshot,
    write_snapshot,
)


def line_grid(lo, hi, n):
    return GridSpec(1, (n,), ((hi - lo) / (n - 1),), (lo,))


class TestGridSpec:
    def test_coordinate_formula_exact(self):
        g = GridSpec(1, (11,), (0.5,), (-2.0,))
        coords = g.axis_coords(0)
        for k in range(11):
            assert coords[k] == -2.0 + k * 0.5

    def test_rejects_too_few_points(self):
        with pytest.raises(ParameterError):
            GridSpec(1, (2,), (2.0,), (0.0,))

    def test_rejects_nonpositive_spacing(self):
        with pytest.raises(ParameterError):
            GridSpec(1, (9,), (-0.1,), (0.0,))

    def test_rejects_box_smaller_than_kernel_support(self):
        # half-width 10 * 0.1 / 2 = 0.5 < 2
        with pytest.raises(ParameterError):
            GridSpec(1, (10,), (0.1,), (0.0,))

    def test_rejects_bad_dim(self):
        with pytest.raises(ParameterError):
            GridSpec(4, (9, 9, 9, 9), (1.0,) * 4, (0.0,) * 4)


class TestField:
    def test_length_mismatch(self, grid1d):
        with pytest.raises(ShapeMismatchError):
            Field(grid1d, np.zeros(17))

    def test_nan_rejected(self, grid1d):
        values = np.zeros(grid1d.shape)
        values[3] = np.nan
        with pytest.raises(NonFiniteError):
            Field(grid1d, values)

    def test_values_immutable(self, grid1d):
        f = constant_field(grid1d, 1.0)
        with pytest.raises(ValueError):
            f.values[0] = 2.0


class TestQuadrature:
    def test_constant_on_length_10_box(self):
        g = line_grid(0.0, 10.0, 1001)
        assert quadrature(constant_field(g, 1.0)) == pytest.approx(10.0, abs=1e-12)

    def test_zero_field(self, grid1d):
        assert quadrature(constant_field(grid1d, 0.0)) == 0.0

    def test_x_squared_closed_form(self):
        # x^2 restricted to [-1, 1] (the +-1 kinks sit on grid nodes, so the
        # composite trapezoid stays second order); closed form 2/3
        g = line_grid(-4.0, 4.0, 2049)
        x = g.axis_coords(0)
        f = Field(g, np.where(np.abs(x) <= 1.0, x**2, 0.0))
        assert quadrature(f) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_weighted_length_mismatch(self, grid1d):
        with pytest.raises(ShapeMismatchError):
            quadrature(constant_field(grid1d, 1.0), weight_samples=np.ones(5))

    def test_weight_non_finite(self, grid1d):
        w = np.ones(grid1d.num_points)
        w[0] = np.inf
        with pytest.raises(NonFiniteError):
            quadrature(constant_field(grid1d, 1.0), weight_samples=w)

    @settings(max_examples=30, deadline=None)
    @given(alpha=st.floats(-10, 10), beta=st.floats(-10, 10))
    def test_linearity(self, alpha, beta):
        g = line_grid(-5.0, 5.0, 257)
        rng = np.random.default_rng(7)
        u = rng.standard_normal(g.shape)
        v = rng.standard_normal(g.shape)
        lhs = quadrature(Field(g, alpha * u + beta * v))
        rhs = alpha * quadrature(Field(g, u)) + beta * quadrature(Field(g, v))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_constant_times_volume(self, grid2d):
        vol = 8.0 * 8.0
        got = quadrature(constant_field(grid2d, 3.25))
        assert got == pytest.approx(3.25 * vol, rel=1e-12)

    def test_refinement_is_second_order(self):
        # smooth integrand with no closed-form-free error: observe O(dx^2)
        exact = 2.0 * np.sin(5.0) / 1.0  # integral of cos(x) on [-5, 5]
        errors = []
        for n in (129, 257, 513):
            g = line_grid(-5.0, 5.0, n)
            f = Field(g, np.cos(g.axis_coords(0)))
            errors.append(abs(quadrature(f) - exact))
        orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
        assert all(1.8 <= o <= 2.2 for o in orders)


class TestInteriorMask:
    def test_1d_margin_one(self):
        g = line_grid(-5.0, 5.0, 101)
        mask = interior_mask(g, 1.0)
        coords = g.axis_coords(0)
        expected = (coords >= -4.0 - 1e-12) & (coords <= 4.0 + 1e-12)
        assert np.array_equal(mask, expected)

    def test_margin_zero_all_true(self, grid1d):
        assert interior_mask(grid1d, 0.0).all()

    def test_2d_count_matches_enumeration(self):
        g = centered_grid(2, 3.0, 49)
        mask = interior_mask(g, 1.0)
        count = 0
        xs = g.axis_coords(0)
        ys = g.axis_coords(1)
        for x in xs:
            for y in ys:
                if min(x + 3.0, 3.0 - x) >= 1.0 - 1e-12 and min(y + 3.0, 3.0 - y) >= 1.0 - 1e-12:
                    count += 1
        assert int(mask.sum()) == count

    def test_margin_too_large(self, grid1d):
        with pytest.raises(EmptyInteriorError):
            interior_mask(grid1d, 8.0)


class TestSnapshot:
    def test_header_layout(self):
        g = GridSpec(1, (9,), (0.5,), (-2.0,))
        f = Field(g, np.arange(9, dtype=float))
        buf = io.BytesIO()
        n = write_snapshot(f, buf)
        raw = buf.getvalue()
        assert n == len(raw)
        expected_header = struct.pack("<4sHB", b"NFLD", 1, 1) + struct.pack(
            "<Idd", 9, 0.5, -2.0
        )
        assert raw[: len(expected_header)] == expected_header
        assert raw[len(expected_header):] == np.arange(9, dtype="<f8").tobytes()

    def test_round_trip_bitwise_2d(self, grid2d, rng):
        f = Field(grid2d, rng.standard_normal(grid2d.shape))
        buf = io.BytesIO()
        write_snapshot(f, buf)
        buf.seek(0)
        g = read_snapshot(buf)
        assert g.grid == grid2d
        assert g.values.tobytes() == f.values.tobytes()

    def test_payload_size_64x64(self):
        g = centered_grid(2, 4.0, 64)
        f = constant_field(g, 1.0)
        n = write_snapshot(f, io.BytesIO())
        header = 4 + 2 + 1 + 2 * (4 + 8 + 8)
        assert n == header + 64 * 64 * 8

    def test_bad_magic(self, grid1d):
        buf = io.BytesIO()
        write_snapshot(constant_field(grid1d, 1.0), buf)
        data = bytearray(buf.getvalue())
        data[:4] = b"XXXX"
        with pytest.raises(BadMagicError):
            read_snapshot(io.BytesIO(bytes(data)))

    def test_bad_version(self, grid1d):
        buf = io.BytesIO()
        write_snapshot(constant_field(grid1d, 1.0), buf)
        data = bytearray(buf.getvalue())
        data[4:6] = struct.pack("<H", 2)
        with pytest.raises(UnsupportedVersionError):
            read_snapshot(io.BytesIO(bytes(data)))

    def test_truncated_payload_names_lengths(self, grid1d):
        buf = io.BytesIO()
        write_snapshot(constant_field(grid1d, 1.0), buf)
        data = buf.getvalue()[:-16]
        with pytest.raises(TruncatedSnapshotError) as err:
            read_snapshot(io.BytesIO(data))
        assert str(grid1d.num_points * 8) in str(err.value)

    def test_file_round_trip(self, tmp_path, grid1d, rng):
        f = Field(grid1d, rng.standard_normal(grid1d.shape))
        path = tmp_path / "state.nfld"
        count = write_snapshot(f, path)
        assert path.stat().st_size == count
        g = read_snapshot(path)
        assert np.array_equal(g.values, f.values)
