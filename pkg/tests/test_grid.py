import numpy as np
import pytest

from spotsim.errors import ConfigError, GridMismatchError
from spotsim.grid import Field, GridSpec, laplacian, total_mass

from conftest import random_field
from oracles import kahan_sum, laplacian_bruteforce


class TestGridSpec:
    def test_spacing(self):
        spec = GridSpec(256, 128, 2.0, 4.0)
        assert spec.hx == 2.0 / 256
        assert spec.hy == 4.0 / 128

    @pytest.mark.parametrize("kwargs", [
        dict(nx=2, ny=4, lx=1.0, ly=1.0),
        dict(nx=4, ny=0, lx=1.0, ly=1.0),
        dict(nx=4, ny=4, lx=0.0, ly=1.0),
        dict(nx=4, ny=4, lx=1.0, ly=-2.0),
        dict(nx=4, ny=4, lx=float("inf"), ly=1.0),
    ])
    def test_rejects_bad_geometry(self, kwargs):
        with pytest.raises(ConfigError):
            GridSpec(**kwargs)

    def test_field_shape_checked(self):
        spec = GridSpec(8, 4, 1.0, 1.0)
        with pytest.raises(GridMismatchError):
            Field(spec, np.zeros((8, 4)))  # transposed

    def test_periodic_distance_wraps(self):
        spec = GridSpec(16, 16, 2.0, 2.0)
        assert spec.periodic_distance((0.1, 1.0), (1.9, 1.0)) == pytest.approx(0.2)


class TestLaplacian:
    def test_constant_field_is_zero(self):
        spec = GridSpec(12, 7, 3.0, 2.0)
        out = laplacian(Field.full(spec, 0.7))
        assert np.all(out.values == 0.0)

    def test_single_cell_stencil(self):
        # unit spacing, delta at center: -4 at center, +1 at edge neighbors
        spec = GridSpec(3, 3, 3.0, 3.0)
        vals = np.zeros((3, 3))
        vals[1, 1] = 1.0
        out = laplacian(Field(spec, vals)).values
        expected = np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], dtype=float)
        np.testing.assert_array_equal(out, expected)

    def test_matches_bruteforce_oracle(self, rng):
        spec = GridSpec(64, 64, 2.5, 2.5)
        f = random_field(spec, rng)
        ref = laplacian_bruteforce(f.values, spec.hx, spec.hy)
        np.testing.assert_allclose(laplacian(f).values, ref, rtol=0, atol=1e-12 * ref.max())

    def test_one_dimensional_mode_has_no_y_term(self, rng):
        spec = GridSpec(32, 1, 2.0, 1.0)
        f = random_field(spec, rng)
        out = laplacian(f).values
        ref = laplacian_bruteforce(f.values, spec.hx, spec.hy)
        np.testing.assert_array_equal(out, ref)
        # same values as the pure-x stencil
        x = f.values[0]
        expected = (np.roll(x, 1) + np.roll(x, -1) - 2 * x) / spec.hx**2
        np.testing.assert_allclose(out[0], expected, atol=1e-15)

    def test_flux_conservation(self, rng):
        spec = GridSpec(48, 32, 1.7, 0.9)
        for _ in range(5):
            f = random_field(spec, rng, -1.0, 2.0)
            total = abs(float(np.sum(laplacian(f).values)))
            assert total <= 1e-10 * float(np.sum(np.abs(f.values)))

    def test_linearity(self, rng):
        spec = GridSpec(24, 24, 1.0, 1.0)
        f = random_field(spec, rng)
        g = random_field(spec, rng)
        alpha, beta = 1.7, -0.45
        combined = laplacian(Field(spec, alpha * f.values + beta * g.values)).values
        separate = alpha * laplacian(f).values + beta * laplacian(g).values
        scale = np.abs(separate).max()
        np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-12 * max(scale, 1.0))

    @pytest.mark.parametrize("shift", [(1, 0), (0, 1), (5, 3), (-2, 7)])
    def test_translation_equivariance(self, rng, shift):
        spec = GridSpec(16, 16, 2.0, 2.0)
        f = random_field(spec, rng)
        dx, dy = shift
        shifted = Field(spec, np.roll(f.values, (dy, dx), axis=(0, 1)))
        lap_then_shift = np.roll(laplacian(f).values, (dy, dx), axis=(0, 1))
        shift_then_lap = laplacian(shifted).values
        np.testing.assert_array_equal(shift_then_lap, lap_then_shift)


class TestTotalMass:
    def test_zero_field(self):
        spec = GridSpec(8, 8, 2.0, 2.0)
        assert total_mass(Field.zeros(spec)) == 0.0

    def test_unit_field_gives_domain_area(self):
        spec = GridSpec(64, 32, 2.0, 2.0)
        assert total_mass(Field.full(spec, 1.0)) == pytest.approx(4.0, rel=1e-12)

    def test_matches_compensated_sum(self, rng):
        spec = GridSpec(40, 40, 1.3, 0.6)
        f = random_field(spec, rng, -5.0, 5.0)
        expected = kahan_sum(f.values) * spec.cell_area
        assert total_mass(f) == pytest.approx(expected, rel=1e-12)
