import math

import numpy as np
import pytest

from spotsim.errors import ConfigError, GridMismatchError
from spotsim.grid import Field, GridSpec
from spotsim.kinetics import (
    GrayScottParams,
    TailParams,
    WasteParams,
    homogeneous_fixed_points,
    react_gs,
    react_tail,
    react_waste,
)

from conftest import random_field
from oracles import react_gs_scalar, react_tail_scalar, react_waste_scalar

SPEC = GridSpec(4, 3, 1.0, 1.0)


def const(value):
    return Field.full(SPEC, value)


class TestParams:
    def test_rejects_nonpositive_diffusion(self):
        with pytest.raises(ConfigError):
            GrayScottParams(d_a=0.0, d_b=1e-5, r=0.04, k=0.06)

    def test_zero_rates_allowed_for_pure_diffusion(self):
        p = GrayScottParams(d_a=2e-5, d_b=1e-5, r=0.0, k=0.0)
        assert p.max_diffusion == 2e-5

    def test_waste_validation(self):
        base = GrayScottParams(2e-5, 1e-5, 0.032, 0.0942)
        with pytest.raises(ConfigError):
            WasteParams(base, w=0.015, k_p=0.0)
        WasteParams(base, w=0.0, k_p=0.0002)

    def test_tail_requires_all_positive(self):
        with pytest.raises(ConfigError):
            TailParams(2e-5, 1e-5, 1e-6, 0.0347, 0.2, 0.0, 0.005)


class TestReactGs:
    PARAMS = GrayScottParams(2e-5, 1e-5, r=0.04, k=0.06)

    def test_trivial_fixed_point(self):
        da, db = react_gs(const(1.0), const(0.0), self.PARAMS)
        assert np.all(da.values == 0.0)
        assert np.all(db.values == 0.0)

    def test_hand_arithmetic(self):
        # a=0.5, b=0.25: da = -0.5*0.0625 + 0.04*0.5, db = 0.03125 - 0.015
        da, db = react_gs(const(0.5), const(0.25), self.PARAMS)
        assert da.values[0, 0] == pytest.approx(-0.01125, abs=1e-15)
        assert db.values[0, 0] == pytest.approx(0.01625, abs=1e-15)

    def test_pure_autocatalysis_is_antisymmetric(self, rng):
        p = GrayScottParams(2e-5, 1e-5, r=0.0, k=0.0)
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        da, db = react_gs(a, b, p)
        np.testing.assert_array_equal(db.values, -da.values)
        np.testing.assert_allclose(da.values, -(a.values * b.values**2),
                                   rtol=1e-15)

    def test_matches_scalar_oracle(self, rng):
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        da, db = react_gs(a, b, self.PARAMS)
        for j in range(SPEC.ny):
            for i in range(SPEC.nx):
                ra, rb = react_gs_scalar(a.values[j, i], b.values[j, i], 0.04, 0.06)
                assert da.values[j, i] == pytest.approx(ra, abs=1e-15)
                assert db.values[j, i] == pytest.approx(rb, abs=1e-15)

    def test_rejects_mismatched_grids(self):
        other = GridSpec(5, 3, 1.0, 1.0)
        with pytest.raises(GridMismatchError):
            react_gs(const(1.0), Field.zeros(other), self.PARAMS)


class TestReactWaste:
    PARAMS = WasteParams(GrayScottParams(2e-5, 1e-5, r=0.032, k=0.0942),
                         w=0.015, k_p=0.0002)

    def test_zero_waste_reduces_to_plain(self, rng):
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        da, db, _ = react_waste(a, b, const(0.0), self.PARAMS)
        ra, rb = react_gs(a, b, self.PARAMS.base)
        np.testing.assert_array_equal(da.values, ra.values)
        np.testing.assert_array_equal(db.values, rb.values)

    def test_zero_inhibition_reduces_to_plain(self, rng):
        wp = WasteParams(self.PARAMS.base, w=0.0, k_p=0.0002)
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        p = random_field(SPEC, rng, 0.0, 30.0)
        da, db, _ = react_waste(a, b, p, wp)
        ra, rb = react_gs(a, b, wp.base)
        np.testing.assert_array_equal(da.values, ra.values)
        np.testing.assert_array_equal(db.values, rb.values)

    def test_pure_decay_of_waste(self):
        # b = 0, p = 5: dp = -k_p * p = -0.001
        _, _, dp = react_waste(const(1.0), const(0.0), const(5.0), self.PARAMS)
        assert dp.values[0, 0] == pytest.approx(-0.001, abs=1e-18)

    def test_inhibition_factor_against_scalar_oracle(self):
        # a=0.5, b=0.25, p=10 -> factor e^{-0.15}
        da, db, dp = react_waste(const(0.5), const(0.25), const(10.0), self.PARAMS)
        ra, rb, rp = react_waste_scalar(0.5, 0.25, 10.0, 0.032, 0.0942, 0.015, 0.0002)
        assert da.values[0, 0] == pytest.approx(ra, abs=1e-14)
        assert db.values[0, 0] == pytest.approx(rb, abs=1e-14)
        assert dp.values[0, 0] == pytest.approx(rp, abs=1e-14)
        assert math.exp(-0.15) == pytest.approx(
            (rb + 0.0942 * 0.25) / (0.5 * 0.25**2), rel=1e-12)


class TestReactTail:
    PARAMS = TailParams(2e-5, 1e-5, 1e-6, r=0.0347, k1=0.2, k2=0.8, k3=0.005)

    def test_no_tail_reduces_to_plain_with_k1(self, rng):
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        da, db, dc = react_tail(a, b, const(0.0), self.PARAMS)
        gs = GrayScottParams(2e-5, 1e-5, r=0.0347, k=0.2)
        ra, rb = react_gs(a, b, gs)
        np.testing.assert_array_equal(da.values, ra.values)
        np.testing.assert_array_equal(db.values, rb.values)
        assert np.all(dc.values == 0.0)

    def test_predation_flux(self):
        # b=0.2, c=0.1, k2=0.8 -> flux 0.0016 leaves b and enters c
        a = const(0.0)
        da, db, dc = react_tail(a, const(0.2), const(0.1), self.PARAMS)
        flux = 0.8 * 0.2 * 0.01
        assert flux == pytest.approx(0.0016, abs=1e-18)
        assert db.values[0, 0] == pytest.approx(-0.2 * 0.2 - flux, abs=1e-15)
        assert dc.values[0, 0] == pytest.approx(flux - 0.005 * 0.1, abs=1e-15)

    def test_trivial_fixed_point(self):
        da, db, dc = react_tail(const(1.0), const(0.0), const(0.0), self.PARAMS)
        for f in (da, db, dc):
            assert np.all(f.values == 0.0)

    def test_species_b_budget(self, rng):
        # db + dc = ab^2 - k1 b - k3 c pointwise: predation flux cancels
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        c = random_field(SPEC, rng)
        da, db, dc = react_tail(a, b, c, self.PARAMS)
        budget = (a.values * b.values**2 - 0.2 * b.values - 0.005 * c.values)
        np.testing.assert_allclose(db.values + dc.values, budget, rtol=0, atol=1e-14)

    def test_matches_scalar_oracle(self, rng):
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        c = random_field(SPEC, rng)
        da, db, dc = react_tail(a, b, c, self.PARAMS)
        j, i = 2, 3
        ra, rb, rc = react_tail_scalar(a.values[j, i], b.values[j, i],
                                       c.values[j, i], 0.0347, 0.2, 0.8, 0.005)
        assert da.values[j, i] == pytest.approx(ra, abs=1e-15)
        assert db.values[j, i] == pytest.approx(rb, abs=1e-15)
        assert dc.values[j, i] == pytest.approx(rc, abs=1e-15)


class TestPointwiseLocality:
    def test_permuting_cells_permutes_outputs(self, rng):
        a = random_field(SPEC, rng)
        b = random_field(SPEC, rng)
        p = GrayScottParams(2e-5, 1e-5, 0.04, 0.06)
        perm = rng.permutation(SPEC.n_cells)
        ap = Field(SPEC, a.values.ravel()[perm].reshape(SPEC.shape))
        bp = Field(SPEC, b.values.ravel()[perm].reshape(SPEC.shape))
        da, db = react_gs(a, b, p)
        dap, dbp = react_gs(ap, bp, p)
        np.testing.assert_array_equal(dap.values.ravel(), da.values.ravel()[perm])
        np.testing.assert_array_equal(dbp.values.ravel(), db.values.ravel()[perm])


class TestHomogeneousFixedPoints:
    def test_classic_parameters(self):
        pts = homogeneous_fixed_points(GrayScottParams(2e-5, 1e-5, 0.04, 0.06))
        assert pts[0] == (1.0, 0.0)
        assert len(pts) == 3
        (a1, b1), (a2, b2) = pts[1], pts[2]
        assert b1 < b2
        assert (a1, b1) == (pytest.approx(0.9, rel=1e-12),
                            pytest.approx(0.06 / 0.9, rel=1e-12))
        assert (a2, b2) == (pytest.approx(0.1, rel=1e-12),
                            pytest.approx(0.6, rel=1e-12))

    def test_substitution_into_reaction_terms(self):
        p = GrayScottParams(2e-5, 1e-5, 0.04, 0.06)
        for a0, b0 in homogeneous_fixed_points(p):
            da, db = react_gs(const(a0), const(b0), p)
            assert abs(da.values[0, 0]) <= 1e-12
            assert abs(db.values[0, 0]) <= 1e-12

    def test_negative_discriminant_gives_trivial_only(self):
        # r^2 - 4 k^2 r = -4.4e-5 < 0
        p = GrayScottParams(2e-5, 1e-5, 0.01, 0.06)
        assert p.r**2 - 4 * p.k**2 * p.r == pytest.approx(-4.4e-5, rel=1e-9)
        assert homogeneous_fixed_points(p) == [(1.0, 0.0)]

    def test_random_parameters_all_roots_are_fixed_points(self, rng):
        for _ in range(20):
            r = float(rng.uniform(0.005, 0.08))
            k = float(rng.uniform(0.02, 0.08))
            p = GrayScottParams(2e-5, 1e-5, r, k)
            for a0, b0 in homogeneous_fixed_points(p):
                da, db = react_gs(const(a0), const(b0), p)
                assert abs(da.values[0, 0]) <= 1e-12
                assert abs(db.values[0, 0]) <= 1e-12
