import numpy as np
import pytest
from scipy.integrate import quad

from curvepulse import (CurveParams, curve_point, geometry, modulation_f,
                        signed_curvature, total_turning)
from curvepulse.curve import _components, unit_tangent
from curvepulse.qutrit import SQRT2

# High-accuracy reference values for the window function at (a, b) =
# (0.15*pi, 0.06), computed from the defining integrals with 30-digit
# arbitrary-precision quadrature.
F_ORACLE = {
    0.0: 1.7793149650384265e-07,
    0.1: 0.093428751331520207,
    0.125: 0.35304087060703573,
    0.25: 0.99998555078605327,
    0.5: 1.7793149650384265e-07,
}
L_ORACLE = 6.7348722328522602


class TestModulation:
    def test_plateau_value(self, optimal_params):
        assert modulation_f(0.25, optimal_params) == pytest.approx(1.0, abs=1e-3)

    def test_endpoint_value(self, optimal_params):
        assert modulation_f(0.0, optimal_params) == pytest.approx(0.0, abs=1e-3)

    @pytest.mark.parametrize("zeta,expected", sorted(F_ORACLE.items()))
    def test_against_quadrature_oracle(self, optimal_params, zeta, expected):
        assert modulation_f(zeta, optimal_params) == pytest.approx(
            expected, rel=1e-9, abs=1e-20)

    @pytest.mark.parametrize("a_over_pi,b", [(0.15, 0.06), (0.1, 0.03),
                                             (0.3, 0.1), (0.45, 0.18)])
    def test_mirror_symmetry(self, a_over_pi, b):
        params = CurveParams(a=a_over_pi * np.pi, b=b)
        zeta = np.linspace(0.0, 0.5, 257)
        f = modulation_f(zeta, params)
        assert np.max(np.abs(f - f[::-1])) <= 1e-12

    def test_range_near_optimum_box(self):
        # the window stays in [0, 1] in the sane neighborhood of the optimum
        for a_over_pi in np.linspace(0.08, 0.26, 7):
            for b in np.linspace(0.02, 0.10, 5):
                params = CurveParams(a=a_over_pi * np.pi, b=b)
                f = modulation_f(np.linspace(0, 0.5, 513), params)
                assert f.min() >= -1e-6 and f.max() <= 1.0 + 1e-6

    def test_invalid_params_raise(self):
        with pytest.raises(ValueError):
            CurveParams(a=-0.1, b=0.06)
        with pytest.raises(ValueError):
            CurveParams(a=0.5, b=0.5)

    def test_out_of_range_zeta_raises(self, optimal_params):
        with pytest.raises(ValueError):
            modulation_f(0.6, optimal_params)
        with pytest.raises(ValueError):
            curve_point(-0.1, optimal_params)


class TestCurvePoint:
    def test_origin_at_start(self, optimal_params):
        p = curve_point(0.0, optimal_params)
        assert p.y == pytest.approx(0.0, abs=1e-12)
        assert p.z == pytest.approx(0.0, abs=1e-12)

    def test_apex(self, optimal_params):
        p = curve_point(0.25, optimal_params)
        assert p.z == pytest.approx(2 * SQRT2, abs=1e-12)
        assert p.y == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("a_over_pi,b", [(0.15, 0.06), (0.22, 0.09)])
    def test_derivatives_match_finite_differences(self, a_over_pi, b):
        params = CurveParams(a=a_over_pi * np.pi, b=b)
        h = 1e-5
        zg = np.linspace(2 * h, 0.5 - 2 * h, 101)
        vals = _components(zg, params)
        plus = _components(zg + h, params)
        minus = _components(zg - h, params)
        for i_d, i_v in ((2, 0), (3, 1)):  # first derivatives of y, z
            fd = (plus[i_v] - minus[i_v]) / (2 * h)
            scale = np.max(np.abs(vals[i_d]))
            assert np.max(np.abs(vals[i_d] - fd)) / scale <= 1e-6
        for i_d, i_v in ((4, 0), (5, 1)):  # second derivatives
            fd = (plus[i_v] - 2 * vals[i_v] + minus[i_v]) / h**2
            scale = np.max(np.abs(vals[i_d]))
            assert np.max(np.abs(vals[i_d] - fd)) / scale <= 1e-6


class TestGeometry:
    def test_arclen_starts_at_zero_and_increases(self, optimal_geometry):
        assert optimal_geometry.arclen[0] == 0.0
        assert np.all(np.diff(optimal_geometry.arclen) > 0)

    def test_total_length_against_adaptive_quadrature(self, optimal_params,
                                                      optimal_geometry):
        def speed(zeta):
            _, _, yp, zp, _, _ = _components(np.atleast_1d(zeta),
                                             optimal_params)
            return float(np.hypot(yp, zp)[0])

        ref, _ = quad(speed, 0.0, 0.5, limit=200, epsabs=1e-12, epsrel=1e-12)
        assert optimal_geometry.L_total == pytest.approx(ref, rel=1e-9)
        assert optimal_geometry.L_total == pytest.approx(L_ORACLE, rel=1e-8)

    def test_reparameterization_invariance(self, optimal_params):
        L1 = geometry(optimal_params, n_grid=1024).L_total
        L2 = geometry(optimal_params, n_grid=2048).L_total
        assert abs(L1 - L2) / L2 <= 1e-8

    def test_gates_pass_at_optimum(self, optimal_geometry):
        g = optimal_geometry
        assert g.closure_residual <= 1e-3 * g.L_total
        assert max(g.tangent_residuals) <= 1e-3
        assert g.passes_gates

    def test_dimensionless_action(self, optimal_geometry):
        # L * kappa_max / sqrt(2) equals T * Omega_max for the synthesis
        action = optimal_geometry.L_total * optimal_geometry.kappa_max / SQRT2
        assert abs(action - 9.55) <= 0.15 * 9.55

    def test_kappa_max_regression(self, optimal_geometry):
        assert optimal_geometry.kappa_max == pytest.approx(1.8856726, rel=1e-5)

    def test_turning_is_odd_multiple_of_pi(self, optimal_geometry):
        turns = total_turning(optimal_geometry) / np.pi
        nearest = round(turns)
        assert nearest % 2 != 0
        assert abs(turns - nearest) * np.pi <= 1e-3

    def test_unit_tangent_at_ends(self, optimal_params):
        t0 = unit_tangent(0.0, optimal_params)
        t1 = unit_tangent(0.5, optimal_params)
        assert np.linalg.norm(t0 - [0, 0, 1]) <= 1e-3
        assert np.linalg.norm(t1 - [0, 0, -1]) <= 1e-3

    def test_small_grid_rejected(self, optimal_params):
        with pytest.raises(ValueError):
            geometry(optimal_params, n_grid=128)

    def test_degenerate_curve_reported_singular(self):
        # b = 0 with a = 0.5*pi collapses the window, leaving a doubled
        # straight segment with a stationary point at the apex
        geom = geometry(CurveParams(a=0.5 * np.pi, b=0.0), n_grid=512)
        assert geom.is_singular
        assert geom.singular_zeta == pytest.approx(0.25, abs=1e-2)
        assert not geom.passes_gates

    def test_distorted_corner_fails_gates(self):
        geom = geometry(CurveParams(a=0.5 * np.pi, b=0.2), n_grid=512)
        assert not geom.passes_gates

    def test_signed_curvature_changes_sign(self, optimal_geometry):
        # the window lobes bend opposite to the apex turn
        kappa = optimal_geometry.kappa_signed
        assert kappa.min() < -1e-2 and kappa.max() > 1e-2

    def test_curvature_parameterization_free(self, optimal_params):
        # spot check against |dT/ds| computed by finite differences of the
        # unit tangent with respect to arc length
        zeta0 = 0.137
        h = 1e-6
        t_plus = unit_tangent(zeta0 + h, optimal_params)
        t_minus = unit_tangent(zeta0 - h, optimal_params)
        _, _, yp, zp, _, _ = _components(np.atleast_1d(zeta0), optimal_params)
        speed = float(np.hypot(yp, zp)[0])
        dT_ds = np.linalg.norm(t_plus - t_minus) / (2 * h) / speed
        assert abs(signed_curvature(zeta0, optimal_params)) == pytest.approx(
            dT_ds, rel=1e-4)
