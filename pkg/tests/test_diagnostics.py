import numpy as np
import pytest

from curvepulse import (NoiseSpec, PulseProgram, SchemeTag, accumulate_m,
                        apply_noise, curve_roundtrip, extract_angles,
                        final_p_minus1, first_order_coefficient,
                        infidelity_scaling, spin_matrices, synth_pi,
                        synth_sta)
from curvepulse.diagnostics import aligned_max_distance
from curvepulse.qutrit import SQRT2

from conftest import OMEGA_REF


def _zero_program(T=1e-6, n=100):
    z = np.zeros(n)
    return PulseProgram(dt=T / n, omega_plus=z, omega_minus=z.copy(),
                        delta_plus=z.copy(), delta_minus=z.copy(),
                        scheme=SchemeTag.PI_PULSE)


class TestAccumulateM:
    def test_zero_drive_accumulates_jz(self):
        T = 1e-6
        ef = accumulate_m(_zero_program(T))
        assert np.max(np.abs(ef.m_final - T * spin_matrices().Jz)) <= 1e-18
        assert np.allclose(ef.r_trajectory[-1], [0, 0, T], atol=1e-18)

    def test_sta_curve_closes(self, sta_program):
        ef = accumulate_m(sta_program)
        assert ef.closure_ratio <= 1e-3

    def test_pi_pulse_curve_open(self):
        prog = synth_pi(OMEGA_REF, "both", n_samples=2000)
        ef = accumulate_m(prog)
        assert ef.closure_ratio > 0.1
        # semicircle of radius sqrt(2)/Omega: ||m(T)||_F/T = 4/(sqrt(2)*pi)
        assert ef.closure_ratio == pytest.approx(4 / (SQRT2 * np.pi), rel=1e-3)

    def test_trajectory_stays_planar(self, sta_program):
        ef = accumulate_m(sta_program)
        assert np.max(np.abs(ef.r_trajectory[:, 0])) <= 1e-12 * sta_program.duration

    def test_m_final_hermitian(self, sta_program):
        m = accumulate_m(sta_program).m_final
        assert np.max(np.abs(m - m.conj().T)) <= 1e-20


class TestFirstOrderCoefficient:
    def test_zero_drive_vanishes(self):
        assert first_order_coefficient(_zero_program()) == 0.0

    def test_sta_suppressed(self, sta_program):
        T = sta_program.duration
        C = first_order_coefficient(sta_program)
        assert C <= 1e-6 * T * T

    def test_pi_pulse_analytic_value(self):
        prog = synth_pi(OMEGA_REF, "both", n_samples=2000)
        C = first_order_coefficient(prog)
        T = prog.duration
        assert C > 0.01 * T * T
        assert C == pytest.approx(4.0 / OMEGA_REF**2, rel=1e-3)

    @pytest.mark.parametrize("case", ["sta", "pi", "zero"])
    def test_identity_with_m_elements(self, case, sta_program):
        prog = {"sta": sta_program,
                "pi": synth_pi(OMEGA_REF, "both", n_samples=800),
                "zero": _zero_program()}[case]
        ef = accumulate_m(prog)
        C = first_order_coefficient(prog)
        assert abs(C - ef.C_first_order) <= 1e-8
        assert abs(C - ef.C_first_order) <= 1e-8 * max(C, 1e-30)


class TestCurveRoundtrip:
    def test_sta_matches_design(self, sta_program, optimal_geometry):
        dev = curve_roundtrip(sta_program, optimal_geometry)
        assert dev <= 1e-2 * optimal_geometry.L_total

    def test_design_against_itself_is_zero(self, optimal_geometry):
        y, z = optimal_geometry.y, optimal_geometry.z
        r = np.stack([np.zeros_like(y), y, z], axis=1)
        assert aligned_max_distance(r, y, z) == 0.0

    def test_resolution_refinement_improves(self, optimal_params,
                                            optimal_geometry):
        coarse = synth_sta(optimal_params, OMEGA_REF, n_samples=400,
                           geom=optimal_geometry)
        fine = synth_sta(optimal_params, OMEGA_REF, n_samples=3200,
                         geom=optimal_geometry)
        dev_coarse = curve_roundtrip(coarse, optimal_geometry)
        dev_fine = curve_roundtrip(fine, optimal_geometry)
        assert dev_fine < dev_coarse

    def test_requires_synthesis_metadata(self, optimal_geometry):
        with pytest.raises(ValueError, match="time_scale"):
            curve_roundtrip(_zero_program(), optimal_geometry)

    def test_length_mismatch_raises(self, optimal_geometry):
        r = np.zeros((7, 3))
        with pytest.raises(ValueError, match="length"):
            aligned_max_distance(r, optimal_geometry.y, optimal_geometry.z)

    def test_closure_agreement_with_design(self, sta_program,
                                           optimal_geometry):
        # both closure measures agree once floored at the quadrature scale
        m_ratio = accumulate_m(sta_program).closure_ratio
        design_ratio = (optimal_geometry.closure_residual
                        / optimal_geometry.L_total)
        floor = 1e-6
        lo = max(min(m_ratio, design_ratio), floor)
        hi = max(m_ratio, design_ratio, floor)
        assert hi / lo <= 5.0


class TestExtractAngles:
    def test_sta_boundary_conditions(self, sta_program):
        angles = extract_angles(sta_program)
        assert angles.theta_boundary_residuals[0] <= 1e-2
        assert angles.theta_boundary_residuals[1] <= 1e-2
        assert angles.theta[0] == pytest.approx(0.0, abs=1e-6)
        assert angles.theta[-1] == pytest.approx(np.pi, abs=1e-2)

    def test_planar_curve_has_vanishing_cos_alpha1(self, sta_program):
        angles = extract_angles(sta_program)
        interior = np.sin(angles.theta) > 1e-3
        assert np.max(np.abs(np.cos(angles.alpha1[interior]))) <= 1e-6

    def test_zero_drive_theta_constant(self):
        angles = extract_angles(_zero_program())
        assert np.max(np.abs(angles.theta)) <= 1e-8

    def test_clamp_residual_small(self, sta_program):
        angles = extract_angles(sta_program)
        assert angles.beta_clamp_residual <= 1e-3

    def test_omega0_is_unit(self, sta_program):
        assert extract_angles(sta_program).omega0 == 1.0


class TestInfidelityScaling:
    DELTA_GRID = 2 * np.pi * 1e3 * np.array([1, 2, 3, 5, 8, 12, 20, 30])

    def test_sta_slope_at_least_cubic(self, sta_program):
        fit = infidelity_scaling(sta_program, self.DELTA_GRID)
        assert fit.slope >= 3.0

    def test_pi_pulse_slope_quadratic(self):
        prog = synth_pi(OMEGA_REF, "both", n_samples=1500)
        fit = infidelity_scaling(prog, self.DELTA_GRID)
        assert fit.slope == pytest.approx(2.0, abs=0.2)

    def test_single_point_grid_rejected(self, sta_program):
        with pytest.raises(ValueError):
            infidelity_scaling(sta_program, [2 * np.pi * 1e4])

    def test_quadratic_response_prediction(self):
        # pi-pulse infidelity tracks C*delta^2 in the small-detuning regime
        prog = synth_pi(OMEGA_REF, "both", n_samples=1500)
        C = first_order_coefficient(prog)
        for dk in (2e3, 5e3, 10e3):
            d = 2 * np.pi * dk
            infid = 1.0 - final_p_minus1(apply_noise(prog, NoiseSpec(delta=d)))
            assert infid == pytest.approx(C * d * d, rel=0.10)


def test_sta_theta_reaches_pi_via_angles(sta_program):
    # envelope consistency: the accumulated mixing angle ends at pi
    angles = extract_angles(sta_program)
    assert abs(angles.theta[-1] - np.pi) <= 1e-2


def test_diagnostics_csv(tmp_path, sta_program):
    from curvepulse.diagnostics import write_diagnostics_csv

    angles = extract_angles(sta_program)
    ef = accumulate_m(sta_program)
    path = tmp_path / "diag.csv"
    write_diagnostics_csv(angles, ef, path,
                          summary={"C_first_order": ef.C_first_order},
                          provenance="deadbeef")
    lines = path.read_text().splitlines()
    assert lines[0] == "#provenance,deadbeef"
    assert lines[1].startswith("#summary,C_first_order,")
    assert lines[2] == "t_s,theta_rad,beta_clamped_rad,x,y,z"
    assert len(lines) == 3 + len(angles.times)
