import numpy as np
import pytest

from curvepulse import CurveParams, calibrate_srt_pi_time, geometry, synth_sta

OMEGA_REF = 2 * np.pi * 1.9e6
SRT_DETUNING = 2 * np.pi * 2.5e6


@pytest.fixture(scope="session")
def optimal_params():
    return CurveParams(a=0.15 * np.pi, b=0.06)


@pytest.fixture(scope="session")
def optimal_geometry(optimal_params):
    return geometry(optimal_params)


@pytest.fixture(scope="session")
def sta_program(optimal_params, optimal_geometry):
    return synth_sta(optimal_params, OMEGA_REF, geom=optimal_geometry)


@pytest.fixture(scope="session")
def srt_calibration():
    """(T_star, P_star) of the first >=0.95 transfer maximum."""
    return calibrate_srt_pi_time(OMEGA_REF, SRT_DETUNING)
