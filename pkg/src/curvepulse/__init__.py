"""curvepulse: space-curve pulse design and exact simulation for a driven
spin-1 three-level system, with STIRAP / Raman / pi-pulse baselines."""

from .curve import (CurveGeometry, CurveParams, CurveSample, curve_point,
                    geometry, modulation_f, signed_curvature, total_turning)
from .diagnostics import (ErrorFunctional, InvariantAngles, ScalingFit,
                          accumulate_m, curve_roundtrip, extract_angles,
                          first_order_coefficient, infidelity_scaling)
from .optimize import OptimumReport, objective, optimize
from .pulses import (NoiseSpec, PulseProgram, SchemeTag, apply_noise,
                     calibrate_srt_pi_time, calibrate_stirap_sign,
                     final_p_minus1, read_program_csv, synth_pi, synth_srt,
                     synth_sta, synth_stirap, write_program_csv)
from .qutrit import (DriveSample, SimulationResult, SpinOperators,
                     assemble_hamiltonian, basis_state, propagate,
                     spin_matrices)

__version__ = "0.1.0"

__all__ = [
    "CurveGeometry", "CurveParams", "CurveSample", "curve_point", "geometry",
    "modulation_f", "signed_curvature", "total_turning",
    "ErrorFunctional", "InvariantAngles", "ScalingFit", "accumulate_m",
    "curve_roundtrip", "extract_angles", "first_order_coefficient",
    "infidelity_scaling",
    "OptimumReport", "objective", "optimize",
    "NoiseSpec", "PulseProgram", "SchemeTag", "apply_noise",
    "calibrate_srt_pi_time", "calibrate_stirap_sign", "final_p_minus1",
    "read_program_csv", "synth_pi", "synth_srt", "synth_sta", "synth_stirap",
    "write_program_csv",
    "DriveSample", "SimulationResult", "SpinOperators", "assemble_hamiltonian",
    "basis_state", "propagate", "spin_matrices",
    "__version__",
]
