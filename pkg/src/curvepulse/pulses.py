"""Drive-program synthesis for the four transfer schemes, plus quasi-static noise.

A PulseProgram is a uniformly sampled record of the two signed envelopes and
the two diagonal detunings; samples are the values at the step midpoints.
Negative envelope samples are legal and mean a pi phase flip of the carrier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .curve import CurveGeometry, CurveParams, _components, geometry
from .qutrit import SQRT2, basis_state, propagate, sample_count_for
from .textio import fnum

PROGRAM_CSV_HEADER = "t_s,omega_plus_rad_s,omega_minus_rad_s,delta_plus_rad_s,delta_minus_rad_s"


class SchemeTag(enum.Enum):
    STA_SCQC = "STA_SCQC"
    STIRAP = "STIRAP"
    SRT = "SRT"
    PI_PULSE = "PI_PULSE"


@dataclass(frozen=True)
class NoiseSpec:
    """Quasi-static errors: delta shifts the |+1>/|-1> diagonals by +/-delta
    (half the shift of their splitting), epsilon scales both envelopes."""

    delta: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.delta) and np.isfinite(self.epsilon)):
            raise ValueError("noise parameters must be finite")


@dataclass(frozen=True)
class PulseProgram:
    dt: float
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    delta_plus: np.ndarray
    delta_minus: np.ndarray
    scheme: SchemeTag
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        n = len(self.omega_plus)
        for name in ("omega_minus", "delta_plus", "delta_minus"):
            if len(getattr(self, name)) != n:
                raise ValueError("all sample arrays must have equal length")

    @property
    def n_samples(self) -> int:
        return len(self.omega_plus)

    @property
    def duration(self) -> float:
        return self.dt * self.n_samples

    @property
    def midpoint_times(self) -> np.ndarray:
        return (np.arange(self.n_samples) + 0.5) * self.dt

    def sample(self, k: int):
        from .qutrit import DriveSample

        return DriveSample(
            omega_plus=float(self.omega_plus[k]),
            omega_minus=float(self.omega_minus[k]),
            delta_plus=float(self.delta_plus[k]),
            delta_minus=float(self.delta_minus[k]),
        )


def _program(dt, om_p, om_m, d_p, d_m, scheme, metadata) -> PulseProgram:
    return PulseProgram(
        dt=float(dt),
        omega_plus=np.asarray(om_p, dtype=float),
        omega_minus=np.asarray(om_m, dtype=float),
        delta_plus=np.asarray(d_p, dtype=float),
        delta_minus=np.asarray(d_m, dtype=float),
        scheme=scheme,
        metadata=metadata,
    )


def synth_sta(params: CurveParams, omega_max: float,
              n_samples: int | None = None, n_grid: int = 4096,
              geom: CurveGeometry | None = None) -> PulseProgram:
    """Synthesize the curve-shaped transfer pulse.

    The drive envelope follows the signed curvature of the design curve,
    mapped to physical time through the arc-length table.  `omega_max` sets
    the peak per-transition coupling matrix element <+/-1|H|0>; the time
    scale is lambda = kappa_max / (sqrt(2) * omega_max), so the envelope
    (conventional Rabi units, twice the element) peaks at 2*omega_max.
    Identical modulation is applied to both transitions and the detunings
    are zero.
    """
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    if geom is None:
        geom = geometry(params, n_grid)
    elif geom.params != params:
        raise ValueError("supplied geometry was computed for different params")
    if not geom.passes_gates:
        raise ValueError(
            f"curve fails validity gates at a={params.a}, b={params.b}: "
            f"closure={geom.closure_residual:.3e}, "
            f"tangents={geom.tangent_residuals}, singular={geom.is_singular}")

    lam = geom.kappa_max / (SQRT2 * omega_max)
    T = lam * geom.L_total
    if n_samples is None:
        n_samples = sample_count_for(T, 2.0 * omega_max)
    dt = T / n_samples

    zeta_of_arc = PchipInterpolator(geom.arclen, geom.zeta_grid)
    t_mid = (np.arange(n_samples) + 0.5) * dt
    zeta_mid = zeta_of_arc(t_mid / lam)
    _, _, yp, zp, ypp, zpp = _components(zeta_mid, params)
    kappa = (yp * zpp - zp * ypp) / (yp * yp + zp * zp) ** 1.5
    envelope = 2.0 * omega_max * kappa / geom.kappa_max

    zeros = np.zeros(n_samples)
    meta = {
        "a": params.a,
        "b": params.b,
        "omega_max": omega_max,
        "time_scale": lam,
        "L_total": geom.L_total,
        "kappa_max": geom.kappa_max,
        "duration": T,
        "omega_peak": float(np.max(np.abs(envelope))),
    }
    return _program(dt, envelope, envelope.copy(), zeros, zeros.copy(),
                    SchemeTag.STA_SCQC, meta)


def synth_stirap(T: float, amp_plus: float, amp_minus: float,
                 sigma: float | None = None, delta_tau: float | None = None,
                 n_samples: int | None = None) -> PulseProgram:
    """Two delayed Gaussian envelopes, truncated (not shifted) to [0, T].

    omega_plus peaks at T/2 - delta_tau, omega_minus at T/2 + delta_tau;
    a negative delta_tau therefore puts the |0><->|-1> pulse first (the
    counter-intuitive order for transfer out of |+1>).  Defaults are
    sigma = T/6 and delta_tau = +T/10 (the literal formula); use
    calibrate_stirap_sign to pick the transferring order.  The truncation
    leaves a pedestal exp(-(T/2 -/+ delta_tau)^2/sigma^2) at the window
    edges; it is documented, not zeroed.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if sigma is None:
        sigma = T / 6.0
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if delta_tau is None:
        delta_tau = T / 10.0
    if n_samples is None:
        amp = max(abs(amp_plus), abs(amp_minus))
        n_samples = sample_count_for(T, max(amp, 1.0 / T))
    dt = T / n_samples
    t = (np.arange(n_samples) + 0.5) * dt
    om_p = amp_plus * np.exp(-((t - T / 2 + delta_tau) ** 2) / sigma**2)
    om_m = amp_minus * np.exp(-((t - T / 2 - delta_tau) ** 2) / sigma**2)
    zeros = np.zeros(n_samples)
    meta = {"T": T, "amp_plus": amp_plus, "amp_minus": amp_minus,
            "sigma": sigma, "delta_tau": delta_tau}
    return _program(dt, om_p, om_m, zeros, zeros.copy(), SchemeTag.STIRAP, meta)


def synth_srt(T: float, omega: float, detuning_common: float,
              n_samples: int | None = None) -> PulseProgram:
    """Square pulses on both transitions, both red-detuned by a common amount.

    Implemented as delta_plus = delta_minus = +detuning_common (the |0> level
    sits -detuning below both drives, up to a global shift), which preserves
    two-photon resonance between |+1> and |-1>.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if n_samples is None:
        h_norm = np.sqrt(2 * detuning_common**2 + omega**2)
        n_samples = sample_count_for(T, max(h_norm, 1.0 / T))
    dt = T / n_samples
    om = np.full(n_samples, float(omega))
    det = np.full(n_samples, float(detuning_common))
    meta = {"T": T, "omega": omega, "detuning": detuning_common}
    return _program(dt, om, om.copy(), det, det.copy(), SchemeTag.SRT, meta)


def synth_pi(omega: float, transition: str = "both",
             n_samples: int | None = None) -> PulseProgram:
    """Constant resonant drive: duration pi/omega on one transition,
    sqrt(2)*pi/omega for the symmetric rotation on both."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if transition not in ("plus", "minus", "both"):
        raise ValueError(f"unknown transition {transition!r}")
    T = SQRT2 * np.pi / omega if transition == "both" else np.pi / omega
    if n_samples is None:
        n_samples = sample_count_for(T, omega)
    dt = T / n_samples
    om = np.full(n_samples, float(omega))
    zeros = np.zeros(n_samples)
    om_p = om if transition in ("plus", "both") else zeros
    om_m = om if transition in ("minus", "both") else zeros
    meta = {"omega": omega, "transition": transition, "T": T}
    return _program(dt, om_p.copy(), om_m.copy(), zeros.copy(), zeros.copy(),
                    SchemeTag.PI_PULSE, meta)


def apply_noise(program: PulseProgram, noise: NoiseSpec) -> PulseProgram:
    """Return a copy with the quasi-static errors folded in.

    delta adds to delta_plus and subtracts from delta_minus; epsilon scales
    both envelopes by (1 + epsilon).  Composition in delta is additive.
    """
    scale = 1.0 + noise.epsilon
    meta = dict(program.metadata)
    meta["noise_delta"] = meta.get("noise_delta", 0.0) + noise.delta
    meta["noise_epsilon"] = (1.0 + meta.get("noise_epsilon", 0.0)) * scale - 1.0
    return replace(
        program,
        omega_plus=program.omega_plus * scale,
        omega_minus=program.omega_minus * scale,
        delta_plus=program.delta_plus + noise.delta,
        delta_minus=program.delta_minus - noise.delta,
        metadata=meta,
    )


def final_p_minus1(program: PulseProgram, initial=None) -> float:
    """Convenience: propagate from |+1> (default) and return P_-1(T)."""
    if initial is None:
        initial = basis_state("+1")
    return float(propagate(program, initial).p_minus1[-1])


def calibrate_stirap_sign(amp: float, t_cal: float = 5e-6,
                          n_samples: int | None = None) -> int:
    """Pick the delta_tau sign with the higher transfer at the calibration T.

    Ties break toward the literal positive sign.
    """
    best_sign, best_p = +1, -1.0
    for sign in (+1, -1):
        prog = synth_stirap(t_cal, amp, amp, delta_tau=sign * t_cal / 10.0,
                            n_samples=n_samples)
        p = final_p_minus1(prog)
        if p > best_p:
            best_sign, best_p = sign, p
    return best_sign


def calibrate_srt_pi_time(omega: float, detuning_common: float,
                          t_max: float = 1.2e-6, threshold: float = 0.95,
                          scan_points: int = 240) -> tuple[float, float]:
    """Find the first local maximum of P_-1(T) that reaches the threshold.

    Scans T in (0, t_max], skips the sub-threshold wiggles that come from the
    non-adiabatic intermediate-level dynamics, then polishes the winner with
    a bounded scalar search.  Returns (T_star, P_star).
    """
    Ts = np.linspace(t_max / scan_points, t_max, scan_points)
    ps = np.array([final_p_minus1(synth_srt(T, omega, detuning_common))
                   for T in Ts])
    hit = None
    for i in range(1, len(ps) - 1):
        if ps[i] >= threshold and ps[i] >= ps[i - 1] and ps[i] >= ps[i + 1]:
            hit = i
            break
    if hit is None:
        raise ValueError(
            f"no local maximum of P_-1 above {threshold} for T <= {t_max}")
    lo, hi = Ts[max(hit - 2, 0)], Ts[min(hit + 2, len(Ts) - 1)]
    res = minimize_scalar(
        lambda T: -final_p_minus1(synth_srt(float(T), omega, detuning_common)),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def write_program_csv(program: PulseProgram, path,
                      provenance: str | None = None) -> None:
    """One row per sample at its midpoint time; floats use repr round-trip."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if provenance:
            fh.write(f"#provenance,{provenance}\n")
        fh.write(f"#scheme,{program.scheme.value}\n")
        fh.write(PROGRAM_CSV_HEADER + "\n")
        t = program.midpoint_times
        for k in range(program.n_samples):
            fh.write(f"{fnum(t[k])},{fnum(program.omega_plus[k])},"
                     f"{fnum(program.omega_minus[k])},"
                     f"{fnum(program.delta_plus[k])},"
                     f"{fnum(program.delta_minus[k])}\n")


def read_program_csv(path) -> PulseProgram:
    scheme = SchemeTag.STA_SCQC
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#scheme,"):
                scheme = SchemeTag(line.split(",", 1)[1])
                continue
            if line.startswith("#") or line.startswith("t_s,"):
                continue
            rows.append([float(x) for x in line.split(",")])
    if len(rows) < 2:
        raise ValueError(f"program file {path} has fewer than 2 samples")
    data = np.array(rows)
    t = data[:, 0]
    dt = float(t[1] - t[0])
    if np.max(np.abs(np.diff(t) - dt)) > 1e-6 * dt:
        raise ValueError(f"program file {path} is not uniformly sampled")
    return _program(dt, data[:, 1], data[:, 2], data[:, 3], data[:, 4],
                    scheme, {"source": str(path)})
