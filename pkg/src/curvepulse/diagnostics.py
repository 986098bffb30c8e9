"""Verification diagnostics for synthesized transfer pulses.

The central object is the interaction-frame accumulation of the detuning
operator, m(t) = int_0^t U(t',0)^dag Jz U(t',0) dt'.  Its coordinates
x = Tr[Jx m]/2 (and cyclic) trace a unit-speed space curve; transfer pulses
whose curve returns to the origin cancel the leading-order response to a
static detuning, and the residual matrix elements of m(T) give the
first-order infidelity coefficient directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curve import CurveGeometry, _components
from .pulses import NoiseSpec, PulseProgram, apply_noise
from .qutrit import basis_state, propagate, spin_matrices, step_unitaries
from .textio import fnum

_J = spin_matrices()
_JSTACK = np.stack([_J.Jx, _J.Jy, _J.Jz])


@dataclass
class ErrorFunctional:
    """m-accumulation record: final operator, its curve, and the first-order
    infidelity coefficient computed from the m(T) matrix elements."""

    times: np.ndarray
    r_trajectory: np.ndarray
    m_final: np.ndarray
    C_first_order: float

    @property
    def closure_ratio(self) -> float:
        """||m(T)||_F / T; ~0 for a closed curve."""
        return float(np.linalg.norm(self.m_final) / self.times[-1])


@dataclass
class InvariantAngles:
    """Mixing angles reconstructed from the propagator stream."""

    times: np.ndarray
    theta: np.ndarray
    beta: np.ndarray
    alpha1: np.ndarray
    omega0: float
    theta_boundary_residuals: tuple[float, float]
    beta_clamp_residual: float


@dataclass
class ScalingFit:
    """Least-squares slope of log(infidelity) vs log(delta)."""

    slope: float
    deltas: np.ndarray
    infidelities: np.ndarray
    n_used: int


def _boundary_and_midpoint_propagators(program: PulseProgram):
    """Cumulative propagators at sample boundaries (n+1) and midpoints (n)."""
    U_full, U_half = step_unitaries(program, half_steps=True)
    n = program.n_samples
    U_bound = np.empty((n + 1, 3, 3), dtype=complex)
    U_mid = np.empty((n, 3, 3), dtype=complex)
    U = np.eye(3, dtype=complex)
    U_bound[0] = U
    for k in range(n):
        U_mid[k] = U_half[k] @ U
        U = U_full[k] @ U
        U_bound[k + 1] = U
    return U_bound, U_mid


def _jz_frame(U: np.ndarray) -> np.ndarray:
    """W = U^dag Jz U for a stack of unitaries."""
    return np.einsum("nji,jk,nkl->nil", U.conj(), _J.Jz, U)


def _coords(W: np.ndarray) -> np.ndarray:
    """Projective coordinates Tr[J_nu W]/2 for a stack of operators."""
    return 0.5 * np.real(np.einsum("aij,nji->na", _JSTACK, W))


def accumulate_m(program: PulseProgram) -> ErrorFunctional:
    """Midpoint accumulation of m(t) alongside the propagation.

    Returns the trajectory r(t) on the boundary time grid, the final operator
    m(T), and C = |<+1|m(T)|0>|^2 + |<+1|m(T)|-1>|^2.
    """
    _, U_mid = _boundary_and_midpoint_propagators(program)
    W = _jz_frame(U_mid)
    dt = program.dt
    m_steps = W * dt
    coords = _coords(m_steps)
    r = np.vstack([np.zeros(3), np.cumsum(coords, axis=0)])
    m_final = m_steps.sum(axis=0)
    C = float(abs(m_final[0, 1]) ** 2 + abs(m_final[0, 2]) ** 2)
    times = np.arange(program.n_samples + 1) * dt
    return ErrorFunctional(times=times, r_trajectory=r, m_final=m_final,
                           C_first_order=C)


def first_order_coefficient(program: PulseProgram) -> float:
    """C = sum_{n != 1} |int_0^T <psi_1(t)|Jz|psi_n(t)> dt|^2.

    psi_n(t) = U(t,0)|n> with the bare basis states as the initial invariant
    modes (theta(0) = 0 makes the invariant proportional to Jz at t = 0).
    Integrated by the midpoint rule on its own propagation pass; must agree
    with the m(T) matrix-element expression of accumulate_m to rounding.
    """
    _, U_mid = _boundary_and_midpoint_propagators(program)
    # <psi_1|Jz|psi_n> = [U^dag Jz U]_{1n}
    W = _jz_frame(U_mid)
    integrals = W[:, 0, 1:].sum(axis=0) * program.dt
    return float(np.sum(np.abs(integrals) ** 2))


def curve_roundtrip(program: PulseProgram, designed: CurveGeometry) -> float:
    """Max pointwise distance between the dynamics curve and the design.

    The reconstructed trajectory is rescaled by the synthesis time scale and
    compared against the designed curve at matching arc length; the in-plane
    reflection ambiguity (the planar curve fixes alpha_1 only up to sign) is
    resolved by taking the better of the two orientations.
    """
    lam = program.metadata.get("time_scale")
    if lam is None:
        raise ValueError("program was not produced by synth_sta "
                         "(missing time_scale metadata)")
    ef = accumulate_m(program)
    arc = ef.times / lam
    if arc[-1] > designed.L_total * (1.0 + 1e-6):
        raise ValueError("trajectory longer than the designed curve")
    arc = np.clip(arc, 0.0, designed.L_total)
    zeta_of_arc = PchipInterpolator(designed.arclen, designed.zeta_grid)
    zeta = zeta_of_arc(arc)
    y_d, z_d, *_ = _components(zeta, designed.params)

    return aligned_max_distance(ef.r_trajectory / lam, y_d, z_d)


def aligned_max_distance(r_trajectory: np.ndarray, y_design: np.ndarray,
                         z_design: np.ndarray) -> float:
    """Max pointwise distance after resolving the in-plane reflection."""
    r = np.asarray(r_trajectory)
    if len(r) != len(y_design):
        raise ValueError("trajectory and design have different lengths")
    best = np.inf
    for sign in (+1.0, -1.0):
        d = np.sqrt(r[:, 0] ** 2 + (r[:, 1] - sign * y_design) ** 2
                    + (r[:, 2] - z_design) ** 2)
        best = min(best, float(np.max(d)))
    return best


def extract_angles(program: PulseProgram) -> InvariantAngles:
    """Reconstruct theta, beta and alpha_1 from the propagator stream.

    theta = arccos(z-component of the unit tangent of the m-curve); beta is
    recovered from theta' = -Omega sin(beta) with the argument clamped to
    [-1, 1] (clamp overshoot reported over the interior window, where the
    cot-theta singularity at the endpoints cannot pollute it).
    """
    U_bound, _ = _boundary_and_midpoint_propagators(program)
    W = _jz_frame(U_bound)
    tangent = _coords(W)
    speed = np.linalg.norm(tangent, axis=1)
    if np.max(np.abs(speed - 1.0)) > 1e-3:
        raise ValueError("tangent reconstruction failed: |r'| deviates from 1 "
                         f"by {np.max(np.abs(speed - 1.0)):.2e}")

    theta = np.arccos(np.clip(tangent[:, 2], -1.0, 1.0))
    alpha1 = np.arctan2(-tangent[:, 1], -tangent[:, 0])

    dt = program.dt
    theta_dot = np.gradient(theta, dt)
    # envelope on the boundary grid (samples live at midpoints)
    om_mid = program.omega_plus
    om_bound = np.empty(len(theta))
    om_bound[1:-1] = 0.5 * (om_mid[:-1] + om_mid[1:])
    om_bound[0] = om_mid[0]
    om_bound[-1] = om_mid[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        sin_beta_raw = np.where(np.abs(om_bound) > 1e-300,
                                -theta_dot / om_bound, 0.0)
    n = len(theta) - 1
    window = slice(max(int(0.02 * n), 1), min(int(0.98 * n) + 1, n))
    clamp_residual = float(max(np.max(np.abs(sin_beta_raw[window])) - 1.0, 0.0))
    beta = np.arcsin(np.clip(sin_beta_raw, -1.0, 1.0))

    times = np.arange(len(theta)) * dt
    return InvariantAngles(
        times=times,
        theta=theta,
        beta=beta,
        alpha1=alpha1,
        omega0=1.0,
        theta_boundary_residuals=(float(abs(theta[0])),
                                  float(abs(theta[-1] - np.pi))),
        beta_clamp_residual=clamp_residual,
    )


def infidelity_scaling(program: PulseProgram, delta_grid,
                       fit_window=(1e-10, 1e-2)) -> ScalingFit:
    """Fit the power law of 1 - P_-1(T) against the static detuning.

    Points outside the fit window are dropped (numerical floor below,
    higher-order saturation above); at least two usable points are required.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.size < 2:
        raise ValueError("delta grid must contain at least 2 points")
    psi0 = basis_state("+1")
    infids = np.empty(deltas.size)
    for i, d in enumerate(deltas):
        noisy = apply_noise(program, NoiseSpec(delta=float(d)))
        infids[i] = 1.0 - propagate(noisy, psi0).p_minus1[-1]
    lo, hi = fit_window
    mask = (infids > lo) & (infids < hi)
    if mask.sum() < 2:
        raise ValueError("fewer than 2 usable points in the fit window "
                         f"[{lo:g}, {hi:g}]")
    slope = float(np.polyfit(np.log(deltas[mask]), np.log(infids[mask]), 1)[0])
    return ScalingFit(slope=slope, deltas=deltas[mask],
                      infidelities=infids[mask], n_used=int(mask.sum()))


def write_diagnostics_csv(angles: InvariantAngles, ef: ErrorFunctional, path,
                          summary: dict | None = None,
                          provenance: str | None = None) -> None:
    """Per-time rows (t, theta, beta_clamped, x, y, z) plus a summary record."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if provenance:
            fh.write(f"#provenance,{provenance}\n")
        if summary:
            for key, value in summary.items():
                fh.write(f"#summary,{key},{fnum(value)}\n")
        fh.write("t_s,theta_rad,beta_clamped_rad,x,y,z\n")
        r = ef.r_trajectory
        for k in range(len(angles.times)):
            fh.write(f"{fnum(angles.times[k])},{fnum(angles.theta[k])},"
                     f"{fnum(angles.beta[k])},{fnum(r[k, 0])},"
                     f"{fnum(r[k, 1])},{fnum(r[k, 2])}\n")
