"""Exact numerics for a driven three-level (spin-1) system.

Basis order is fixed as (|+1>, |0>, |-1>) throughout, so that
Jz = diag(+1, 0, -1) literally.  All frequencies are angular (rad/s);
conversions from MHz/kHz happen only at the interface layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT2 = np.sqrt(2.0)

# Per-step phase budget: dt is chosen so that ||H||_F * dt stays below this,
# keeping the midpoint-rule error far under every acceptance tolerance.
MAX_STEP_PHASE = 0.02

_JX = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
_JY = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / SQRT2
_JZ = np.diag([1.0, 0.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class SpinOperators:
    """Spin-1 angular momentum matrices in the (|+1>, |0>, |-1>) basis."""

    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray


def spin_matrices() -> SpinOperators:
    """Return the spin-1 operators; Jx couples |0> to |+/-1> with elements 1/sqrt(2)."""
    return SpinOperators(Jx=_JX.copy(), Jy=_JY.copy(), Jz=_JZ.copy())


def basis_state(label: str) -> np.ndarray:
    """Basis ket for label '+1', '0' or '-1' as a complex 3-vector."""
    try:
        idx = {"+1": 0, "0": 1, "-1": 2}[label]
    except KeyError:
        raise ValueError(f"unknown basis label {label!r}") from None
    psi = np.zeros(3, dtype=complex)
    psi[idx] = 1.0
    return psi


@dataclass(frozen=True)
class DriveSample:
    """One sample of the two-tone drive.

    omega_plus/omega_minus are the signed Rabi envelopes of the |0><->|+1| and
    |0><->|-1| transitions (a negative value is a pi phase flip of the carrier);
    delta_plus/delta_minus are the diagonal energies of |+1> and |-1>.
    All in rad/s.
    """

    omega_plus: float
    omega_minus: float
    delta_plus: float = 0.0
    delta_minus: float = 0.0


def assemble_hamiltonian(sample: DriveSample) -> np.ndarray:
    """Build the 3x3 Hamiltonian for one drive sample.

    H = diag(delta_plus, 0, delta_minus)
        + (omega_plus/2)(|+1><0| + h.c.) + (omega_minus/2)(|-1><0| + h.c.)

    With omega_plus = omega_minus = W and deltas (d, -d) this equals
    W*Jx/sqrt(2) + d*Jz exactly.
    """
    values = (sample.omega_plus, sample.omega_minus,
              sample.delta_plus, sample.delta_minus)
    if not all(np.isfinite(v) for v in values):
        raise ValueError(f"non-finite drive sample: {sample}")
    H = np.zeros((3, 3), dtype=complex)
    H[0, 0] = sample.delta_plus
    H[2, 2] = sample.delta_minus
    H[0, 1] = H[1, 0] = sample.omega_plus / 2.0
    H[1, 2] = H[2, 1] = sample.omega_minus / 2.0
    return H


@dataclass
class SimulationResult:
    """Propagation record on the sample-boundary time grid (length n+1)."""

    times: np.ndarray
    populations: np.ndarray
    final_state: np.ndarray
    final_propagator: np.ndarray
    step_count: int

    @property
    def p_minus1(self) -> np.ndarray:
        return self.populations[:, 2]

    @property
    def p_zero(self) -> np.ndarray:
        return self.populations[:, 1]

    @property
    def p_plus1(self) -> np.ndarray:
        return self.populations[:, 0]


def hamiltonian_stack(program) -> np.ndarray:
    """Vectorized (n,3,3) Hamiltonian stack for a PulseProgram."""
    arrays = (program.omega_plus, program.omega_minus,
              program.delta_plus, program.delta_minus)
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise ValueError("program contains non-finite drive values")
    n = program.n_samples
    H = np.zeros((n, 3, 3), dtype=complex)
    H[:, 0, 0] = program.delta_plus
    H[:, 2, 2] = program.delta_minus
    H[:, 0, 1] = H[:, 1, 0] = program.omega_plus / 2.0
    H[:, 1, 2] = H[:, 2, 1] = program.omega_minus / 2.0
    return H


def step_unitaries(program, half_steps: bool = False):
    """Per-step propagators exp(-i H_k dt) via batched eigendecomposition.

    Exact exponentials of Hermitian matrices are unconditionally unitary, so
    there is no norm drift to control.  When half_steps is true the half-step
    unitaries exp(-i H_k dt/2) are returned as well (used by the diagnostics
    for midpoint accumulation).
    """
    H = hamiltonian_stack(program)
    w, V = np.linalg.eigh(H)
    dt = program.dt
    U_full = np.einsum("nij,nj,nkj->nik", V, np.exp(-1j * w * dt), V.conj())
    if not half_steps:
        return U_full
    U_half = np.einsum("nij,nj,nkj->nik", V, np.exp(-1j * w * dt / 2.0), V.conj())
    return U_full, U_half


def propagate(program, initial: np.ndarray) -> SimulationResult:
    """Propagate `initial` under a sampled drive program.

    The program's samples are the drive values at the step midpoints; each
    step applies the exact unitary exp(-i H_k dt).  Raises on a non-normalized
    initial state or a program with fewer than 2 samples.
    """
    psi0 = np.asarray(initial, dtype=complex).reshape(3)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"initial state not normalized: |psi| = {norm}")
    if program.n_samples < 2:
        raise ValueError("program must contain at least 2 samples")

    U_steps = step_unitaries(program)
    n = program.n_samples
    pops = np.empty((n + 1, 3))
    pops[0] = np.abs(psi0) ** 2
    U = np.eye(3, dtype=complex)
    for k in range(n):
        U = U_steps[k] @ U
        pops[k + 1] = np.abs(U @ psi0) ** 2
    final_state = U @ psi0
    return SimulationResult(
        times=np.arange(n + 1) * program.dt,
        populations=pops,
        final_state=final_state,
        final_propagator=U,
        step_count=n,
    )


def sample_count_for(duration: float, h_norm_max: float, minimum: int = 400) -> int:
    """Sample count satisfying the per-step phase budget ||H||_F*dt <= MAX_STEP_PHASE."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    n = int(np.ceil(duration * h_norm_max / MAX_STEP_PHASE))
    return max(n, minimum)
