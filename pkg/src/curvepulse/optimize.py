"""Minimize the physical transfer time over the curve parameters (a, b).

The objective is T(a, b) = L_total * kappa_max / (sqrt(2) * omega_max): the
duration of the synthesized pulse when the peak coupling element is pinned
at omega_max.  Cells whose curve fails the closure/tangent gates (or is
degenerate) get an infinite sentinel rather than an error, so the raster
scan and the simplex both just avoid them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .curve import CLOSURE_RTOL, TANGENT_TOL, CurveParams, geometry
from .qutrit import SQRT2
from .textio import fnum

DEFAULT_BOX = ((0.05, 0.5), (0.0, 0.2))  # (a/pi range, b range)
INVALID = math.inf


@dataclass
class OptimumReport:
    best_params: CurveParams | None
    best_T: float
    landscape: np.ndarray  # structured rows: a_over_pi, b, T, valid
    evaluations: int
    gate_tolerances: dict = field(default_factory=dict)
    refined: bool = False


def objective(params: CurveParams, omega_max: float, n_grid: int = 1024) -> float:
    """Pulse duration in seconds, or the +inf sentinel for gated-out curves."""
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    geom = geometry(params, n_grid)
    if not geom.passes_gates:
        return INVALID
    return geom.L_total * geom.kappa_max / (SQRT2 * omega_max)


def _cell(args) -> float:
    a_over_pi, b, omega_max, n_grid = args
    try:
        params = CurveParams(a=a_over_pi * np.pi, b=b)
    except ValueError:
        return INVALID
    return objective(params, omega_max, n_grid)


def optimize(omega_max: float, box=DEFAULT_BOX, coarse_grid=(60, 60),
             refine: bool = True, n_grid: int = 1024,
             workers: int = 1) -> OptimumReport:
    """Deterministic raster scan followed by Nelder-Mead refinement.

    The scan runs a-major (ties resolve to the smaller a, then smaller b);
    the simplex starts from the best cell in (a/pi, b) coordinates with the
    standard coefficients and stops when the simplex diameter drops below
    1e-4.  Grid evaluation may fan out over worker processes; results are
    collected in scan order so the report is identical for any worker count.
    """
    (a_lo, a_hi), (b_lo, b_hi) = box
    na, nb = coarse_grid
    if na < 2 or nb < 2:
        a_vals = np.array([0.5 * (a_lo + a_hi)]) if na < 2 else np.linspace(a_lo, a_hi, na)
        b_vals = np.array([0.5 * (b_lo + b_hi)]) if nb < 2 else np.linspace(b_lo, b_hi, nb)
    else:
        a_vals = np.linspace(a_lo, a_hi, na)
        b_vals = np.linspace(b_lo, b_hi, nb)

    tasks = [(float(a), float(b), omega_max, n_grid)
             for a in a_vals for b in b_vals]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_cell, tasks, chunksize=64))
    else:
        values = [_cell(t) for t in tasks]
    evaluations = len(tasks)

    landscape = np.array([(t[0], t[1], v, float(np.isfinite(v)))
                          for t, v in zip(tasks, values)])
    finite = [v for v in values if np.isfinite(v)]
    gate_tol = {"closure_rtol": CLOSURE_RTOL, "tangent_tol": TANGENT_TOL}
    if not finite:
        return OptimumReport(best_params=None, best_T=INVALID,
                             landscape=landscape, evaluations=evaluations,
                             gate_tolerances=gate_tol, refined=False)

    best_idx = int(np.argmin(values))  # first occurrence = smaller a, then b
    best_u = np.array([tasks[best_idx][0], tasks[best_idx][1]])
    best_T = values[best_idx]
    refined = False

    if refine:
        counter = [0]

        def fun(u):
            counter[0] += 1
            a_over_pi, b = float(u[0]), float(u[1])
            if not (a_lo <= a_over_pi <= a_hi and b_lo <= b <= b_hi):
                return INVALID
            return _cell((a_over_pi, b, omega_max, n_grid))

        res = minimize(fun, best_u, method="Nelder-Mead",
                       options={"xatol": 1e-4, "fatol": 1e-18,
                                "maxiter": 400, "maxfev": 400})
        evaluations += counter[0]
        if np.isfinite(res.fun) and res.fun <= best_T:
            best_u, best_T = res.x, float(res.fun)
            refined = True

    best_params = CurveParams(a=float(best_u[0]) * np.pi, b=float(best_u[1]))
    return OptimumReport(best_params=best_params, best_T=best_T,
                         landscape=landscape, evaluations=evaluations,
                         gate_tolerances=gate_tol, refined=refined)


def write_landscape_csv(report: OptimumReport, path,
                        provenance: str | None = None) -> None:
    """Landscape rows `a_over_pi,b,T_us,valid` plus an `#optimum,` footer."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if provenance:
            fh.write(f"#provenance,{provenance}\n")
        fh.write("a_over_pi,b,T_us,valid\n")
        for a_over_pi, b, T, valid in report.landscape:
            t_us = T * 1e6 if np.isfinite(T) else math.inf
            fh.write(f"{fnum(a_over_pi)},{fnum(b)},{fnum(t_us)},{int(valid)}\n")
        if report.best_params is not None:
            fh.write(f"#optimum,{fnum(report.best_params.a_over_pi)},"
                     f"{fnum(report.best_params.b)},"
                     f"{fnum(report.best_T * 1e6)}\n")
