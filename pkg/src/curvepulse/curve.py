"""The erf-modulated plane curve, its derivatives, arc length and curvature.

The curve lives in the y-z plane (x identically 0) on the parameter interval
zeta in [0, 0.5]:

    y(zeta) = -(3*sqrt(2)/2) * sin(2*pi*zeta)*cos(2*pi*zeta) / (1 + cos^2(2*pi*zeta)) * f(zeta)
    z(zeta) =  2*sqrt(2)     * sin(2*pi*zeta)                / (1 + cos^2(2*pi*zeta))

f is an erf-difference window controlled by (a, b); it opens the y-lobes in
the interior while keeping the endpoints straight, which is what makes the
start/end tangents line up with the +z/-z axis.  All derivatives are analytic
(chain rule through the erf integrals) because the drive envelope is built
from the second derivatives and finite-difference noise would leak into it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf

from .textio import fnum

SQRT2 = np.sqrt(2.0)
SQRT_PI = np.sqrt(np.pi)

# Gauss-Legendre nodes/weights for the per-interval arc-length quadrature.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)

CLOSURE_RTOL = 1e-3      # closure gate: |r(0.5)-r(0)| <= CLOSURE_RTOL * L_total
TANGENT_TOL = 1e-3       # tangent gate: |unit tangent - (0,0,+/-1)| at the ends
DEGENERATE_SPEED = 1e-12


@dataclass(frozen=True)
class CurveParams:
    """Modulation parameters: a is the ramp width, b the ramp offset."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0):
            raise ValueError(f"a must be positive, got {self.a}")
        if not (0.0 <= self.b < 0.5):
            raise ValueError(f"b must lie in [0, 0.5), got {self.b}")

    @property
    def a_over_pi(self) -> float:
        return self.a / np.pi


@dataclass(frozen=True)
class CurveSample:
    zeta: float
    y: float
    z: float
    dy: float
    dz: float
    ddy: float
    ddz: float


@dataclass
class CurveGeometry:
    """Tabulated geometry of one curve plus closure/tangent diagnostics."""

    params: CurveParams
    zeta_grid: np.ndarray
    y: np.ndarray
    z: np.ndarray
    arclen: np.ndarray
    kappa_signed: np.ndarray
    L_total: float
    kappa_max: float
    closure_residual: float
    tangent_residuals: tuple[float, float]
    is_singular: bool = False
    singular_zeta: float | None = None

    @property
    def passes_gates(self) -> bool:
        """Validity gates used by synthesis and the optimizer (not hard errors)."""
        if self.is_singular:
            return False
        return (self.closure_residual <= CLOSURE_RTOL * self.L_total
                and max(self.tangent_residuals) <= TANGENT_TOL)


def _check_zeta(zeta) -> np.ndarray:
    z = np.asarray(zeta, dtype=float)
    if np.any(z < -1e-12) or np.any(z > 0.5 + 1e-12):
        raise ValueError("zeta must lie in [0, 0.5]")
    return z


def _mu_eta(zeta: np.ndarray, params: CurveParams):
    a, b = params.a, params.b
    mu = 2.0 * (-a - 2.0 * np.pi * (zeta - 0.5 + b)) / a
    eta = 2.0 * (a - 2.0 * np.pi * (zeta - b)) / a
    return mu, eta


def modulation_f(zeta, params: CurveParams):
    """Erf-difference window f(zeta) = [erf(mu) - erf(eta)] / 2."""
    z = _check_zeta(zeta)
    mu, eta = _mu_eta(z, params)
    out = 0.5 * (erf(mu) - erf(eta))
    return float(out) if np.isscalar(zeta) else out


def _components(zeta: np.ndarray, params: CurveParams):
    """y, z and their first/second zeta-derivatives, all analytic.

    Both coordinates are quotients u/v with v = 1 + cos^2(2*pi*zeta); the
    derivatives follow the quotient rule, and f contributes through
    d/dmu int_0^mu e^{-l^2} dl = e^{-mu^2}.
    """
    s = np.sin(2 * np.pi * zeta)
    c = np.cos(2 * np.pi * zeta)
    sp = 2 * np.pi * c
    cp = -2 * np.pi * s
    spp = -(2 * np.pi) ** 2 * s
    cpp = -(2 * np.pi) ** 2 * c

    v = 1.0 + c * c
    vp = 2.0 * c * cp
    vpp = 2.0 * (cp * cp + c * cpp)

    def quotient(u, up, upp):
        q = u / v
        qp = (up * v - u * vp) / v**2
        qpp = (upp * v - u * vpp) / v**2 - 2.0 * vp * (up * v - u * vp) / v**3
        return q, qp, qpp

    # z-coordinate
    u = 2 * SQRT2 * s
    z, zp, zpp = quotient(u, 2 * SQRT2 * sp, 2 * SQRT2 * spp)

    # unmodulated y-factor g = -(3*sqrt(2)/2) * s * c / v
    w = -(3 * SQRT2 / 2) * s * c
    wp = -(3 * SQRT2 / 2) * (sp * c + s * cp)
    wpp = -(3 * SQRT2 / 2) * (spp * c + 2 * sp * cp + s * cpp)
    g, gp, gpp = quotient(w, wp, wpp)

    # modulation window and derivatives
    mu, eta = _mu_eta(zeta, params)
    dmu = -4.0 * np.pi / params.a  # = d(eta)/d(zeta) as well
    f = 0.5 * (erf(mu) - erf(eta))
    fp = (np.exp(-mu * mu) - np.exp(-eta * eta)) * dmu / SQRT_PI
    fpp = -2.0 * (mu * np.exp(-mu * mu) - eta * np.exp(-eta * eta)) * dmu**2 / SQRT_PI

    y = g * f
    yp = gp * f + g * fp
    ypp = gpp * f + 2.0 * gp * fp + g * fpp
    return y, z, yp, zp, ypp, zpp


def curve_point(zeta: float, params: CurveParams) -> CurveSample:
    """Evaluate the curve and its zeta-derivatives at one parameter value."""
    z = float(_check_zeta(zeta))
    y, zz, yp, zp, ypp, zpp = _components(np.atleast_1d(z), params)
    return CurveSample(zeta=z, y=float(y[0]), z=float(zz[0]),
                       dy=float(yp[0]), dz=float(zp[0]),
                       ddy=float(ypp[0]), ddz=float(zpp[0]))


def unit_tangent(zeta, params: CurveParams) -> np.ndarray:
    """Unit tangent (0, y', z')/speed at the given zeta values."""
    z = np.atleast_1d(_check_zeta(zeta))
    _, _, yp, zp, _, _ = _components(z, params)
    speed = np.hypot(yp, zp)
    t = np.stack([np.zeros_like(yp), yp / speed, zp / speed], axis=-1)
    return t[0] if np.isscalar(zeta) else t


def signed_curvature(zeta, params: CurveParams):
    """Signed planar curvature (y'z'' - z'y'')/speed^3; parameterization-free."""
    z = np.atleast_1d(_check_zeta(zeta))
    _, _, yp, zp, ypp, zpp = _components(z, params)
    speed2 = yp * yp + zp * zp
    kappa = (yp * zpp - zp * ypp) / speed2**1.5
    return float(kappa[0]) if np.isscalar(zeta) else kappa


def _refine_kappa_max(params: CurveParams, zeta_grid: np.ndarray,
                      kappa: np.ndarray) -> float:
    """Polish the grid curvature maximum inside its bracketing cells."""
    i = int(np.argmax(np.abs(kappa)))
    lo = zeta_grid[max(i - 1, 0)]
    hi = zeta_grid[min(i + 1, len(zeta_grid) - 1)]
    res = minimize_scalar(lambda zt: -abs(signed_curvature(zt, params)),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return max(float(-res.fun), float(np.abs(kappa[i])))


def geometry(params: CurveParams, n_grid: int = 4096) -> CurveGeometry:
    """Tabulate arc length and signed curvature on a uniform zeta grid.

    Arc length uses composite 5-point Gauss-Legendre quadrature per grid
    interval (the integrand is smooth, so this is effectively exact); the
    curvature maximum is refined by a bounded scalar search near the grid
    peak.  A curve with |r'| < 1e-12 anywhere is reported as singular with
    the offending zeta instead of raising.
    """
    if n_grid < 256:
        raise ValueError("n_grid must be at least 256")
    zg = np.linspace(0.0, 0.5, n_grid + 1)
    y, z, yp, zp, ypp, zpp = _components(zg, params)
    speed = np.hypot(yp, zp)

    singular = bool(np.min(speed) < DEGENERATE_SPEED)
    singular_zeta = float(zg[int(np.argmin(speed))]) if singular else None

    # cumulative arc length, one GL5 panel per interval
    h = zg[1:] - zg[:-1]
    mid = 0.5 * (zg[1:] + zg[:-1])
    seg = np.zeros(n_grid)
    for x, wgt in zip(_GL_NODES, _GL_WEIGHTS):
        zq = mid + 0.5 * h * x
        _, _, ypq, zpq, _, _ = _components(zq, params)
        seg += 0.5 * h * wgt * np.hypot(ypq, zpq)
    arclen = np.concatenate([[0.0], np.cumsum(seg)])
    L_total = float(arclen[-1])

    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = (yp * zpp - zp * ypp) / (yp * yp + zp * zp) ** 1.5
    if singular:
        kappa = np.where(np.isfinite(kappa), kappa, 0.0)
        kappa_max = float(np.max(np.abs(kappa)))
    else:
        kappa_max = _refine_kappa_max(params, zg, kappa)

    closure = float(np.hypot(y[-1] - y[0], z[-1] - z[0]))
    t0 = np.array([yp[0], zp[0]]) / speed[0]
    t1 = np.array([yp[-1], zp[-1]]) / speed[-1]
    tangent_residuals = (float(np.hypot(t0[0], t0[1] - 1.0)),
                         float(np.hypot(t1[0], t1[1] + 1.0)))

    return CurveGeometry(
        params=params,
        zeta_grid=zg,
        y=y,
        z=z,
        arclen=arclen,
        kappa_signed=kappa,
        L_total=L_total,
        kappa_max=kappa_max,
        closure_residual=closure,
        tangent_residuals=tangent_residuals,
        is_singular=singular,
        singular_zeta=singular_zeta,
    )


def total_turning(geom: CurveGeometry) -> float:
    """Integral of signed curvature over arc length (trapezoid on the grid)."""
    kmid = 0.5 * (geom.kappa_signed[1:] + geom.kappa_signed[:-1])
    return float(np.sum(kmid * np.diff(geom.arclen)))


def write_geometry_csv(geom: CurveGeometry, path, provenance: str | None = None) -> None:
    """Serialize the geometry table as CSV (zeta, y, z, arclen, kappa_signed)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if provenance:
            fh.write(f"#provenance,{provenance}\n")
        fh.write("zeta,y,z,arclen,kappa_signed\n")
        for k in range(len(geom.zeta_grid)):
            fh.write(f"{fnum(geom.zeta_grid[k])},{fnum(geom.y[k])},{fnum(geom.z[k])},"
                     f"{fnum(geom.arclen[k])},{fnum(geom.kappa_signed[k])}\n")
