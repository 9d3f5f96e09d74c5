"""Scalar functionals of flow snapshots: conserved integrals, backward-heat
kernel (monotonicity) quantities, Gaussian densities, curvature suprema and
singularity monitors.

All functions are pure in the snapshot; the flow modules assemble them into
per-output-time records.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError
from .geometry import ProfileCurve, curvature, equivariant_integral, lagrangian_angle

#: sample count of the periodic trapezoid rule on the revolution circle
#: (spectrally accurate for smooth kernels)
PSI_POINTS = 64

_ORIGIN4 = np.zeros(4)


@dataclass(frozen=True)
class MonotonicityKernel:
    """Backward heat kernel centred at the spacetime point (x0, t0) in
    C^2 x R; rho = inf means the global (unlocalised) kernel."""

    center_x: np.ndarray
    t0: float
    rho: float = np.inf

    def __post_init__(self):
        object.__setattr__(self, "center_x",
                           np.asarray(self.center_x, dtype=float).reshape(4))
        if self.rho <= 0:
            raise ValueError("localisation radius must be positive")


def origin_kernel(t0: float, rho: float = np.inf) -> MonotonicityKernel:
    return MonotonicityKernel(center_x=_ORIGIN4, t0=t0, rho=rho)


def _cutoff(q):
    """Quintic bump: 1 at 0, 0 at 1, two vanishing derivatives at both ends."""
    q = np.clip(q, 0.0, 1.0)
    return 1.0 - q**3 * (10.0 - 15.0 * q + 6.0 * q * q)


_norm_cache: dict[float, float] = {}


def _plane_normalisation(beta: float) -> float:
    """m(beta) = int_0^inf e^-w cutoff(beta sqrt(w)) dw: the kernel mass a
    flat plane through the centre retains after the cutoff.  beta =
    sqrt(4 Delta)/rho; cached per ratio."""
    if beta == 0.0:
        return 1.0
    key = round(beta, 12)
    if key not in _norm_cache:
        val, _ = quad(lambda w: math.exp(-w) * float(_cutoff(beta * math.sqrt(w))),
                      0.0, (1.0 / beta) ** 2, limit=200)
        _norm_cache[key] = val
    return _norm_cache[key]


def _kernel_samples(curve: ProfileCurve, center_x, Delta: float, rho: float):
    """Kernel value averaged over the revolution circle, per profile sample."""
    z = curve.z
    az2 = np.abs(z) ** 2
    beta = math.sqrt(4.0 * Delta) / rho if np.isfinite(rho) else 0.0
    norm = 4.0 * np.pi * Delta * _plane_normalisation(beta)
    if np.allclose(center_x, 0.0):
        d2 = az2
        w = np.exp(-d2 / (4.0 * Delta))
        if np.isfinite(rho):
            w = w * _cutoff(np.sqrt(d2) / rho)
        return w / norm
    c1 = center_x[0] + 1j * center_x[1]
    c2 = center_x[2] + 1j * center_x[3]
    psi = np.linspace(0.0, 2.0 * np.pi, PSI_POINTS, endpoint=False)
    d2 = (az2[:, None] + (abs(c1) ** 2 + abs(c2) ** 2)
          - 2.0 * np.real(z * np.conj(c1))[:, None] * np.cos(psi)[None, :]
          - 2.0 * np.real(z * np.conj(c2))[:, None] * np.sin(psi)[None, :])
    w = np.exp(-d2 / (4.0 * Delta))
    if np.isfinite(rho):
        w = w * _cutoff(np.sqrt(np.maximum(d2, 0.0)) / rho)
    return w.mean(axis=1) / norm


def conserved_cos_theta(curve: ProfileCurve, n: int = 2) -> float:
    """int cos(theta) dH^2 over the revolved surface; conserved along flows
    whose boundary manifold is special Lagrangian with angle pi/2."""
    theta = lagrangian_angle(curve, n=n).values
    return equivariant_integral(curve, np.cos(theta))


def huisken_value(curve: ProfileCurve, t: float, kernel: MonotonicityKernel,
                  f=None) -> float:
    """int f Phi_X dH^2 with the 2D backward heat kernel centred at
    (kernel.center_x, kernel.t0); requires t < t0."""
    Delta = kernel.t0 - t
    if Delta <= 0:
        raise DomainError(f"snapshot time {t:g} not before kernel time {kernel.t0:g}")
    w = _kernel_samples(curve, kernel.center_x, Delta, kernel.rho)
    if f is None:
        f = np.ones_like(curve.params)
    return equivariant_integral(curve, np.asarray(f, dtype=float) * w)


def gaussian_density(curve: ProfileCurve, center_x=None, r: float = 0.5,
                     rho: float = np.inf) -> float:
    """Localised Gaussian density at scale r: the kernel-weighted area of a
    snapshot taken at time t0 - r^2, normalised so a flat plane through the
    centre gives exactly 1."""
    if r <= 0:
        raise DomainError("density scale r must be positive")
    cx = _ORIGIN4 if center_x is None else np.asarray(center_x, dtype=float).reshape(4)
    w = _kernel_samples(curve, cx, r * r, rho)
    return equivariant_integral(curve, w)


def radial_curvature(curve: ProfileCurve) -> np.ndarray:
    """Principal curvature of the revolution direction,
    lambda = <gamma, nu>/|gamma|^2, with the symmetric origin limit
    lambda -> -kappa/2."""
    speed = np.abs(curve.dz)
    az2 = np.abs(curve.z) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.imag(curve.z * np.conj(curve.dz)) / (speed * az2)
    if curve.origin_index is not None:
        kappa = curvature(curve)
        lam[curve.origin_index] = -0.5 * kappa[curve.origin_index]
    return lam


def sup_A2(curve: ProfileCurve) -> float:
    """sup of the squared second fundamental form of the revolved surface.

    For an equivariant Lagrangian surface, |A|^2 = kappa^2 + 3 lambda^2 with
    lambda the rotational principal curvature: the mixed component
    A(d_s, d_psi) in the second normal direction equals -lambda, which
    contributes the extra 2 lambda^2 (cross-checked against a direct ambient
    second-fundamental-form computation in the tests).
    """
    kappa = curvature(curve)
    lam = radial_curvature(curve)
    return float(np.max(kappa**2 + 3.0 * lam**2))


def boundary_arclength_proxy(curve: ProfileCurve) -> float:
    """Arc length along the profile curve from the boundary sample to the
    origin sample: a lower-bound surrogate for the intrinsic boundary
    injectivity radius of the revolved disc."""
    speed = np.abs(curve.dz)
    i0 = curve.origin_index
    if i0 is None:
        i0 = int(np.argmin(np.abs(curve.z)))
    seg = np.concatenate([[0.0], np.cumsum(
        0.5 * (speed[1:] + speed[:-1]) * np.diff(curve.params))])
    left = seg[i0] - seg[0]
    right = seg[-1] - seg[i0]
    if i0 == 0:
        return float(right)
    if i0 == len(curve) - 1:
        return float(left)
    return float(min(left, right))


DIAGNOSTICS_CSV_HEADER = ("t_or_tau,area,int_cos_theta,theta_min,theta_max,"
                          "theta2phi_max,sup_A2,gaussian_density,huisken_value,"
                          "min_boundary_arclength")


@dataclass
class DiagnosticsRecord:
    """Per-output-time scalar functionals; theta2phi_max is NaN for flows
    without a radial graph structure."""

    t_or_tau: float
    area: float
    int_cos_theta: float
    theta_min: float
    theta_max: float
    theta2phi_max: float
    sup_A2: float
    gaussian_density: float
    huisken_value: float
    min_boundary_arclength: float

    def __post_init__(self):
        if not (np.isfinite(self.area) and self.area > 0):
            raise ValueError(f"non-positive area {self.area!r}")

    def to_csv_row(self) -> str:
        vals = (self.t_or_tau, self.area, self.int_cos_theta, self.theta_min,
                self.theta_max, self.theta2phi_max, self.sup_A2,
                self.gaussian_density, self.huisken_value,
                self.min_boundary_arclength)
        return ",".join("%.12e" % v for v in vals)
