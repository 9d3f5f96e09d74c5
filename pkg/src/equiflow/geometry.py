"""Planar profile curves and their differential quantities.

An equivariant Lagrangian surface in C^2 is the revolution
L(s, psi) = gamma(s) * (cos psi, sin psi) of a planar profile curve
gamma: points are stored as complex numbers x + iy.  Everything here is a
pure function of a sampled curve; the flow modules own time stepping.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTangent, OriginUndefined, ShapeError

# A planar point is just a complex number x + iy.
PlanarPoint = complex

#: |gamma| below this multiple of max|gamma| marks the origin sample.
ORIGIN_TOL = 1e-12

#: |gamma'| below this multiple of max|gamma'| counts as a degenerate tangent.
TANGENT_TOL = 1e-10


def fornberg_weights(x0, xs, m):
    """Finite-difference weights for derivatives 0..m at x0 from nodes xs.

    Classic recursion; returns array (m+1, len(xs)).
    """
    n = len(xs)
    w = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = xs[0] - x0
    w[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = ((c4 * w[k, j] - k * w[k - 1, j]) / c3)
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w


def _is_uniform(x):
    d = np.diff(x)
    return np.all(np.abs(d - d[0]) <= 1e-12 * abs(d[0]))


def derivative_arrays(params, y):
    """(y', y'') sampled at the nodes: centered 2nd-order stencils in the
    interior, 2nd-order one-sided at the ends (4-point for y'')."""
    n = len(params)
    if n < 4:
        raise ShapeError("need at least 4 samples for 2nd-order stencils")
    yp = np.empty_like(y)
    ypp = np.empty_like(y)
    if _is_uniform(params):
        h = params[1] - params[0]
        yp[1:-1] = (y[2:] - y[:-2]) / (2 * h)
        ypp[1:-1] = (y[2:] - 2 * y[1:-1] + y[:-2]) / h**2
        yp[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h)
        yp[-1] = (3 * y[-1] - 4 * y[-2] + y[-3]) / (2 * h)
        ypp[0] = (2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]) / h**2
        ypp[-1] = (2 * y[-1] - 5 * y[-2] + 4 * y[-3] - y[-4]) / h**2
        return yp, ypp
    for i in range(n):
        if i == 0:
            idx = [0, 1, 2, 3]
        elif i == n - 1:
            idx = [n - 4, n - 3, n - 2, n - 1]
        else:
            idx = [i - 1, i, i + 1]
        w = fornberg_weights(params[i], params[idx], 2)
        yp[i] = np.dot(w[1], y[idx])
        ypp[i] = np.dot(w[2], y[idx])
    return yp, ypp


@dataclass(frozen=True)
class ProfileCurve:
    """Sampled planar curve gamma(s) with derivative stencils.

    params must be strictly increasing; origin_index, if given, marks the
    (single) sample where |gamma| vanishes.
    """

    params: np.ndarray
    z: np.ndarray
    origin_index: int | None = None
    dz: np.ndarray = field(init=False, repr=False)
    d2z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        z = np.asarray(self.z, dtype=complex)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "z", z)
        if params.ndim != 1 or z.shape != params.shape:
            raise ShapeError("params and points must be matching 1-d arrays")
        if not (np.all(np.isfinite(params)) and np.all(np.isfinite(z))):
            raise ValueError("non-finite curve data")
        if np.any(np.diff(params) <= 0):
            raise ValueError("params must be strictly increasing")
        if self.origin_index is not None:
            i0 = self.origin_index
            if not 0 <= i0 < len(params):
                raise ValueError("origin_index out of range")
            if abs(z[i0]) > ORIGIN_TOL * np.max(np.abs(z)):
                raise ValueError("origin_index sample is not at the origin")
        dz, d2z = derivative_arrays(params, z)
        object.__setattr__(self, "dz", dz)
        object.__setattr__(self, "d2z", d2z)

    def __len__(self):
        return len(self.params)

    def _check_tangent(self):
        speed = np.abs(self.dz)
        bad = speed < TANGENT_TOL * np.max(speed)
        if self.origin_index is not None:
            lo = max(0, self.origin_index - 1)
            hi = min(len(self), self.origin_index + 2)
            bad[lo:hi] = False
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DegenerateTangent(f"|gamma'| ~ 0 at sample {i} (s={self.params[i]:g})")


@dataclass(frozen=True)
class AngleField:
    """Unwrapped angle samples matched to a ProfileCurve."""

    values: np.ndarray
    branch_continuous: bool


def lagrangian_angle(curve: ProfileCurve, n: int = 2) -> AngleField:
    """theta = (n-1) arg gamma + arg gamma', unwrapped along the samples.

    At a marked origin sample the continuous limit theta = n arg gamma' is
    used, and the branch on the far side of the origin is shifted by the
    multiple of pi that keeps theta continuous (the naive formula picks up
    (n-1) pi across the origin from the orientation flip of the chart).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    curve._check_tangent()
    argp = np.unwrap(np.angle(curve.dz))
    i0 = curve.origin_index
    theta = np.empty(len(curve))
    if i0 is None:
        theta[:] = (n - 1) * np.unwrap(np.angle(curve.z)) + argp
    else:
        theta[i0] = n * argp[i0]
        if i0 + 1 < len(curve):
            right = (n - 1) * np.unwrap(np.angle(curve.z[i0 + 1:])) + argp[i0 + 1:]
            right += np.pi * round((theta[i0] - right[0]) / np.pi)
            theta[i0 + 1:] = right
        if i0 > 0:
            left = (n - 1) * np.unwrap(np.angle(curve.z[:i0])) + argp[:i0]
            left += np.pi * round((theta[i0] - left[-1]) / np.pi)
            theta[:i0] = left
    cont = bool(np.all(np.abs(np.diff(theta)) < np.pi)) if len(theta) > 1 else True
    return AngleField(values=theta, branch_continuous=cont)


def curvature(curve: ProfileCurve) -> np.ndarray:
    """Signed curvature w.r.t. nu = i gamma'/|gamma'|:
    kappa = <gamma'', nu>/|gamma'|^2 = Im(conj(gamma') gamma'')/|gamma'|^3."""
    curve._check_tangent()
    speed = np.abs(curve.dz)
    return np.imag(np.conj(curve.dz) * curve.d2z) / speed**3


def equivariant_normal_speed(curve: ProfileCurve) -> np.ndarray:
    """Scalar normal speed <k - gamma^perp/|gamma|^2, nu> of the equivariant
    flow.  Refuses curves with a marked origin sample: the 0/0 limit there is
    parametrisation-specific and owned by the flow modules' origin rules."""
    if curve.origin_index is not None:
        raise OriginUndefined(
            "normal speed at the origin requires a flow-specific symmetry rule")
    kappa = curvature(curve)
    speed = np.abs(curve.dz)
    r2 = np.abs(curve.z) ** 2
    radial = np.imag(curve.z * np.conj(curve.dz)) / (speed * r2)
    return kappa - radial


def lawlor_profile(s_grid) -> ProfileCurve:
    """Hyperbola profile (cosh s, sinh s) of the static special Lagrangian."""
    s = np.asarray(s_grid, dtype=float)
    return ProfileCurve(params=s, z=np.cosh(s) + 1j * np.sinh(s))


def clifford_profile(s_grid) -> ProfileCurve:
    """Circle of radius 2: profile of the self-shrinking torus at t = -1."""
    s = np.asarray(s_grid, dtype=float)
    return ProfileCurve(params=s, z=2 * np.cos(s) + 2j * np.sin(s))


def equivariant_integral(curve: ProfileCurve, f) -> float:
    """integral of f over the revolved surface: 2 pi * trapz(f |gamma||gamma'|).

    Counts parametric multiplicity: a closed profile curve symmetric through
    the origin double-covers its surface and integrates to twice the embedded
    area (e.g. the full Clifford circle gives 16 pi^2).
    """
    f = np.asarray(f, dtype=float)
    if f.shape != curve.params.shape:
        raise ShapeError(f"weight length {f.shape} != samples {curve.params.shape}")
    w = np.abs(curve.z) * np.abs(curve.dz)
    return 2 * np.pi * float(np.trapz(f * w, curve.params))


CURVE_CSV_HEADER = "s,x,y,theta,kappa"


def write_curve_csv(path, curve: ProfileCurve, theta=None, kappa=None, n: int = 2):
    """Curve snapshot file: header s,x,y,theta,kappa, one row per sample,
    %.12e formatting.  theta/kappa are computed if not supplied."""
    if theta is None:
        theta = lagrangian_angle(curve, n=n).values
    if kappa is None:
        kappa = curvature(curve)
    theta = np.asarray(theta, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if theta.shape != curve.params.shape or kappa.shape != curve.params.shape:
        raise ShapeError("theta/kappa must match the curve sampling")
    lines = [CURVE_CSV_HEADER]
    for s, zz, th, ka in zip(curve.params, curve.z, theta, kappa):
        lines.append("%.12e,%.12e,%.12e,%.12e,%.12e" % (s, zz.real, zz.imag, th, ka))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
