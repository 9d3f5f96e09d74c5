"""Pure-numpy implementations of the hot stepping kernels.

Reference semantics for the numba versions in kernels_numba; the two are
cross-checked element-wise in the test suite.
"""

import numpy as np
from scipy.linalg import solve_banded


def ghost_derivatives(u, h, ghost_left, ghost_right):
    """Centered 2nd-order first and second derivatives on a uniform grid,
    using ghost values beyond both ends."""
    n = u.shape[0]
    ue = np.empty(n + 2)
    ue[0] = ghost_left
    ue[1:-1] = u
    ue[-1] = ghost_right
    up = (ue[2:] - ue[:-2]) / (2.0 * h)
    upp = (ue[2:] - 2.0 * u + ue[:-2]) / (h * h)
    return up, upp


def lawlor_rhs(s, v, vp, vpp):
    """Graph-flow velocity over the hyperbola foliation; valid for s > 0."""
    ch = np.cosh(v)
    sh = np.sinh(v)
    gx = ch + s * vp * sh
    gy = sh + s * vp * ch
    g2 = gx * gx + gy * gy
    c2v = ch * ch + sh * sh
    return (vpp + 2.0 * vp / s - s * vp ** 3) / g2 + vp / (s * c2v)


def lawlor_min_gprime2(s, v, vp):
    """min |gamma'|^2 over the grid (parametrisation health check)."""
    ch = np.cosh(v)
    sh = np.sinh(v)
    gx = ch + s * vp * sh
    gy = sh + s * vp * ch
    return float(np.min(gx * gx + gy * gy))


def clifford_rhs(r, p, pp, ppp):
    """Rescaled radial-graph flow velocity; valid for r > 0."""
    lam = r * pp
    return ((r * ppp + r * r * pp ** 3 + 2.0 * pp) / (1.0 + lam * lam)
            + pp - 0.5 * r * r * pp) / r


def thomas(lower, diag, upper, rhs):
    """Tridiagonal solve; lower/upper have length n-1."""
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs)


def lawlor_terms(s, v, vp, vpp):
    """Fused per-step quantities for the hyperbola graph flow:
    (rhs, diffusion, min |gamma'|^2, sup |rhs|).  Node 0 (s = 0) is left as a
    placeholder for the origin rule."""
    ch = np.cosh(v[1:])
    sh = np.sinh(v[1:])
    gx = ch + s[1:] * vp[1:] * sh
    gy = sh + s[1:] * vp[1:] * ch
    g2 = gx * gx + gy * gy
    f = np.empty_like(v)
    a = np.empty_like(v)
    f[0] = 0.0
    a[0] = 1.0
    c2v = ch * ch + sh * sh
    f[1:] = ((vpp[1:] + 2.0 * vp[1:] / s[1:] - s[1:] * vp[1:] ** 3) / g2
             + vp[1:] / (s[1:] * c2v))
    a[1:] = 1.0 / g2
    return f, a, float(np.min(g2)), float(np.max(np.abs(f[1:])))


def clifford_terms(r, p, pp, ppp):
    """Fused per-step quantities for the rescaled radial flow:
    (rhs, diffusion, sup |rhs|); node 0 is an origin-rule placeholder."""
    lam2 = (r[1:] * pp[1:]) ** 2
    f = np.empty_like(p)
    a = np.empty_like(p)
    f[0] = 0.0
    a[0] = 1.0
    f[1:] = ((r[1:] * ppp[1:] + r[1:] ** 2 * pp[1:] ** 3 + 2.0 * pp[1:])
             / (1.0 + lam2) + pp[1:] - 0.5 * r[1:] ** 2 * pp[1:]) / r[1:]
    a[1:] = 1.0 / (1.0 + lam2)
    return f, a, float(np.max(np.abs(f[1:])))


def semi_implicit_solve(u, f, a, upp, dt, h, lcode, lval, rcode, rval):
    """One semi-implicit Euler step: solve (I - dt a D2) u_new = u + dt b
    with b = f - a u'' and ghost closures per boundary code
    (0 Dirichlet value, 1 symmetry, 2 oblique lagged slope).
    Returns (u_new, all-finite flag)."""
    n = u.shape[0]
    r = dt / (h * h)
    lower = np.empty(n - 1)
    diag = np.empty(n)
    upper = np.empty(n - 1)
    rhs = u + dt * (f - a * upp)
    lower[:-1] = -r * a[1:-1]
    upper[1:] = -r * a[1:-1]
    diag[1:-1] = 1.0 + 2.0 * r * a[1:-1]
    if lcode == 0:
        diag[0] = 1.0
        upper[0] = 0.0
        rhs[0] = lval
    else:
        diag[0] = 1.0 + 2.0 * r * a[0]
        upper[0] = -2.0 * r * a[0]
        if lcode == 2:
            rhs[0] -= dt * a[0] * 2.0 * lval / h
    if rcode == 0:
        diag[-1] = 1.0
        lower[-1] = 0.0
        rhs[-1] = rval
    else:
        diag[-1] = 1.0 + 2.0 * r * a[-1]
        lower[-1] = -2.0 * r * a[-1]
        if rcode == 2:
            rhs[-1] += dt * a[-1] * 2.0 * rval / h
    un = thomas(lower, diag, upper, rhs)
    return un, bool(np.all(np.isfinite(un)))
