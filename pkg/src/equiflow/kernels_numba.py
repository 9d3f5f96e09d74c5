"""Numba @njit implementations of the hot stepping kernels.

Same contracts as kernels_numpy; scalar loops compile to tight machine code.
Importing this module requires numba.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def ghost_derivatives(u, h, ghost_left, ghost_right):
    n = u.shape[0]
    up = np.empty(n)
    upp = np.empty(n)
    inv2h = 1.0 / (2.0 * h)
    invh2 = 1.0 / (h * h)
    for i in range(n):
        ul = ghost_left if i == 0 else u[i - 1]
        ur = ghost_right if i == n - 1 else u[i + 1]
        up[i] = (ur - ul) * inv2h
        upp[i] = (ur - 2.0 * u[i] + ul) * invh2
    return up, upp


@njit(cache=True, fastmath=True)
def lawlor_rhs(s, v, vp, vpp):
    n = s.shape[0]
    out = np.empty(n)
    for i in range(n):
        ch = math.cosh(v[i])
        sh = math.sinh(v[i])
        gx = ch + s[i] * vp[i] * sh
        gy = sh + s[i] * vp[i] * ch
        g2 = gx * gx + gy * gy
        c2v = ch * ch + sh * sh  # cosh(2v)
        out[i] = ((vpp[i] + 2.0 * vp[i] / s[i] - s[i] * vp[i] ** 3) / g2
                  + vp[i] / (s[i] * c2v))
    return out


@njit(cache=True)
def lawlor_min_gprime2(s, v, vp):
    n = s.shape[0]
    best = 1.0e300
    for i in range(n):
        ch = math.cosh(v[i])
        sh = math.sinh(v[i])
        gx = ch + s[i] * vp[i] * sh
        gy = sh + s[i] * vp[i] * ch
        g2 = gx * gx + gy * gy
        if g2 < best:
            best = g2
    return best


@njit(cache=True, fastmath=True)
def clifford_rhs(r, p, pp, ppp):
    n = r.shape[0]
    out = np.empty(n)
    for i in range(n):
        lam = r[i] * pp[i]
        out[i] = ((r[i] * ppp[i] + r[i] * r[i] * pp[i] ** 3 + 2.0 * pp[i])
                  / (1.0 + lam * lam)
                  + pp[i] - 0.5 * r[i] * r[i] * pp[i]) / r[i]
    return out


@njit(cache=True)
def thomas(lower, diag, upper, rhs):
    n = diag.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    x = np.empty(n)
    cp[0] = upper[0] / diag[0] if n > 1 else 0.0
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i - 1] * cp[i - 1]
        cp[i] = upper[i] / m if i < n - 1 else 0.0
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / m
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@njit(cache=True, fastmath=True)
def lawlor_terms(s, v, vp, vpp):
    n = s.shape[0]
    f = np.empty(n)
    a = np.empty(n)
    f[0] = 0.0
    a[0] = 1.0
    g2min = 1.0e300
    fmax = 0.0
    for i in range(1, n):
        ch = math.cosh(v[i])
        sh = math.sinh(v[i])
        gx = ch + s[i] * vp[i] * sh
        gy = sh + s[i] * vp[i] * ch
        g2 = gx * gx + gy * gy
        c2v = ch * ch + sh * sh  # cosh(2v)
        fi = ((vpp[i] + 2.0 * vp[i] / s[i] - s[i] * vp[i] ** 3) / g2
              + vp[i] / (s[i] * c2v))
        f[i] = fi
        a[i] = 1.0 / g2
        if g2 < g2min:
            g2min = g2
        if abs(fi) > fmax:
            fmax = abs(fi)
    return f, a, g2min, fmax


@njit(cache=True, fastmath=True)
def clifford_terms(r, p, pp, ppp):
    n = r.shape[0]
    f = np.empty(n)
    a = np.empty(n)
    f[0] = 0.0
    a[0] = 1.0
    fmax = 0.0
    for i in range(1, n):
        lam2 = (r[i] * pp[i]) ** 2
        fi = ((r[i] * ppp[i] + r[i] * r[i] * pp[i] ** 3 + 2.0 * pp[i])
              / (1.0 + lam2) + pp[i] - 0.5 * r[i] * r[i] * pp[i]) / r[i]
        f[i] = fi
        a[i] = 1.0 / (1.0 + lam2)
        if abs(fi) > fmax:
            fmax = abs(fi)
    return f, a, fmax


@njit(cache=True, fastmath=True)
def semi_implicit_solve(u, f, a, upp, dt, h, lcode, lval, rcode, rval):
    n = u.shape[0]
    r = dt / (h * h)
    lower = np.empty(n - 1)
    diag = np.empty(n)
    upper = np.empty(n - 1)
    rhs = np.empty(n)
    for i in range(n):
        rhs[i] = u[i] + dt * (f[i] - a[i] * upp[i])
    for i in range(1, n - 1):
        lower[i - 1] = -r * a[i]
        upper[i] = -r * a[i]
        diag[i] = 1.0 + 2.0 * r * a[i]
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
    ok = True
    for i in range(n):
        if not np.isfinite(un[i]):
            ok = False
            break
    return un, ok
