"""Independent oracles for derived expected values.

Each oracle recomputes a quantity through a route disjoint from the code
under test: symbolic differentiation of the geometric flow for the graph
velocities, finite differences on the ambient embedding for |A|^2, and
high-precision quadrature for kernel integrals.
"""

import math

import mpmath
import numpy as np
import sympy as sp


def lawlor_rhs_symbolic(v_expr_of_s, s_value: float) -> float:
    """dv/dt at s_value for the graph gamma = (s cosh v, s sinh v), derived
    from the normal flow <gamma_t, nu> = <k - gamma^perp/|gamma|^2, nu>
    entirely in sympy (no use of the simplified right-hand side)."""
    s = sp.Symbol("s", positive=True)
    v = v_expr_of_s(s)
    gamma = sp.Matrix([s * sp.cosh(v), s * sp.sinh(v)])
    gp = gamma.diff(s)
    gpp = gp.diff(s)
    speed2 = gp.dot(gp)
    nu = sp.Matrix([-gp[1], gp[0]]) / sp.sqrt(speed2)
    k_n = gpp.dot(nu) / speed2                      # <k, nu>
    radial = gamma.dot(nu) / gamma.dot(gamma)       # <gamma^perp/|gamma|^2, nu>
    dgamma_dv = sp.Matrix([s * sp.sinh(v), s * sp.cosh(v)])
    vt = (k_n - radial) / dgamma_dv.dot(nu)
    return float(vt.subs(s, s_value).evalf(30))


def clifford_rhs_symbolic(phi_expr_of_r, r_value: float) -> float:
    """d phi/d tau at r_value for gamma = r e^{i phi}, derived from
    <gamma_tau, nu> = <k - gamma^perp/|gamma|^2 + gamma^perp/2, nu>."""
    r = sp.Symbol("r", positive=True)
    p = phi_expr_of_r(r)
    gamma = sp.Matrix([r * sp.cos(p), r * sp.sin(p)])
    gp = gamma.diff(r)
    gpp = gp.diff(r)
    speed2 = gp.dot(gp)
    nu = sp.Matrix([-gp[1], gp[0]]) / sp.sqrt(speed2)
    k_n = gpp.dot(nu) / speed2
    perp_n = gamma.dot(nu)
    speed = k_n - perp_n / gamma.dot(gamma) + perp_n / 2
    dgamma_dphi = sp.Matrix([-r * sp.sin(p), r * sp.cos(p)])
    pt = speed / dgamma_dphi.dot(nu)
    return float(pt.subs(r, r_value).evalf(30))


def ambient_A2(gamma, s_value: float, h: float = 1e-5) -> float:
    """|A|^2 of the revolved surface F(s, psi) = gamma(s) (cos psi, sin psi)
    at (s_value, psi=0.7), by finite differences of the embedding into R^4.

    gamma: callable s -> complex.  The normal frame is J of the tangent
    frame (valid since the surface is Lagrangian)."""
    psi0 = 0.7

    def embed(s, psi):
        g = gamma(s)
        return np.array([g.real * math.cos(psi), g.imag * math.cos(psi),
                         g.real * math.sin(psi), g.imag * math.sin(psi)])

    def J4(vec):
        return np.array([-vec[1], vec[0], -vec[3], vec[2]])

    s0 = s_value
    Fs = (embed(s0 + h, psi0) - embed(s0 - h, psi0)) / (2 * h)
    Fp = (embed(s0, psi0 + h) - embed(s0, psi0 - h)) / (2 * h)
    Fss = (embed(s0 + h, psi0) - 2 * embed(s0, psi0) + embed(s0 - h, psi0)) / h**2
    Fpp = (embed(s0, psi0 + h) - 2 * embed(s0, psi0) + embed(s0, psi0 - h)) / h**2
    Fsp = (embed(s0 + h, psi0 + h) - embed(s0 + h, psi0 - h)
           - embed(s0 - h, psi0 + h) + embed(s0 - h, psi0 - h)) / (4 * h**2)
    g = np.array([[Fs @ Fs, Fs @ Fp], [Fp @ Fs, Fp @ Fp]])
    gi = np.linalg.inv(g)
    n1 = J4(Fs) / np.linalg.norm(Fs)
    n2 = J4(Fp) / np.linalg.norm(Fp)
    total = 0.0
    for n in (n1, n2):
        hmat = np.array([[Fss @ n, Fsp @ n], [Fsp @ n, Fpp @ n]])
        total += float(np.einsum("ij,kl,ik,jl->", gi, gi, hmat, hmat))
    return total


def shrinker_heat_integral(t: float, dps: int = 30) -> float:
    """int Phi_(O,0) dH^2 over the revolved circle of radius sqrt(-4t),
    by adaptive high-precision quadrature of 2 pi |gamma||gamma'| Phi ds."""
    with mpmath.workdps(dps):
        R = mpmath.sqrt(-4 * mpmath.mpf(t))
        Delta = -mpmath.mpf(t)
        phi_val = mpmath.e ** (-(R * R) / (4 * Delta)) / (4 * mpmath.pi * Delta)
        integrand = 2 * mpmath.pi * R * R * phi_val     # constant in s
        return float(integrand * 2 * mpmath.pi)


def plane_density_quadrature(r: float, rho: float, dps: int = 30) -> float:
    """Density of a flat plane through the centre under the quintic-cutoff
    kernel, before renormalisation: m(beta) with beta = 2r/rho."""
    beta = 2.0 * r / rho

    def eta(q):
        if q >= 1:
            return mpmath.mpf(0)
        return 1 - q**3 * (10 - 15 * q + 6 * q * q)

    with mpmath.workdps(dps):
        val = mpmath.quad(lambda w: mpmath.e**(-w) * eta(beta * mpmath.sqrt(w)),
                          [0, (1.0 / beta) ** 2 if beta > 0 else mpmath.inf])
        return float(val)
