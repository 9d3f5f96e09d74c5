"""Manufactured-solution problems and order-of-accuracy ladders.

Each factory returns (problem, initial state, exact(x, t)) for one grid
size, wired so `engine.observed_order` can Richardson-estimate the spatial
order.  The flow problems are forced so that a chosen smooth profile solves
them exactly, with the boundary residual shifted accordingly; the origin
rules are exercised through the same forcing.
"""

import math

import numpy as np

from .clifford import (RADIUS, clifford_origin_rule, clifford_problem)
from .engine import (Dirichlet, FieldState, Grid1D, ObliqueNonlinear,
                     ParabolicProblem, StepperConfig, SymmetryNeumann,
                     observed_order)
from .errors import InvariantViolation
from .lawlor import lawlor_boundary_relation, lawlor_origin_rule, lawlor_problem


def heat_dirichlet_factory(n: int):
    """u_t = u'' on [0,1], u(0)=u(1)=0, exact e^{-pi^2 t} sin(pi x)."""
    grid = Grid1D.uniform(0.0, 1.0, n)

    def exact(x, t):
        return math.exp(-math.pi**2 * t) * np.sin(math.pi * x)

    problem = ParabolicProblem(
        interior_rhs=lambda x, u, up, upp, t: upp,
        left_bc=Dirichlet(lambda t: 0.0),
        right_bc=Dirichlet(lambda t: 0.0),
        diffusion=lambda x, u, up, upp, t: np.ones_like(x),
    )
    return problem, FieldState(grid, exact(grid.nodes, 0.0), 0.0), exact


def lawlor_mms_factory(n: int, alpha: float = 0.3, a: float = 0.1, b: float = 0.05):
    """Forced graph flow with exact solution
    v*(s,t) = a e^{-t} cos(pi s / 2) + b (even at the origin)."""
    grid = Grid1D.uniform(0.0, 1.0, n)
    base = lawlor_problem(alpha)
    k = math.pi / 2.0

    def star(x, t):
        return a * math.exp(-t) * np.cos(k * x) + b

    def star_p(x, t):
        return -a * k * math.exp(-t) * np.sin(k * x)

    def star_pp(x, t):
        return -a * k * k * math.exp(-t) * np.cos(k * x)

    def star_t(x, t):
        return -a * math.exp(-t) * np.cos(k * x)

    def forcing(x, t):
        g = np.empty_like(x)
        g[1:] = star_t(x[1:], t) - base.interior_rhs(
            x[1:], star(x[1:], t), star_p(x[1:], t), star_pp(x[1:], t), t)
        g[0] = star_t(x[0], t) - lawlor_origin_rule(float(star(x[0], t)),
                                                    float(star_pp(x[0], t)))
        return g

    def rhs(x, u, up, upp, t):
        out = np.empty_like(u)
        out[0] = 0.0
        out[1:] = base.interior_rhs(x[1:], u[1:], up[1:], upp[1:], t)
        return out + forcing(x, t)

    def origin(u0, upp0, t):
        return lawlor_origin_rule(u0, upp0) + forcing(np.zeros(1), t)[0]

    def bc_residual(u, up, t):
        shift = float(lawlor_boundary_relation(
            float(star(np.ones(1), t)[0]), float(star_p(np.ones(1), t)[0]), alpha))
        return float(lawlor_boundary_relation(u, up, alpha)) - shift

    problem = ParabolicProblem(
        interior_rhs=rhs,
        left_bc=SymmetryNeumann(),
        right_bc=ObliqueNonlinear(residual=bc_residual, chi=1.0),
        origin_rule=origin,
        diffusion=base.diffusion,
    )
    return problem, FieldState(grid, star(grid.nodes, 0.0), 0.0), star


def clifford_mms_factory(n: int, alpha: float = 0.2, a: float = 0.1, b: float = 0.3):
    """Forced rescaled radial flow with exact solution
    phi*(r,tau) = a e^{-tau} cos(pi r / 4) + b."""
    grid = Grid1D.uniform(0.0, RADIUS, n)
    base = clifford_problem(alpha)
    k = math.pi / (2.0 * RADIUS)

    def star(x, t):
        return a * math.exp(-t) * np.cos(k * x) + b

    def star_p(x, t):
        return -a * k * math.exp(-t) * np.sin(k * x)

    def star_pp(x, t):
        return -a * k * k * math.exp(-t) * np.cos(k * x)

    def star_t(x, t):
        return -a * math.exp(-t) * np.cos(k * x)

    def forcing(x, t):
        g = np.empty_like(x)
        g[1:] = star_t(x[1:], t) - base.interior_rhs(
            x[1:], star(x[1:], t), star_p(x[1:], t), star_pp(x[1:], t), t)
        g[0] = star_t(x[0], t) - clifford_origin_rule(float(star(x[0], t)),
                                                      float(star_pp(x[0], t)))
        return g

    def rhs(x, u, up, upp, t):
        out = np.empty_like(u)
        out[0] = 0.0
        out[1:] = base.interior_rhs(x[1:], u[1:], up[1:], upp[1:], t)
        return out + forcing(x, t)

    def origin(u0, upp0, t):
        return clifford_origin_rule(u0, upp0) + forcing(np.zeros(1), t)[0]

    def bc_residual(u, up, t):
        return up - float(star_p(np.full(1, RADIUS), t)[0])

    problem = ParabolicProblem(
        interior_rhs=rhs,
        left_bc=SymmetryNeumann(),
        right_bc=ObliqueNonlinear(residual=bc_residual, chi=1.0),
        origin_rule=origin,
        diffusion=base.diffusion,
    )
    return problem, FieldState(grid, star(grid.nodes, 0.0), 0.0), star


_FACTORIES = {
    "heat_dirichlet": heat_dirichlet_factory,
    "lawlor_mms": lawlor_mms_factory,
    "clifford_mms": clifford_mms_factory,
}


def convergence_ladder(problem_id: str, grids, t_final: float = 0.05,
                       scheme: str = "rk4"):
    """(errors, orders) on a doubling ladder; rk4 keeps the time error at
    O(dt^4) under its CFL bound, the semi-implicit scheme scales dt with h^2
    so both contributions refine at second order."""
    if problem_id not in _FACTORIES:
        raise InvariantViolation(f"unknown convergence problem {problem_id!r}")

    def cfg_factory(n):
        return StepperConfig(scheme=scheme, cfl_safety=0.2, dt_h2_factor=2.0)

    return observed_order(_FACTORIES[problem_id], list(grids), t_final, cfg_factory)
