"""Method-of-lines integrator for 1D quasilinear parabolic problems.

Supports symmetry (even reflection), Dirichlet, and nonlinear oblique
Neumann boundary conditions via second-order ghost nodes, plus a pluggable
origin rule that replaces the interior operator at a degenerate left node.

Two schemes: classic explicit RK4 under a parabolic CFL bound, and a
semi-implicit Euler step that freezes the diffusion coefficient and the
nonlinear boundary slope at the previous time level and solves one
tridiagonal system per step.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import kernels as K
from .errors import (BoundaryRootFailure, MaxStepsExceeded, OrderUndetermined,
                     StiffnessFailure)


# --- grid and state ----------------------------------------------------------

@dataclass(frozen=True)
class Grid1D:
    """Uniform grid a = x_0 < ... < x_N = b."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 9:
            raise ValueError("grid needs at least 9 nodes (N >= 8 intervals)")
        d = np.diff(nodes)
        if np.any(d <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if np.max(np.abs(d - d[0])) > 1e-12 * abs(d[0]):
            raise ValueError("grid must be uniform (relative tol 1e-12)")

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def n_intervals(self) -> int:
        return self.nodes.size - 1

    @classmethod
    def uniform(cls, a: float, b: float, n_intervals: int) -> "Grid1D":
        return cls(np.linspace(a, b, n_intervals + 1))


@dataclass
class FieldState:
    grid: Grid1D
    u: np.ndarray
    t: float


# --- boundary conditions ------------------------------------------------------

@dataclass(frozen=True)
class Dirichlet:
    value: Callable[[float], float]


@dataclass(frozen=True)
class SymmetryNeumann:
    """u' = 0 enforced by even ghost reflection."""


@dataclass(frozen=True)
class ObliqueNonlinear:
    """Residual R(u, u', t) = 0 at the boundary with |dR/du'| >= chi > 0."""

    residual: Callable[[float, float, float], float]
    chi: float = 1.0


@dataclass
class ParabolicProblem:
    """interior_rhs(x, u, u', u'', t) -> du/dt array.

    The rhs value at a Dirichlet node or at a node covered by origin_rule is
    ignored and may be garbage (flows exploit this for the 0/0 origin).
    origin_rule(u0, u0'', t) replaces the operator at the left node and
    requires a SymmetryNeumann left boundary.  diffusion, if supplied, must
    return d(rhs)/d(u''); otherwise it is obtained by central differencing
    the rhs (exact for quasilinear operators).  guard(x, u, u', t) may raise
    typed errors to abort a run.

    terms, when given, is the fused hot path used by the semi-implicit
    stepper: (x, u, u', u'', t) -> (rhs, diffusion, sup|rhs| over interior);
    it must agree with interior_rhs/diffusion (the generic path and the
    backend kernels are cross-checked in the tests).  origin_diffusion
    (u0, u0'', t) -> d(origin_rule)/d(u'') skips a finite-difference probe.
    """

    interior_rhs: Callable
    left_bc: object
    right_bc: object
    origin_rule: Optional[Callable] = None
    diffusion: Optional[Callable] = None
    guard: Optional[Callable] = None
    terms: Optional[Callable] = None
    origin_diffusion: Optional[Callable] = None

    def __post_init__(self):
        if self.origin_rule is not None and not isinstance(self.left_bc, SymmetryNeumann):
            raise ValueError("origin_rule requires a SymmetryNeumann left boundary")


@dataclass
class StepperConfig:
    scheme: str = "semi_implicit"       # "rk4" | "semi_implicit"
    cfl_safety: float = 0.2             # explicit: dt <= cfl * h^2 / (2 max a)
    dt_max: Optional[float] = None      # semi-implicit default: dt_h2_factor * h^2
    dt_min: float = 1e-14
    steady_tol: float = 1e-8
    dt_h2_factor: float = 20.0
    max_steps: int = 50_000_000
    bc_tol: float = 1e-12
    first_order_bc: bool = False        # deliberate O(h) boundary treatment
                                        # (validation negative control)

    def __post_init__(self):
        if self.scheme not in ("rk4", "semi_implicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError("cfl_safety must lie in (0, 1]")


# --- stop conditions ----------------------------------------------------------

@dataclass(frozen=True)
class FinalTime:
    time: float


@dataclass(frozen=True)
class Steady:
    tol: float
    t_max: float = np.inf


@dataclass
class Trajectory:
    grid: Grid1D
    times: list
    states: list
    termination: str
    steps: int
    bc_residual_max: float
    records: list = field(default_factory=list)

    @property
    def final(self) -> FieldState:
        return FieldState(self.grid, self.states[-1], self.times[-1])


# --- scalar root solve ---------------------------------------------------------

def bracketed_root(F, x0: float, scale: float, tol: float = 1e-12,
                   max_iter: int = 200) -> float:
    """Safeguarded 1D root of F: secant steps confined to a sign-change
    bracket, bisection fallback; |F(root)| <= tol on success."""
    f0 = F(x0)
    if abs(f0) <= tol:
        return x0
    d = max(abs(scale), 1e-10)
    a = fa = b = fb = None
    for _ in range(90):
        for cand in (x0 + d, x0 - d):
            fc = F(cand)
            if f0 * fc <= 0.0:
                a, fa, b, fb = x0, f0, cand, fc
                break
        if a is not None:
            break
        d *= 2.0
    if a is None:
        raise BoundaryRootFailure(
            f"no sign change around {x0:g} (residual {f0:.3e})")
    for _ in range(max_iter):
        if abs(fa) <= tol:
            return a
        if abs(fb) <= tol:
            return b
        x = b - fb * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
        lo, hi = (a, b) if a < b else (b, a)
        if not lo < x < hi:
            x = 0.5 * (a + b)
        fx = F(x)
        if abs(fx) <= tol:
            return x
        if fa * fx <= 0.0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        if abs(b - a) < 1e-17 * (1.0 + abs(a)):
            break
    best, fbest = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    raise BoundaryRootFailure(f"root refinement stalled at residual {fbest:.3e}")


# --- ghosts -------------------------------------------------------------------

def _extrapolate_ghost(u, side):
    # quadratic extrapolation; only feeds stencils at pinned Dirichlet nodes
    return 3.0 * u[0] - 3.0 * u[1] + u[2] if side < 0 else 3.0 * u[-1] - 3.0 * u[-2] + u[-3]


def _boundary_ghosts(problem, u, t, h, tol, warm=None):
    """Ghost values beyond each end so that centered stencils realise the
    boundary conditions to second order.  Returns (gl, gr, residual_max,
    slope_l, slope_r) where the slopes are the solved boundary u' values
    (NaN where not applicable).  warm, if given, is a dict carrying the
    previous step's solved slopes as root-solve warm starts."""
    res_max = 0.0
    slope_l = slope_r = np.nan

    bc = problem.left_bc
    if isinstance(bc, SymmetryNeumann):
        gl = u[1]
        slope_l = 0.0
    elif isinstance(bc, Dirichlet):
        gl = _extrapolate_ghost(u, -1)
    elif isinstance(bc, ObliqueNonlinear):
        guess = (u[1] - u[0]) / h
        if warm is not None and warm.get("sl") is not None:
            guess = warm["sl"]

        def Fl(g):
            return bc.residual(u[0], (u[1] - g) / (2.0 * h), t)
        gl = bracketed_root(Fl, u[1] - 2.0 * h * guess,
                            2.0 * h * (1.0 + abs(guess)), tol=tol)
        res_max = max(res_max, abs(Fl(gl)))
        slope_l = (u[1] - gl) / (2.0 * h)
        if warm is not None:
            warm["sl"] = slope_l
    else:
        raise TypeError(f"unsupported left boundary {bc!r}")

    bc = problem.right_bc
    if isinstance(bc, SymmetryNeumann):
        gr = u[-2]
        slope_r = 0.0
    elif isinstance(bc, Dirichlet):
        gr = _extrapolate_ghost(u, +1)
    elif isinstance(bc, ObliqueNonlinear):
        guess = (u[-1] - u[-2]) / h
        if warm is not None and warm.get("sr") is not None:
            guess = warm["sr"]

        def Fr(g):
            return bc.residual(u[-1], (g - u[-2]) / (2.0 * h), t)
        gr = bracketed_root(Fr, u[-2] + 2.0 * h * guess,
                            2.0 * h * (1.0 + abs(guess)), tol=tol)
        res_max = max(res_max, abs(Fr(gr)))
        slope_r = (gr - u[-2]) / (2.0 * h)
        if warm is not None:
            warm["sr"] = slope_r
    else:
        raise TypeError(f"unsupported right boundary {bc!r}")
    return gl, gr, res_max, slope_l, slope_r


def _enforce_first_order_bc(problem, u, t, h, tol):
    """O(h) boundary treatment: boundary values pinned by one-sided
    relations instead of evolving (negative control for order studies)."""
    if isinstance(problem.left_bc, SymmetryNeumann):
        u[0] = u[1]
    elif isinstance(problem.left_bc, ObliqueNonlinear):
        bc = problem.left_bc

        def F(ub):
            return bc.residual(ub, (u[1] - ub) / h, t)
        u[0] = bracketed_root(F, u[0], max(abs(u[0]), 1.0) * 0.5 + h, tol=tol)
    if isinstance(problem.right_bc, SymmetryNeumann):
        u[-1] = u[-2]
    elif isinstance(problem.right_bc, ObliqueNonlinear):
        bc = problem.right_bc

        def F(ub):
            return bc.residual(ub, (ub - u[-2]) / h, t)
        u[-1] = bracketed_root(F, u[-1], max(abs(u[-1]), 1.0) * 0.5 + h, tol=tol)
    return u


# --- rhs assembly ---------------------------------------------------------------

def _full_rhs(problem, grid, u, t, tol, first_order=False):
    """(f, up, upp, bc_residual): du/dt over the grid with boundary handling.
    Dirichlet rows and first-order-pinned rows carry f = 0."""
    h = grid.h
    x = grid.nodes
    if first_order:
        gl = u[1]
        gr = u[-2]
        res = 0.0
    else:
        gl, gr, res, _, _ = _boundary_ghosts(problem, u, t, h, tol)
    up, upp = K.ghost_derivatives(u, h, gl, gr)
    if problem.guard is not None:
        problem.guard(x, u, up, t)
    f = np.asarray(problem.interior_rhs(x, u, up, upp, t), dtype=float)
    if problem.origin_rule is not None:
        f[0] = problem.origin_rule(u[0], upp[0], t)
    if isinstance(problem.left_bc, Dirichlet) or (
            first_order and not isinstance(problem.left_bc, Dirichlet)):
        f[0] = 0.0
    if isinstance(problem.right_bc, Dirichlet) or (
            first_order and not isinstance(problem.right_bc, Dirichlet)):
        f[-1] = 0.0
    return f, up, upp, res


def _diffusion_array(problem, grid, u, up, upp, t):
    """d(rhs)/d(u'') per node (> 0 for parabolic problems)."""
    x = grid.nodes
    if problem.diffusion is not None:
        a = np.broadcast_to(np.asarray(problem.diffusion(x, u, up, upp, t),
                                       dtype=float), u.shape).copy()
    else:
        d = 1e-3 * (1.0 + np.abs(upp))
        fp = np.asarray(problem.interior_rhs(x, u, up, upp + d, t), dtype=float)
        fm = np.asarray(problem.interior_rhs(x, u, up, upp - d, t), dtype=float)
        a = (fp - fm) / (2.0 * d)
    if problem.origin_rule is not None:
        d0 = 1e-3 * (1.0 + abs(upp[0]))
        a[0] = (problem.origin_rule(u[0], upp[0] + d0, t)
                - problem.origin_rule(u[0], upp[0] - d0, t)) / (2.0 * d0)
    return a


def check_problem(problem, state: FieldState, chi_tol: float = 1e-9):
    """Registration check: positive diffusion coefficient (sampled finite
    differencing) and oblique boundary residuals bounded away from u'
    degeneracy (|dR/du'| >= chi)."""
    grid, u, t = state.grid, state.u, state.t
    gl, gr, _, sl, sr = _boundary_ghosts(problem, u, t, grid.h, 1e-10)
    up, upp = K.ghost_derivatives(u, grid.h, gl, gr)
    a = _diffusion_array(problem, grid, u, up, upp, t)
    lo = 1 if isinstance(problem.left_bc, Dirichlet) else 0
    hi = -1 if isinstance(problem.right_bc, Dirichlet) else None
    if np.min(a[lo:hi]) <= 0.0:
        raise ValueError("interior_rhs is not monotone in u'' (diffusion <= 0)")
    for bc, ub, s in ((problem.left_bc, u[0], sl), (problem.right_bc, u[-1], sr)):
        if isinstance(bc, ObliqueNonlinear):
            d = 1e-6 * (1.0 + abs(s))
            dRds = (bc.residual(ub, s + d, t) - bc.residual(ub, s - d, t)) / (2.0 * d)
            if abs(dRds) < bc.chi - chi_tol:
                raise ValueError(
                    f"oblique residual slope {dRds:.3e} below chi={bc.chi:g}")


# --- stepping -------------------------------------------------------------------

def _step_rk4(problem, grid, u, t, dt, cfg, warm=None):
    first = cfg.first_order_bc
    tol = cfg.bc_tol

    def assign_dirichlet(vec, tt):
        if isinstance(problem.left_bc, Dirichlet):
            vec[0] = problem.left_bc.value(tt)
        if isinstance(problem.right_bc, Dirichlet):
            vec[-1] = problem.right_bc.value(tt)
        return vec

    res_max = 0.0

    def deriv(vec, tt):
        nonlocal res_max
        f, _, _, r = _full_rhs(problem, grid, vec, tt, tol, first_order=first)
        res_max = max(res_max, r)
        return f

    k1 = deriv(u, t)
    k2 = deriv(assign_dirichlet(u + 0.5 * dt * k1, t + 0.5 * dt), t + 0.5 * dt)
    k3 = deriv(assign_dirichlet(u + 0.5 * dt * k2, t + 0.5 * dt), t + 0.5 * dt)
    k4 = deriv(assign_dirichlet(u + dt * k3, t + dt), t + dt)
    un = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    un = assign_dirichlet(un, t + dt)
    if first:
        un = _enforce_first_order_bc(problem, un, t + dt, grid.h, tol)
    return un, {"rhs_sup": float(np.max(np.abs(k1))), "bc_residual": res_max}


def _bc_code(bc):
    if isinstance(bc, Dirichlet):
        return 0
    if isinstance(bc, SymmetryNeumann):
        return 1
    if isinstance(bc, ObliqueNonlinear):
        return 2
    raise TypeError(f"unsupported boundary {bc!r}")


def _step_semi_implicit(problem, grid, u, t, dt, cfg, warm=None):
    h = grid.h
    gl, gr, res, sl, sr = _boundary_ghosts(problem, u, t, h, cfg.bc_tol, warm)
    up, upp = K.ghost_derivatives(u, h, gl, gr)
    if problem.terms is not None:
        f, a, rhs_sup = problem.terms(grid.nodes, u, up, upp, t)
    else:
        if problem.guard is not None:
            problem.guard(grid.nodes, u, up, t)
        f = np.asarray(problem.interior_rhs(grid.nodes, u, up, upp, t), dtype=float)
        a = _diffusion_array(problem, grid, u, up, upp, t)
        lo = 1 if isinstance(problem.left_bc, Dirichlet) or problem.origin_rule else 0
        hi = u.size - 1 if isinstance(problem.right_bc, Dirichlet) else u.size
        rhs_sup = float(np.max(np.abs(f[lo:hi])))
    if problem.origin_rule is not None:
        f[0] = problem.origin_rule(u[0], upp[0], t)
        if problem.origin_diffusion is not None:
            a[0] = problem.origin_diffusion(u[0], upp[0], t)
        else:
            d0 = 1e-3 * (1.0 + abs(upp[0]))
            a[0] = (problem.origin_rule(u[0], upp[0] + d0, t)
                    - problem.origin_rule(u[0], upp[0] - d0, t)) / (2.0 * d0)
        rhs_sup = max(rhs_sup, abs(f[0]))

    lcode = _bc_code(problem.left_bc)
    rcode = _bc_code(problem.right_bc)
    lval = problem.left_bc.value(t + dt) if lcode == 0 else (sl if lcode == 2 else 0.0)
    rval = problem.right_bc.value(t + dt) if rcode == 0 else (sr if rcode == 2 else 0.0)
    un, ok = K.semi_implicit_solve(u, f, a, upp, dt, h, lcode, lval, rcode, rval)
    if not ok:
        raise StiffnessFailure(f"non-finite update at t={t:g}")
    return un, {"rhs_sup": rhs_sup, "bc_residual": res}


def propose_dt(problem, state: FieldState, cfg: StepperConfig) -> float:
    """Scheme time step: CFL-bounded for rk4, dt_max (default
    dt_h2_factor * h^2) for the semi-implicit scheme."""
    h = state.grid.h
    if cfg.scheme == "semi_implicit":
        return cfg.dt_max if cfg.dt_max is not None else cfg.dt_h2_factor * h * h
    gl, gr, _, _, _ = _boundary_ghosts(problem, state.u, state.t, h, cfg.bc_tol)
    up, upp = K.ghost_derivatives(state.u, h, gl, gr)
    a = _diffusion_array(problem, state.grid, state.u, up, upp, state.t)
    amax = float(np.max(np.abs(a)))
    dt = cfg.cfl_safety * h * h / (2.0 * max(amax, 1e-300))
    if cfg.dt_max is not None:
        dt = min(dt, cfg.dt_max)
    return dt


def step(problem: ParabolicProblem, state: FieldState, cfg: StepperConfig,
         dt: Optional[float] = None) -> FieldState:
    """Advance one step; dt defaults to the scheme rule."""
    if dt is None:
        dt = propose_dt(problem, state, cfg)
    if dt < cfg.dt_min:
        raise StiffnessFailure(f"dt underflow: {dt:g} < dt_min {cfg.dt_min:g}")
    stepper = _step_rk4 if cfg.scheme == "rk4" else _step_semi_implicit
    un, _ = stepper(problem, state.grid, state.u, state.t, dt, cfg)
    return FieldState(state.grid, un, state.t + dt)


def run(problem: ParabolicProblem, state: FieldState, cfg: StepperConfig,
        until, output_times=(), observer=None, validate: bool = True,
        observe_initial: bool = True) -> Trajectory:
    """Repeated stepping until FinalTime or Steady; snapshots (plus observer
    records) are collected at t0, the requested output times, and the final
    time."""
    if validate:
        check_problem(problem, state)
    if isinstance(until, FinalTime):
        t_end = float(until.time)
        steady_tol = None
    elif isinstance(until, Steady):
        t_end = float(until.t_max)
        steady_tol = float(until.tol)
    else:
        raise TypeError("until must be FinalTime or Steady")

    events = sorted({float(t) for t in output_times if state.t < t <= t_end})
    if np.isfinite(t_end):
        events = sorted(set(events) | {t_end})
    traj = Trajectory(grid=state.grid, times=[state.t], states=[state.u.copy()],
                      termination="", steps=0, bc_residual_max=0.0)
    if observer is not None and observe_initial:
        traj.records.append(observer(FieldState(state.grid, state.u.copy(), state.t)))

    stepper = _step_rk4 if cfg.scheme == "rk4" else _step_semi_implicit
    u, t = state.u.copy(), state.t
    eps_t = 1e-12

    # immediate return on an already-steady state
    if steady_tol is not None:
        f0, _, _, _ = _full_rhs(problem, state.grid, u, t, cfg.bc_tol,
                                first_order=cfg.first_order_bc)
        if float(np.max(np.abs(f0))) < steady_tol:
            traj.termination = "steady"
            return traj

    ev_idx = 0
    warm = {}
    while True:
        if t >= t_end - eps_t * max(1.0, abs(t_end)):
            traj.termination = "final_time"
            break
        if traj.steps >= cfg.max_steps:
            raise MaxStepsExceeded(f"{cfg.max_steps} steps reached at t={t:g}")
        dt = propose_dt(problem, FieldState(state.grid, u, t), cfg)
        # land exactly on the next event
        while ev_idx < len(events) and events[ev_idx] <= t + eps_t * max(1.0, abs(t)):
            ev_idx += 1
        next_ev = events[ev_idx] if ev_idx < len(events) else t_end
        dt = min(dt, next_ev - t)
        if dt < cfg.dt_min:
            raise StiffnessFailure(f"dt underflow: {dt:g} at t={t:g}")
        u, info = stepper(problem, state.grid, u, t, dt, cfg, warm)
        t += dt
        traj.steps += 1
        traj.bc_residual_max = max(traj.bc_residual_max, info["bc_residual"])
        hit_event = ev_idx < len(events) and abs(t - events[ev_idx]) <= eps_t * max(1.0, abs(t))
        if hit_event:
            traj.times.append(events[ev_idx])
            traj.states.append(u.copy())
            if observer is not None:
                traj.records.append(observer(FieldState(state.grid, u.copy(), events[ev_idx])))
            ev_idx += 1
        if steady_tol is not None and info["rhs_sup"] < steady_tol:
            if not hit_event:
                traj.times.append(t)
                traj.states.append(u.copy())
                if observer is not None:
                    traj.records.append(observer(FieldState(state.grid, u.copy(), t)))
            traj.termination = "steady"
            return traj
    if np.isfinite(t_end) and abs(traj.times[-1] - t) > eps_t * max(1.0, abs(t)):
        traj.times.append(t)
        traj.states.append(u.copy())
        if observer is not None:
            traj.records.append(observer(FieldState(state.grid, u.copy(), t)))
    return traj


def observed_order(problem_factory, n_list, t_final: float, cfg_factory,
                   norm=None) -> tuple[np.ndarray, np.ndarray]:
    """Richardson order estimate over a ladder of grids.

    problem_factory(n) -> (problem, state0, exact) with exact(x, t) the
    reference solution; cfg_factory(n) -> StepperConfig.  Returns (errors,
    orders) with orders[k] = log2(e_k / e_{k+1}).
    """
    errors = []
    for n in n_list:
        problem, state0, exact = problem_factory(n)
        cfg = cfg_factory(n)
        traj = run(problem, state0, cfg, FinalTime(t_final))
        u = traj.states[-1]
        ref = exact(traj.grid.nodes, traj.times[-1])
        e = float(np.max(np.abs(u - ref))) if norm is None else norm(u - ref)
        errors.append(e)
    errors = np.asarray(errors)
    scale = max(1.0, float(np.max(np.abs(errors))))
    if np.any(errors < 1e-13) or np.any(np.diff(errors) >= 0):
        raise OrderUndetermined(f"errors {errors!r} do not resolve an order")
    orders = np.log2(errors[:-1] / errors[1:])
    return errors, orders
