"""Radial graph flow with boundary on the self-shrinking torus of radius 2.

The rescaled flow (tau = -log(-t), curves scaled by 1/sqrt(-t)) has a static
boundary circle of radius 2; the state is the polar angle phi(r) of the
profile gamma(r) = r e^{i phi(r)} on the half-domain r in [0, 2].  For
alpha = 0 the flow relaxes to a constant phi (flat disc); for alpha != 0 it
approaches a rigidly rotating profile, measured by soliton_fit.

Unrescaled mode integrates the plain equivariant flow on the shrinking
domain by working on the fixed rescaled grid: with xi = rho/sqrt(-t), the
mapped equation is d phi/dt = R(phi)/(-t) where R is the rescaled
right-hand side (the drift term is exactly the moving-grid correction).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .diagnostics import (DiagnosticsRecord, boundary_arclength_proxy,
                          conserved_cos_theta, gaussian_density, huisken_value,
                          origin_kernel, sup_A2)
from .engine import (FieldState, FinalTime, Grid1D, ObliqueNonlinear,
                     ParabolicProblem, StepperConfig, SymmetryNeumann,
                     bracketed_root, run)
from .errors import (DomainError, InsufficientData, InvariantBreach,
                     InvariantViolation)
from .geometry import ProfileCurve, curvature, equivariant_integral, lagrangian_angle
from .lawlor import SLACK_FACTOR, InitialProfile

RADIUS = 2.0


@dataclass
class CliffordState:
    """Polar-angle grid function on the uniform half-domain r in [0, 2]."""

    phi: np.ndarray
    tau: float = 0.0

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, RADIUS, len(self.phi))


#: the radial advection near the origin tolerates a smaller explicit step
#: here than in the hyperbola flow; factor 10 damps the marginal origin mode
DEFAULT_DT_H2_FACTOR = 10.0


@dataclass
class CliffordConfig:
    alpha: float = 0.0
    epsilon: float = 0.1
    grid_n: int = 400
    initial: InitialProfile = field(default_factory=lambda: InitialProfile(kind="constant", value=0.0))
    stepper: StepperConfig = field(
        default_factory=lambda: StepperConfig(dt_h2_factor=DEFAULT_DT_H2_FACTOR))
    mode: str = "rescaled"          # rescaled | unrescaled
    t0: float = -1.0                # unrescaled start time
    delta: float = 1e-3             # unrescaled stop at t = -delta

    def __post_init__(self):
        if not -math.pi / 2 < self.alpha < math.pi / 2:
            raise ValueError("alpha must lie in (-pi/2, pi/2)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.grid_n < 8:
            raise ValueError("grid_n must be >= 8")
        if self.mode not in ("rescaled", "unrescaled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "unrescaled" and not self.t0 < 0:
            raise ValueError("unrescaled runs need t0 < 0")


# --- the equation ---------------------------------------------------------------

def clifford_rescaled_rhs(r, phi, phip, phipp):
    """d phi/d tau of the rescaled radial graph flow; r > 0."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0):
        raise DomainError("clifford_rescaled_rhs is defined for r > 0; "
                          "use clifford_origin_rule at the origin")
    phi, phip, phipp = (np.broadcast_to(np.asarray(a, dtype=float), r.shape).copy()
                        for a in (phi, phip, phipp))
    out = K.clifford_rhs(r, phi, phip, phipp)
    return out if out.size > 1 else float(out[0])


def clifford_origin_rule(phi0: float, phipp0: float, t: float = 0.0) -> float:
    """Symmetric limit of the rescaled flow at r = 0: 4 phi''(0)."""
    return 4.0 * phipp0


def clifford_boundary_relation(phi, phip, alpha: float):
    """Residual of the boundary relation at r = 2: phi' + tan(alpha)/2
    (from r phi' = -tan(alpha), i.e. arctan(r phi') = -alpha there)."""
    if isinstance(phip, float):
        return phip + math.tan(alpha) / 2.0
    return np.asarray(phip) + math.tan(alpha) / 2.0


def boundary_slope(alpha: float) -> float:
    return -math.tan(alpha) / 2.0


def clifford_problem(alpha: float, time_factor=None) -> ParabolicProblem:
    """Rescaled-flow problem; with time_factor(t) the right-hand side is
    multiplied by it (the unrescaled mode passes 1/(-t))."""
    fac = time_factor if time_factor is not None else (lambda t: 1.0)
    static_time = time_factor is None
    half_tan = math.tan(alpha) / 2.0

    def rhs(x, u, up, upp, t):
        out = np.empty_like(u)
        out[0] = 0.0  # replaced by the origin rule
        out[1:] = K.clifford_rhs(x[1:], u[1:], up[1:], upp[1:])
        return out * fac(t)

    def diffusion(x, u, up, upp, t):
        return fac(t) / (1.0 + (x * up) ** 2)

    def terms(x, u, up, upp, t):
        f, a, fmax = K.clifford_terms(x, u, up, upp)
        if static_time:
            return f, a, fmax
        c = fac(t)
        f *= c
        a *= c
        return f, a, fmax * c

    def bc_residual(u, up, t):
        return float(up) + half_tan

    return ParabolicProblem(
        interior_rhs=rhs,
        left_bc=SymmetryNeumann(),
        right_bc=ObliqueNonlinear(residual=bc_residual, chi=1.0),
        origin_rule=lambda u0, upp0, t: clifford_origin_rule(u0, upp0, t) * fac(t),
        diffusion=diffusion,
        terms=terms,
        origin_diffusion=lambda u0, upp0, t: 4.0 * fac(t),
    )


# --- state functionals ------------------------------------------------------------

def _ghost_value(phi, h, alpha):
    return phi[-2] + 2.0 * h * boundary_slope(alpha)


def _phip(state: CliffordState, alpha: float | None):
    """Ghost-aware first derivative: symmetric at r = 0, boundary relation
    at r = 2 when alpha is supplied, one-sided there otherwise."""
    phi = state.phi
    r = state.r
    h = r[1] - r[0]
    gl = phi[1]
    gr = _ghost_value(phi, h, alpha) if alpha is not None else None
    phip = np.empty_like(phi)
    phip[1:-1] = (phi[2:] - phi[:-2]) / (2 * h)
    phip[0] = (phi[1] - gl) / (2 * h)
    if gr is None:
        phip[-1] = (3 * phi[-1] - 4 * phi[-2] + phi[-3]) / (2 * h)
    else:
        phip[-1] = (gr - phi[-2]) / (2 * h)
    return phip


def theta_minus_2phi(state: CliffordState, alpha: float | None = None) -> np.ndarray:
    """arctan(r phi') per sample: the angle between the curve and the radial
    direction; zero at the origin by symmetry."""
    vals = np.arctan(state.r * _phip(state, alpha))
    vals[0] = 0.0
    return vals


def reconstruct(state: CliffordState, alpha: float | None = None):
    """(curve, theta, kappa) of gamma(r) = r e^{i phi(r)}; with alpha the
    boundary ghost keeps centered accuracy at r = 2."""
    phi = state.phi
    r = state.r
    if alpha is None:
        curve = ProfileCurve(params=r, z=r * np.exp(1j * phi), origin_index=0)
        return curve, lagrangian_angle(curve, n=2).values, curvature(curve)
    h = r[1] - r[0]
    r_ext = np.append(r, RADIUS + h)
    phi_ext = np.append(phi, _ghost_value(phi, h, alpha))
    curve_ext = ProfileCurve(params=r_ext, z=r_ext * np.exp(1j * phi_ext),
                             origin_index=0)
    theta = lagrangian_angle(curve_ext, n=2).values[:-1]
    kappa = curvature(curve_ext)[:-1]
    curve = ProfileCurve(params=r, z=curve_ext.z[:-1], origin_index=0)
    return curve, theta, kappa


# --- rescaling maps -----------------------------------------------------------------

def rescale_map(t: float, curve: ProfileCurve):
    """(tau, scaled curve): tau = -log(-t), curve divided by sqrt(-t)."""
    if t >= 0:
        raise DomainError("rescaling requires t < 0")
    lam = 1.0 / math.sqrt(-t)
    tau = -math.log(-t)
    return tau, ProfileCurve(params=curve.params * lam, z=curve.z * lam,
                             origin_index=curve.origin_index)


def unrescale_map(tau: float, curve: ProfileCurve):
    """Inverse of rescale_map: t = -exp(-tau), curve times sqrt(-t)."""
    t = -math.exp(-tau)
    lam = math.sqrt(-t)
    return t, ProfileCurve(params=curve.params * lam, z=curve.z * lam,
                           origin_index=curve.origin_index)


# --- initial data --------------------------------------------------------------------

def initial_state(config: CliffordConfig) -> FieldState:
    grid = Grid1D.uniform(0.0, RADIUS, config.grid_n)
    r = grid.nodes
    prof = config.initial
    if prof.kind == "constant":
        level = 0.0 if prof.value is None else float(prof.value)
        phi = np.full_like(r, level)
    elif prof.kind == "bump":
        # cos^2 window: even at 0 and slope-free at the boundary
        phi = prof.amplitude * np.cos(np.pi * r / (2.0 * RADIUS)) ** 2
    else:
        phi = np.asarray(prof.values, dtype=float)
        if phi.shape != r.shape:
            raise InvariantViolation(
                f"custom profile has {phi.size} samples, grid has {r.size}")
    phi = project_compatible(r, phi, config.alpha)
    band = theta_minus_2phi(CliffordState(phi, 0.0), config.alpha)
    if np.max(np.abs(band)) >= math.pi / 2 - 1e-9:
        raise InvariantViolation("initial angle difference leaves the band "
                                 "(-pi/2, pi/2)")
    return FieldState(grid, phi, 0.0)


def project_compatible(r, phi, alpha: float, blend_start: float = 0.95):
    """Quadratic blend over the final 5% of the domain so that
    phi'(2) = -tan(alpha)/2 exactly (value/slope continuous at the start)."""
    phi = np.array(phi, dtype=float)
    h = r[1] - r[0]
    j0 = int(np.searchsorted(r, blend_start * RADIUS))
    j0 = min(max(j0, 2), len(r) - 3)
    A = phi[j0]
    B = (3.0 * phi[j0] - 4.0 * phi[j0 - 1] + phi[j0 - 2]) / (2.0 * h)
    d = r[-1] - r[j0]
    c = (boundary_slope(alpha) - B) / (2.0 * d)
    tail = r[j0:] - r[j0]
    phi[j0:] = A + B * tail + c * tail * tail
    return phi


# --- soliton fit and barriers -----------------------------------------------------------

@dataclass
class SolitonFit:
    omega: float
    shape: np.ndarray
    residual: float
    omega_per_node: np.ndarray
    omega_spread: float


def soliton_fit(times, states, window=None) -> SolitonFit:
    """Least-squares fit phi(r, tau) ~ shape(r) + omega tau over the window.

    omega is estimated per node (a rigid rotation makes them agree); the
    returned omega is their mean, spread is max - min, residual the RMS of
    the fit over all nodes and snapshots.
    """
    times = np.asarray(times, dtype=float)
    P = np.stack([np.asarray(s, dtype=float) for s in states], axis=0)
    if window is not None:
        lo, hi = window
        sel = (times >= lo) & (times <= hi)
        times, P = times[sel], P[sel]
    if times.size < 3:
        raise InsufficientData(f"{times.size} snapshots; need at least 3")
    tbar = times.mean()
    dt = times - tbar
    denom = float(np.sum(dt * dt))
    if denom == 0.0:
        raise InsufficientData("snapshots are not spread in time")
    omega_nodes = (dt @ (P - P.mean(axis=0))) / denom
    shape = P.mean(axis=0) - omega_nodes * tbar
    fit = shape[None, :] + omega_nodes[None, :] * times[:, None]
    residual = float(np.sqrt(np.mean((P - fit) ** 2)))
    omega = float(np.mean(omega_nodes))
    return SolitonFit(omega=omega, shape=shape, residual=residual,
                      omega_per_node=omega_nodes,
                      omega_spread=float(np.max(omega_nodes) - np.min(omega_nodes)))


def barrier_bounds(times, states, grid_n: int | None = None) -> dict:
    """alpha = 0 barrier check: phi stays in [A-, A+] computed from the
    initial snapshot (A- = min(theta-/2, phi-), A+ = max(theta+/2, phi+)),
    up to 10 h^2 slack.  Raises InvariantBreach on violation."""
    phi0 = np.asarray(states[0], dtype=float)
    n = grid_n if grid_n is not None else len(phi0) - 1
    h = RADIUS / n
    tol = SLACK_FACTOR * h * h
    st0 = CliffordState(phi0, times[0])
    theta0 = 2.0 * phi0 + theta_minus_2phi(st0, alpha=0.0)
    a_minus = min(float(theta0.min()) / 2.0, float(phi0.min()))
    a_plus = max(float(theta0.max()) / 2.0, float(phi0.max()))
    for t, s in zip(times, states):
        s = np.asarray(s, dtype=float)
        if s.max() > a_plus + tol or s.min() < a_minus - tol:
            raise InvariantBreach(
                f"phi left [{a_minus:.5f}, {a_plus:.5f}] at tau = {t:g}", t=t)
    return {"A_minus": a_minus, "A_plus": a_plus, "tol": tol}


# --- run orchestration --------------------------------------------------------------------

@dataclass
class CliffordRun:
    config: CliffordConfig
    grid: Grid1D
    times: list
    states: list
    curves: list
    thetas: list
    records: list
    rows: list
    termination: str
    steps: int
    bc_residual_max: float
    final_phi_dev: float

    def state(self, k: int) -> CliffordState:
        return CliffordState(self.states[k], self.times[k])


RUN_CSV_HEADER = "tau,phi_mean,phi_dev,theta2phi_max,omega_fit,area,sup_A2"


class _Monitor:
    def __init__(self, config: CliffordConfig):
        self.config = config
        self.h = RADIUS / config.grid_n
        self.slack = SLACK_FACTOR * self.h**2
        self.band0 = None
        self.kernel = origin_kernel(0.0)    # unrescaled times are < 0
        self.curves = []
        self.thetas = []
        self.rows = []
        self.trail = []                     # (tau, phi) for the rolling fit

    def _unrescaled_time(self, t):
        return t if self.config.mode == "unrescaled" else -math.exp(-t)

    def __call__(self, fs: FieldState):
        cfg = self.config
        state = CliffordState(fs.u, fs.t)
        band = theta_minus_2phi(state, cfg.alpha)
        bmax = float(np.max(np.abs(band)))
        if self.band0 is None:
            self.band0 = bmax
        if bmax > self.band0 + self.slack:
            raise InvariantBreach(
                f"|theta - 2 phi| grew from {self.band0:.5f} to {bmax:.5f} "
                f"at tau = {fs.t:g}", t=fs.t)
        curve, theta, kappa = reconstruct(state, cfg.alpha)
        t_un = self._unrescaled_time(fs.t)
        if cfg.mode == "unrescaled":
            curve_un = curve
        else:
            _, curve_un = unrescale_map(fs.t, curve)
        hv = huisken_value(curve_un, t_un, self.kernel, f=band**2)
        r_dens = math.sqrt(-t_un) / 2.0
        dens = gaussian_density(curve_un, None, r_dens, 5.0 * r_dens)
        area = equivariant_integral(curve, np.ones_like(curve.params))
        a2 = sup_A2(curve)
        self.trail.append((fs.t, fs.u.copy()))
        if len(self.trail) >= 3:
            ts = [p[0] for p in self.trail[-10:]]
            ps = [p[1] for p in self.trail[-10:]]
            try:
                omega_fit = soliton_fit(ts, ps).omega
            except InsufficientData:
                omega_fit = float("nan")
        else:
            omega_fit = float("nan")
        record = DiagnosticsRecord(
            t_or_tau=fs.t,
            area=area,
            int_cos_theta=conserved_cos_theta(curve),
            theta_min=float(theta.min()),
            theta_max=float(theta.max()),
            theta2phi_max=bmax,
            sup_A2=a2,
            gaussian_density=dens,
            huisken_value=hv,
            min_boundary_arclength=boundary_arclength_proxy(curve),
        )
        self.curves.append(curve)
        self.thetas.append(theta)
        self.rows.append({
            "tau": fs.t,
            "phi_mean": float(np.mean(fs.u)),
            "phi_dev": float(np.max(np.abs(fs.u - np.mean(fs.u)))),
            "theta2phi_max": bmax,
            "omega_fit": omega_fit,
            "area": area,
            "sup_A2": a2,
        })
        return record


def run_clifford(config: CliffordConfig, output_times, until=None) -> CliffordRun:
    """Integrate the rescaled flow over tau (mode "rescaled") or the plain
    flow over t in [t0, -delta] on the fixed rescaled grid (mode
    "unrescaled")."""
    output_times = sorted(float(t) for t in output_times)
    monitor = _Monitor(config)
    state = initial_state(config)
    if config.mode == "rescaled":
        problem = clifford_problem(config.alpha)
        if until is None:
            until = FinalTime(output_times[-1])
        traj = run(problem, state, config.stepper, until,
                   output_times=output_times, observer=monitor)
    else:
        problem = clifford_problem(config.alpha, time_factor=lambda t: 1.0 / (-t))
        state = FieldState(state.grid, state.u, config.t0)
        t_end = min(-config.delta, output_times[-1]) if output_times else -config.delta
        if until is None:
            until = FinalTime(t_end)
        # segmented stepping: keep the effective d tau = dt/(-t) near the
        # grid rule by shrinking dt_max with each segment's end time
        traj = None
        seg_edges = [config.t0] + [t for t in output_times if t <= t_end] + [t_end]
        seg_edges = sorted(set(seg_edges))
        cur = state
        base_cfg = config.stepper
        h = state.grid.h
        for a, b in zip(seg_edges[:-1], seg_edges[1:]):
            dt_eff = (base_cfg.dt_max if base_cfg.dt_max is not None
                      else base_cfg.dt_h2_factor * h * h)
            seg_cfg = StepperConfig(
                scheme=base_cfg.scheme, cfl_safety=base_cfg.cfl_safety,
                dt_max=dt_eff * (-b), dt_min=base_cfg.dt_min,
                steady_tol=base_cfg.steady_tol,
                dt_h2_factor=base_cfg.dt_h2_factor,
                max_steps=base_cfg.max_steps, bc_tol=base_cfg.bc_tol)
            first = traj is None
            seg = run(problem, cur, seg_cfg, FinalTime(b),
                      output_times=[x for x in output_times if a < x <= b],
                      observer=monitor, validate=first, observe_initial=first)
            if first:
                traj = seg
            else:
                traj.times.extend(seg.times[1:])
                traj.states.extend(seg.states[1:])
                traj.records.extend(seg.records)
                traj.steps += seg.steps
                traj.bc_residual_max = max(traj.bc_residual_max, seg.bc_residual_max)
                traj.termination = seg.termination
            cur = FieldState(seg.grid, seg.states[-1], seg.times[-1])
    mean = float(np.mean(traj.states[-1]))
    return CliffordRun(
        config=config, grid=traj.grid, times=traj.times, states=traj.states,
        curves=monitor.curves, thetas=monitor.thetas, records=traj.records,
        rows=monitor.rows, termination=traj.termination, steps=traj.steps,
        bc_residual_max=traj.bc_residual_max,
        final_phi_dev=float(np.max(np.abs(traj.states[-1] - mean))),
    )
