"""Graph flow over the hyperbola foliation Y(s, w) = (s cosh w, s sinh w):
the boundary-value problem of a Lagrangian disc with boundary on the static
hyperbola neck.

Half-domain convention: equivariance forces v(-s) = v(s), so the state lives
on s in [0, 1] with a symmetry node at the origin and the nonlinear oblique
boundary relation at s = 1.  The flow converges to the static line
v = atanh(tan(-alpha/2)).
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
from .errors import (CurvatureUnresolved, DegenerateGraph, InvariantBreach,
                     InvariantViolation)
from .geometry import (ProfileCurve, curvature, derivative_arrays,
                       equivariant_integral, lagrangian_angle)

#: slack multiple of h^2 granted to preserved quantities
SLACK_FACTOR = 10.0

#: Gaussian-density monitor scales
DENSITY_R = 0.5
DENSITY_RHO = 2.5


def barrier_V(epsilon: float) -> float:
    """Graph bound: almost-calibrated discs stay in |v| < V(epsilon)."""
    return math.atanh(math.tan(math.pi / 4.0 - epsilon / 2.0))


def static_value(alpha: float) -> float:
    """The static line's graph height: atanh(tan(-alpha/2))."""
    return math.atanh(math.tan(-alpha / 2.0))


@dataclass
class LawlorState:
    """Grid function v on the uniform half-domain s in [0, 1]."""

    v: np.ndarray
    t: float = 0.0

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.v))


@dataclass
class InitialProfile:
    kind: str = "constant"          # constant | bump | custom
    value: float | None = None      # constant level; None -> the static value
    amplitude: float = 0.3
    width: float = 0.35
    values: tuple = ()              # custom samples

    def __post_init__(self):
        if self.kind not in ("constant", "bump", "custom"):
            raise ValueError(f"unknown initial profile {self.kind!r}")


@dataclass
class LawlorConfig:
    alpha: float = 0.0
    epsilon: float = 0.1
    grid_n: int = 400
    initial: InitialProfile = field(default_factory=InitialProfile)
    stepper: StepperConfig = field(default_factory=StepperConfig)

    def __post_init__(self):
        if not -math.pi / 2 < self.alpha < math.pi / 2:
            raise ValueError("alpha must lie in (-pi/2, pi/2)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.grid_n < 8:
            raise ValueError("grid_n must be >= 8")


# --- the equation -------------------------------------------------------------

def lawlor_rhs(s, v, vp, vpp):
    """dv/dt of the graph flow; s > 0 (scalar or array)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    v, vp, vpp = (np.broadcast_to(np.asarray(a, dtype=float), s.shape).copy()
                  for a in (v, vp, vpp))
    if np.any(s <= 0):
        raise DegenerateGraph("lawlor_rhs is defined for s > 0; "
                              "use lawlor_origin_rule at the origin")
    out = K.lawlor_rhs(s, v, vp, vpp)
    g2 = K.lawlor_min_gprime2(s, v, vp)
    if g2 < 1e-8:
        raise DegenerateGraph(f"|gamma'|^2 = {g2:.3e} below tolerance")
    return out if out.size > 1 else float(out[0])


def lawlor_origin_rule(v0: float, vpp0: float, t: float = 0.0) -> float:
    """Symmetric limit of the flow at s = 0: 4 v''(0) / cosh(2 v(0))."""
    return 4.0 * vpp0 / math.cosh(2.0 * v0)


def lawlor_boundary_relation(v, vp, alpha: float):
    """Residual of the oblique relation at s = 1:
    v' - tan(-alpha)/cosh(2v) + tanh(2v); zero iff theta = -alpha there."""
    if isinstance(v, float) and isinstance(vp, float):
        return vp - math.tan(-alpha) / math.cosh(2.0 * v) + math.tanh(2.0 * v)
    return (np.asarray(vp) - math.tan(-alpha) / np.cosh(2.0 * np.asarray(v))
            + np.tanh(2.0 * np.asarray(v)))


def lawlor_problem(alpha: float) -> ParabolicProblem:
    tan_ma = math.tan(-alpha)

    def rhs(x, u, up, upp, t):
        out = np.empty_like(u)
        out[0] = 0.0  # replaced by the origin rule
        out[1:] = K.lawlor_rhs(x[1:], u[1:], up[1:], upp[1:])
        return out

    def diffusion(x, u, up, upp, t):
        ch = np.cosh(u)
        sh = np.sinh(u)
        gx = ch + x * up * sh
        gy = sh + x * up * ch
        return 1.0 / (gx * gx + gy * gy)

    def terms(x, u, up, upp, t):
        f, a, g2min, fmax = K.lawlor_terms(x, u, up, upp)
        if g2min < 1e-8:
            raise DegenerateGraph(f"|gamma'|^2 = {g2min:.3e} at t = {t:g}")
        return f, a, fmax

    def guard(x, u, up, t):
        g2 = K.lawlor_min_gprime2(x, u, up)
        if g2 < 1e-8:
            raise DegenerateGraph(f"|gamma'|^2 = {g2:.3e} at t = {t:g}")

    def bc_residual(u, up, t):
        u = float(u)
        return float(up) - tan_ma / math.cosh(2.0 * u) + math.tanh(2.0 * u)

    return ParabolicProblem(
        interior_rhs=rhs,
        left_bc=SymmetryNeumann(),
        right_bc=ObliqueNonlinear(residual=bc_residual, chi=1.0),
        origin_rule=lambda u0, upp0, t: lawlor_origin_rule(u0, upp0, t),
        diffusion=diffusion,
        guard=guard,
        terms=terms,
        origin_diffusion=lambda u0, upp0, t: 4.0 / math.cosh(2.0 * u0),
    )


# --- initial data --------------------------------------------------------------

def _required_slope(v, alpha):
    return math.tan(-alpha) / math.cosh(2.0 * v) - math.tanh(2.0 * v)


def project_compatible(s, v, alpha: float, blend_start: float = 0.95):
    """Adjust the final 5% of the profile by a quadratic blend so the
    boundary relation holds exactly at s = 1 (value and slope stay continuous
    at the blend start)."""
    v = np.array(v, dtype=float)
    h = s[1] - s[0]
    j0 = int(np.searchsorted(s, blend_start))
    j0 = min(max(j0, 2), len(s) - 3)
    A = v[j0]
    B = (3.0 * v[j0] - 4.0 * v[j0 - 1] + v[j0 - 2]) / (2.0 * h)
    d = s[-1] - s[j0]

    def F(c):
        return B + 2.0 * c * d - _required_slope(A + B * d + c * d * d, alpha)

    c = bracketed_root(F, 0.0, (1.0 + abs(B) + abs(_required_slope(A, alpha))) / d,
                       tol=1e-13)
    tail = s[j0:] - s[j0]
    v[j0:] = A + B * tail + c * tail * tail
    return v


def initial_state(config: LawlorConfig) -> FieldState:
    grid = Grid1D.uniform(0.0, 1.0, config.grid_n)
    s = grid.nodes
    prof = config.initial
    if prof.kind == "constant":
        level = static_value(config.alpha) if prof.value is None else prof.value
        v = np.full_like(s, float(level))
    elif prof.kind == "bump":
        v = prof.amplitude * np.exp(-((s / prof.width) ** 2))
    else:
        v = np.asarray(prof.values, dtype=float)
        if v.shape != s.shape:
            raise InvariantViolation(
                f"custom profile has {v.size} samples, grid has {s.size}")
    v = project_compatible(s, v, config.alpha)
    V = barrier_V(config.epsilon)
    if np.max(np.abs(v)) >= V:
        raise InvariantViolation(
            f"initial |v| = {np.max(np.abs(v)):.4f} outside the barrier V = {V:.4f}")
    theta = reconstruct(LawlorState(v, 0.0), config.alpha)[1]
    if np.max(np.abs(theta)) >= math.pi / 2 - 1e-6:
        raise InvariantViolation("initial angle leaves the almost-calibrated band")
    return FieldState(grid, v, 0.0)


# --- reconstruction and identities ----------------------------------------------

def _ghost_value(v, h, alpha):
    slope = _required_slope(v[-1], alpha)
    return v[-2] + 2.0 * h * slope


def reconstruct(state: LawlorState, alpha: float | None = None):
    """(curve, theta, kappa) of the profile gamma(s) = (s cosh v, s sinh v).

    With alpha supplied, the curve is extended by the boundary-relation ghost
    node before differencing, so theta and kappa keep centered accuracy at
    s = 1; the ghost sample is dropped from the result.
    """
    v = state.v
    s = state.s
    if alpha is None:
        curve = ProfileCurve(params=s, z=s * np.cosh(v) + 1j * s * np.sinh(v),
                             origin_index=0)
        theta = lagrangian_angle(curve, n=2).values
        kappa = curvature(curve)
        return curve, theta, kappa
    h = s[1] - s[0]
    s_ext = np.append(s, 1.0 + h)
    v_ext = np.append(v, _ghost_value(v, h, alpha))
    z_ext = s_ext * np.cosh(v_ext) + 1j * s_ext * np.sinh(v_ext)
    curve_ext = ProfileCurve(params=s_ext, z=z_ext, origin_index=0)
    theta = lagrangian_angle(curve_ext, n=2).values[:-1]
    kappa = curvature(curve_ext)[:-1]
    curve = ProfileCurve(params=s, z=z_ext[:-1], origin_index=0)
    return curve, theta, kappa


def c1_consistency(state: LawlorState) -> np.ndarray:
    """Residual of the exact parametrisation identity
    s v' = tan(theta)/cosh(2v) - tanh(2v), evaluated as
    s v' cosh(2v) + sinh(2v) - tan(theta) where |cos theta| > 0.1 and as an
    angle difference (mod pi) near the tangent pole.  Pure discretisation
    error for consistent states."""
    v = state.v
    s = state.s
    curve, theta, _ = reconstruct(state)
    vp, _ = derivative_arrays(s, v)
    lhs = s * vp * np.cosh(2.0 * v) + np.sinh(2.0 * v)
    res = np.empty_like(v)
    safe = np.abs(np.cos(theta)) > 0.1
    res[safe] = lhs[safe] - np.tan(theta[safe])
    if np.any(~safe):
        diff = theta[~safe] - np.arctan(lhs[~safe])
        res[~safe] = np.abs((diff + np.pi / 2) % np.pi - np.pi / 2)
    return res


def discrete_static_residual(alpha: float, grid_n: int = 200) -> float:
    """sup |discrete RHS| + |boundary residual| at the static solution
    v = atanh(tan(-alpha/2)); pure round-off for the exact fixed point."""
    grid = Grid1D.uniform(0.0, 1.0, grid_n)
    v = np.full(grid_n + 1, static_value(alpha))
    problem = lawlor_problem(alpha)
    from .engine import _full_rhs
    f, _, _, bc_res = _full_rhs(problem, grid, v, 0.0, 1e-13)
    return float(np.max(np.abs(f)) + bc_res)


# --- run orchestration ----------------------------------------------------------

@dataclass
class LawlorRun:
    config: LawlorConfig
    grid: Grid1D
    times: list
    states: list
    curves: list
    thetas: list
    kappas: list
    records: list
    rows: list
    termination: str
    steps: int
    bc_residual_max: float
    target: float
    final_sup_dev: float

    def state(self, k: int) -> LawlorState:
        return LawlorState(self.states[k], self.times[k])


RUN_CSV_HEADER = "t,sup_v_dev,int_cos_theta,theta_min,theta_max,sup_A2,area"


class _Monitor:
    """Per-output-time diagnostics + invariant enforcement."""

    def __init__(self, config: LawlorConfig, kernel_t0: float):
        self.config = config
        self.kernel = origin_kernel(kernel_t0)
        self.h = 1.0 / config.grid_n
        self.slack = SLACK_FACTOR * self.h**2
        self.theta_band = None
        self.v_cap = barrier_V(config.epsilon)
        self.target = static_value(config.alpha)
        self.curves = []
        self.thetas = []
        self.kappas = []
        self.rows = []

    def __call__(self, fs: FieldState):
        state = LawlorState(fs.u, fs.t)
        curve, theta, kappa = reconstruct(state, self.config.alpha)
        if self.theta_band is None:
            self.theta_band = (float(theta.min()), float(theta.max()))
        lo, hi = self.theta_band
        if theta.max() > hi + self.slack or theta.min() < lo - self.slack:
            raise InvariantBreach(
                f"angle band [{lo:.4f}, {hi:.4f}] violated at t = {fs.t:g}", t=fs.t)
        if np.max(np.abs(fs.u)) > self.v_cap + self.slack:
            raise InvariantBreach(f"graph barrier |v| <= {self.v_cap:.4f} "
                                  f"violated at t = {fs.t:g}", t=fs.t)
        if np.max(np.abs(kappa)) * self.h > 1.0:
            raise CurvatureUnresolved(
                f"sup|kappa| h = {np.max(np.abs(kappa)) * self.h:.3f} at t = {fs.t:g}",
                t=fs.t)
        alpha = self.config.alpha
        cos_int = conserved_cos_theta(curve)
        area = equivariant_integral(curve, np.ones_like(curve.params))
        a2 = sup_A2(curve)
        record = DiagnosticsRecord(
            t_or_tau=fs.t,
            area=area,
            int_cos_theta=cos_int,
            theta_min=float(theta.min()),
            theta_max=float(theta.max()),
            theta2phi_max=float("nan"),
            sup_A2=a2,
            gaussian_density=gaussian_density(curve, None, DENSITY_R, DENSITY_RHO),
            huisken_value=huisken_value(curve, fs.t, self.kernel,
                                        f=(theta + alpha) ** 2),
            min_boundary_arclength=boundary_arclength_proxy(curve),
        )
        self.curves.append(curve)
        self.thetas.append(theta)
        self.kappas.append(kappa)
        self.rows.append({
            "t": fs.t,
            "sup_v_dev": float(np.max(np.abs(fs.u - self.target))),
            "int_cos_theta": cos_int,
            "theta_min": float(theta.min()),
            "theta_max": float(theta.max()),
            "sup_A2": a2,
            "area": area,
        })
        return record


def run_lawlor(config: LawlorConfig, output_times, until=None) -> LawlorRun:
    """Integrate the boundary-value problem, with diagnostics at each output
    time; raises InvariantBreach / CurvatureUnresolved / DegenerateGraph /
    StiffnessFailure on failure."""
    output_times = sorted(float(t) for t in output_times)
    if until is None:
        until = FinalTime(output_times[-1])
    t_cap = until.time if isinstance(until, FinalTime) else until.t_max
    if not np.isfinite(t_cap):
        t_cap = output_times[-1]
    monitor = _Monitor(config, kernel_t0=t_cap + 0.25)
    state = initial_state(config)
    problem = lawlor_problem(config.alpha)
    traj = run(problem, state, config.stepper, until,
               output_times=output_times, observer=monitor)
    final_dev = float(np.max(np.abs(traj.states[-1] - monitor.target)))
    return LawlorRun(
        config=config, grid=traj.grid, times=traj.times, states=traj.states,
        curves=monitor.curves, thetas=monitor.thetas, kappas=monitor.kappas,
        records=traj.records, rows=monitor.rows, termination=traj.termination,
        steps=traj.steps, bc_residual_max=traj.bc_residual_max,
        target=monitor.target, final_sup_dev=final_dev,
    )
