"""Equivariant Lagrangian mean curvature flow with boundary.

Simulation and verification toolkit: profile-curve geometry, the
boundary-condition frame algebra, a 1D method-of-lines engine, the two
boundary-value flows (hyperbola neck, shrinking torus), and the diagnostic
functionals (conserved integrals, monotonicity quantities, densities).
"""

__version__ = "0.1.0"

from .errors import (BoundaryRootFailure, CurvatureUnresolved, DegenerateFrame,
                     DegenerateGraph, DegenerateTangent, DomainError,
                     EquiflowError, InsufficientData, InvariantBreach,
                     InvariantViolation, MaxStepsExceeded, OrderUndetermined,
                     OriginUndefined, ShapeError, StiffnessFailure)
from .geometry import (AngleField, PlanarPoint, ProfileCurve, clifford_profile,
                       curvature, equivariant_integral, equivariant_normal_speed,
                       lagrangian_angle, lawlor_profile, write_curve_csv)
from .frames import (AmbientFrame, ProjectionData, decompose_mu,
                     neumann_residual, omega_norm_boundary,
                     random_boundary_frame, verify_projection_identities)
from .engine import (Dirichlet, FieldState, FinalTime, Grid1D, ObliqueNonlinear,
                     ParabolicProblem, Steady, StepperConfig, SymmetryNeumann,
                     Trajectory, observed_order, run, step)
from .lawlor import (InitialProfile, LawlorConfig, LawlorState, barrier_V,
                     c1_consistency, lawlor_boundary_relation,
                     lawlor_origin_rule, lawlor_rhs, run_lawlor, static_value)
from .clifford import (CliffordConfig, CliffordState, barrier_bounds,
                       clifford_boundary_relation, clifford_origin_rule,
                       clifford_rescaled_rhs, rescale_map, run_clifford,
                       soliton_fit, theta_minus_2phi, unrescale_map)
from .diagnostics import (DiagnosticsRecord, MonotonicityKernel,
                          boundary_arclength_proxy, conserved_cos_theta,
                          gaussian_density, huisken_value, origin_kernel, sup_A2)
from .kernels import BACKEND
