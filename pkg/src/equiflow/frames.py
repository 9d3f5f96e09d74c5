"""Boundary-condition frame algebra in R^{2n} with the standard complex
structure.

A frame holds tangent data at a point where an n-manifold M meets a
Lagrangian Sigma along its boundary: e_1..e_{n-1} span the common boundary
tangent, mu completes an orthonormal basis of T_pM, nu completes one of
T_p Sigma.  The operations verify, to round-off-level tolerances, the exact
identities that the mixed Dirichlet-Neumann boundary condition rests on.

Vectors are real arrays of length 2n laid out as (x_1..x_n, y_1..y_n), with
J(x, y) = (-y, x).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame

FRAME_ORTHO_TOL = 1e-12
DEGENERACY_MARGIN = 1e-8


def J(v):
    """Standard complex structure on R^{2n}: (x, y) -> (-y, x)."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1] // 2
    return np.concatenate([-v[..., n:], v[..., :n]], axis=-1)


def _gram_residual(vectors):
    V = np.asarray(vectors)
    G = V @ V.T
    return float(np.max(np.abs(G - np.eye(len(V)))))


@dataclass(frozen=True)
class AmbientFrame:
    """Orthonormal frame data (e_1..e_{n-1}, mu, nu) at a boundary point."""

    n: int
    e: np.ndarray    # (n-1, 2n)
    mu: np.ndarray   # (2n,)
    nu: np.ndarray   # (2n,)

    def __post_init__(self):
        object.__setattr__(self, "e", np.asarray(self.e, dtype=float).reshape(self.n - 1, 2 * self.n))
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float).reshape(2 * self.n))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float).reshape(2 * self.n))
        if self.n < 2:
            raise ValueError("n must be >= 2")
        m_frame = np.vstack([self.e, self.mu])
        s_frame = np.vstack([self.e, self.nu])
        if _gram_residual(m_frame) > FRAME_ORTHO_TOL * 10:
            raise ValueError("{e_I, mu} not orthonormal")
        if _gram_residual(s_frame) > FRAME_ORTHO_TOL * 10:
            raise ValueError("{e_I, nu} not orthonormal")
        # span{e, nu} must be Lagrangian: <J a, b> = 0 on the span
        JS = np.apply_along_axis(J, 1, s_frame)
        if float(np.max(np.abs(JS @ s_frame.T))) > FRAME_ORTHO_TOL * 10:
            raise ValueError("span{e, nu} is not Lagrangian")

    def normal_basis_m(self):
        """Non-orthonormal basis f_1..f_n of N_pM:
        f_I = J e_I - <J e_I, mu> mu,  f_n = -<J nu, mu> nu + <nu, mu> J nu."""
        Je = np.apply_along_axis(J, 1, self.e)
        tau_c = Je @ self.mu
        fI = Je - np.outer(tau_c, self.mu)
        Jnu = J(self.nu)
        fn = -float(Jnu @ self.mu) * self.nu + float(self.nu @ self.mu) * Jnu
        return np.vstack([fI, fn[None, :]])


@dataclass(frozen=True)
class ProjectionData:
    """Decomposition mu = tau + <nu,mu> nu + <Jnu,mu> J nu and the Gram data
    of the N_pM basis."""

    tau: np.ndarray
    nu_mu: float
    Jnu_mu: float
    tau_comps: np.ndarray
    G: np.ndarray
    G_inv: np.ndarray


def decompose_mu(frame: AmbientFrame) -> ProjectionData:
    """Split mu into its J-boundary, nu and J nu parts; build the Gram matrix
    G_ij = <f_i, f_j> of the N_pM basis and its closed-form inverse."""
    Je = np.apply_along_axis(J, 1, frame.e)
    tau_comps = Je @ frame.mu          # tau^I = <mu, J e_I>
    tau = tau_comps @ Je
    tau2 = float(tau_comps @ tau_comps)
    if tau2 >= 1.0 - DEGENERACY_MARGIN:
        raise DegenerateFrame(f"|tau|^2 = {tau2:.2e} too close to 1")
    nu_mu = float(frame.nu @ frame.mu)
    Jnu_mu = float(J(frame.nu) @ frame.mu)
    f = frame.normal_basis_m()
    G = f @ f.T
    n = frame.n
    G_inv = np.zeros((n, n))
    G_inv[:n - 1, :n - 1] = np.eye(n - 1) + np.outer(tau_comps, tau_comps) / (1.0 - tau2)
    G_inv[n - 1, n - 1] = 1.0 / (1.0 - tau2)
    return ProjectionData(tau=tau, nu_mu=nu_mu, Jnu_mu=Jnu_mu,
                          tau_comps=tau_comps, G=G, G_inv=G_inv)


def neumann_residual(frame: AmbientFrame, alpha: float) -> float:
    """cos(alpha) <nu,mu> - sin(alpha) <Jnu,mu>; zero iff the boundary
    condition holds at this frame."""
    nu_mu = float(frame.nu @ frame.mu)
    Jnu_mu = float(J(frame.nu) @ frame.mu)
    return np.cos(alpha) * nu_mu - np.sin(alpha) * Jnu_mu


def omega_norm_boundary(frame: AmbientFrame, alpha: float | None = None) -> float:
    """|omega|^2 restricted to T_pM at the boundary, which equals 2 |tau|^2.

    If alpha is supplied and the Neumann residual vanishes (< 1e-10), the
    alternative expression 2 - 2 <Jnu,mu>^2 / cos^2(alpha) is asserted equal
    to 1e-9.
    """
    data = decompose_mu(frame)
    val = 2.0 * float(data.tau_comps @ data.tau_comps)
    if alpha is not None and abs(neumann_residual(frame, alpha)) < 1e-10:
        alt = 2.0 - 2.0 * data.Jnu_mu**2 / np.cos(alpha) ** 2
        if abs(val - alt) > 1e-9:
            raise AssertionError(
                f"|omega|^2 identity violated: 2|tau|^2={val!r} vs {alt!r}")
    return val


def omega_matrix_m(frame: AmbientFrame) -> np.ndarray:
    """Kaehler form restricted to the basis {e_1..e_{n-1}, mu} of T_pM:
    omega_ab = <J X_a, X_b>."""
    X = np.vstack([frame.e, frame.mu])
    JX = np.apply_along_axis(J, 1, X)
    return JX @ X.T


def verify_projection_identities(frame: AmbientFrame) -> dict:
    """Residuals of the four projection identities, each computed through the
    Gram system (f_i, G^ij) so that a failure localises to one equation.

    Returns {"mu_in_perps", "nu_in_perps", "tau_nm", "nu_as_f", "mod_mu",
    "mu_reconstruction"} -> residual.
    """
    nu_mu = float(frame.nu @ frame.mu)
    if nu_mu**2 >= 1.0 - DEGENERACY_MARGIN:
        raise DegenerateFrame(f"<nu,mu>^2 = {nu_mu**2:.2e} too close to 1")
    data = decompose_mu(frame)
    f = frame.normal_basis_m()
    G_inv = data.G_inv

    def project_nm(v):
        # V^{NM} = <V, f_i> G^{ij} f_j
        return (f @ v) @ G_inv @ f

    Je = np.apply_along_axis(J, 1, frame.e)
    Jnu = J(frame.nu)

    def project_ns(v):
        # N_p Sigma has the orthonormal basis {J e_I, J nu}
        return (Je @ v) @ Je + float(Jnu @ v) * Jnu

    mu_ns = project_ns(frame.mu)
    nu_nm = project_nm(frame.nu)
    tau_nm = project_nm(data.tau)
    denom = 1.0 - nu_mu**2
    tau2 = float(data.tau_comps @ data.tau_comps)
    fn = f[-1]

    res = {
        "mu_reconstruction": np.linalg.norm(
            frame.mu - (data.tau + data.nu_mu * frame.nu + data.Jnu_mu * Jnu)),
        "mod_mu": abs(1.0 - data.nu_mu**2 - tau2 - data.Jnu_mu**2),
        "mu_in_perps": np.linalg.norm(frame.mu - (mu_ns + nu_mu * nu_nm) / denom),
        "nu_in_perps": np.linalg.norm(frame.nu - (nu_nm + nu_mu * mu_ns) / denom),
        "tau_nm": np.linalg.norm(tau_nm - (data.tau - tau2 * frame.mu)),
        "nu_as_f": np.linalg.norm(
            nu_nm - (-nu_mu / (1.0 - tau2) * tau_nm - data.Jnu_mu / (1.0 - tau2) * fn)),
    }
    return {k: float(v) for k, v in res.items()}


def random_real_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Real 2n x 2n representation of a Haar-ish random element of U(n)."""
    zmat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(zmat)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    A, B = q.real, q.imag
    return np.block([[A, -B], [B, A]])


def random_boundary_frame(n: int, alpha: float, seed) -> AmbientFrame:
    """Random frame satisfying all invariants and the Neumann condition
    exactly: a random unitary image of the standard Lagrangian plane gives
    {e_I, nu}, then mu = c (sin(alpha) nu + cos(alpha) J nu) + tau with
    random tau (|tau| < 0.9) and c = sqrt(1 - |tau|^2) > 0.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    U = random_real_unitary(n, rng)
    basis = U[:, :n].T          # images of the standard R^n basis, orthonormal
    e = basis[:n - 1]
    nu = basis[n - 1]
    tau_comps = rng.uniform(-1.0, 1.0, size=n - 1)
    norm = np.linalg.norm(tau_comps)
    target = rng.uniform(0.0, 0.9)
    if norm > 0:
        tau_comps = tau_comps / norm * target
    Je = np.apply_along_axis(J, 1, e)
    tau = tau_comps @ Je
    c = np.sqrt(1.0 - float(tau_comps @ tau_comps))
    mu = c * (np.sin(alpha) * nu + np.cos(alpha) * J(nu)) + tau
    return AmbientFrame(n=n, e=e, mu=mu, nu=nu)
