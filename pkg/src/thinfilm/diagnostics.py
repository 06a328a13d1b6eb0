"""
Functionals of snapshots and trajectories: mass, the weighted Dirichlet
energy and its dissipation, weighted norms, weighted Holder moduli, the
entropy pair g_eps / G_eps, and weak-form residuals.

Discrete conventions, all on the grid of :mod:`thinfilm.grid`:

* node integrals use the trapezoid rule (``quad``);
* the energy (1/2) int w u_x^2 is the face sum (1/2) sum_f h w_f (D u)_f^2,
  and the dissipation is sum_f h M_f w_f Lf_f^2. These are the quantities
  the scheme dissipates exactly, so the energy identity residual only
  carries the time-discretisation error;
* time integrals use the trapezoid rule on the stored step times.
"""

from dataclasses import dataclass, asdict
import math

import numpy as np
from scipy import integrate as sci_integrate

from .errors import AUpperBoundViolated
from .grid import Field, quad, time_quad, weight
from .operators import apply_L, face_L, mobility, stencils, weighted_laplacian

CSV_COLUMNS = ("t", "mass", "energy", "dissipation", "entropy", "entropy_dissipation",
               "l2w", "h1w", "min_u", "holder_x")


@dataclass(frozen=True)
class EntropyParams:
    eps: float
    n_exp: float
    A: float

    @classmethod
    def for_trajectory(cls, traj, params, factor=1.05):
        """A = ``factor`` times the largest value seen along ``traj``."""
        top = float(np.max(traj.values))
        return cls(params.eps, params.n_exp, factor * top if top > 0 else 1.0)


@dataclass(frozen=True)
class DiagnosticsReport:
    t: float
    mass: float
    energy: float
    dissipation: float
    entropy: float
    entropy_dissipation: float
    l2w: float
    h1w: float
    min_u: float
    holder_x: float
    nirenberg_ratio: float = None
    embedding_ratio: float = None

    def row(self):
        return [getattr(self, c) for c in CSV_COLUMNS]

    def as_dict(self):
        return asdict(self)


def mass(u):
    return quad(u.values, u.grid)


def energy(u, delta):
    """(1/2) * integral of (1 - x^2 + delta) u_x^2, face quadrature."""
    w_f, D, *_ = stencils(u.grid, delta)
    ux = D @ u.values
    return 0.5 * u.grid.h * float(np.sum(w_f * ux * ux))


def dissipation(u, params):
    """Integral of (|u|^n + eps)(1 - x^2 + delta) (((1 - x^2 + delta) u_x)_xx)^2."""
    w_f = stencils(u.grid, params.delta)[0]
    Lf = face_L(u, params.delta)
    M = mobility(u, params.eps, params.n_exp)
    return u.grid.h * float(np.sum(M * w_f * Lf * Lf))


def _energy_series(traj, params):
    E = np.array([energy(f, params.delta) for f in traj.snapshots])
    Dv = np.array([dissipation(f, params) for f in traj.snapshots])
    return E, Dv


def energy_identity_residual(traj, params):
    """|E(T) - E(0) + int_0^T dissipation dt|."""
    if len(traj) < 2:
        raise ValueError("energy identity needs at least two snapshots")
    E, Dv = _energy_series(traj, params)
    return abs(E[-1] - E[0] + time_quad(Dv, traj.times))


def weighted_l2(u, w_values):
    """(int u^2 w dx)^(1/2) by the trapezoid rule."""
    v = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    w = np.asarray(w_values, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return math.sqrt(max(quad(v * v * w, u.grid), 0.0))


def nodal_derivative(u):
    return np.gradient(u.values, u.grid.h, edge_order=2)


def weighted_h1(u, w_values):
    """||u||_{L2_w} + ||u_x||_{L2_w}."""
    ux = u.with_values(nodal_derivative(u))
    return weighted_l2(u, w_values) + weighted_l2(ux, w_values)


# -- entropy -------------------------------------------------------------------

def _quad_split(func, lo, hi, tol=1e-10):
    """Integral of ``func`` over [lo, hi] (either order), splitting at 0."""
    sign = 1.0
    if lo > hi:
        lo, hi, sign = hi, lo, -1.0
    pts = [lo] + ([0.0] if lo < 0.0 < hi else []) + [hi]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = sci_integrate.quad(func, a, b, epsabs=tol, epsrel=tol, limit=200)
        total += val
    return sign * total


def entropy_g(s, ep, tol=1e-10):
    """g_eps(s) = -int_s^A dr / (|r|^n + eps)."""
    n, eps = ep.n_exp, ep.eps
    return -_quad_split(lambda r: 1.0 / (abs(r) ** n + eps), s, ep.A, tol)


def entropy_G(s, ep, tol=1e-10):
    """G_eps(s) = -int_s^A g_eps(r) dr = int_s^A (r - s) / (|r|^n + eps) dr.

    The second form follows by exchanging the order of integration.
    """
    n, eps = ep.n_exp, ep.eps
    return _quad_split(lambda r: (r - s) / (abs(r) ** n + eps), s, ep.A, tol)


def _primitive_1(s, eps):
    # int dr/(|r| + eps), zero at r = 0
    return math.copysign(math.log1p(abs(s) / eps), s)


def entropy_g_closed(s, ep):
    """Closed forms of g_eps for n = 1 and n = 2 (cross-checks)."""
    eps, A = ep.eps, ep.A
    if ep.n_exp == 1:
        return -(_primitive_1(A, eps) - _primitive_1(s, eps))
    if ep.n_exp == 2:
        r = math.sqrt(eps)
        return -(math.atan(A / r) - math.atan(s / r)) / r
    raise ValueError("closed form only for n = 1, 2")


def entropy_G_closed(s, ep):
    """Closed forms of G_eps for n = 1 and n = 2 (cross-checks)."""
    eps, A = ep.eps, ep.A
    if ep.n_exp == 1:
        # int (r - s)/(|r| + eps): on r > 0, r/(r+eps) = 1 - eps/(r+eps)
        def P(r):
            a = abs(r)
            lin = a - eps * math.log1p(a / eps)          # int_0^|r| t/(t+eps) dt
            return lin - s * _primitive_1(r, eps)         # r/(|r|+eps) is even in r
        return P(A) - P(s)
    if ep.n_exp == 2:
        r = math.sqrt(eps)
        def P(t):
            return 0.5 * math.log(t * t + eps) - s * math.atan(t / r) / r
        return P(A) - P(s)
    raise ValueError("closed form only for n = 1, 2")


def entropy_G_values(values, ep, tol=1e-10):
    values = np.asarray(values, dtype=float)
    uniq, inv = np.unique(values, return_inverse=True)
    G = np.array([entropy_G(s, ep, tol) for s in uniq])
    return G[inv.reshape(values.shape)]


def entropy_G_integral(u, ep, tol=1e-10):
    """Integral over (-1, 1) of G_eps(u)."""
    return quad(entropy_G_values(u.values, ep, tol), u.grid)


def entropy_dissipation(u, delta):
    """Integral of (((1 - x^2 + delta) u_x)_x)^2."""
    q = weighted_laplacian(u, delta)
    return quad(q * q, u.grid)


def entropy_identity_residual(traj, params, ep=None):
    """|int G(u(T)) - int G(u_0) + int_0^T int ((w u_x)_x)^2 dx dt|."""
    if ep is None:
        ep = EntropyParams.for_trajectory(traj, params)
    if np.max(traj.values) > ep.A:
        raise AUpperBoundViolated(
            f"snapshot maximum {np.max(traj.values):.6g} exceeds A = {ep.A:.6g}")
    G0 = entropy_G_integral(traj.field(0), ep)
    GT = entropy_G_integral(traj.final, ep)
    ed = np.array([entropy_dissipation(f, params.delta) for f in traj.snapshots])
    return abs(GT - G0 + time_quad(ed, traj.times))


# -- Holder moduli -----------------------------------------------------------

def holder_seminorm_x(u, lam=0.5):
    """sup over node pairs of min(w(x1), w(x2)) |u(x1) - u(x2)| / |x1 - x2|^lam.

    w = 1 - x^2. Vectorised over row blocks to bound memory.
    """
    x = u.grid.x
    v = u.values
    w = weight(x, 0.0)
    best = 0.0
    N = len(x)
    block = max(1, 2_000_000 // N)
    for start in range(0, N, block):
        sl = slice(start, min(N, start + block))
        dx = np.abs(x[sl, None] - x[None, :])
        dv = np.abs(v[sl, None] - v[None, :])
        ww = np.minimum(w[sl, None], w[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dx > 0, ww * dv / dx**lam, 0.0)
        best = max(best, float(ratio.max()))
    return best


def holder_seminorm_t(traj, x_index=None, lam=0.125):
    """sup over snapshot pairs of (1 - x^2)|u(x, t1) - u(x, t2)| / |t1 - t2|^lam.

    With ``x_index`` None the sup also runs over all nodes.
    """
    if len(traj) < 2:
        raise ValueError("need at least two snapshots")
    t = traj.times
    w = weight(traj.grid.x, 0.0)
    cols = slice(None) if x_index is None else [x_index]
    U = traj.values[:, cols] * w[cols]
    dt = np.abs(t[:, None] - t[None, :])
    best = 0.0
    for k in range(len(t)):
        d = dt[k, k + 1:]
        if d.size == 0:
            continue
        diff = np.abs(U[k + 1:] - U[k]).max(axis=1)
        best = max(best, float(np.max(diff / d**lam)))
    return best


# -- weak form ---------------------------------------------------------------

@dataclass(frozen=True)
class TestFunctionPhi:
    """phi(x, t) = (1 - x^2)^j x^k sin(m pi t / T): Lipschitz, zero at t = 0, T."""

    j: int = 1
    k: int = 0
    m: int = 1

    def spatial(self, x):
        return (1 - x * x) ** self.j * x ** self.k

    def spatial_dx(self, x):
        j, k = self.j, self.k
        w = 1 - x * x
        d = -2 * j * x * w ** (j - 1) * x ** k if j > 0 else 0.0 * x
        if k > 0:
            d = d + w ** j * k * x ** (k - 1)
        return d

    def envelope(self, t, T):
        return np.sin(self.m * np.pi * t / T)

    def envelope_dt(self, t, T):
        return self.m * np.pi / T * np.cos(self.m * np.pi * t / T)


DEFAULT_PHI = TestFunctionPhi(1, 0, 1)


def _weak_terms(traj, params, phi, regularized, xi_weak):
    x = traj.grid.x
    T = traj.times[-1] - traj.times[0]
    ts = traj.times - traj.times[0]
    X, Xd = phi.spatial(x), phi.spatial_dx(x)
    n, eps, delta = params.n_exp, params.eps, params.delta
    a_terms, b_terms = [], []
    for k, f in enumerate(traj.snapshots):
        u = f.values
        a_terms.append(quad(u * X, traj.grid) * phi.envelope_dt(ts[k], T))
        if regularized:
            Fx = (np.abs(u) ** n + eps) * weight(x, delta) * apply_L(f, delta)
        else:
            L = apply_L(f, 0.0)
            mask = np.abs(u) > xi_weak * max(np.max(np.abs(u)), 1e-300)
            Fx = np.where(mask, np.abs(u) ** n * weight(x, 0.0) * L, 0.0)
        b_terms.append(quad(Fx * Xd, traj.grid) * phi.envelope(ts[k], T))
    return time_quad(a_terms, traj.times), time_quad(b_terms, traj.times)


def weak_form_residual(traj, params, phi=DEFAULT_PHI, xi_weak=1e-8, regularized=False):
    """|int int u phi_t + int int_P |u|^n w ((w u_x)_xx) phi_x| with w = 1 - x^2.

    P = {|u| > xi_weak * sup|u|}. With ``regularized`` the flux of the
    regularised equation replaces the limit-equation flux (and P is all of
    the domain); that residual measures discretisation error only.
    """
    a, b = _weak_terms(traj, params, phi, regularized, xi_weak)
    return abs(a + b)


def epsilon_delta_correction_terms(traj, params, phi=DEFAULT_PHI):
    """(eps int int (w + delta) ((w u_x)_xx) phi_x,  delta int int u^n ((w u_x)_xx) phi_x).

    Here w = 1 - x^2 without regularisation inside the derivative.
    """
    x = traj.grid.x
    T = traj.times[-1] - traj.times[0]
    ts = traj.times - traj.times[0]
    Xd = phi.spatial_dx(x)
    env = phi.envelope(ts, T)
    e_terms, d_terms = [], []
    for k, f in enumerate(traj.snapshots):
        L0 = apply_L(f, 0.0)
        e_terms.append(quad(weight(x, params.delta) * L0 * Xd, f.grid) * env[k])
        d_terms.append(quad(np.abs(f.values) ** params.n_exp * L0 * Xd, f.grid) * env[k])
    eps_term = params.eps * time_quad(e_terms, traj.times)
    delta_term = params.delta * time_quad(d_terms, traj.times)
    return eps_term, delta_term


def smallset_flux(u, params, xi):
    """Integral over {u < xi} of |u|^n (1 - x^2) |((1 - x^2) u_x)_xx|."""
    if not xi > 0:
        raise ValueError("xi must be positive")
    x = u.grid.x
    L0 = apply_L(u, 0.0)
    integrand = np.abs(u.values) ** params.n_exp * weight(x, 0.0) * np.abs(L0)
    return quad(np.where(u.values < xi, integrand, 0.0), u.grid)


# -- reports -----------------------------------------------------------------

def snapshot_report(u, params, ep, with_embedding=True):
    w = weight(u.grid.x, 0.0)
    emb = None
    if with_embedding:
        from .inequalities import embedding_ratio
        try:
            emb = embedding_ratio(u)
        except ZeroDivisionError:
            emb = None
    return DiagnosticsReport(
        t=u.t,
        mass=mass(u),
        energy=energy(u, params.delta),
        dissipation=dissipation(u, params),
        entropy=entropy_G_integral(u, ep),
        entropy_dissipation=entropy_dissipation(u, params.delta),
        l2w=weighted_l2(u, w),
        h1w=weighted_h1(u, w),
        min_u=float(np.min(u.values)),
        holder_x=holder_seminorm_x(u),
        nirenberg_ratio=None,
        embedding_ratio=emb,
    )


def trajectory_reports(traj, params, ep=None, sampled=True):
    """One :class:`DiagnosticsReport` per (output) snapshot."""
    if ep is None:
        ep = EntropyParams.for_trajectory(traj, params)
    src = traj.sampled() if sampled else traj
    return [snapshot_report(f, params, ep) for f in src.snapshots]
