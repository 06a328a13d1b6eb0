"""
Coating flow on a rotating sphere in the variable x = -cos(theta):

    u_t + [ (|u|^3 + eps) w ( a - b x + c (2u + (w u_x)_x)_x ) ]_x = 0,

w = 1 - x^2 + delta, with gravity ``a``, rotation ``b`` and surface tension
``c``. The flux reuses the face stencils of :mod:`thinfilm.operators`, so
with a = b = 0, c = 1 and the 2u term switched off it is the analysis
equation with n = 3.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError
from .grid import Field, RegularizationParams
from .operators import FaceFlux, FluxModel, _face_L_values, stencils
from .stepper import SolverConfig, integrate

N_EXP = 3.0


@dataclass(frozen=True)
class PhysicalParams:
    a: float
    b: float
    c: float
    eps: float
    delta: float
    two_u_term: bool = True

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ConfigError(f"PhysicalParams.{name} must be finite", key=name)
        if self.c < 0:
            raise ConfigError("PhysicalParams requires c >= 0", key="c")
        # eps, delta validated through the regularisation triple
        RegularizationParams(self.eps, self.delta, N_EXP)

    @property
    def regularization(self):
        return RegularizationParams(self.eps, self.delta, N_EXP)


class PhysicalModel(FluxModel):
    """Flux (|u|^3 + eps) w_f (a - b x_f + c (2 D u + D (w u_x)_x)) in FluxModel form."""

    def __init__(self, grid, pp):
        w_f, D, _, _, K = stencils(grid, pp.delta)
        two = 2.0 if pp.two_u_term else 0.0
        G = sp.diags(w_f) @ (pp.c * (K + two * D))
        g0 = w_f * (pp.a - pp.b * grid.faces)

        def apply_G(v):
            return w_f * (pp.c * (_face_L_values(v, grid, pp.delta) + two * (D @ v)))

        super().__init__(grid, pp.eps, N_EXP, G, g0, apply_G)
        self.pp = pp


def physical_flux(u, pp):
    return FaceFlux(PhysicalModel(u.grid, pp).flux(u.values))


def integrate_physical(u0, pp, cfg=SolverConfig(), output_times=None):
    return integrate(u0, PhysicalModel(u0.grid, pp), cfg, output_times)


def theta_map(theta):
    """x = -cos(theta) for theta in [0, pi]."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > np.pi)) or not np.all(np.isfinite(theta)):
        raise ValueError("theta must lie in [0, pi]")
    x = -np.cos(theta)
    return float(x) if x.ndim == 0 else x


def x_map(x):
    """theta = arccos(-x) for x in [-1, 1]."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1) or not np.all(np.isfinite(x)):
        raise ValueError("x must lie in [-1, 1]")
    th = np.arccos(-x)
    return float(th) if th.ndim == 0 else th


def to_theta_profile(u):
    """(theta, h) pairs for a field, theta increasing from 0 to pi."""
    return x_map(u.grid.x), u.values.copy()


def from_theta_profile(theta, h, grid, t=0.0):
    """Interpolate a thickness profile given in theta onto the x grid."""
    theta = np.asarray(theta, dtype=float)
    order = np.argsort(theta)
    x = theta_map(theta[order])
    return Field(np.interp(grid.x, x, np.asarray(h, dtype=float)[order]), grid, t)


def mass_in(u, lo, hi):
    """Trapezoid mass over nodes with lo <= x <= hi (interval cells only)."""
    m = (u.grid.x >= lo) & (u.grid.x <= hi)
    x, v = u.grid.x[m], u.values[m]
    return float(np.trapezoid(v, x))
