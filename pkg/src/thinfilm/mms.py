"""
Manufactured-solution verification of the regularised scheme.

The manufactured solution u*(x, t) = exp(-t) (2 + A cos(pi x)) has
u*_x = 0 at x = -1, +1 but a nonzero flux there, so the run imposes the
exact boundary flux of u* as data on the two boundary faces and adds the
source S = u*_t + (F(u*))_x. The source is derived symbolically with
sympy and evaluated at the nodes.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import sympy

from .diagnostics import weighted_l2
from .grid import Field, RegularizationParams, build_grid, weight
from .stepper import SolverConfig, integrate

DEFAULT_SIZES = (33, 65, 129, 257)


@lru_cache(maxsize=16)
def _manufactured(eps, delta, n_exp, amplitude):
    x, t = sympy.symbols("x t", real=True)
    u = sympy.exp(-t) * (2 + amplitude * sympy.cos(sympy.pi * x))
    w = 1 - x**2 + delta
    # u* > 0, so |u|^n = u^n
    F = (u**n_exp + eps) * w * sympy.diff(w * sympy.diff(u, x), x, 2)
    S = sympy.diff(u, t) + sympy.diff(F, x)
    mods = ["numpy"]
    return (sympy.lambdify((x, t), u, mods), sympy.lambdify((x, t), F, mods),
            sympy.lambdify((x, t), S, mods))


class ManufacturedSolution:
    def __init__(self, params, amplitude=1.0):
        self.params = params
        self.amplitude = float(amplitude)
        self._u, self._F, self._S = _manufactured(
            float(params.eps), float(params.delta), float(params.n_exp), self.amplitude)

    def exact(self, grid, t):
        return np.broadcast_to(self._u(grid.x, t), grid.x.shape).astype(float)

    def source(self, grid):
        """Nodal S(t) plus the boundary-flux data folded into the end cells."""
        c = grid.cell_widths

        def S(t):
            s = np.broadcast_to(self._S(grid.x, t), grid.x.shape).astype(float).copy()
            # rhs_0 = -(F_0 - F(-1)) / c_0, rhs_{N-1} = -(F(1) - F_{N-2}) / c_{N-1}
            s[0] += float(self._F(-1.0, t)) / c[0]
            s[-1] -= float(self._F(1.0, t)) / c[-1]
            return s

        return S


@dataclass
class MMSRow:
    N: int
    dt: float
    error: float
    order: float = float("nan")


def mms_error(N, dt, params, T, amplitude=1.0, cfg=None):
    grid = build_grid(N)
    ms = ManufacturedSolution(params, amplitude)
    u0 = Field(ms.exact(grid, 0.0), grid)
    base = SolverConfig() if cfg is None else cfg
    run_cfg = replace(base, T_final=T).fixed_step(dt)
    traj = integrate(u0, params, run_cfg, source=ms.source(grid))
    err = traj.final.values - ms.exact(grid, T)
    return weighted_l2(u0.with_values(err), weight(grid.x, 0.0))


def mms_study(params=None, sizes=DEFAULT_SIZES, T=1e-2, dt_factor=1.0 / 16, amplitude=1.0,
              cfg=None):
    """Weighted-L2 errors with dt = dt_factor * h^2; order from successive h."""
    params = params or RegularizationParams(1e-2, 1e-1, 1)
    rows = []
    for N in sizes:
        h = 2.0 / (N - 1)
        dt = dt_factor * h * h
        steps = max(1, int(round(T / dt)))
        dt = T / steps
        rows.append(MMSRow(N, dt, mms_error(N, dt, params, T, amplitude, cfg)))
    for a, b in zip(rows[:-1], rows[1:]):
        b.order = float(np.log(a.error / b.error) / np.log((b.N - 1) / (a.N - 1)))
    return rows


def mms_dt_study(params=None, N=65, T=1e-3, dts=(1e-4, 5e-5, 2.5e-5, 1.25e-5), amplitude=1.0):
    """Fixed-N dt refinement; order from successive differences of the final states."""
    params = params or RegularizationParams(1e-2, 1e-1, 1)
    grid = build_grid(N)
    ms = ManufacturedSolution(params, amplitude)
    u0 = Field(ms.exact(grid, 0.0), grid)
    finals = []
    for dt in dts:
        cfg = replace(SolverConfig(), T_final=T).fixed_step(dt)
        finals.append(integrate(u0, params, cfg, source=ms.source(grid)).final.values)
    w = weight(grid.x, 0.0)
    diffs = [weighted_l2(u0.with_values(a - b), w) for a, b in zip(finals[:-1], finals[1:])]
    orders = [float(np.log2(d0 / d1)) for d0, d1 in zip(diffs[:-1], diffs[1:])]
    return diffs, orders
