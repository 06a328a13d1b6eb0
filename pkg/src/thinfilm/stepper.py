"""Backward-Euler time integration with damped Newton and banded solves."""

from dataclasses import dataclass, field, replace
import logging

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded

from .errors import ConfigError, NewtonDiverged, StepUnderflow
from .grid import Field, quad
from .operators import FluxModel, RegularizedModel, banded_to_sparse

log = logging.getLogger(__name__)

BANDWIDTH = 3
JAC_MODES = ("analytic-banded", "finite-difference")


@dataclass(frozen=True)
class SolverConfig:
    dt0: float = 1e-5
    dt_min: float = 1e-12
    dt_max: float = 1e-2
    newton_tol: float = 1e-12
    newton_max_iter: int = 30
    T_final: float = 1e-3
    growth: float = 1.5
    jac_mode: str = "analytic-banded"

    def __post_init__(self):
        if not (0 < self.dt_min <= self.dt0 <= self.dt_max):
            raise ConfigError(
                "SolverConfig requires 0 < dt_min <= dt0 <= dt_max, got "
                f"dt_min={self.dt_min}, dt0={self.dt0}, dt_max={self.dt_max}", key="dt0")
        if not self.newton_tol > 0:
            raise ConfigError("SolverConfig requires newton_tol > 0", key="newton_tol")
        if int(self.newton_max_iter) != self.newton_max_iter or self.newton_max_iter < 1:
            raise ConfigError("newton_max_iter must be a positive integer", key="newton_max_iter")
        if not self.T_final > 0:
            raise ConfigError("SolverConfig requires T_final > 0", key="T_final")
        if not self.growth >= 1:
            raise ConfigError("SolverConfig requires growth >= 1", key="growth")
        if self.jac_mode not in JAC_MODES:
            raise ConfigError(f"jac_mode must be one of {JAC_MODES}", key="jac_mode")

    def fixed_step(self, dt):
        """Copy of this config that takes constant steps of size ``dt``.

        A Newton failure is not retried with a smaller step; it surfaces as
        :class:`StepUnderflow`.
        """
        return replace(self, dt0=dt, dt_max=dt, dt_min=dt)


@dataclass(frozen=True)
class StepRecord:
    t: float
    dt: float
    iterations: int
    residual: float


@dataclass(eq=False)
class Trajectory:
    """Every accepted step of a run.

    ``values[k]`` is the state at ``times[k]``; ``output`` flags the
    entries that landed on requested output times.
    """

    grid: object
    times: np.ndarray
    values: np.ndarray
    output: np.ndarray
    steps: list = field(default_factory=list)
    failed: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        self.output = np.asarray(self.output, dtype=bool)
        for a in (self.times, self.values, self.output):
            a.setflags(write=False)

    def __len__(self):
        return len(self.times)

    @property
    def snapshots(self):
        return [Field(v, self.grid, t) for t, v in zip(self.times, self.values)]

    def field(self, k):
        return Field(self.values[k], self.grid, self.times[k])

    @property
    def final(self):
        return self.field(-1)

    def sampled(self):
        """Sub-trajectory at the requested output times only."""
        m = self.output
        return Trajectory(self.grid, self.times[m], self.values[m], np.ones(m.sum(), bool),
                          [], self.failed)


def _as_model(u0, model_or_params):
    if isinstance(model_or_params, FluxModel):
        return model_or_params
    return RegularizedModel(u0.grid, model_or_params)


def assemble_jacobian(u, dt, params):
    """Sparse banded linearisation of R(v) = v - u - dt * rhs(v) at ``v = u``."""
    model = _as_model(u, params)
    ab = -dt * model.rhs_jacobian_banded(u.values, BANDWIDTH, BANDWIDTH)
    ab[BANDWIDTH] += 1.0
    return banded_to_sparse(ab, BANDWIDTH, BANDWIDTH)


def fd_jacobian(func, v, step=1e-6):
    """Dense central finite-difference Jacobian of ``func`` at ``v``."""
    v = np.asarray(v, dtype=float)
    cols = []
    for j in range(len(v)):
        e = np.zeros_like(v)
        e[j] = step
        cols.append((func(v + e) - func(v - e)) / (2 * step))
    return np.column_stack(cols)


def step_implicit(u, dt, params, cfg=SolverConfig(), source=None):
    """One backward-Euler step from ``u``.

    ``params`` is a ``RegularizationParams`` or any ``FluxModel``.
    ``source``, if given, is a nodal vector added to the right-hand side at
    the new time level. Use :func:`newton_solve` to also get the iteration
    count and final residual.
    """
    return newton_solve(u, dt, params, cfg, source)[0]


def newton_solve(u, dt, params, cfg=SolverConfig(), source=None):
    """Solve v - u - dt (rhs(v) + source) = 0; returns ``(Field, iterations, residual)``.

    Converged when the max-norm residual or the Newton increment (relative
    to max(1, |v|)) falls below ``cfg.newton_tol``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    model = _as_model(u, params)
    u_old = u.values
    S = 0.0 if source is None else np.asarray(source, dtype=float)

    def residual(v):
        return v - u_old - dt * (model.rhs(v) + S)

    v = u_old.copy()
    R = residual(v)
    rnorm = np.max(np.abs(R))
    for it in range(cfg.newton_max_iter + 1):
        if rnorm <= cfg.newton_tol:
            return u.with_values(v, u.t + dt), it, rnorm
        if it == cfg.newton_max_iter:
            break
        if cfg.jac_mode == "analytic-banded":
            ab = -dt * model.rhs_jacobian_banded(v, BANDWIDTH, BANDWIDTH)
            ab[BANDWIDTH] += 1.0
            dv = solve_banded((BANDWIDTH, BANDWIDTH), ab, -R,
                              overwrite_ab=True, check_finite=False)
        else:
            J = fd_jacobian(residual, v)
            dv = np.linalg.solve(J, -R)
        if not np.all(np.isfinite(dv)):
            raise NewtonDiverged("non-finite Newton update", rnorm, it)
        if np.max(np.abs(dv)) <= cfg.newton_tol * max(1.0, np.max(np.abs(v))):
            # increment test: the residual may sit on a rounding floor above tol
            v = v + dv
            return u.with_values(v, u.t + dt), it + 1, float(np.max(np.abs(residual(v))))
        lam = 1.0
        for _ in range(6):
            v_try = v + lam * dv
            R_try = residual(v_try)
            r_try = np.max(np.abs(R_try))
            if np.isfinite(r_try) and r_try < rnorm:
                break
            lam *= 0.5
        else:
            if not np.isfinite(r_try):
                raise NewtonDiverged("NaN in Newton residual", rnorm, it)
            raise NewtonDiverged(
                f"Newton stalled at residual {rnorm:.3e} (tol {cfg.newton_tol:.1e})", rnorm, it)
        v, R, rnorm = v_try, R_try, r_try
    raise NewtonDiverged(
        f"no convergence in {cfg.newton_max_iter} iterations (residual {rnorm:.3e})",
        rnorm, cfg.newton_max_iter)


def integrate(u0, params, cfg=SolverConfig(), output_times=None, source=None):
    """Integrate from ``u0`` to ``cfg.T_final``.

    Steps are clipped to land on every time in ``output_times`` (default:
    just the final time). ``source(t)`` may return a nodal vector for
    manufactured-solution runs. On Newton failure the step is halved;
    below ``dt_min`` a :class:`StepUnderflow` carrying the partial
    trajectory is raised.
    """
    model = _as_model(u0, params)
    T = cfg.T_final
    targets = np.array(sorted({float(t) for t in (output_times if output_times is not None
                                                  else [T]) if 0 < t <= T} | {T}))
    times, values, output, steps = [u0.t], [u0.values.copy()], [True], []
    u = u0
    dt = cfg.dt0
    streak = 0
    k_target = 0
    while k_target < len(targets):
        target = targets[k_target]
        remaining = target - u.t
        clipped = remaining <= dt * (1 + 1e-9)
        h = remaining if clipped else dt
        S = None if source is None else source(u.t + h)
        try:
            u_new, iters, res = newton_solve(u, h, model, cfg, S)
        except NewtonDiverged as exc:
            log.debug("step at t=%.6g, dt=%.3g failed: %s", u.t, h, exc)
            dt = 0.5 * h
            streak = 0
            if dt < cfg.dt_min:
                partial = Trajectory(u0.grid, times, values, output, steps, failed=True)
                raise StepUnderflow(f"dt={dt:.3e} below dt_min at t={u.t:.6g}", partial) from exc
            continue
        if clipped:
            u_new = u_new.with_values(u_new.values, target)
            k_target += 1
        times.append(u_new.t)
        values.append(u_new.values.copy())
        output.append(clipped)
        steps.append(StepRecord(u_new.t, h, iters, res))
        u = u_new
        if not clipped:
            streak = streak + 1 if iters <= 4 else 0
            if streak >= 3 and dt < cfg.dt_max:
                dt = min(dt * cfg.growth, cfg.dt_max)
                streak = 0
    return Trajectory(u0.grid, times, values, output, steps)


def default_initial(grid):
    """u0(x) = 0.5 + 0.25 cos(pi x), which has u_x = 0 at both ends."""
    return Field(0.5 + 0.25 * np.cos(np.pi * grid.x), grid, 0.0)


def mass_drift(traj):
    masses = np.array([quad(v, traj.grid) for v in traj.values])
    return float(np.max(np.abs(masses - masses[0])))
