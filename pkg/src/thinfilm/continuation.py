"""
Diagonal continuation eps -> 0, delta -> 0: the same initial data is
integrated at each schedule level on a common snapshot grid, and the
levels are compared in the weighted sup norm sup_{x,t} |(1 - x^2)(u_k - u_{k+1})|.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging

import numpy as np

from . import diagnostics as dg
from .errors import ConfigError, StepUnderflow
from .grid import RegularizationParams, weight
from .stepper import SolverConfig, integrate

log = logging.getLogger(__name__)

N_SNAPSHOTS = 21


@dataclass(frozen=True)
class ContinuationSchedule:
    levels: tuple
    n_exp: float = 1.0

    def __post_init__(self):
        levels = tuple((float(e), float(d)) for e, d in self.levels)
        if not levels:
            raise ConfigError("continuation schedule is empty", key="levels")
        for k, (e, d) in enumerate(levels):
            if not (e > 0 and d > 0):
                raise ConfigError(f"schedule level {k} has non-positive entry {(e, d)}",
                                  key="levels")
            if k and (e > levels[k - 1][0] or d > levels[k - 1][1]):
                raise ConfigError(
                    f"schedule level {k} increases eps or delta: {levels[k - 1]} -> {(e, d)}",
                    key="levels")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def default(cls, n_levels=4, eps0=1e-1, delta0=1.0, eps_min=1e-4, delta_min=1e-3,
                n_exp=1.0):
        return cls(tuple((max(eps0 / 10.0**k, eps_min), max(delta0 / 10.0**k, delta_min))
                         for k in range(n_levels)), n_exp)

    def params(self, k):
        e, d = self.levels[k]
        return RegularizationParams(e, d, self.n_exp)

    def __len__(self):
        return len(self.levels)


@dataclass
class LevelResult:
    params: RegularizationParams
    trajectory: object = None     # full trajectory (all steps)
    reports: list = field(default_factory=list)
    holder_t: float = float("nan")
    corrections: tuple = (float("nan"), float("nan"))
    weak_residual: float = float("nan")
    min_u: float = float("nan")
    energy_drop: float = float("nan")  # E(T) - E(0)
    failed: bool = False
    error: str = ""

    def sup(self, name):
        return max(getattr(r, name) for r in self.reports)


@dataclass
class ConvergenceReport:
    levels: list
    distances: list       # d_k between levels k and k+1 (successful neighbours only)
    times: np.ndarray
    monotone: bool

    @property
    def ok_levels(self):
        return [lv for lv in self.levels if not lv.failed]


def _run_level(args):
    u0, params, cfg, times = args
    res = LevelResult(params)
    try:
        traj = integrate(u0, params, cfg, output_times=times[1:])
    except StepUnderflow as exc:
        res.failed, res.error = True, str(exc)
        return res
    res.trajectory = traj
    ep = dg.EntropyParams.for_trajectory(traj, params)
    res.reports = dg.trajectory_reports(traj, params, ep)
    res.holder_t = dg.holder_seminorm_t(traj.sampled())
    res.corrections = dg.epsilon_delta_correction_terms(traj, params)
    res.weak_residual = dg.weak_form_residual(traj, params)
    res.min_u = float(np.min(traj.values))
    E0 = dg.energy(traj.field(0), params.delta)
    res.energy_drop = dg.energy(traj.final, params.delta) - E0
    return res


def run_continuation(u0, schedule, cfg=SolverConfig(), n_snapshots=N_SNAPSHOTS, workers=1):
    """Integrate every schedule level from ``u0`` and compare neighbours.

    Failed levels (step underflow) are kept in the report with
    ``failed=True`` and skipped in the distance sequence.
    """
    times = np.linspace(0.0, cfg.T_final, n_snapshots)
    jobs = [(u0, schedule.params(k), cfg, times) for k in range(len(schedule))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            levels = list(pool.map(_run_level, jobs))
    else:
        levels = [_run_level(j) for j in jobs]
    for k, lv in enumerate(levels):
        if lv.failed:
            log.warning("continuation level %d %s failed: %s", k, lv.params, lv.error)
    w = weight(u0.grid.x, 0.0)
    ok = [lv for lv in levels if not lv.failed]
    distances = []
    for a, b in zip(ok[:-1], ok[1:]):
        ua, ub = a.trajectory.sampled().values, b.trajectory.sampled().values
        distances.append(float(np.max(np.abs(w * (ua - ub)))))
    monotone = all(d1 <= d0 for d0, d1 in zip(distances[:-1], distances[1:]))
    if not monotone:
        log.warning("non-monotone level distances: %s", distances)
    return ConvergenceReport(levels, distances, times, monotone)


AUDIT_QUANTITIES = ("l2w", "h1w", "holder_x", "holder_t")


def uniform_bound_audit(report, multiplier=2.0):
    """Check that per-level sup norms stay within ``multiplier`` x level 0.

    Returns ``(passed, table)`` with one row per successful level holding
    sup_t l2w, sup_t h1w, sup_t holder_x and holder_t.
    """
    ok = report.ok_levels
    if len(ok) < 2:
        raise ValueError("uniform bound audit needs at least two successful levels")
    table = []
    for lv in ok:
        row = {"eps": lv.params.eps, "delta": lv.params.delta}
        for q in AUDIT_QUANTITIES[:3]:
            row[q] = lv.sup(q)
        row["holder_t"] = lv.holder_t
        table.append(row)
    base = table[0]
    passed = all(row[q] <= multiplier * base[q] + 1e-14 for row in table
                 for q in AUDIT_QUANTITIES)
    return passed, table
