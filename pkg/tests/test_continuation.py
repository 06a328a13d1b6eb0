import numpy as np
import pytest

from thinfilm.continuation import (ContinuationSchedule, run_continuation,
                                   uniform_bound_audit)
from thinfilm.errors import ConfigError
from thinfilm.grid import Field, build_grid
from thinfilm.stepper import SolverConfig, default_initial

CFG = SolverConfig(T_final=1e-3)


def test_default_schedule():
    s = ContinuationSchedule.default()
    assert s.levels == ((0.1, 1.0), (0.01, 0.1), (0.001, 0.01), (0.0001, 0.001))


@pytest.mark.parametrize("levels", [(), ((0.1, 1.0), (0.2, 0.1)), ((0.1, 1.0), (0.01, 2.0)),
                                    ((0.0, 1.0),), ((0.1, -1.0),)])
def test_schedule_invariants(levels):
    with pytest.raises(ConfigError):
        ContinuationSchedule(levels)


def test_single_level_has_no_distances():
    g = build_grid(33)
    rep = run_continuation(default_initial(g), ContinuationSchedule(((0.01, 0.1),)), CFG)
    assert rep.distances == [] and rep.monotone
    with pytest.raises(ValueError):
        uniform_bound_audit(rep)


def test_constant_data_gives_zero_distances():
    g = build_grid(33)
    rep = run_continuation(Field(np.ones(33), g), ContinuationSchedule.default(), CFG)
    assert rep.distances == [0.0, 0.0, 0.0]
    passed, table = uniform_bound_audit(rep)
    assert passed and len(table) == 4


def test_identical_levels_zero_distance():
    g = build_grid(33)
    rep = run_continuation(default_initial(g),
                           ContinuationSchedule(((0.01, 0.1), (0.01, 0.1))), CFG)
    assert rep.distances == [0.0]


@pytest.fixture(scope="module")
def default_report():
    g = build_grid(65)
    return run_continuation(default_initial(g), ContinuationSchedule.default(), CFG)


def test_default_run_converges(default_report):
    rep = default_report
    assert len(rep.times) == 21
    assert rep.monotone
    assert all(d1 <= d0 for d0, d1 in zip(rep.distances[:-1], rep.distances[1:]))
    for a, b in zip(rep.levels[:-1], rep.levels[1:]):
        assert abs(b.corrections[0]) < abs(a.corrections[0])
        assert abs(b.corrections[1]) < abs(a.corrections[1])
    passed, table = uniform_bound_audit(rep, 2.0)
    assert passed
    for lv in rep.levels:
        assert lv.energy_drop <= 0.0


def test_parallel_matches_serial(default_report):
    g = build_grid(65)
    rep = run_continuation(default_initial(g), ContinuationSchedule.default(), CFG, workers=2)
    assert rep.distances == default_report.distances


def test_cross_check_at_finer_grid():
    g = build_grid(129)
    rep = run_continuation(default_initial(g), ContinuationSchedule.default(), CFG)
    assert rep.monotone


def test_failed_level_is_reported():
    g = build_grid(33)
    u0 = Field(0.5 + 0.5 * np.cos(8 * np.pi * g.x), g)
    cfg = SolverConfig(T_final=1e-3, newton_max_iter=1).fixed_step(1e-3)
    rep = run_continuation(u0, ContinuationSchedule(((0.1, 1.0), (0.01, 0.1))), cfg)
    assert all(lv.failed for lv in rep.levels) and rep.distances == []
