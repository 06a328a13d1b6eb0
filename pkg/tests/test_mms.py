import numpy as np
import pytest

from thinfilm.grid import RegularizationParams, build_grid
from thinfilm.mms import ManufacturedSolution, mms_dt_study, mms_error, mms_study

P = RegularizationParams(1e-2, 1e-1, 1)


def test_source_cross_check_by_finite_differences():
    # the symbolic source against high-order finite differences of u*
    from thinfilm.mms import _manufactured
    u, F, S = _manufactured(P.eps, P.delta, float(P.n_exp), 1.0)
    x = np.linspace(-0.9, 0.9, 7)
    t, h = 0.3, 1e-3
    ut = (-u(x, t + 2 * h) + 8 * u(x, t + h) - 8 * u(x, t - h) + u(x, t - 2 * h)) / (12 * h)
    Fx = (-F(x + 2 * h, t) + 8 * F(x + h, t) - 8 * F(x - h, t) + F(x - 2 * h, t)) / (12 * h)
    assert np.allclose(S(x, t), ut + Fx, rtol=1e-8, atol=1e-8)


def test_zero_amplitude_source_is_pure_decay():
    g = build_grid(33)
    ms = ManufacturedSolution(P, amplitude=0.0)
    assert np.allclose(ms.exact(g, 0.5), 2 * np.exp(-0.5))
    S = ms.source(g)(0.5)
    # flux of a spatially constant state is zero, so only u*_t remains
    assert np.allclose(S, -2 * np.exp(-0.5), rtol=1e-14)
    assert mms_error(33, 1e-4, P, 1e-2, amplitude=0.0) < 1e-5


def test_spatial_order():
    rows = mms_study(P)
    assert [r.N for r in rows] == [33, 65, 129, 257]
    assert 3.4 <= rows[1].error / rows[2].error <= 4.6
    for r in rows[1:]:
        assert 1.8 <= r.order <= 2.2


def test_time_order_one():
    diffs, orders = mms_dt_study(P)
    assert all(0.8 <= o <= 1.2 for o in orders)
