from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate as sci_integrate

from thinfilm.errors import DegenerateDenominator
from thinfilm.grid import Field, build_grid
from thinfilm.inequalities import (HALF_INTERVAL_PARAMS, TestFunction, embedding_ensemble,
                                   embedding_ratio, halfinterval_chain_check, inequality_suite,
                                   nirenberg_ratio, random_h1_fields, random_spline_family,
                                   validate_params)

BUMP = TestFunction("polynomial-bump", (0.0, 1.0), (1.0, 2))


def test_reference_params_valid():
    check = validate_params(HALF_INTERVAL_PARAMS)
    assert check.valid and check.violations == []
    assert check.branches == ["a > 0", "a > 0 and 1/p + (alpha-1)/n = 1/r + gamma/n"]


PERTURBATIONS = [
    (dict(p=0.5), "p >= 1"),
    (dict(q=0.5), "q >= 1"),
    (dict(r=-1.0), "r > 0"),
    (dict(a=1.2), "0 <= a <= 1"),
    (dict(gamma=0.7), "gamma = a*sigma + (1-a)*beta"),
    (dict(a=0.5, beta=-0.6, gamma=0.5 * 0.5 + 0.5 * -0.6), "1/q + beta/n > 0"),
    (dict(p=1.5), "balance"),
    (dict(p=1.0, alpha=1.0), "1 <= alpha - sigma (a > 0)"),
    (dict(r=1.0, alpha=2.0), "alpha - sigma <= 1 (equality case)"),
]


@pytest.mark.parametrize("kw,label", PERTURBATIONS)
def test_single_hypothesis_perturbations_rejected(kw, label):
    check = validate_params(replace(HALF_INTERVAL_PARAMS, **kw))
    assert not check.valid
    assert label in check.violations


def test_alpha_minus_sigma_half_rejected():
    # a = 1, alpha - sigma = 0.5
    check = validate_params(replace(HALF_INTERVAL_PARAMS, alpha=1.0))
    assert "1 <= alpha - sigma (a > 0)" in check.violations


def test_a_zero_makes_alpha_sigma_conditions_vacuous():
    p = replace(HALF_INTERVAL_PARAMS, a=0.0, alpha=0.0, sigma=5.0, beta=0.0, gamma=0.0)
    check = validate_params(p)
    assert check.valid and check.branches == []


def test_bump_ratio_against_fine_quadrature():
    # ratio sqrt(int x u^2) / sqrt(int x^3 u_x^2) for u = (1 - (2x-1)^2)^2
    u = lambda x: (1 - (2 * x - 1) ** 2) ** 2
    du = lambda x: 2 * (1 - (2 * x - 1) ** 2) * (-4 * (2 * x - 1))
    xs = np.linspace(0, 1, 200001)
    num = sci_integrate.simpson(xs * u(xs) ** 2, x=xs)
    den = sci_integrate.simpson(xs**3 * du(xs) ** 2, x=xs)
    assert nirenberg_ratio(BUMP) == pytest.approx(np.sqrt(num / den), rel=1e-9)


def test_scale_invariance():
    for tf in [BUMP, TestFunction("gaussian-bump", (0.2, 0.7), (1.0, 1.0))] + \
            random_spline_family(5, seed=3):
        r = nirenberg_ratio(tf)
        assert np.isfinite(r) and r > 0
        assert abs(nirenberg_ratio(tf.scaled(5.0)) - r) <= 1e-10 * r


def test_quadrature_tolerance_insensitive():
    for tf in random_spline_family(5, seed=7):
        assert abs(nirenberg_ratio(tf, tol=1e-10) - nirenberg_ratio(tf, tol=1e-12)) < 1e-6


def test_degenerate_denominator():
    flat = TestFunction("random-spline", (0.2, 0.6), (0.0, 0.0, 0.0, 0.0))
    with pytest.raises(DegenerateDenominator):
        nirenberg_ratio(flat)
    g = build_grid(33)
    with pytest.raises(DegenerateDenominator):
        embedding_ratio(Field(np.zeros(33), g))


def test_general_form_with_a_below_one():
    p = replace(HALF_INTERVAL_PARAMS, a=0.5, beta=0.5, gamma=0.5, sigma=0.5, q=2.0)
    r = nirenberg_ratio(BUMP, p)
    assert np.isfinite(r) and r > 0


def test_test_functions_are_c1_with_compact_support():
    for tf in [BUMP] + random_spline_family(3, seed=1):
        lo, hi = tf.domain
        x = np.array([lo - 0.01, lo, hi, hi + 0.01])
        assert np.all(tf(x) == 0.0)
        xs = np.linspace(lo + 1e-3, hi - 1e-3, 50)
        h = 1e-6
        fd = (tf(xs + h) - tf(xs - h)) / (2 * h)
        assert np.allclose(tf.derivative(xs), fd, atol=1e-5 * max(1, np.max(np.abs(fd))))


def test_chain_check():
    zero = TestFunction("polynomial-bump", (0.2, 0.5), (0.0, 2))
    assert tuple(halfinterval_chain_check(zero)) == (0.0, 0.0)
    left = TestFunction("polynomial-bump", (-0.8, -0.3), (1.0, 3))
    right = left.reflected(0.0)
    a, b = halfinterval_chain_check(left), halfinterval_chain_check(right)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-10) and a.rhs == pytest.approx(b.rhs, rel=1e-10)
    # x -> 1 - x turns the half-interval weights into |x| and |x|^3
    for tf in [BUMP] + random_spline_family(5, seed=2):
        chain = halfinterval_chain_check(tf.reflected(1.0)).ratio
        assert chain == pytest.approx(nirenberg_ratio(tf), rel=1e-8)


def test_embedding_examples():
    g = build_grid(401)
    assert embedding_ratio(Field(np.ones(401), g)) == pytest.approx(1 / np.sqrt(4 / 3), abs=1e-3)
    u = Field(np.sin(2 * g.x) + 0.3, g)
    assert embedding_ratio(u.with_values(3 * u.values)) == pytest.approx(embedding_ratio(u),
                                                                          rel=1e-12)


def test_embedding_ensemble_stable_under_refinement():
    fields = random_h1_fields(50, seed=0)
    a = embedding_ensemble(fields, 129)
    b = embedding_ensemble(fields, 257)
    assert np.all(a <= a.max())
    assert abs(b.max() / a.max() - 1) <= 0.10


def test_suite_deterministic():
    r1, s1 = inequality_suite(8, seed=5, N=65)
    r2, s2 = inequality_suite(8, seed=5, N=65)
    assert r1 == r2 and s1 == s2
    assert s1["half_interval_params_valid"]
    assert np.isfinite(s1["nirenberg_max"])
