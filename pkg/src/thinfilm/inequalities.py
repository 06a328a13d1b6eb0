"""
Numerical checks of the weighted interpolation inequality

    || |x|^gamma u ||_{L^r} <= C || |x|^alpha u' ||_{L^p}^a || |x|^beta u ||_{L^q}^(1-a)

in one dimension, and of the embedding of H^1_w into the weighted Holder
space C^{1/2}_w with w = 1 - x^2.

Test functions are C^1 compactly supported bumps and cubic splines; all
integrals are adaptive quadratures over the support. Ratios are empirical
constants for the sampled family, not sharp constants.
"""

from dataclasses import dataclass, replace
import math
from typing import NamedTuple

import numpy as np
from scipy import integrate as sci_integrate
from scipy.interpolate import BSpline

from .diagnostics import holder_seminorm_x, weighted_h1
from .errors import DegenerateDenominator
from .grid import Field, build_grid, weight

BALANCE_TOL = 1e-12
KINDS = ("polynomial-bump", "gaussian-bump", "random-spline")


@dataclass(frozen=True)
class NirenbergParams:
    p: float
    q: float
    r: float
    alpha: float
    beta: float
    gamma: float
    sigma: float
    a: float
    dim: int = 1


# gamma = 1/2, r = p = 2, a = 1, sigma = 1/2, alpha = 3/2; q and beta drop out
# (exponent 1 - a = 0) and are set to admissible values.
HALF_INTERVAL_PARAMS = NirenbergParams(p=2, q=2, r=2, alpha=1.5, beta=0.0, gamma=0.5,
                                      sigma=0.5, a=1.0)


class ParamCheck(NamedTuple):
    valid: bool
    violations: list
    branches: list


def validate_params(np_):
    """Check every hypothesis of the inequality; return (valid, violations, branches).

    ``branches`` names the conditional alpha - sigma constraints that were
    active for this parameter set.
    """
    p, q, r, al, be, ga, si, a, n = (np_.p, np_.q, np_.r, np_.alpha, np_.beta,
                                     np_.gamma, np_.sigma, np_.a, np_.dim)
    bad = []
    if not p >= 1:
        bad.append("p >= 1")
    if not q >= 1:
        bad.append("q >= 1")
    if not r > 0:
        bad.append("r > 0")
    if not 0 <= a <= 1:
        bad.append("0 <= a <= 1")
    if abs(ga - (a * si + (1 - a) * be)) > BALANCE_TOL:
        bad.append("gamma = a*sigma + (1-a)*beta")
    if not (p > 0 and 1 / p + al / n > 0):
        bad.append("1/p + alpha/n > 0")
    if not (q > 0 and 1 / q + be / n > 0):
        bad.append("1/q + beta/n > 0")
    if not (r > 0 and 1 / r + ga / n > 0):
        bad.append("1/r + gamma/n > 0")
    branches = []
    if p > 0 and q > 0 and r > 0:
        lhs = 1 / r + ga / n
        rhs = a * (1 / p + (al - 1) / n) + (1 - a) * (1 / q + be / n)
        if abs(lhs - rhs) > BALANCE_TOL:
            bad.append("balance")
        if a > 0:
            branches.append("a > 0")
            if not 1 <= al - si + BALANCE_TOL:
                bad.append("1 <= alpha - sigma (a > 0)")
            if abs(1 / p + (al - 1) / n - lhs) <= BALANCE_TOL:
                branches.append("a > 0 and 1/p + (alpha-1)/n = 1/r + gamma/n")
                if not al - si <= 1 + BALANCE_TOL:
                    bad.append("alpha - sigma <= 1 (equality case)")
    else:
        bad.append("balance")
    return ParamCheck(not bad, bad, branches)


@dataclass(frozen=True)
class TestFunction:
    """A C^1 function with compact support inside ``support``.

    ``coeffs`` depends on ``kind``:

    * polynomial-bump: (amplitude, power), u = amp (1 - s^2)^power, power >= 2;
    * gaussian-bump: (amplitude, sharpness), u = amp exp(-k / (1 - s^2));
    * random-spline: cubic B-spline coefficients on uniform knots over the support;

    with s mapping the support onto (-1, 1). ``scale`` multiplies the values,
    ``mirror`` evaluates at c - x instead of x (c = ``mirror``).
    """

    __test__ = False  # not a pytest class

    kind: str
    support: tuple
    coeffs: tuple
    scale: float = 1.0
    mirror: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test-function kind {self.kind!r}")
        lo, hi = self.support
        if not lo < hi:
            raise ValueError("support must be a nonempty interval")
        if self.kind == "polynomial-bump" and self.coeffs[1] < 2:
            raise ValueError("polynomial bump needs power >= 2 for C^1")

    @property
    def domain(self):
        """Interval, in x, outside which the function vanishes."""
        lo, hi = self.support
        if self.mirror is None:
            return lo, hi
        return self.mirror - hi, self.mirror - lo

    def _base(self, y, deriv):
        lo, hi = self.support
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        inside = (y > lo) & (y < hi)
        if self.kind == "random-spline":
            spl = self._spline()
            if deriv:
                spl = spl.derivative()
            out[inside] = spl(y[inside])
            return out
        half = 0.5 * (hi - lo)
        s = (y[inside] - lo) / half - 1.0
        amp, k = self.coeffs
        one = 1.0 - s * s
        if self.kind == "polynomial-bump":
            if deriv:
                out[inside] = amp * k * one ** (k - 1) * (-2 * s) / half
            else:
                out[inside] = amp * one**k
        else:
            e = np.exp(-k / one)
            if deriv:
                out[inside] = amp * e * (-k * 2 * s / one**2) / half
            else:
                out[inside] = amp * e
        return out

    def _spline(self):
        lo, hi = self.support
        c = np.asarray(self.coeffs, dtype=float)
        m = len(c)
        step = (hi - lo) / (m + 3)
        # pad by three zero coefficients per side so [lo, hi] is the base interval
        knots = lo + step * np.arange(-3, m + 7)
        return BSpline(knots, np.concatenate((np.zeros(3), c, np.zeros(3))), 3,
                       extrapolate=False)

    def breakpoints(self):
        lo, hi = self.support
        if self.kind == "random-spline":
            pts = np.linspace(lo, hi, len(self.coeffs) + 4)
        else:
            pts = np.array([lo, 0.5 * (lo + hi), hi])
        if self.mirror is not None:
            pts = np.sort(self.mirror - pts)
        return pts

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = x if self.mirror is None else self.mirror - x
        return self.scale * self._base(y, False)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.mirror is None:
            return self.scale * self._base(x, True)
        return -self.scale * self._base(self.mirror - x, True)

    def scaled(self, factor):
        return replace(self, scale=self.scale * factor)

    def reflected(self, center):
        """x -> center - x applied to the argument."""
        if self.mirror is None:
            return replace(self, mirror=center)
        # applying twice: u(c1 - (c2 - x)) = u(x + c1 - c2); only c1 == c2 needed
        if self.mirror == center:
            return replace(self, mirror=None)
        raise ValueError("nested reflections about different centres")


def integrate_over(func, tf, tol=1e-10):
    """Adaptive quadrature of ``func`` over the support of ``tf``, split at knots."""
    pts = tf.breakpoints()
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = sci_integrate.quad(func, a, b, epsabs=1e-14, epsrel=tol, limit=200)
        total += val
    return total


def _scalar(f):
    return lambda x: float(f(np.array([x]))[0])


def nirenberg_ratio(u, np_=HALF_INTERVAL_PARAMS, tol=1e-10):
    """|| |x|^gamma u ||_r / (|| |x|^alpha u' ||_p^a || |x|^beta u ||_q^(1-a))."""
    uf, du = _scalar(u), _scalar(u.derivative)
    num = integrate_over(lambda x: abs(x) ** (np_.gamma * np_.r) * abs(uf(x)) ** np_.r, u, tol)
    grad = integrate_over(lambda x: abs(x) ** (np_.alpha * np_.p) * abs(du(x)) ** np_.p, u, tol)
    if grad <= 0.0:
        raise DegenerateDenominator("u' vanishes on the support")
    den = grad ** (np_.a / np_.p)
    if np_.a < 1:
        base = integrate_over(lambda x: abs(x) ** (np_.beta * np_.q) * abs(uf(x)) ** np_.q, u, tol)
        if base <= 0.0:
            raise DegenerateDenominator("u vanishes on the support")
        den *= base ** ((1 - np_.a) / np_.q)
    return num ** (1 / np_.r) / den


class ChainCheck(NamedTuple):
    lhs: float  # int (1 - |x|) u^2 over the half interval
    rhs: float  # int (1 - |x|)^3 u_x^2 over the half interval

    @property
    def ratio(self):
        """sqrt(lhs / rhs), comparable to ``nirenberg_ratio``."""
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return math.sqrt(self.lhs / self.rhs)


def halfinterval_chain_check(u, tol=1e-10):
    """(int (1-x) u^2, int (1-x)^3 u_x^2) on (0, 1), mirrored on (-1, 0)."""
    lo, hi = u.domain
    if lo >= 0 and hi <= 1:
        d = lambda x: 1.0 - x
    elif lo >= -1 and hi <= 0:
        d = lambda x: 1.0 + x
    else:
        raise ValueError("test function must be supported in (0, 1) or (-1, 0)")
    uf, du = _scalar(u), _scalar(u.derivative)
    lhs = integrate_over(lambda x: d(x) * uf(x) ** 2, u, tol)
    rhs = integrate_over(lambda x: d(x) ** 3 * du(x) ** 2, u, tol)
    return ChainCheck(lhs, rhs)


def random_spline_family(count, seed=0, side=1, n_coeffs=(4, 10)):
    """``count`` random cubic splines supported in (0, 1) (side=+1) or (-1, 0)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        lo = rng.uniform(0.02, 0.6)
        hi = rng.uniform(lo + 0.1, 0.98)
        m = int(rng.integers(n_coeffs[0], n_coeffs[1] + 1))
        c = tuple(rng.standard_normal(m))
        support = (lo, hi) if side > 0 else (-hi, -lo)
        out.append(TestFunction("random-spline", support, c))
    return out


def embedding_ratio(u):
    """(sup|u| + [u]_{1/2, w}) / ||u||_{H^1_w}, w = 1 - x^2."""
    w = weight(u.grid.x, 0.0)
    den = weighted_h1(u, w)
    if den <= 0.0:
        raise DegenerateDenominator("weighted H1 norm vanishes")
    return (float(np.max(np.abs(u.values))) + holder_seminorm_x(u, 0.5)) / den


@dataclass(frozen=True)
class RandomH1Field:
    """Smooth random field sum_k a_k cos(k pi (x+1)/2) + b_k sin(k pi (x+1)/2)."""

    a: tuple
    b: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        th = 0.5 * np.pi * (x + 1.0)
        k = np.arange(len(self.a))
        return (np.cos(np.outer(th, k)) @ np.asarray(self.a)
                + np.sin(np.outer(th, k)) @ np.asarray(self.b))

    def sample(self, grid):
        return Field(self(grid.x), grid)


def random_h1_fields(count, seed=0, modes=8):
    rng = np.random.default_rng(seed)
    decay = 1.0 / (1.0 + np.arange(modes)) ** 1.5
    return [RandomH1Field(tuple(rng.standard_normal(modes) * decay),
                          tuple(rng.standard_normal(modes) * decay)) for _ in range(count)]


def embedding_ensemble(fields, N):
    grid = build_grid(N)
    return np.array([embedding_ratio(f.sample(grid)) for f in fields])


def inequality_suite(n_functions=50, seed=0, N=129):
    """Run the standard ensembles; returns records and summary maxima."""
    splines = random_spline_family(n_functions, seed)
    records = []
    for i, tf in enumerate(splines):
        records.append(("spline-%03d" % i, "nirenberg", nirenberg_ratio(tf)))
    for i, tf in enumerate(splines):
        records.append(("spline-%03d" % i, "halfinterval",
                        halfinterval_chain_check(tf.reflected(1.0)).ratio))
    fields = random_h1_fields(n_functions, seed)
    emb = embedding_ensemble(fields, N)
    emb2 = embedding_ensemble(fields, 2 * N - 1)
    for i, v in enumerate(emb):
        records.append(("field-%03d" % i, "embedding", float(v)))
    check = validate_params(HALF_INTERVAL_PARAMS)
    summary = {
        "half_interval_params_valid": check.valid,
        "half_interval_params_branches": check.branches,
        "nirenberg_max": max(r[2] for r in records if r[1] == "nirenberg"),
        "halfinterval_max": max(r[2] for r in records if r[1] == "halfinterval"),
        "embedding_max": float(emb.max()),
        "embedding_max_refined": float(emb2.max()),
        "n_functions": n_functions,
        "seed": seed,
        "N": N,
    }
    return records, summary
