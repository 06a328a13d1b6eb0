"""
Uniform node grid on [-1, 1], the geometric weight 1 - x^2 + delta,
trapezoid quadrature, and the small immutable containers the rest of
the package passes around.

Nodes are x_i = -1 + i*h, i = 0..N-1, with faces at the N-1 midpoints.
The two end nodes own half cells of width h/2, which is exactly what the
trapezoid weights encode; the conservative scheme in ``operators`` is
built on the same cells so that trapezoid mass is conserved to rounding.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

MIN_NODES = 8


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    N: int
    x: np.ndarray
    h: float
    faces: np.ndarray

    @property
    def cell_widths(self):
        """Trapezoid weights; also the control-volume widths."""
        c = np.full(self.N, self.h)
        c[0] = c[-1] = 0.5 * self.h
        return c

    def __eq__(self, other):
        return isinstance(other, Grid) and self.N == other.N

    def __hash__(self):
        return hash(("Grid", self.N))


def build_grid(N, allow_small=False):
    """Uniform grid with ``N`` nodes spanning [-1, 1] exactly.

    ``allow_small`` lowers the minimum node count from 8 to 3; it exists
    for hand-checkable oracle comparisons in tests.
    """
    if isinstance(N, bool) or int(N) != N:
        raise ConfigError(f"grid N must be an integer, got {N!r}", key="N")
    N = int(N)
    lo = 3 if allow_small else MIN_NODES
    if N < lo:
        raise ConfigError(f"grid N must be >= {lo}, got {N}", key="N")
    h = 2.0 / (N - 1)
    x = -1.0 + h * np.arange(N)
    # exact endpoints and symmetric rounding
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    faces = 0.5 * (x[1:] + x[:-1])
    return Grid(N=N, x=_frozen(x), h=h, faces=_frozen(faces))


def weight(x, delta=0.0):
    """Regularised geometric weight ``1 - x**2 + delta``."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise ValueError("weight is defined on [-1, 1]")
    w = 1.0 - x * x + delta
    return float(w) if w.ndim == 0 else w


def quad(f, grid):
    """Composite trapezoid rule for the integral of nodal values over (-1, 1)."""
    f = np.asarray(f, dtype=float)
    return float(grid.cell_widths @ f)


def time_quad(values, t):
    """Trapezoid rule in time over (possibly nonuniform) snapshot times."""
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    if len(t) < 2:
        return 0.0
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(t)))


@dataclass(frozen=True, eq=False)
class Field:
    """Nodal values of a solution at time ``t``."""

    values: np.ndarray
    grid: Grid
    t: float = 0.0

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.grid.N,):
            raise ValueError(
                f"field has {v.shape} values, grid has {self.grid.N} nodes")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        if not (self.t >= 0.0):
            raise ValueError("field time must be nonnegative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def from_function(cls, func, grid, t=0.0):
        return cls(np.asarray(func(grid.x), dtype=float) * np.ones(grid.N), grid, t)

    @property
    def x(self):
        return self.grid.x

    def with_values(self, values, t=None):
        return Field(values, self.grid, self.t if t is None else t)


@dataclass(frozen=True)
class RegularizationParams:
    """Mobility floor ``eps``, weight floor ``delta`` and mobility exponent."""

    eps: float
    delta: float
    n_exp: float = 1.0

    def __post_init__(self):
        for name in ("eps", "delta", "n_exp"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float, np.floating)):
                raise ConfigError(f"RegularizationParams.{name} must be real", key=name)
            if not np.isfinite(v):
                raise ConfigError(f"RegularizationParams.{name} must be finite", key=name)
        if not self.eps > 0:
            raise ConfigError(f"RegularizationParams requires eps > 0, got {self.eps}", key="eps")
        if not self.delta > 0:
            raise ConfigError(
                f"RegularizationParams requires delta > 0, got {self.delta}", key="delta")
        if not self.n_exp >= 1:
            raise ConfigError(
                f"RegularizationParams requires n_exp >= 1, got {self.n_exp}", key="n_exp")

    @classmethod
    def unchecked(cls, eps, delta, n_exp=1.0):
        """Build without validation, e.g. eps = delta = 0 for the limit equation."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "eps", float(eps))
        object.__setattr__(obj, "delta", float(delta))
        object.__setattr__(obj, "n_exp", float(n_exp))
        return obj
