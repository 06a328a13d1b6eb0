"""
Discrete weighted operators and the conservative flux of the regularised
equation

    u_t + ( (|u|^n + eps) w ((w u_x)_x)_x )_x = 0,    w = 1 - x^2 + delta.

Everything is assembled from three sparse pieces on the node grid:

* ``D``   faces x nodes, forward difference (u_{f+1} - u_f) / h;
* ``Q``   nodes x faces, control-volume divergence (F_i - F_{i-1}) / c_i with
          the boundary faces at x = -1, +1 carrying zero flux;
* ``w_f`` the weight sampled at face midpoints.

With these, ``q = Q (w_f D u)`` is the nodal (w u_x)_x, the face third
derivative is ``Lf = D q`` and the flux is ``F = M w_f Lf``. The
zero-flux rows of ``Q`` at the end nodes are the mirror-ghost reflection
of the face field about x = -1, +1, i.e. the discrete u_x = 0 condition.
Since ``-c_i q_i`` is the exact gradient of the discrete energy
(1/2) sum_f h w_f (D u)_f^2, the semi-discrete scheme dissipates that
energy at the rate sum_f h M_f w_f Lf_f^2.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .grid import Field, weight


def _vals(u):
    return u.values if isinstance(u, Field) else np.asarray(u, dtype=float)


@lru_cache(maxsize=64)
def _stencils(N, h, delta):
    """Sparse building blocks for an N-node grid and weight floor ``delta``."""
    x = 0.5 * ((-1.0 + h * np.arange(N)) - (-1.0 + h * np.arange(N))[::-1])
    faces = 0.5 * (x[1:] + x[:-1])
    nf = N - 1
    D = sp.diags([-np.ones(nf), np.ones(nf)], [0, 1], shape=(nf, N), format="csr") / h
    c = np.full(N, h)
    c[0] = c[-1] = 0.5 * h
    # (Q F)_i = (F_i - F_{i-1}) / c_i, F_{-1} = F_{N-1} = 0
    Q = sp.diags([np.ones(nf), -np.ones(nf)], [0, -1], shape=(N, nf), format="csr")
    Q = sp.diags(1.0 / c) @ Q
    w_f = 1.0 - faces**2 + delta
    q_op = (Q @ sp.diags(w_f) @ D).tocsr()
    K = (D @ q_op).tocsr()
    return w_f, D, Q.tocsr(), q_op, K


def stencils(grid, delta):
    return _stencils(grid.N, grid.h, float(delta))


@dataclass(frozen=True, eq=False)
class FaceFlux:
    """Flux on the N-1 interior faces; the two boundary faces are zero."""

    values: np.ndarray

    @property
    def full(self):
        """Flux on all N+1 faces, boundary entries included."""
        return np.concatenate(([0.0], self.values, [0.0]))

    @property
    def boundary(self):
        return 0.0, 0.0


def inner_gradient(u, delta):
    """Face values of (1 - x^2 + delta) u_x."""
    w_f, D, _, _, _ = stencils(u.grid, delta)
    return w_f * (D @ u.values)


def weighted_laplacian(u, delta):
    """Nodal values of ((1 - x^2 + delta) u_x)_x."""
    w_f, D, Q, _, _ = stencils(u.grid, delta)
    return Q @ (w_f * (D @ u.values))


def _face_L_values(v, grid, delta):
    # applied stencil by stencil: D u vanishes exactly on constants, K u does not
    w_f, D, Q, _, _ = stencils(grid, delta)
    return D @ (Q @ (w_f * (D @ v)))


def face_L(u, delta):
    """((1 - x^2 + delta) u_x)_xx evaluated at faces."""
    return _face_L_values(u.values, u.grid, delta)


def apply_L(u, delta):
    """Nodal ((1 - x^2 + delta) u_x)_xx.

    Interior values average the two adjacent face values (equivalently a
    centred difference of the nodal ``weighted_laplacian``); the end values
    are zero, matching the boundary condition.
    """
    Lf = face_L(u, delta)
    L = np.zeros(u.grid.N)
    L[1:-1] = 0.5 * (Lf[1:] + Lf[:-1])
    return L


def _nodal_mobility(v, eps, n_exp):
    return np.abs(v) ** n_exp + eps


def mobility(u, eps, n_exp):
    """Arithmetic face mean of |u|^n + eps."""
    m = _nodal_mobility(_vals(u), eps, n_exp)
    return 0.5 * (m[1:] + m[:-1])


def mobility_derivative(v, n_exp):
    """d(|v|^n)/dv per node (the face mean takes half of each)."""
    if n_exp == 1:
        return np.sign(v)
    return n_exp * np.abs(v) ** (n_exp - 1) * np.sign(v)


def flux(u, params):
    """Face flux (|u|^n + eps) w ((w u_x)_xx) of the regularised equation."""
    w_f, *_ = stencils(u.grid, params.delta)
    return FaceFlux(mobility(u, params.eps, params.n_exp) * w_f * face_L(u, params.delta))


def divergence(F, grid):
    """Nodal (F)_x on the control volumes, zero boundary flux."""
    values = F.values if isinstance(F, FaceFlux) else np.asarray(F, dtype=float)
    return stencils(grid, 0.0)[2] @ values


def rhs(u, params):
    """Right-hand side -(F)_x of u_t = -(F)_x."""
    return -divergence(flux(u, params), u.grid)


class FluxModel:
    """Flux of the form ``F = M(u) * (g0 + G u)`` with a face-mean mobility.

    ``G`` is a sparse faces x nodes matrix used for the Jacobian;
    ``apply_G`` optionally evaluates ``G u`` in a rounding-friendlier
    order. This covers the regularised analysis equation and the
    coating-flow equation; the time stepper only talks to this interface.
    """

    def __init__(self, grid, eps, n_exp, G, g0=None, apply_G=None):
        self.grid = grid
        self._apply_G = apply_G
        self.eps = float(eps)
        self.n_exp = float(n_exp)
        self.G = sp.csr_matrix(G)
        self.g0 = np.zeros(grid.N - 1) if g0 is None else np.asarray(g0, dtype=float)
        self.Q = stencils(grid, 0.0)[2]
        self._band_offsets, self._G_band = _face_bands(self.G)

    def bracket(self, v):
        """g0 + G v."""
        Gv = self.G @ v if self._apply_G is None else self._apply_G(v)
        return self.g0 + Gv

    def flux(self, v):
        return mobility(v, self.eps, self.n_exp) * self.bracket(v)

    def rhs(self, v):
        return -(self.Q @ self.flux(v))

    def flux_jacobian(self, v):
        """dF/du as a face-banded array: entry [f, k] is dF_f/du_{f + offsets[k]}."""
        offs = self._band_offsets
        dm = 0.5 * mobility_derivative(v, self.n_exp)
        J = mobility(v, self.eps, self.n_exp)[:, None] * self._G_band
        bracket = self.bracket(v)
        k0 = int(np.searchsorted(offs, 0))
        J[:, k0] += bracket * dm[:-1]
        J[:, k0 + 1] += bracket * dm[1:]
        return J

    def rhs_jacobian_banded(self, v, lower, upper):
        """d(rhs)/du in ``solve_banded`` layout with the given bandwidths."""
        N = self.grid.N
        c = self.grid.cell_widths
        JF = self.flux_jacobian(v)
        ab = np.zeros((lower + upper + 1, N))
        f = np.arange(N - 1)
        for k, o in enumerate(self._band_offsets):
            cols = f + o
            ok = (cols >= 0) & (cols < N)
            if not ok.any():
                continue
            if o > upper or 1 - o > lower:
                if np.any(JF[ok, k]):
                    raise ValueError("Jacobian stencil exceeds the band")
                continue
            fk, ck = f[ok], cols[ok]
            # face f enters rows f (with -) and f + 1 (with +) of -Q dF
            ab[upper - o, ck] -= JF[fk, k] / c[fk]
            if o - 1 >= -upper:
                ab[upper + 1 - o, ck] += JF[fk, k] / c[fk + 1]
        return ab

    def rhs_jacobian(self, v, band=3):
        """Sparse d(rhs)/du."""
        ab = self.rhs_jacobian_banded(v, band, band)
        return banded_to_sparse(ab, band, band)


def _face_bands(G):
    """Compress a faces x nodes matrix into offset bands (node = face + offset)."""
    coo = G.tocoo()
    if coo.nnz == 0:
        offs = np.array([0, 1])
    else:
        d = coo.col - coo.row
        offs = np.arange(min(d.min(), 0), max(d.max(), 1) + 1)
    band = np.zeros((G.shape[0], len(offs)))
    if coo.nnz:
        np.add.at(band, (coo.row, coo.col - coo.row - offs[0]), coo.data)
    return offs, band


def banded_to_sparse(ab, lower, upper):
    N = ab.shape[1]
    diags, offsets = [], []
    for r in range(lower + upper + 1):
        off = upper - r
        diags.append(ab[r])
        offsets.append(off)
    # dia_matrix data is column-indexed, which is the solve_banded layout
    return sp.dia_matrix((np.array(diags), np.array(offsets)), shape=(N, N)).tocsr()


class RegularizedModel(FluxModel):
    """The regularised analysis equation with parameters ``params``."""

    def __init__(self, grid, params):
        w_f, _, _, _, K = stencils(grid, params.delta)
        super().__init__(grid, params.eps, params.n_exp, sp.diags(w_f) @ K,
                         apply_G=lambda v: w_f * _face_L_values(v, grid, params.delta))
        self.params = params


def face_weight(grid, delta):
    return weight(grid.faces, delta)
