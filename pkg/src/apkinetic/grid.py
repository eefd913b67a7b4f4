"""Phase-space grids, velocity quadrature and the linear transport stencil.

All schemes in the package share the same cell-centred, periodic-in-x grid::

    x_i = -x_star + (i - 1/2) dx,   dx = 2 x_star / N_x
    v_j = -v_star + (j - 1/2) dv,   dv = 2 v_star / N_v

Fields are stored as arrays of shape ``(N_x, N_v)`` (position first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

# v_j dt / dx closer than this to an integer is treated as an exact cell shift
_SNAP_TOL = 1e-9


class GridError(ValueError):
    """Raised for inconsistent discretisation parameters."""


@dataclass(frozen=True)
class GridSpec:
    """Full discretisation of ``[0, T] x [-x_star, x_star) x [-v_star, v_star]``."""

    x_star: float
    v_star: float
    n_x: int
    n_v: int
    dt: float
    T: float

    @property
    def dx(self) -> float:
        return 2.0 * self.x_star / self.n_x

    @property
    def dv(self) -> float:
        return 2.0 * self.v_star / self.n_v

    @cached_property
    def x(self) -> np.ndarray:
        return -self.x_star + (np.arange(1, self.n_x + 1) - 0.5) * self.dx

    @cached_property
    def v(self) -> np.ndarray:
        v = -self.v_star + (np.arange(1, self.n_v + 1) - 0.5) * self.dv
        v[self.n_v // 2] = 0.0  # centre node is zero up to rounding; pin it
        return v

    @cached_property
    def half_v2(self) -> np.ndarray:
        """``v_j**2 / 2``, the equilibrium profile, as a row vector."""
        return self.v**2 / 2

    @property
    def j_zero(self) -> int:
        """Index of the ``v = 0`` node."""
        return self.n_v // 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_v)

    @property
    def n_t(self) -> int:
        """Number of steps to reach ``T``; the last one may be shortened."""
        return max(1, math.ceil(self.T / self.dt - 1e-9))

    def step_size(self, n: int) -> float:
        """Size of step ``n -> n+1``: ``dt`` except a shortened final step."""
        if n == self.n_t - 1:
            last = self.T - (self.n_t - 1) * self.dt
            if abs(last - self.dt) > 1e-9 * self.dt:
                return last
        return self.dt

    def times(self) -> np.ndarray:
        steps = [self.step_size(n) for n in range(self.n_t)]
        return np.concatenate([[0.0], np.cumsum(steps)])

    def nearest_x(self, x0: float) -> int:
        return int(np.argmin(np.abs(self.x - x0)))

    def nearest_v(self, v0: float) -> int:
        return int(np.argmin(np.abs(self.v - v0)))

    @property
    def satisfies_jump_condition(self) -> bool:
        """``dt <= dv**2 / 2``: free transport and a jump never share a step."""
        return self.dt <= self.dv**2 / 2 * (1 + 1e-12)

    @property
    def is_exact_transport(self) -> bool:
        return bool(np.all(transport_stencil(self).weight == 0.0))

    def with_(self, **changes) -> GridSpec:
        params = {k: getattr(self, k) for k in ("x_star", "v_star", "n_x", "n_v", "dt", "T")}
        params.update(changes)
        return build_grid(**params)


def build_grid(x_star: float, v_star: float, n_x: int, n_v: int, dt: float, T: float) -> GridSpec:
    """Validate parameters and return a :class:`GridSpec`.

    ``n_v`` must be odd so that ``v = 0`` is a grid node.
    """
    for name, value in (("x_star", x_star), ("v_star", v_star), ("dt", dt), ("T", T)):
        if not (math.isfinite(value) and value > 0):
            raise GridError(f"{name} must be positive and finite, got {value!r}")
    for name, value in (("n_x", n_x), ("n_v", n_v)):
        if int(value) != value or value < 1:
            raise GridError(f"{name} must be a positive integer, got {value!r}")
    if int(n_v) % 2 == 0:
        raise GridError(f"n_v must be odd so that v = 0 is on the grid, got {n_v}")
    return GridSpec(float(x_star), float(v_star), int(n_x), int(n_v), float(dt), float(T))


def default_grid(T: float = 1.5, n_x: int = 64, n_v: int = 61, x_star: float = 10.0,
                 v_star: float = 10.0, cfl: float = 0.9) -> GridSpec:
    """Reference setup: ``dt = cfl * dv**2 / 2``."""
    dv = 2.0 * v_star / n_v
    return build_grid(x_star, v_star, n_x, n_v, cfl * dv**2 / 2, T)


def velocity_quadrature(values: np.ndarray, dv: float) -> np.ndarray:
    """Rectangle rule ``sum_j values_j * dv`` over the last axis."""
    return np.sum(values, axis=-1) * dv


# exp(-600) ~ 3e-261 stays a normal double even after scaling by a tiny eps;
# clamping there keeps exp and later products off the slow subnormal path, so
# the cost of a step does not depend on eps. Terms this small never survive
# being added to the O(1) quantities they enter.
EXP_FLOOR = -600.0


def neg_exp(arg: np.ndarray) -> np.ndarray:
    """``exp(arg)`` for ``arg <= 0`` with ``arg`` clamped at :data:`EXP_FLOOR`."""
    return np.exp(np.maximum(arg, EXP_FLOOR))


def gaussian_norm_const(eps: float, grid: GridSpec) -> float:
    """Discrete Gaussian mass ``sum_j exp(-v_j**2 / (2 eps)) dv``.

    Evaluated through the same code path as the density update so that the
    equilibrium ``v**2/2`` is reproduced bit for bit.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    row = neg_exp(-(grid.half_v2[None, :] - 0.0) / eps)
    return float(velocity_quadrature(row, grid.dv)[0])


@dataclass(frozen=True, eq=False)
class TransportStencil:
    """Per-velocity integer shift and interpolation weight.

    The foot of the characteristic ``x_i - dt v_j`` lies between nodes
    ``i - shift_j`` and ``i - shift_j - 1`` with weight ``weight_j`` on the latter.
    """

    shift: np.ndarray
    weight: np.ndarray
    n_x: int
    _index: dict = dc_field(default_factory=dict, compare=False, repr=False)

    def gather_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat indices of the two source nodes for every ``(i, j)``."""
        if "idx" not in self._index:
            n_v = self.shift.size
            i = np.arange(self.n_x)[:, None]
            j = np.arange(n_v)[None, :]
            near = (i - self.shift[None, :]) % self.n_x
            far = (near - 1) % self.n_x
            self._index["idx"] = (near * n_v + j, far * n_v + j)
        return self._index["idx"]


def transport_stencil(grid: GridSpec, dt: float | None = None) -> TransportStencil:
    dt = grid.dt if dt is None else dt
    cells = grid.v * dt / grid.dx
    snapped = np.round(cells)
    cells = np.where(np.abs(cells - snapped) < _SNAP_TOL, snapped, cells)
    shift = np.floor(cells).astype(np.int64)
    weight = cells - shift
    return TransportStencil(shift, weight, grid.n_x)


def interpolate_shift(field: np.ndarray, stencil: TransportStencil, j: int) -> np.ndarray:
    """Row ``j`` of ``field`` evaluated at ``x_i - dt v_j`` (periodic, linear)."""
    col = field[:, j]
    near = np.roll(col, int(stencil.shift[j]))
    alpha = stencil.weight[j]
    if alpha == 0.0:
        return near.copy()
    far = np.roll(near, 1)
    # a + alpha (b - a) keeps constants exact
    return near + alpha * (far - near)


def transport(field: np.ndarray, stencil: TransportStencil) -> np.ndarray:
    """All rows of ``field`` shifted along their characteristics."""
    near_idx, far_idx = stencil.gather_index()
    flat = field.ravel()
    near = flat[near_idx]
    if not np.any(stencil.weight):
        return near
    far = flat[far_idx]
    return near + stencil.weight[None, :] * (far - near)
