"""Independent evaluators used to cross-check the limit scheme.

* path actions, continuous and discrete, and their gap;
* ``dp_solve``: the per-step Hopf-Lax recursion by explicit minimisation over
  the previous velocity;
* ``reduced_action_min``: brute-force minimisation over paths with at most two
  velocity jumps;
* ``continuous_kernel``: the long-time fundamental solution profile.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec
from .initial_data import InitialData, sample


def jump_cost(w: float, v: float, dt: float) -> float:
    """Cost of one time step ending at velocity ``v`` after velocity ``w``."""
    if v == w:
        return dt if v != 0 else 0.0
    return v * v / 2


def discrete_action(velocities, dt: float) -> float:
    """Sum of :func:`jump_cost` along ``(w^0, ..., w^{N_t})``."""
    w = np.asarray(velocities, dtype=float)
    return float(sum(jump_cost(a, b, dt) for a, b in zip(w[:-1], w[1:])))


def continuous_action(jump_times, velocities, T: float) -> float:
    """Action of a path with velocity ``velocities[k]`` on ``[s^k, s^{k+1})``.

    ``jump_times`` are ``s^1 < ... < s^{N*}`` in ``(0, T]``; ``velocities`` has
    one more entry than ``jump_times``.
    """
    s = np.concatenate([[0.0], np.asarray(jump_times, dtype=float), [T]])
    w = np.asarray(velocities, dtype=float)
    if w.size != s.size - 1:
        raise ValueError("need exactly one more velocity than jump times")
    if np.any(np.diff(s[:-1]) <= 0) or s[-2] > T:
        raise ValueError("jump times must be strictly increasing in (0, T]")
    return float(0.5 * np.sum(w[1:] ** 2) + np.sum(np.diff(s) * (w != 0)))


def grid_path_jumps(velocities, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """``(jump_times, distinct velocities)`` of a grid path ``(w^0, ..., w^{N_t})``.

    The path holds ``w^k`` on ``[k dt, (k+1) dt)``; ``w^{N_t}`` is its velocity at ``T``.
    """
    w = np.asarray(velocities, dtype=float)
    k = np.flatnonzero(w[1:] != w[:-1]) + 1
    return k * dt, np.concatenate([w[:1], w[k]])


def action_gap(velocities, dt: float) -> float:
    """``|continuous - discrete|`` action of a grid path; at most ``N* dt``."""
    w = np.asarray(velocities, dtype=float)
    times, vel = grid_path_jumps(w, dt)
    T = (w.size - 1) * dt
    return abs(continuous_action(times, vel, T) - discrete_action(w, dt))


def jump_cost_matrix(grid: GridSpec, dt: float) -> np.ndarray:
    """``C[w, j]`` = cost of a step from velocity node ``w`` to node ``j``."""
    v = grid.v
    return np.array([[jump_cost(a, b, dt) for b in v] for a in v])


def exact_shifts(grid: GridSpec) -> np.ndarray:
    """Integer cell shifts ``v_j dt / dx``; raises if any is fractional."""
    cells = grid.v * grid.dt / grid.dx
    shifts = np.rint(cells)
    if np.any(np.abs(cells - shifts) > 1e-9):
        raise ValueError("dp_solve needs an exact-transport grid (v_j dt / dx integer for all j)")
    return shifts.astype(int)


def dp_solve(phi_in: InitialData, grid: GridSpec, n_steps: int,
             callback=None) -> np.ndarray:
    """``n_steps`` of ``phi_j(x) <- min_w [phi_w(x - dt w) + cost(w, v_j)]``.

    Works only with whole-cell characteristic shifts and a uniform step ``grid.dt``.
    ``callback(k, phi)`` sees every iterate.
    """
    shifts = exact_shifts(grid)
    cost = jump_cost_matrix(grid, grid.dt)
    phi = sample(phi_in, grid)
    for k in range(n_steps):
        # previous values at the feet of the characteristics, per source velocity
        feet = np.stack([np.roll(phi[:, w], s) for w, s in enumerate(shifts)], axis=1)
        phi = np.min(feet[:, :, None] + cost[None, :, :], axis=1)
        if callback is not None:
            callback(k + 1, phi)
    return phi


@dataclass(frozen=True)
class ReducedPath:
    w0: float
    w1: float
    w2: float
    s0: float
    s1: float
    s2: float
    y: float

    def endpoint(self) -> float:
        return self.y + self.s0 * self.w0 + self.s1 * self.w1 + self.s2 * self.w2


@dataclass(frozen=True)
class ActionValue:
    value: float
    path: ReducedPath | None = None
    # search lattice spacings (velocity, duration) bounding the approximation
    resolution: tuple[float, float] = (0.0, 0.0)


def reduced_action_min(x: float, v: float, T: float, phi_in: InitialData, *,
                       w_max: float = 4.0, dw: float = 0.25, ds: float = 0.1) -> ActionValue:
    """Minimise ``phi_in(y, w0) + action`` over paths ending at ``(x, v)`` at ``T``.

    Candidates are free transport at ``v`` and paths
    ``w0 --s0--> w1 --s1--> v --s2-->`` (an extra zero-velocity rest absorbs
    ``T - s0 - s1 - s2``), with ``w0, w1`` on a lattice of spacing ``dw`` in
    ``[-w_max, w_max]`` and durations multiples of ``ds``.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    y = x - v * T
    best = ActionValue(float(phi_in(np.float64(y), np.float64(v))) + T * (v != 0),
                       ReducedPath(float(v), float(v), float(v), T, 0.0, 0.0, float(y)), (dw, ds))

    n_w = int(round(w_max / dw))
    lattice = dw * np.arange(-n_w, n_w + 1)
    n_s = int(np.floor(T / ds + 1e-9))
    w0, w1 = np.meshgrid(lattice, lattice, indexing="ij")
    jump_v = v * v / 2
    for k0, k1, k2 in itertools.product(range(n_s + 1), repeat=3):
        if k0 + k1 + k2 > n_s:
            continue
        s0, s1, s2 = k0 * ds, k1 * ds, k2 * ds
        start = x - s0 * w0 - s1 * w1 - s2 * v
        # no intermediate jump when w1 == w0
        inner = np.where(w1 == w0, 0.0, w1**2 / 2)
        # reaching v is free only if the previous segment already moves at v
        # and no rest at zero velocity sits in between
        if k0 + k1 + k2 < n_s and v != 0:
            final = jump_v
        else:
            final = np.where((w1 if k1 > 0 else w0) == v, 0.0, jump_v)
        run = s0 * (w0 != 0) + s1 * (w1 != 0) + s2 * (v != 0)
        total = np.asarray(phi_in(start, w0), dtype=float) + (inner if k1 > 0 else 0.0) + final + run
        idx = np.unravel_index(np.argmin(total), total.shape)
        if total[idx] < best.value:
            mid = w1[idx] if k1 > 0 else w0[idx]
            best = ActionValue(float(total[idx]),
                               ReducedPath(float(w0[idx]), float(mid), float(v),
                                           s0, s1, s2, float(start[idx])),
                               (dw, ds))
    return best


def continuous_kernel(t, x):
    """Action between ``x`` and the origin over time ``t``.

    ``3/2 |x|^{2/3}`` inside the cone ``|x| <= t^{3/2}``, ``x^2/(2 t^2) + t`` outside.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.where(ax <= t**1.5, 1.5 * np.cbrt(ax) ** 2, ax**2 / (2 * t**2) + t)
    return out[()] if out.ndim == 0 else out
