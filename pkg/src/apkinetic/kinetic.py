"""Explicit upwind scheme for ``d_t f + v d_x f = (rho M^eps - f)/eps``::

    f^{n+1} = f^n - dt (v d_x f)^n + (dt/eps) (rho^n M^eps - f^n)

followed by the Hopf-Cole transform ``psi = -eps ln f``. This is the non-AP
comparison baseline; it loses all information below the smallest double once
``phi/eps`` exceeds roughly 700.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from .grid import GridSpec, velocity_quadrature
from .initial_data import InitialData, sample

_FLOOR = sys.float_info.min
_CFL_SAFETY = 0.9


class CFLError(ValueError):
    pass


@dataclass(frozen=True)
class KineticState:
    eps: float
    n: int
    t: float
    f: np.ndarray
    grid: GridSpec


def maxwellian(eps: float, grid: GridSpec) -> np.ndarray:
    """``M_j`` proportional to ``exp(-v_j**2/(2 eps))`` with unit discrete mass."""
    m = np.exp(-grid.half_v2 / eps)
    return m / velocity_quadrature(m, grid.dv)


def init_kinetic(phi_in: InitialData, grid: GridSpec, eps: float) -> KineticState:
    if eps <= 0:
        raise ValueError("eps must be positive")
    with np.errstate(under="ignore"):
        f = np.exp(-sample(phi_in, grid) / eps)
    return KineticState(eps, 0, 0.0, f, grid)


def cfl_max_dt(grid: GridSpec, eps: float) -> float:
    """Largest step keeping every update coefficient non-negative, times 0.9.

    The diagonal coefficient of the explicit update is
    ``1 - dt |v_j|/dx - dt/eps``, so positivity (and hence stability in the
    maximum norm) needs ``dt (v_max/dx + 1/eps) <= 1``.
    """
    v_max = float(np.max(np.abs(grid.v)))
    return _CFL_SAFETY / (v_max / grid.dx + 1.0 / eps)


def step_upwind(state: KineticState, dt: float | None = None) -> KineticState:
    grid, eps, f = state.grid, state.eps, state.f
    limit = cfl_max_dt(grid, eps)
    if dt is None:
        dt = limit
    elif dt > limit * (1 + 1e-12):
        raise CFLError(f"dt = {dt:g} exceeds the CFL bound {limit:g}")
    v = grid.v[None, :]
    back = f - np.roll(f, 1, axis=0)
    fwd = np.roll(f, -1, axis=0) - f
    flux = (np.maximum(v, 0.0) * back + np.minimum(v, 0.0) * fwd) / grid.dx
    rho = velocity_quadrature(f, grid.dv)
    relax = rho[:, None] * maxwellian(eps, grid)[None, :] - f
    with np.errstate(under="ignore"):
        f_new = f - dt * flux + (dt / eps) * relax
    return replace(state, n=state.n + 1, t=state.t + dt, f=f_new)


def run_kinetic(state: KineticState, T: float, callback=None) -> KineticState:
    """Advance to time ``T`` with CFL-limited steps, shortening the last one."""
    dt = cfl_max_dt(state.grid, state.eps)
    n_steps = max(0, math.ceil((T - state.t) / dt - 1e-9))
    for k in range(n_steps):
        h = dt if k < n_steps - 1 else T - state.t
        state = step_upwind(state, h)
        if callback is not None:
            callback(state)
    return state


def hopf_cole_of_f(state: KineticState) -> np.ndarray:
    return -state.eps * np.log(np.maximum(state.f, _FLOOR))


def mass(state: KineticState) -> float:
    return float(np.sum(state.f) * state.grid.dx * state.grid.dv)
