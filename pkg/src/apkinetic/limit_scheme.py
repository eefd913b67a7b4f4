"""The ``eps -> 0`` limit of the asymptotic-preserving scheme.

One step reads::

    mu^{n+1}  = min_j phi_bar_j
    phi^{n+1} = min(phi_bar + dt, v**2/2 + mu^{n+1})

It is a monotone dynamic-programming step: either keep moving at the same
velocity for ``dt`` or jump to a new velocity at cost ``v**2/2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .grid import GridSpec, TransportStencil, transport, transport_stencil
from .initial_data import InitialData, sample

_LINK_TOL = 1e-12


@dataclass(frozen=True)
class LimitState:
    n: int
    mu: np.ndarray
    phi: np.ndarray
    grid: GridSpec


@lru_cache(maxsize=64)
def _stencil(grid: GridSpec, dt: float) -> TransportStencil:
    return transport_stencil(grid, dt)


def init_limit(phi_in: InitialData, grid: GridSpec) -> LimitState:
    if not grid.satisfies_jump_condition:
        warnings.warn(
            f"dt = {grid.dt:g} exceeds dv**2/2 = {grid.dv**2 / 2:g}; the limit scheme "
            "no longer separates transport from velocity jumps",
            RuntimeWarning,
            stacklevel=2,
        )
    phi = sample(phi_in, grid)
    mu = transport(phi, _stencil(grid, grid.dt)).min(axis=1)
    return LimitState(0, mu, phi, grid)


def step_limit(state: LimitState) -> LimitState:
    grid = state.grid
    dt = grid.step_size(state.n)
    phi_bar = transport(state.phi, _stencil(grid, dt))
    mu = phi_bar.min(axis=1)
    phi = np.minimum(phi_bar + dt, grid.half_v2[None, :] + mu[:, None])
    return replace(state, n=state.n + 1, mu=mu, phi=phi)


def run_limit(state: LimitState, n_steps: int, callback=None) -> LimitState:
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    for _ in range(n_steps):
        state = step_limit(state)
        if callback is not None:
            callback(state)
    return state


def solve_limit(phi_in: InitialData, grid: GridSpec) -> LimitState:
    return run_limit(init_limit(phi_in, grid), grid.n_t)


def variational_residual(state: LimitState, previous: LimitState) -> np.ndarray:
    """``max((phi^{n+1} - phi_bar)/dt - 1, phi^{n+1} - v^2/2 - mu^{n+1})``.

    The discrete form of ``max(d_t phi + v d_x phi - 1, phi - v^2/2 - mu) = 0``;
    vanishes identically (up to rounding) for a step of the scheme.
    """
    grid = state.grid
    dt = grid.step_size(previous.n)
    phi_bar = transport(previous.phi, _stencil(grid, dt))
    return np.maximum((state.phi - phi_bar) / dt - 1.0,
                      state.phi - grid.half_v2[None, :] - state.mu[:, None])


def check_min_link(state: LimitState, tol: float = _LINK_TOL) -> float:
    """``mu^n = min_j phi^n_j`` for ``n >= 1``; returns the discrepancy."""
    if state.n == 0:
        raise ValueError("the link between mu and phi only holds after the first step")
    gap = float(np.max(np.abs(state.phi.min(axis=1) - state.mu)))
    if gap > tol:
        raise AssertionError(f"min_j phi differs from mu by {gap:.3e}")
    return gap


def check_mu_decay(previous: LimitState, state: LimitState, tol: float = _LINK_TOL) -> float:
    """``mu^{n+1}`` is bounded by ``mu^n`` transported at ``v = 0``.

    Since the ``v = 0`` column is not moved, ``mu^{n+1} <= phi^n_{j0} <= ...``
    gives ``mu^{n+1} <= v_{j0}^2/2 + mu^n = mu^n``. Returns the worst excess.
    """
    excess = float(np.max(state.mu - previous.mu))
    if excess > tol:
        raise AssertionError(f"mu increased by {excess:.3e}")
    return excess
