"""Asymptotic-preserving scheme for the Hopf-Cole transform of the BGK equation.

One step maps ``(mu^n, phi^n)`` to ``(mu^{n+1}, phi^{n+1})``:

1. transport ``phi`` along characteristics (``phi_bar``),
2. density update ``mu = m - eps ln <exp(-(phi_bar - m)/eps)>`` with
   ``m = min_j phi_bar``,
3. relaxation of ``phi`` towards ``v**2/2 + mu``.

Every exponential is taken of a non-positive argument, so the cost and the
stability of a step do not depend on ``eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .grid import (
    EXP_FLOOR,
    GridSpec,
    TransportStencil,
    gaussian_norm_const,
    neg_exp,
    transport,
    transport_stencil,
    velocity_quadrature,
)
from .initial_data import InitialData, sample


@dataclass(frozen=True)
class ApState:
    eps: float
    n: int
    mu: np.ndarray
    phi: np.ndarray
    grid: GridSpec


@dataclass(frozen=True)
class AuxMinima:
    little_m: np.ndarray
    big_M: np.ndarray


@lru_cache(maxsize=64)
def _stencil(grid: GridSpec, dt: float) -> TransportStencil:
    return transport_stencil(grid, dt)


@lru_cache(maxsize=64)
def _log_norm(eps: float, grid: GridSpec) -> float:
    return float(np.log(gaussian_norm_const(eps, grid)))


def _check_eps(eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}; use limit_scheme for eps = 0")


def init_ap(phi_in: InitialData, grid: GridSpec, eps: float) -> ApState:
    _check_eps(eps)
    phi = sample(phi_in, grid)
    mu = compute_little_m(transport(phi, _stencil(grid, grid.dt)))
    return ApState(eps, 0, mu, phi, grid)


def compute_little_m(phi_shifted: np.ndarray) -> np.ndarray:
    return phi_shifted.min(axis=1)


def update_mu(phi_shifted: np.ndarray, little_m: np.ndarray, eps: float, grid: GridSpec) -> np.ndarray:
    """Density update in log form; at least one exponent is exactly zero."""
    weights = neg_exp(-(phi_shifted - little_m[:, None]) / eps)
    return little_m - eps * np.log(velocity_quadrature(weights, grid.dv))


def compute_big_M(phi_shifted: np.ndarray, mu_next: np.ndarray, grid: GridSpec,
                  dt: float | None = None) -> np.ndarray:
    dt = grid.dt if dt is None else dt
    return np.minimum(phi_shifted + dt, grid.half_v2[None, :] + mu_next[:, None])


def aux_minima(state: ApState) -> AuxMinima:
    """The two auxiliary minima of the step leaving ``state``."""
    grid = state.grid
    dt = grid.step_size(state.n)
    phi_bar = transport(state.phi, _stencil(grid, dt))
    m = compute_little_m(phi_bar)
    mu = update_mu(phi_bar, m, state.eps, grid)
    return AuxMinima(m, compute_big_M(phi_bar, mu, grid, dt))


def relax(phi_shifted: np.ndarray, mu_next: np.ndarray, eps: float, grid: GridSpec,
          dt: float) -> np.ndarray:
    """``phi^{n+1}`` from the transported field and the updated density.

    Solves ``c e^{-phi/eps} = c e^{-(phi_bar+dt)/eps} + (1-e^{-dt/eps}) e^{-(v^2/2+mu)/eps}``
    written for the deviations ``u = phi - v^2/2`` and ``nu = mu + eps ln c``.
    Factoring out the smaller of ``u_bar + dt`` and ``nu`` (the auxiliary
    maximum ``M - v^2/2``) keeps all exponents non-positive; ``log1p``/``expm1``
    make the equilibrium ``u_bar = nu = 0`` a bitwise fixed point.
    """
    a = dt / eps
    u_bar = phi_shifted - grid.half_v2[None, :]
    nu = mu_next + eps * _log_norm(eps, grid)
    gap = nu[:, None] - u_bar
    # below e^{EXP_FLOOR} the factor cannot move log1p(.) but its products may
    # be subnormal (slow); an exact zero keeps the step cost independent of eps
    decay = math.exp(-a) if -a > EXP_FLOOR else 0.0
    # nu <= u_bar + dt: factor out e^{-nu/eps}
    z = np.minimum(gap, dt) / eps
    small = decay * np.expm1(np.minimum(z, 1.0))
    large = neg_exp(z - a) - decay
    u_nu = nu[:, None] - eps * np.log1p(np.where(z <= 1.0, small, large))
    # u_bar + dt < nu: factor out e^{-(u_bar + dt)/eps}
    tail = -np.expm1(-a) * neg_exp(-np.maximum(gap - dt, 0.0) / eps)
    u_tr = u_bar + dt - eps * np.log1p(tail)
    return grid.half_v2[None, :] + np.where(gap <= dt, u_nu, u_tr)


def step_ap(state: ApState) -> ApState:
    grid, eps = state.grid, state.eps
    dt = grid.step_size(state.n)
    phi_bar = transport(state.phi, _stencil(grid, dt))
    m = compute_little_m(phi_bar)
    mu = update_mu(phi_bar, m, eps, grid)
    phi = relax(phi_bar, mu, eps, grid, dt)
    return replace(state, n=state.n + 1, mu=mu, phi=phi)


def run_ap(state: ApState, n_steps: int, callback=None) -> ApState:
    """Apply ``n_steps`` steps; ``callback(state)`` sees every new state."""
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    for _ in range(n_steps):
        state = step_ap(state)
        if callback is not None:
            callback(state)
    return state


def solve_ap(phi_in: InitialData, grid: GridSpec, eps: float) -> ApState:
    """Run from ``t = 0`` to ``grid.T``."""
    return run_ap(init_ap(phi_in, grid, eps), grid.n_t)


def argmin_window(bound: float, grid: GridSpec) -> np.ndarray:
    """Velocity indices that can carry ``argmin_j phi_bar``.

    If ``|phi - v^2/2| <= bound`` then ``min_j phi_bar <= bound`` (the ``v = 0``
    node) while ``phi_bar_j >= v_j^2/2 - bound``, so only ``v_j^2/2 <= 2 bound``
    can attain the minimum.
    """
    return np.flatnonzero(grid.half_v2 <= 2 * bound)
