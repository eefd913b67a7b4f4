"""Named initial conditions ``phi_in(x, v)``.

Every preset is a vectorised callable accepting broadcastable ``x`` and ``v``
arrays. ``sample`` evaluates one on a grid and rejects non-finite values.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .grid import GridSpec

InitialData = Callable[[np.ndarray, np.ndarray], np.ndarray]


def sample(phi_in: InitialData | np.ndarray, grid: GridSpec) -> np.ndarray:
    """``phi_in`` on the grid nodes; an array of shape ``grid.shape`` is copied."""
    if callable(phi_in):
        values = np.asarray(phi_in(grid.x[:, None], grid.v[None, :]), dtype=float)
    else:
        values = np.asarray(phi_in, dtype=float)
        if values.shape != grid.shape:
            raise ValueError(f"initial field has shape {values.shape}, grid is {grid.shape}")
    values = np.broadcast_to(values, grid.shape).copy()
    if not np.all(np.isfinite(values)):
        raise ValueError("initial data is not finite on the grid")
    return values


def equilibrium(x, v):
    return np.zeros_like(x) + v**2 / 2


def two_wells(x_star: float = 10.0, v_star: float = 10.0) -> InitialData:
    """Two quadratic wells in ``v`` modulated by an ``x v`` oscillation."""

    def phi_in(x, v):
        wells = np.minimum(3 * (v - 3) ** 2 + 5, 5 * (v + 7) ** 2 + 2)
        return wells + 0.9 * np.cos(4 * np.pi * x * v / (x_star * v_star))

    return phi_in


def dirac(centers=(0.0,), half_width: float = 0.2, plateau: float = 100.0) -> InitialData:
    """Log of a Gaussian-in-velocity Dirac surrogate.

    ``v**2/2`` on cells within ``half_width`` of a centre and ``v**2/2 + plateau``
    elsewhere. With the default ``half_width`` on the reference 64-cell grid the
    support is the two cells adjacent to each centre.
    """
    centers = tuple(float(c) for c in centers)

    def phi_in(x, v):
        inside = np.zeros(np.broadcast(x, v).shape, dtype=bool)
        for c in centers:
            inside |= np.abs(x - c) <= half_width
        return v**2 / 2 + np.where(inside, 0.0, plateau)

    return phi_in


PRESETS = {
    "paper-init": lambda grid: two_wells(grid.x_star, grid.v_star),
    "equilibrium": lambda grid: equilibrium,
    "dirac": lambda grid: dirac((0.0,)),
    "two-dirac": lambda grid: dirac((-3.0, 3.0)),
}


def preset(name: str, grid: GridSpec) -> InitialData:
    try:
        return PRESETS[name](grid)
    except KeyError:
        raise ValueError(f"unknown initial data preset {name!r}; choose from {sorted(PRESETS)}") from None
