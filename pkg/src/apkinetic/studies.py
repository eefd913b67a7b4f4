"""Numerical experiments: eps sweeps, refinement studies, amplitudes, cusps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ap_scheme import init_ap, run_ap
from .config import ConfigError, ExperimentConfig
from .grid import GridSpec, build_grid, velocity_quadrature
from .initial_data import InitialData, preset
from .kinetic import hopf_cole_of_f, init_kinetic, run_kinetic
from .limit_scheme import init_limit, run_limit
from .oracle import continuous_kernel

Observer = Callable[[float, np.ndarray], None]


class StudyError(RuntimeError):
    pass


@dataclass(frozen=True)
class Solution:
    phi: np.ndarray
    mu: np.ndarray
    t: float
    grid: GridSpec


def simulate(scheme: str, phi_in: InitialData, grid: GridSpec, eps: float = 0.0,
             observer: Observer | None = None) -> Solution:
    """Run ``scheme`` from 0 to ``grid.T``; ``observer(t, phi)`` sees every level.

    ``ap`` with ``eps = 0`` is routed to the limit scheme. The naive scheme
    reports the Hopf-Cole transforms of ``f`` and of the density.
    """
    if scheme == "ap" and eps == 0:
        scheme = "limit"
    if scheme == "naive":
        state = init_kinetic(phi_in, grid, eps)
        if observer is not None:
            observer(0.0, hopf_cole_of_f(state))
            cb = lambda s: observer(s.t, hopf_cole_of_f(s))  # noqa: E731
        else:
            cb = None
        state = run_kinetic(state, grid.T, cb)
        rho = velocity_quadrature(state.f, grid.dv)
        mu = -eps * np.log(np.maximum(rho, np.finfo(float).tiny))
        return Solution(hopf_cole_of_f(state), mu, state.t, grid)

    if scheme == "ap":
        state, run = init_ap(phi_in, grid, eps), run_ap
    elif scheme == "limit":
        state, run = init_limit(phi_in, grid), run_limit
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    times = grid.times()
    if observer is not None:
        observer(0.0, state.phi)
        cb = lambda s: observer(times[s.n], s.phi)  # noqa: E731
    else:
        cb = None
    state = run(state, grid.n_t, cb)
    return Solution(state.phi, state.mu, float(times[-1]), grid)


# -- errors -------------------------------------------------------------------

def error_metric(reference: np.ndarray, candidate: np.ndarray) -> float:
    """``sup|reference - candidate| / sup|reference|``."""
    reference = np.asarray(reference, dtype=float)
    candidate = np.asarray(candidate, dtype=float)
    if reference.shape != candidate.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {candidate.shape}")
    diff = float(np.max(np.abs(reference - candidate)))
    scale = float(np.max(np.abs(reference)))
    return diff / scale if scale > 0 else diff


def _nearest_axis(values: np.ndarray, n_fine: int, axis: int) -> np.ndarray:
    n_coarse = values.shape[axis]
    if n_fine % n_coarse:
        raise ValueError(f"{n_fine} cells do not nest {n_coarse} cells")
    # on nested cell-centred grids the nearest coarse centre is the enclosing cell
    return np.take(values, np.arange(n_fine) // (n_fine // n_coarse), axis=axis)


def on_reference_nodes(candidate: np.ndarray, reference: GridSpec) -> np.ndarray:
    """A coarser nested field evaluated at the nodes of ``reference``.

    Every reference node takes the value of its nearest candidate node, so the
    comparison sees the candidate as the piecewise-constant function it
    represents.
    """
    out = _nearest_axis(candidate, reference.n_x, 0)
    return _nearest_axis(out, reference.n_v, 1)


def local_orders(params, errors) -> np.ndarray:
    p, e = np.log(np.asarray(params, float)), np.log(np.asarray(errors, float))
    orders = np.full(p.size, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders[1:] = np.diff(e) / np.diff(p)
    return orders


def fitted_order(params, errors) -> float:
    """Least-squares slope of ``log error`` against ``log param``."""
    p, e = np.asarray(params, float), np.asarray(errors, float)
    if p.size < 2 or np.any(e <= 0):
        return float("nan")
    return float(np.polyfit(np.log(p), np.log(e), 1)[0])


@dataclass
class ErrorTable:
    param_name: str
    params: np.ndarray
    errors: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def orders(self) -> np.ndarray:
        return local_orders(self.params, self.errors)

    @property
    def fitted_order(self) -> float:
        return fitted_order(self.params, self.errors)

    def summary(self) -> dict:
        order = self.fitted_order
        return {"param": self.param_name, "params": list(map(float, self.params)),
                "errors": list(map(float, self.errors)),
                "fitted_order": None if math.isnan(order) else order, **self.metadata}


# -- studies --------------------------------------------------------------------

def eps_sweep(config: ExperimentConfig) -> dict[float, ErrorTable]:
    """``E(eps)`` between the limit scheme and the AP scheme, per output time."""
    tables = {}
    for t in config.times:
        grid = config.grid(T=t)
        phi_in = preset(config.init, grid)
        limit = simulate("limit", phi_in, grid).phi
        eps = np.array(sorted(config.eps, reverse=True), dtype=float)
        errors = np.array([error_metric(limit, simulate("ap", phi_in, grid, e).phi) for e in eps])
        tables[t] = ErrorTable("eps", eps, errors, {"T": t, "n_x": grid.n_x, "n_v": grid.n_v,
                                                    "dt": grid.dt})
    return tables


@dataclass(frozen=True)
class RefinementPlan:
    param: str
    levels: tuple[int, ...]
    ref_level: int
    grids: Callable[[int], GridSpec]
    value: Callable[[GridSpec], float]


# desk-scale defaults and the references of the original study
_DESK_REF = {"conv-dv": 7, "conv-dx": 12, "conv-dt": 9}
_FULL_REF = {"conv-dv": 10, "conv-dx": 15, "conv-dt": 11}
# coarse levels stay two refinements below the reference so that its own error
# does not bend the fitted slope; dt = T/2**5 is the largest step with dt <= dv**2/2
_LEVELS = {"conv-dv": (2, 3, 4, 5), "conv-dx": (5, 6, 7, 8), "conv-dt": (5, 6, 7)}


def refinement_plan(config: ExperimentConfig) -> RefinementPlan:
    mode = config.mode
    if mode not in _LEVELS:
        raise ConfigError(f"{mode!r} is not a convergence study")
    ref = config.ref_level or (_FULL_REF if config.full else _DESK_REF)[mode]
    levels = tuple(config.levels or _LEVELS[mode])
    if max(levels) >= ref:
        raise ConfigError("refinement levels must stay below the reference level")
    x_star, v_star = config.x_star, config.v_star

    if mode == "conv-dv":
        def grids(k):
            return build_grid(x_star, v_star, 256, 3**k, 2.5e-5, 0.01)
        return RefinementPlan("dv", levels, ref, grids, lambda g: g.dv)
    if mode == "conv-dx":
        def grids(k):
            return build_grid(x_star, v_star, 2**k, 201, 2.5e-5, 0.01)
        return RefinementPlan("dx", levels, ref, grids, lambda g: g.dx)

    n_v, T = 101, 0.5

    def grids(k):
        # dx = dt dv makes every characteristic foot a grid node
        dt = T / 2**k
        dx = dt * (2.0 * v_star / n_v)
        n_x = math.floor(2 * x_star / dx + 1e-9)
        return build_grid(n_x * dx / 2, v_star, n_x, n_v, dt, T)
    return RefinementPlan("dt", levels, ref, grids, lambda g: g.dt)


def convergence_study(config: ExperimentConfig) -> ErrorTable:
    """Errors against a nested fine reference, measured at the final time."""
    plan = refinement_plan(config)
    ref_grid = plan.grids(plan.ref_level)
    if ref_grid.n_x * ref_grid.n_v > config.max_cells:
        raise StudyError(f"reference grid has {ref_grid.n_x * ref_grid.n_v} cells, "
                         f"above max_cells = {config.max_cells}")
    eps = config.eps[0]
    scheme = config.scheme

    def solve(grid):
        return simulate(scheme, preset(config.init, grid), grid, eps).phi

    reference = solve(ref_grid)
    params, errors = [], []
    for k in plan.levels:
        grid = plan.grids(k)
        params.append(plan.value(grid))
        errors.append(error_metric(reference, on_reference_nodes(solve(grid), ref_grid)))
    meta = {"scheme": scheme, "eps": eps, "ref_level": plan.ref_level,
            "levels": list(plan.levels), "ref_n_x": ref_grid.n_x, "ref_n_v": ref_grid.n_v,
            "ref_dt": ref_grid.dt, "T": ref_grid.T}
    return ErrorTable(plan.param, np.array(params), np.array(errors), meta)


def amplitude(field: np.ndarray, j: int) -> float:
    """``max_i - min_i`` of the velocity slice ``j``."""
    col = field[:, j]
    return float(col.max() - col.min())


def amplitude_series(config: ExperimentConfig, grid: GridSpec | None = None
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Spatial amplitude of the ``v = 0`` slice at every time level."""
    grid = grid or config.grid()
    j = grid.nearest_v(0.0)
    times, amps = [], []

    def observe(t, phi):
        times.append(t)
        amps.append(amplitude(phi, j))

    simulate(config.scheme, preset(config.init, grid), grid, config.eps[0], observe)
    return np.array(times), np.array(amps)


@dataclass(frozen=True)
class CuspResult:
    x: np.ndarray
    profile: np.ndarray
    kernel: np.ndarray
    i_ref: int
    half_width: float
    mask: np.ndarray
    deviation: float


_CENTERS = {"dirac": (0.0,), "two-dirac": (-3.0, 3.0)}


def dirac_experiment(config: ExperimentConfig, grid: GridSpec | None = None) -> CuspResult:
    """Compare ``min_v phi(T, .)`` with the cusp ``3/2 |x|^{2/3}``.

    Both curves are taken relative to their value at the node nearest the
    (first) centre, which removes the plateau constant of the surrogate. With
    several centres the kernel is the pointwise minimum of shifted cusps.
    """
    if config.init not in _CENTERS:
        raise ConfigError("the cusp experiment needs the dirac or two-dirac preset")
    grid = grid or config.grid()
    centers = _CENTERS[config.init]
    phi = simulate("limit", preset(config.init, grid), grid).phi
    profile = phi.min(axis=1)
    kernel = np.min([continuous_kernel(grid.T, grid.x - c) for c in centers], axis=0)
    i0 = grid.nearest_x(centers[0])
    half = config.window_abs if config.window_abs is not None else config.window * grid.T**1.5
    mask = np.min([np.abs(grid.x - c) for c in centers], axis=0) <= half
    gap = np.abs((profile - profile[i0]) - (kernel - kernel[i0]))
    return CuspResult(grid.x, profile, kernel, i0, half, mask, float(np.max(gap[mask])))
