"""Flat experiment configuration: ``key = value`` files plus overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from .grid import GridSpec, build_grid

SCHEMES = ("ap", "limit", "naive")
MODES = ("run", "eps-sweep", "conv-dx", "conv-dv", "conv-dt", "amplitude", "kernel")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str = "ap"
    eps: tuple[float, ...] = (1.0,)
    init: str = "paper-init"
    x_star: float = 10.0
    v_star: float = 10.0
    n_x: int = 64
    n_v: int = 61
    # None means cfl * dv**2 / 2
    dt: float | None = None
    cfl: float = 0.9
    T: float = 1.5
    out: str = "out"
    mode: str = "run"
    # output times of the eps sweep
    times: tuple[float, ...] = (0.15, 1.5)
    # inner window of the cusp comparison, in units of T**1.5
    window: float = 0.4
    # absolute half-width of that window, overrides ``window`` when set
    window_abs: float | None = None
    # refinement levels of a convergence study (exponents of 2 or 3)
    levels: tuple[int, ...] | None = None
    ref_level: int | None = None
    # use the full-resolution references of the original study
    full: bool = False
    # guard on the number of phase-space cells of the largest run
    max_cells: int = 20_000_000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.eps:
            raise ConfigError("eps list is empty")
        if any(e < 0 for e in self.eps):
            raise ConfigError("eps must be non-negative")

    def grid(self, **changes) -> GridSpec:
        params = dict(x_star=self.x_star, v_star=self.v_star, n_x=self.n_x,
                      n_v=self.n_v, dt=self.dt, T=self.T)
        params.update(changes)
        if params["dt"] is None:
            dv = 2.0 * params["v_star"] / params["n_v"]
            params["dt"] = self.cfl * dv**2 / 2
        return build_grid(**params)

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return {f.name: _jsonable(getattr(self, f.name)) for f in fields(self)}


def _jsonable(value):
    return list(value) if isinstance(value, tuple) else value


_FIELD_KIND = {
    "scheme": str, "init": str, "out": str, "mode": str,
    "x_star": float, "v_star": float, "dt": float, "cfl": float, "T": float,
    "window": float, "window_abs": float,
    "n_x": int, "n_v": int, "ref_level": int, "max_cells": int,
    "eps": (float,), "times": (float,), "levels": (int,),
    "full": bool,
}


def parse_value(key: str, text: str):
    """Convert the text of ``key`` to the type of the matching field."""
    try:
        kind = _FIELD_KIND[key]
    except KeyError:
        raise ConfigError(f"unknown config key {key!r}") from None
    text = text.strip()
    if text.lower() in ("none", "") and key in ("dt", "window_abs", "levels", "ref_level"):
        return None
    try:
        if isinstance(kind, tuple):
            return tuple(kind[0](float(t)) if kind[0] is int else kind[0](t)
                         for t in text.replace(",", " ").split())
        if kind is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            value = float(text)
            if value != int(value):
                raise ValueError(text)
            return int(value)
        return kind(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None


def read_config_file(path: str | Path) -> dict[str, Any]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, text = line.split("=", 1)
        key = key.strip().replace("-", "_")
        values[key] = parse_value(key, text)
    return values


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Defaults, then the file at ``path``, then ``overrides`` (``None`` skipped)."""
    values = read_config_file(path) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
