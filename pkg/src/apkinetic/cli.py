"""Command-line driver.

    apkinetic run --scheme limit --init paper-init --T 1.5
    apkinetic eps-sweep --eps 1,0.1,0.01,0.001
    apkinetic converge --mode dv
    apkinetic amplitude --scheme naive --T 20
    apkinetic kernel --init dirac --T 3

Every subcommand accepts ``--config FILE`` (flat ``key = value`` lines);
command-line options override the file. Results go to ``--out`` together
with ``manifest.json`` recording every resolved parameter.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import write_columns, write_field, write_manifest, write_profile, write_table
from .config import MODES, SCHEMES, ConfigError, ExperimentConfig, load_config, parse_value
from .grid import GridError
from .initial_data import PRESETS, preset
from .studies import (
    StudyError,
    amplitude_series,
    convergence_study,
    dirac_experiment,
    eps_sweep,
    simulate,
)

log = logging.getLogger("apkinetic")

_COMMAND_MODE = {"run": "run", "eps-sweep": "eps-sweep", "amplitude": "amplitude",
                 "kernel": "kernel"}


def _typed(key):
    def convert(text):
        try:
            return parse_value(key, text)
        except ConfigError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return convert


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value file")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--init", choices=sorted(PRESETS), help="initial data preset")
    p.add_argument("--eps", type=_typed("eps"), help="comma-separated list; 0 selects the limit")
    p.add_argument("--T", type=_typed("T"), help="final time")
    p.add_argument("--x-star", dest="x_star", type=_typed("x_star"))
    p.add_argument("--v-star", dest="v_star", type=_typed("v_star"))
    p.add_argument("--n-x", dest="n_x", type=_typed("n_x"))
    p.add_argument("--n-v", dest="n_v", type=_typed("n_v"), help="odd")
    p.add_argument("--dt", type=_typed("dt"), help="default: cfl * dv**2 / 2")
    p.add_argument("--cfl", type=_typed("cfl"))
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apkinetic", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run; writes phi.csv and mu.csv")
    _add_common(p)

    p = sub.add_parser("eps-sweep", help="AP scheme against the limit scheme over eps")
    _add_common(p)
    p.add_argument("--times", type=_typed("times"), help="output times")

    p = sub.add_parser("converge", help="refinement study in dx, dv or dt")
    _add_common(p)
    p.add_argument("--mode", required=True, choices=("dx", "dv", "dt"))
    p.add_argument("--levels", type=_typed("levels"), help="refinement exponents")
    p.add_argument("--ref-level", dest="ref_level", type=_typed("ref_level"))
    p.add_argument("--full", action="store_const", const=True,
                   help="use the full-resolution references (slow)")
    p.add_argument("--max-cells", dest="max_cells", type=_typed("max_cells"))

    p = sub.add_parser("amplitude", help="spatial amplitude of the v = 0 slice over time")
    _add_common(p)

    p = sub.add_parser("kernel", help="Dirac run against the cusp kernel")
    _add_common(p)
    p.add_argument("--window", type=_typed("window"), help="half-width in units of T**1.5")
    p.add_argument("--window-abs", dest="window_abs", type=_typed("window_abs"),
                   help="absolute half-width, overrides --window")
    return parser


_NOT_CONFIG = {"command", "config", "verbose"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    if args.command == "converge":
        overrides["mode"] = "conv-" + args.mode
    else:
        overrides["mode"] = _COMMAND_MODE[args.command]
    return load_config(args.config, **overrides)


def _grid_info(grid) -> dict:
    return {"x_star": grid.x_star, "v_star": grid.v_star, "n_x": grid.n_x, "n_v": grid.n_v,
            "dx": grid.dx, "dv": grid.dv, "dt": grid.dt, "T": grid.T, "n_t": grid.n_t}


def run_command(config: ExperimentConfig) -> dict:
    """Run the study selected by ``config.mode``; return the manifest payload."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"version": __version__, "config": config.to_dict(), "outputs": []}
    mode = config.mode

    if mode == "run":
        if len(config.eps) != 1:
            raise ConfigError("run takes a single eps")
        grid = config.grid()
        sol = simulate(config.scheme, preset(config.init, grid), grid, config.eps[0])
        write_field(out / "phi.csv", sol.phi, grid)
        write_profile(out / "mu.csv", sol.mu, grid)
        manifest["grid"] = _grid_info(grid)
        manifest["t_final"] = sol.t
        manifest["outputs"] += ["phi.csv", "mu.csv"]

    elif mode == "eps-sweep":
        tables = eps_sweep(config)
        manifest["grid"] = _grid_info(config.grid())
        manifest["tables"] = {}
        for t, table in tables.items():
            name = f"errors_T{t:g}.csv"
            write_table(out / name, table)
            manifest["outputs"].append(name)
            manifest["tables"][name] = table.summary()
            log.info("T = %g: fitted slope %.3f", t, table.fitted_order)

    elif mode.startswith("conv-"):
        table = convergence_study(config)
        write_table(out / "errors.csv", table)
        manifest["outputs"].append("errors.csv")
        manifest["tables"] = {"errors.csv": table.summary()}
        log.info("fitted order in %s: %.3f", table.param_name, table.fitted_order)

    elif mode == "amplitude":
        grid = config.grid()
        times, amps = amplitude_series(config, grid)
        write_columns(out / "amplitude.csv", {"t": times, "amplitude": amps})
        manifest["grid"] = _grid_info(grid)
        manifest["v_slice"] = float(grid.v[grid.nearest_v(0.0)])
        manifest["outputs"].append("amplitude.csv")

    elif mode == "kernel":
        grid = config.grid()
        res = dirac_experiment(config, grid)
        write_columns(out / "profile.csv", {
            "i": np.arange(grid.n_x), "x": res.x, "profile": res.profile,
            "kernel": res.kernel, "in_window": res.mask.astype(int)})
        manifest["grid"] = _grid_info(grid)
        manifest["x_ref"] = float(res.x[res.i_ref])
        manifest["window_half_width"] = res.half_width
        manifest["deviation"] = res.deviation
        manifest["outputs"].append("profile.csv")
        log.info("cusp deviation %.4f on |x - c| <= %.3f", res.deviation, res.half_width)

    write_manifest(out / "manifest.json", manifest)
    return manifest


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
        run_command(config)
    except (ConfigError, GridError, StudyError, ValueError) as exc:
        print(f"apkinetic: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"apkinetic: I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
