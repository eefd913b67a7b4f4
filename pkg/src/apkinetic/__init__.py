"""Asymptotic-preserving schemes for the Hopf-Cole transform of a kinetic
BGK equation, their eps -> 0 limit, and supporting oracles and studies."""

__version__ = "0.1.0"

from .ap_scheme import ApState, init_ap, run_ap, solve_ap, step_ap
from .grid import GridSpec, build_grid, default_grid
from .initial_data import preset
from .kinetic import KineticState, hopf_cole_of_f, init_kinetic, run_kinetic, step_upwind
from .limit_scheme import LimitState, init_limit, run_limit, solve_limit, step_limit

__all__ = [
    "ApState", "GridSpec", "KineticState", "LimitState",
    "build_grid", "default_grid", "hopf_cole_of_f", "init_ap", "init_kinetic",
    "init_limit", "preset", "run_ap", "run_kinetic", "run_limit", "solve_ap",
    "solve_limit", "step_ap", "step_limit", "step_upwind",
]
