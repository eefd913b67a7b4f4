"""Acceptance criteria, one test each, with a one-line PASS/FAIL report."""

import time

import numpy as np
import pytest

from _data import random_lipschitz
from apkinetic.ap_scheme import init_ap, run_ap, step_ap
from apkinetic.config import ExperimentConfig
from apkinetic.grid import build_grid, default_grid
from apkinetic.initial_data import equilibrium, sample, two_wells
from apkinetic.limit_scheme import (
    check_min_link,
    check_mu_decay,
    init_limit,
    run_limit,
    step_limit,
    variational_residual,
)
from apkinetic.oracle import action_gap, continuous_kernel, dp_solve, grid_path_jumps
from apkinetic.studies import amplitude_series, convergence_study, dirac_experiment, eps_sweep

EPS = (1.0, 0.1, 1e-3)


@pytest.fixture
def report(capsys):
    def emit(number, name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number:>2} {name}: {detail}")
        assert ok, f"criterion {number} ({name}) failed: {detail}"
    return emit


def trajectory(phi_in, grid, eps=None):
    """Every ``phi^n`` for ``n = 0..N_t`` of (S_eps), or (S0) when ``eps`` is None."""
    fields = []
    if eps is None:
        state, run = init_limit(phi_in, grid), run_limit
    else:
        state, run = init_ap(phi_in, grid, eps), run_ap
    fields.append(state.phi)
    run(state, grid.n_t, lambda s: fields.append(s.phi))
    return fields


def schemes():
    return [*EPS, None]


def test_01_equilibrium_exact(report):
    g = default_grid()
    worst = {}
    for eps in schemes():
        fields = trajectory(equilibrium, g, eps)
        worst["S0" if eps is None else f"eps={eps:g}"] = max(
            float(np.max(np.abs(phi - g.half_v2[None, :]))) for phi in fields)
    ok = all(w == 0.0 for w in worst.values())
    report(1, "equilibrium exactness", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_02_oracle_equivalence(report):
    g = build_grid(3.2, 2.5, 16, 5, 0.4, 4.0)
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(10):
        phi_in = random_lipschitz(rng, g.x_star)
        states = []
        run_limit(init_limit(phi_in, g), g.n_t, states.append)
        gaps = []
        dp_solve(phi_in, g, g.n_t, lambda k, phi: gaps.append(np.max(np.abs(phi - states[k - 1].phi))))
        worst = max(worst, max(gaps))
    report(2, "oracle equivalence", worst <= 1e-12,
           f"max |dp - limit| = {worst:.2e} over 10 data x {g.n_t} steps")


def test_03_structural_identities(report):
    g = default_grid(T=20.0)
    assert g.satisfies_jump_condition
    prev = init_limit(two_wells(), g)
    link = decay = resid = 0.0
    for _ in range(g.n_t):
        s = step_limit(prev)
        link = max(link, check_min_link(s))
        decay = max(decay, check_mu_decay(prev, s))
        resid = max(resid, float(np.max(np.abs(variational_residual(s, prev)))))
        prev = s
    ok = link <= 1e-12 and decay <= 1e-12 and resid <= 1e-10
    report(3, "structural identities", ok,
           f"min link {link:.1e}, mu increase {decay:.1e}, residual {resid:.1e} over {g.n_t} steps")


def test_04_ap_rate(report):
    eps = (1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001)
    table = eps_sweep(ExperimentConfig(mode="eps-sweep", eps=eps, times=(1.5,)))[1.5]
    decreasing = bool(np.all(np.diff(table.errors) < 0))
    slope = table.fitted_order
    report(4, "AP convergence rate", decreasing and 0.7 <= slope <= 1.3,
           f"strictly decreasing {decreasing}, slope {slope:.3f}")


def test_05_discretization_orders(report):
    orders = {}
    for mode in ("dv", "dt", "dx"):
        table = convergence_study(ExperimentConfig(mode="conv-" + mode, scheme="limit"))
        orders[mode] = table.fitted_order
    ok = (0.8 <= orders["dv"] <= 1.2 and 0.8 <= orders["dt"] <= 1.2
          and 0.5 <= orders["dx"] <= 0.9)
    report(5, "discretization orders", ok,
           ", ".join(f"{k} {v:.3f}" for k, v in orders.items()))


def test_06_maximum_principle_and_comparison(report):
    g = default_grid()
    rng = np.random.default_rng(6)
    bound = order = 0.0
    for _ in range(20):
        a = sample(random_lipschitz(rng, g.x_star, M=5.0, L=3.0), g)
        c = sample(random_lipschitz(rng, g.x_star, M=5.0, L=3.0), g)
        lo, hi = np.minimum(a, c), np.maximum(a, c)
        for eps in schemes():
            runs = [trajectory(f, g, eps) for f in (a, lo, hi)]
            for phis in runs:
                bound = max(bound, max(float(np.max(np.abs(p - g.half_v2))) for p in phis))
            order = max(order, max(float(np.max(p - q)) for p, q in zip(runs[1], runs[2])))
    ok = bound <= 5.0 + 1e-10 and order <= 1e-12
    report(6, "maximum principle and comparison", ok,
           f"max |phi - v^2/2| = {bound:.6f}, max ordering violation {order:.1e}")


def test_07_commutation(report):
    g = default_grid()
    base = sample(two_wells(), g)
    shift = trans = 0.0
    exact = True
    for eps in schemes():
        a = trajectory(base, g, eps)
        b = trajectory(base + 1.7, g, eps)
        c = trajectory(np.roll(base, 1, axis=0), g, eps)
        shift = max(shift, max(float(np.max(np.abs(q - p - 1.7))) for p, q in zip(a, b)))
        trans = max(trans, max(float(np.max(np.abs(np.roll(p, 1, axis=0) - r)))
                               for p, r in zip(a, c)))
        exact &= all(np.array_equal(np.roll(p, 1, axis=0), r) for p, r in zip(a, c))
    ok = shift <= 1e-12 and exact
    report(7, "commutation", ok, f"constant shift error {shift:.1e}, translation error {trans:.1e}")


def test_08_action_gap(report):
    rng = np.random.default_rng(8)
    velocities = np.linspace(-3, 3, 13)
    worst = -np.inf
    for _ in range(1000):
        n_t = int(rng.integers(1, 40))
        # dyadic dt and half-integer velocities keep every action exact in floating
        # point, so the bound (attained with equality) is checked without slack
        dt = int(rng.integers(1, 33)) / 64
        n_jumps = int(rng.integers(0, min(4, n_t) + 1))
        at = np.sort(rng.choice(np.arange(1, n_t + 1), n_jumps, replace=False))
        w = np.empty(n_t + 1)
        current = rng.choice(velocities)
        start = 0
        for k in [*at, n_t + 1]:
            w[start:k] = current
            current = rng.choice(velocities[velocities != current])
            start = k
        n_star = len(grid_path_jumps(w, dt)[0])
        assert n_star <= 4
        worst = max(worst, action_gap(w, dt) - n_star * dt)
    report(8, "action-gap bound", worst <= 0.0,
           f"max (gap - N* dt) = {worst:.2e} over 1000 paths")


def test_09_cusp(report):
    t = np.array([0.5, 1.0, 3.0, 7.5])
    edge = t**1.5
    seam = float(np.max(np.abs(1.5 * np.cbrt(edge) ** 2 - (edge**2 / (2 * t**2) + t))))
    inside = continuous_kernel(t, edge * (1 - 1e-15))
    outside = continuous_kernel(t, edge * (1 + 1e-15))
    jump = float(np.max(np.abs(outside - inside)))
    cfg = ExperimentConfig(mode="kernel", init="dirac", T=3.0, window_abs=2.0)
    res = dirac_experiment(cfg)
    ok = res.deviation <= 0.1 and seam <= 1e-12 and jump <= 1e-12
    report(9, "cusp reproduction", ok,
           f"sup deviation on |x| <= 2: {res.deviation:.4f} (tol 0.1), kernel seam {max(seam, jump):.1e}")


def test_10_long_time_dichotomy(report):
    _, limit = amplitude_series(ExperimentConfig(mode="amplitude", scheme="limit", T=20.0))
    _, naive = amplitude_series(ExperimentConfig(mode="amplitude", scheme="naive", eps=(1.0,),
                                                 T=20.0))
    # the v = 0 slice of the data is flat, so the first step sets the reference
    ratio = naive[-1] / naive[1]
    ok = limit[-1] > 0.1 and ratio < 0.2
    report(10, "long-time dichotomy", ok,
           f"limit amplitude {limit[-1]:.3f}, naive {naive[-1]:.4f} = {ratio:.1%} of {naive[1]:.3f}")


def test_11_uniform_cost(report):
    # long horizon: the timed steps all use the regular dt
    g = default_grid(T=100.0)
    states = {eps: init_ap(two_wells(), g, eps) for eps in (1.0, 1e-6)}
    for s in states.values():
        step_ap(s)
    best = {eps: np.inf for eps in states}
    # interleaved repeats; the minimum filters out scheduler noise
    for _ in range(15):
        for eps, s in states.items():
            start = time.perf_counter()
            for _ in range(50):
                s = step_ap(s)
            best[eps] = min(best[eps], (time.perf_counter() - start) / 50)
    ratio = best[1e-6] / best[1.0]
    report(11, "uniform-in-eps cost", abs(ratio - 1) <= 0.2,
           f"per step {best[1.0] * 1e3:.3f} ms (eps=1) vs {best[1e-6] * 1e3:.3f} ms (eps=1e-6), "
           f"ratio {ratio:.3f}")
