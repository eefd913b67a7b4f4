import numpy as np
import pytest

from apkinetic.grid import default_grid, velocity_quadrature
from apkinetic.initial_data import equilibrium, two_wells
from apkinetic.kinetic import (
    CFLError,
    cfl_max_dt,
    hopf_cole_of_f,
    init_kinetic,
    mass,
    maxwellian,
    run_kinetic,
    step_upwind,
)


def test_maxwellian_has_unit_mass():
    g = default_grid()
    for eps in (1.0, 0.1, 0.01):
        assert velocity_quadrature(maxwellian(eps, g), g.dv) == pytest.approx(1.0, rel=1e-14)


def test_cfl_bound_keeps_coefficients_non_negative():
    g = default_grid()
    for eps in (1.0, 1e-2, 1e-6):
        dt = cfl_max_dt(g, eps)
        assert dt * (np.max(np.abs(g.v)) / g.dx + 1 / eps) == pytest.approx(0.9)
    assert cfl_max_dt(g, 1e-6) == pytest.approx(0.9e-6, rel=1e-3)


def test_rejects_step_above_cfl():
    g = default_grid()
    s = init_kinetic(two_wells(), g, 1.0)
    with pytest.raises(CFLError):
        step_upwind(s, 2 * cfl_max_dt(g, 1.0))
    with pytest.raises(ValueError):
        init_kinetic(two_wells(), g, 0.0)


def test_mass_conserved_and_positive():
    g = default_grid(T=0.5)
    s0 = init_kinetic(two_wells(), g, 0.5)
    s = run_kinetic(s0, 0.5)
    assert s.t == pytest.approx(0.5, abs=1e-14)
    assert np.all(s.f >= 0)
    assert mass(s) == pytest.approx(mass(s0), rel=1e-12)


def test_run_lands_on_final_time():
    g = default_grid()
    seen = []
    s = run_kinetic(init_kinetic(two_wells(), g, 1.0), 0.3, lambda st: seen.append(st.t))
    assert s.t == pytest.approx(0.3, abs=1e-14)
    assert np.all(np.diff(seen) > 0)


def test_maxwellian_state_is_stationary():
    g = default_grid()
    eps = 1.0
    s0 = init_kinetic(equilibrium, g, eps)
    s = run_kinetic(s0, 0.2)
    rho = velocity_quadrature(s0.f, g.dv)
    np.testing.assert_allclose(s.f, rho[:, None] * maxwellian(eps, g)[None, :], rtol=1e-12)


def test_hopf_cole_round_trip_and_floor():
    g = default_grid()
    s = init_kinetic(two_wells(), g, 1.0)
    np.testing.assert_allclose(hopf_cole_of_f(s), two_wells()(g.x[:, None], g.v[None, :]),
                               rtol=1e-12, atol=1e-12)
    tiny = init_kinetic(two_wells(), g, 1e-3)
    assert np.all(np.isfinite(hopf_cole_of_f(tiny)))
