import numpy as np
import pytest
import scipy.linalg

from podwave.fem import assemble, l2_norms_sq, l2_project
from podwave.wave import (
    TimeGrid,
    WaveParams,
    analytic_eval,
    analytic_series,
    default_u0,
    default_u00,
    energy,
    energy_balance,
    energy_series,
    initial_states,
    solve,
    step,
)


def l2_norm(space, v):
    return float(np.sqrt(l2_norms_sq(space, v[:, None])[0]))


def test_time_grid_validation():
    g = TimeGrid.from_dt(10.0, 1.0 / 800.0)
    assert g.N == 8001
    assert g.times[1] == pytest.approx(1.0 / 800.0)
    with pytest.raises(ValueError):
        TimeGrid.from_dt(1.0, 0.3)
    with pytest.raises(ValueError):
        TimeGrid(T=1.0, dt=0.5, N=4)


def test_wave_params_validation():
    with pytest.raises(ValueError):
        WaveParams(c=0.0)
    with pytest.raises(ValueError):
        WaveParams(c=1.0, D=-0.1)
    assert WaveParams(c=1.0, D=0.1).is_damped
    assert not WaveParams(c=1.0).is_damped


def test_zero_initial_data():
    space = assemble(16)
    grid = TimeGrid.from_dt(1.0, 0.125)
    params = WaveParams(c=1.0, D=0.2)
    zero = lambda x: np.zeros_like(x)
    u1, u2 = initial_states(space, grid, params, zero, zero)
    np.testing.assert_allclose(u1, 0.0)
    np.testing.assert_allclose(u2, 0.0)
    traj = solve(space, grid, params, zero, zero)
    np.testing.assert_allclose(traj.states, 0.0)


def test_second_state_single_mode():
    # u = cos(c pi t) sin(pi x): u^2 should be close to P_h of the shifted mode
    space = assemble(200)
    grid = TimeGrid.from_dt(1.0, 0.01)
    params = WaveParams(c=1.0)
    _, u2 = initial_states(space, grid, params, lambda x: np.sin(np.pi * x), default_u00)
    target = l2_project(lambda x: np.cos(np.pi * grid.dt) * np.sin(np.pi * x), space)
    # frozen reference 3.6e-8 (dt^4 and h^2 dt^2 contributions only)
    assert l2_norm(space, u2 - target) <= 1e-7


def test_second_state_third_order_in_dt():
    """Against the exact semidiscrete evolution (matrix exponential), the
    start-up state is third-order accurate in dt."""
    space = assemble(40)
    params = WaveParams(c=1.0, D=0.05, G=0.002)
    m = space.mass.to_dense()
    a = space.stiffness.to_dense()
    minv = np.linalg.inv(m)
    n = space.n_dof
    gen = np.zeros((2 * n, 2 * n))
    gen[:n, n:] = np.eye(n)
    gen[n:, :n] = -params.c**2 * (minv @ a)
    gen[n:, n:] = -params.D * np.eye(n) - params.G * (minv @ a)

    errs = []
    for dt in (1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0):
        grid = TimeGrid.from_dt(1.0, dt)
        u1, u2 = initial_states(space, grid, params, default_u0, default_u00)
        z0 = np.concatenate([u1, l2_project(default_u00, space)])
        exact = (scipy.linalg.expm(dt * gen) @ z0)[:n]
        errs.append(l2_norm(space, u2 - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 2.7)


def test_second_state_vs_series_under_dt_halving():
    """Against the modal series at t = dt, the start-up error decays at
    third order until the spatial floor takes over (frozen reference run:
    3.3e-1, 3.7e-2, 5.5e-3 at dt = 1/10, 1/20, 1/40)."""
    space = assemble(400)
    params = WaveParams(c=1.0, G=0.001)
    sol = analytic_series(params, default_u0, default_u00, k_max=400)
    errs = []
    for dt in (1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0):
        grid = TimeGrid.from_dt(1.0, dt)
        _, u2 = initial_states(space, grid, params, default_u0, default_u00)
        errs.append(l2_norm(space, u2 - analytic_eval(sol, space.nodes, dt)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 2.5) and np.all(orders <= 3.6)


def test_step_matches_solver_and_zero_case():
    space = assemble(24)
    grid = TimeGrid.from_dt(1.0, 0.05)
    params = WaveParams(c=0.8, D=0.1, G=0.001)
    traj = solve(space, grid, params, default_u0, default_u00)
    u3 = step(space, params, grid, traj.states[0], traj.states[1])
    np.testing.assert_allclose(u3, traj.states[2], rtol=1e-12, atol=1e-15)
    zero = np.zeros(space.n_dof)
    np.testing.assert_allclose(step(space, params, grid, zero, zero), 0.0)


def test_scheme_second_order_vs_single_mode():
    space = assemble(400)
    params = WaveParams(c=1.0)
    errs = []
    for dt in (1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0):
        grid = TimeGrid.from_dt(1.25, dt)
        traj = solve(space, grid, params, lambda x: np.sin(np.pi * x), default_u00)
        exact = np.cos(np.pi * 1.25) * np.sin(np.pi * space.nodes)
        errs.append(l2_norm(space, traj.states[-1] - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 1.7) & (orders < 2.3))


def test_energy_constant_state():
    space = assemble(10)
    grid = TimeGrid.from_dt(1.0, 0.25)
    params = WaveParams(c=2.0)
    u = np.sin(np.pi * space.nodes)
    traj = solve(space, grid, WaveParams(c=1.0), default_u00, default_u00)
    traj.states[:] = u  # constant in time: kinetic term vanishes
    from podwave.fem import h10_inner

    e = energy(traj, 2, params.c)
    assert e == pytest.approx(0.5 * params.c**2 * h10_inner(space, u, u), rel=1e-13)


def test_undamped_energy_conserved():
    space = assemble(60)
    grid = TimeGrid.from_dt(4.0, 1.0 / 60.0)
    params = WaveParams(c=1.0)
    traj = solve(space, grid, params, default_u0, default_u00)
    e = energy_series(traj, params.c)
    assert np.max(np.abs(e - e[0])) <= 1e-9 * e[0]


@pytest.mark.parametrize("damping", [dict(D=0.3, G=0.0), dict(D=0.0, G=0.004), dict(D=0.1, G=0.002)])
def test_energy_dissipation_identity(damping):
    space = assemble(50)
    grid = TimeGrid.from_dt(2.0, 1.0 / 50.0)
    params = WaveParams(c=1.0, **damping)
    traj = solve(space, grid, params, default_u0, default_u00)
    rate, dissipation = energy_balance(traj, params)
    e2 = energy_series(traj, params.c)[0]
    assert np.max(np.abs(rate + dissipation)) <= 1e-10 * e2
    assert np.all(dissipation >= 0.0)


def test_energy_series_matches_pointwise():
    space = assemble(30)
    grid = TimeGrid.from_dt(1.0, 0.1)
    params = WaveParams(c=1.3, D=0.05)
    traj = solve(space, grid, params, default_u0, default_u00)
    series = energy_series(traj, params.c)
    for n in (2, 5, grid.N):
        assert series[n - 2] == pytest.approx(energy(traj, n, params.c), rel=1e-13)


# --- analytic series ---------------------------------------------------------


def test_series_single_mode_undamped():
    params = WaveParams(c=1.0)
    sol = analytic_series(params, lambda x: np.sin(np.pi * x), default_u00, k_max=20)
    x = np.linspace(0.0, 1.0, 11)
    for t in (0.0, 0.3, 1.7):
        np.testing.assert_allclose(analytic_eval(sol, x, t),
                                   np.cos(np.pi * t) * np.sin(np.pi * x), atol=1e-12)


def test_series_viscous_mode_conditions():
    params = WaveParams(c=1.0, D=0.1)
    sol = analytic_series(params, lambda x: np.sin(np.pi * x), default_u00, k_max=5)
    # displacement condition: a_1 + b_1 equals the first sine coefficient
    assert (sol.coef_a[0] + sol.coef_b[0]).real == pytest.approx(1.0, rel=1e-9)
    assert abs((sol.coef_a[0] + sol.coef_b[0]).imag) <= 1e-12
    # sqrt(D^2/4 - c^2 pi^2) is imaginary: both roots have real part -D/2
    assert sol.mu_plus[0].real == pytest.approx(-0.05, rel=1e-12)
    assert sol.mu_plus[0].imag == pytest.approx(np.sqrt(np.pi**2 - 0.0025), rel=1e-12)
    # velocity condition: mu+ a + mu- b = 0 for zero initial velocity
    resid = sol.mu_plus[0] * sol.coef_a[0] + sol.mu_minus[0] * sol.coef_b[0]
    assert abs(resid) <= 1e-12


def test_series_kelvin_voigt_oscillatory_cutoff():
    # mode k oscillates iff k < 2c / (pi G)
    params = WaveParams(c=1.0, G=0.1)
    cutoff = 2.0 * params.c / (np.pi * params.G)  # ~6.37
    sol = analytic_series(params, default_u0, default_u00, k_max=12)
    for k in range(1, 13):
        oscillatory = abs(sol.mu_plus[k - 1].imag) > 1e-12
        assert oscillatory == (k < cutoff)


def test_series_critically_damped_mode():
    # G = 2c/lambda_3 makes mode 3 critically damped; the limit branch kicks in
    g = 2.0 / (3.0 * np.pi)
    params = WaveParams(c=1.0, G=g)
    sol = analytic_series(params, default_u0, default_u00, k_max=6)
    assert sol.degenerate[2]
    vals = analytic_eval(sol, np.linspace(0, 1, 9), 0.5)
    assert np.all(np.isfinite(vals))


def test_series_rejects_double_damping():
    with pytest.raises(ValueError):
        analytic_series(WaveParams(c=1.0, D=0.1, G=0.1), default_u0, default_u00)


def test_series_reproduces_initial_condition():
    params = WaveParams(c=1.0, G=0.001)
    sol = analytic_series(params, default_u0, default_u00, k_max=400)
    x = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(analytic_eval(sol, x, 0.0), default_u0(x), atol=2e-5)
    assert sol.tail_magnitude < 1e-5


def test_solver_tracks_series_with_damping():
    space = assemble(400)
    grid = TimeGrid.from_dt(2.0, 1.0 / 400.0)
    params = WaveParams(c=1.0, G=0.001)
    traj = solve(space, grid, params, default_u0, default_u00)
    sol = analytic_series(params, default_u0, default_u00, k_max=300)
    for t in (0.5, 2.0):
        n = round(t / grid.dt)
        exact = analytic_eval(sol, space.nodes, t)
        assert l2_norm(space, traj.states[n] - exact) <= 5e-4
