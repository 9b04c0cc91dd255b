import numpy as np
import pytest

from podwave import pod
from podwave.fem import assemble, l2_norms_sq
from podwave.rom import build_rom, error_report, solve_rom
from podwave.wave import (
    TimeGrid,
    WaveParams,
    default_u0,
    default_u00,
    energy_balance,
    energy_series,
    solve,
)


@pytest.fixture(scope="module")
def small_run():
    space = assemble(20)
    grid = TimeGrid.from_dt(1.45, 0.05)  # 30 time levels
    params = WaveParams(c=1.0, D=0.1)
    traj = solve(space, grid, params, default_u0, default_u00)
    return space, grid, params, traj


def test_reduced_system_shape_and_symmetry(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "standard")
    romsys = build_rom(basis, 6, space, params, grid, traj.states[0], traj.states[1])
    s = romsys.reduced_stiffness
    assert s.shape == (6, 6)
    assert np.max(np.abs(s - s.T)) <= 1e-12 * np.max(np.abs(s))
    assert np.all(np.linalg.eigvalsh(s) > 0)
    # reduced initial coefficients reproduce the projected initial states
    recon = romsys.modes @ romsys.a1
    np.testing.assert_allclose(recon, pod.project_l2(basis, 6, traj.states[0]),
                               rtol=1e-12, atol=1e-14)


def test_non_orthonormal_modes_rejected(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "standard")
    skewed = pod.PodBasis(modes=2.0 * basis.modes, eigenvalues=basis.eigenvalues,
                          method=basis.method, space=space, grid=basis.grid)
    with pytest.raises(ValueError):
        build_rom(skewed, 4, space, params, grid, traj.states[0], traj.states[1])


def test_zero_initial_coefficients_stay_zero(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "standard")
    zero = np.zeros(space.n_dof)
    romsys = build_rom(basis, 5, space, params, grid, zero, zero)
    rom_traj = solve_rom(romsys)
    np.testing.assert_allclose(rom_traj.states, 0.0)


def test_full_rank_rom_reproduces_fe(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "standard")
    romsys = build_rom(basis, basis.rank, space, params, grid,
                       traj.states[0], traj.states[1])
    rom_traj = solve_rom(romsys)
    scale = np.max(np.sqrt(l2_norms_sq(space, traj.states.T)))
    err = np.max(np.sqrt(l2_norms_sq(space, (traj.states - rom_traj.states).T)))
    assert err <= 1e-8 * scale


def test_rom_energy_identity(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "ddq")
    romsys = build_rom(basis, 8, space, params, grid, traj.states[0], traj.states[1])
    rom_traj = solve_rom(romsys)
    rate, dissipation = energy_balance(rom_traj, params)
    e2 = energy_series(rom_traj, params.c)[0]
    assert np.max(np.abs(rate + dissipation)) <= 1e-10 * e2


def test_rom_energy_conserved_undamped():
    space = assemble(20)
    grid = TimeGrid.from_dt(2.0, 0.05)
    params = WaveParams(c=1.0)
    traj = solve(space, grid, params, default_u0, default_u00)
    basis = pod.pod_basis(traj, "standard")
    romsys = build_rom(basis, 7, space, params, grid, traj.states[0], traj.states[1])
    e = energy_series(solve_rom(romsys), params.c)
    assert np.max(np.abs(e - e[0])) <= 1e-10 * e[0]


def test_error_report_fields(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "ddq")
    r = 8
    romsys = build_rom(basis, r, space, params, grid, traj.states[0], traj.states[1])
    rom_traj = solve_rom(romsys)
    rep = error_report(traj, rom_traj, basis, r, space, params)

    err_sq = l2_norms_sq(space, (traj.states - rom_traj.states).T)
    assert rep.max_l2_sq == pytest.approx(float(np.max(err_sq)), rel=1e-12)
    assert rep.final_l2 == pytest.approx(float(np.sqrt(err_sq[-1])), rel=1e-12)
    err_traj_energy = energy_series(
        rom_traj.__class__(space=space, grid=grid, states=traj.states - rom_traj.states),
        params.c)
    assert rep.max_energy == pytest.approx(float(np.max(err_traj_energy)), rel=1e-12)
    assert rep.l2_sq_series.shape == (grid.N,)
    assert rep.energy_err_series.shape == (grid.N - 1,)
    # bound quotients are finite, positive, and below one on a damped run
    assert 0 < rep.ratio_energy <= 1
    assert 0 < rep.ratio_pointwise <= 1


def test_error_report_full_rank_ratios_flagged(small_run):
    space, grid, params, traj = small_run
    basis = pod.pod_basis(traj, "standard")
    r = basis.rank
    romsys = build_rom(basis, r, space, params, grid, traj.states[0], traj.states[1])
    rep = error_report(traj, solve_rom(romsys), basis, r, space, params)
    # denominators collapse to round-off; quotients are reported as missing
    assert rep.ratio_energy is None
    assert rep.ratio_pointwise is None


def test_rom_on_invariant_subspace_matches_fe():
    """A single-mode start stays in a low-dimensional invariant subspace;
    the reduced model on that subspace reproduces the FE solution."""
    space = assemble(32)
    grid = TimeGrid.from_dt(1.0, 0.025)
    params = WaveParams(c=1.0, G=0.002)
    traj = solve(space, grid, params, lambda x: np.sin(np.pi * x), default_u00)
    basis = pod.pod_basis(traj, "standard", rank_tol=1e-24)
    r = min(basis.rank, 4)
    romsys = build_rom(basis, r, space, params, grid, traj.states[0], traj.states[1])
    rom_traj = solve_rom(romsys)
    scale = np.max(np.sqrt(l2_norms_sq(space, traj.states.T)))
    err = np.max(np.sqrt(l2_norms_sq(space, (traj.states - rom_traj.states).T)))
    assert err <= 1e-7 * scale
