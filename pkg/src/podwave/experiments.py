"""Experiment drivers behind the command-line tool.

Each function takes a validated RunConfig, runs the pipeline and returns
plain rows ready for CSV output, so the same code paths are exercised by the
CLI, the test suite, and the reproduction scripts.
"""

import math

import numpy as np

from . import diffops, pod, rom, wave
from .config import ConfigError, RunConfig
from .fem import assemble, l2_norms_sq
from .wave import TimeGrid, Trajectory, WaveParams


def initial_condition(name: str):
    if name == "default":
        return wave.default_u0
    if name == "sine":
        return lambda x: np.sin(np.pi * np.asarray(x, dtype=float))
    if name == "zero":
        return wave.default_u00
    raise ConfigError(f"unknown initial condition {name!r}; use default, sine, or zero")


def setup(config: RunConfig):
    """(space, grid, params, u0, u00) from a validated config."""
    space = assemble(config.n_elements)
    grid = TimeGrid.from_dt(config.T, config.dt)
    params = WaveParams(c=config.c, D=config.D, G=config.G)
    return space, grid, params, initial_condition(config.u0), initial_condition(config.u00)


def fe_trajectory(config: RunConfig) -> Trajectory:
    space, grid, params, u0, u00 = setup(config)
    return wave.solve(space, grid, params, u0, u00)


def training_slice(traj: Trajectory, t_train: float) -> Trajectory:
    """Restrict a trajectory to the snapshots in [0, t_train]."""
    dt = traj.grid.dt
    m = round(t_train / dt) + 1
    if not 3 <= m <= traj.grid.N:
        raise ConfigError(f"training interval {t_train} leaves too few snapshots")
    sub_grid = TimeGrid(T=(m - 1) * dt, dt=dt, N=m)
    return Trajectory(space=traj.space, grid=sub_grid, states=traj.states[:m])


def trajectory_rows(traj: Trajectory, stride: int):
    header = ["t"] + [f"u_{i}" for i in range(1, traj.space.n_dof + 1)]
    times = traj.grid.times
    rows = [[times[n], *traj.states[n]] for n in range(0, traj.grid.N, stride)]
    return header, rows


def energy_rows(traj: Trajectory, params: WaveParams):
    """Rows (t_n, E, dE, -dissipation) for the interior levels n = 2..N-1."""
    e = wave.energy_series(traj, params.c)
    rate, dissipation = wave.energy_balance(traj, params)
    times = traj.grid.times
    header = ["t", "energy", "energy_rate", "neg_dissipation"]
    rows = [
        [times[n - 1], e[n - 2], rate[n - 2], -dissipation[n - 2]]
        for n in range(2, traj.grid.N)
    ]
    return header, rows


def singular_value_rows(config: RunConfig):
    traj = fe_trajectory(config)
    dataset = pod.build_dataset(traj, config.pod_method)
    header = ["k", "sigma"]
    if not np.any(dataset.columns):
        return header, []
    basis = pod.compute_basis(dataset, rank_tol=config.rank_tol)
    sigma = np.sqrt(basis.eigenvalues)
    return header, [[k + 1, sigma[k]] for k in range(basis.rank)]


def error_formula_rows(config: RunConfig):
    """Actual-vs-formula data errors for each r and both norms."""
    traj = fe_trajectory(config)
    basis = pod.pod_basis(traj, config.pod_method, rank_tol=config.rank_tol)
    header = ["r", "norm", "actual", "formula", "relative_gap"]
    rows = []
    lam1 = basis.eigenvalues[0]
    for r in config.r_list:
        for norm in (pod.NORM_L2, pod.NORM_H10):
            actual = pod.data_error_actual(traj, basis, int(r), norm=norm)
            formula = pod.data_error_formula(basis, int(r), norm=norm)
            gap = abs(actual - formula) / max(formula, lam1 * 1e-6)
            rows.append([int(r), norm, actual, formula, gap])
    return header, rows


def _rom_report(traj, basis, r, space, params):
    romsys = rom.build_rom(basis, r, space, params, traj.grid,
                           traj.states[0], traj.states[1])
    rom_traj = rom.solve_rom(romsys)
    return rom.error_report(traj, rom_traj, basis, r, space, params)


def rom_sweep_rows(config: RunConfig, param: str, values, methods=("standard", "ddq")):
    """Max/energy errors and bound ratios over a damping sweep.

    param is "D" or "G"; each value replaces that coefficient while the
    other one is taken from the config.
    """
    if param not in ("D", "G"):
        raise ConfigError("sweep parameter must be D or G")
    space, grid, _, u0, u00 = setup(config)
    header = [param, "r", "method", "max_l2_sq", "max_energy",
              "ratio_energy", "ratio_pointwise"]
    rows = []
    for value in values:
        params = WaveParams(
            c=config.c,
            D=float(value) if param == "D" else config.D,
            G=float(value) if param == "G" else config.G,
        )
        traj = wave.solve(space, grid, params, u0, u00)
        for method in methods:
            basis = pod.pod_basis(traj, method, rank_tol=config.rank_tol)
            for r in config.r_list:
                rep = _rom_report(traj, basis, int(r), space, params)
                rows.append([
                    float(value), int(r), method, rep.max_l2_sq, rep.max_energy,
                    _nan_if_none(rep.ratio_energy), _nan_if_none(rep.ratio_pointwise),
                ])
    return header, rows


def _nan_if_none(x):
    return math.nan if x is None else x


def profile_rows(config: RunConfig, times, r: int):
    """FE and reconstructed ROM values on the full node set at chosen times."""
    space, grid, params, u0, u00 = setup(config)
    traj = wave.solve(space, grid, params, u0, u00)
    basis = pod.pod_basis(traj, config.pod_method, rank_tol=config.rank_tol)
    romsys = rom.build_rom(basis, r, space, params, grid, traj.states[0], traj.states[1])
    rom_traj = rom.solve_rom(romsys)
    header = ["x"]
    cols = [space.full_nodes]
    for t in times:
        n = round(float(t) / grid.dt)
        if not 0 <= n < grid.N:
            raise ConfigError(f"profile time {t} outside [0, {grid.T}]")
        header += [f"fe_t{t:g}", f"rom_t{t:g}"]
        cols.append(space.pad_boundary(traj.states[n]))
        cols.append(space.pad_boundary(rom_traj.states[n]))
    rows = [list(row) for row in zip(*cols)]
    return header, rows


def train_interval_rows(config: RunConfig, t_train_list, r: int,
                        methods=("standard", "ddq")):
    """Final-time ROM errors when the basis sees only [0, T_train]."""
    space, grid, params, u0, u00 = setup(config)
    traj = wave.solve(space, grid, params, u0, u00)
    header = ["T_train", "method", "final_time_l2"]
    rows = []
    for t_train in t_train_list:
        sub = training_slice(traj, float(t_train))
        for method in methods:
            basis = pod.pod_basis(sub, method, rank_tol=config.rank_tol)
            rep = _rom_report(traj, basis, r, space, params)
            rows.append([float(t_train), method, rep.final_l2])
    return header, rows


def convergence_rows(config: RunConfig, dt_list):
    """Final-time error against the analytic series for a dt sweep.

    Uses the configured mesh and damping; the initial data is the config's
    (the single-sine initial condition gives the cleanest orders).
    """
    space = assemble(config.n_elements)
    params = WaveParams(c=config.c, D=config.D, G=config.G)
    u0 = initial_condition(config.u0)
    u00 = initial_condition(config.u00)
    sol = wave.analytic_series(params, u0, u00, k_max=config.k_max)
    exact_final = wave.analytic_eval(sol, space.nodes, config.T)
    header = ["dt", "h", "final_l2_error", "observed_order"]
    rows = []
    prev = None
    for dt in dt_list:
        grid = TimeGrid.from_dt(config.T, float(dt))
        traj = wave.solve(space, grid, params, u0, u00)
        diff = traj.states[-1] - exact_final
        err = float(np.sqrt(l2_norms_sq(space, diff[:, None])[0]))
        order = math.nan
        if prev is not None:
            prev_dt, prev_err = prev
            order = math.log(prev_err / err) / math.log(prev_dt / float(dt))
        rows.append([float(dt), space.h, err, order])
        prev = (float(dt), err)
    return header, rows


def invariant_checks(config: RunConfig):
    """Fast self-checks on a reduced instance; returns (name, ok, detail)."""
    rng = np.random.default_rng(config.seed)
    results = []

    def record(name, ok, detail):
        results.append((name, bool(ok), detail))

    small = RunConfig(n_elements=24, dt=1.0 / 40.0, T=2.0, c=config.c,
                      D=0.05, G=0.001).validated()
    space, grid, params, u0, u00 = setup(small)
    traj = wave.solve(space, grid, params, u0, u00)

    rate, dissipation = wave.energy_balance(traj, params)
    e2 = wave.energy_series(traj, params.c)[0]
    res = float(np.max(np.abs(rate + dissipation))) / e2
    record("energy_identity", res <= 1e-9, f"residual {res:.2e}")

    worst = 0.0
    for method in pod.METHODS:
        basis = pod.pod_basis(traj, method)
        lam1 = basis.eigenvalues[0]
        for r in (1, min(5, basis.rank), min(12, basis.rank)):
            for norm in (pod.NORM_L2, pod.NORM_H10):
                for projector in (pod.PROJECTOR_L2, pod.PROJECTOR_RITZ):
                    act = pod.data_error_actual(traj, basis, r, norm, projector)
                    form = pod.data_error_formula(basis, r, norm, projector)
                    worst = max(worst, abs(act - form) / max(form, lam1 * 1e-6))
    record("error_formula_identity", worst <= 1e-8, f"worst gap {worst:.2e}")

    ok = True
    for method in ("dq1", "ddq"):
        basis = pod.pod_basis(traj, method)
        for statistic in ("max", "sum"):
            chk = pod.pointwise_bound_check(traj, basis, 4, statistic=statistic)
            ok = ok and (chk.lhs <= chk.rhs * (1 + 1e-12))
    record("pointwise_bounds", ok, "snapshot bounds hold at r=4")

    z = rng.standard_normal((12, 5))
    dt = 0.3
    rebuilt = diffops.rebuild_sequence(z[0], (z[1] - z[0]) / dt,
                                       diffops.second_diff(z, dt), dt)
    gap = float(np.max(np.abs(rebuilt - z))) / max(float(np.max(np.abs(z))), 1e-30)
    record("sequence_rebuild_identity", gap <= 1e-11, f"gap {gap:.2e}")

    basis = pod.pod_basis(traj, "standard")
    rep = _rom_report(traj, basis, basis.rank, space, params)
    scale = float(np.max(np.abs(traj.states)))
    ok = rep.max_l2_sq <= (1e-8 * scale) ** 2 * space.n_dof
    record("full_rank_rom_consistency", ok, f"max_l2_sq {rep.max_l2_sq:.2e}")

    return results
