"""Galerkin reduced-order model of the damped wave equation on a POD basis,
plus error metrics against the full finite element trajectory.

Because the modes are M-orthonormal the reduced mass matrix is the identity
and the reduced system mirrors the full scheme with S_r = Phi^T A Phi in
place of the stiffness matrix.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fem import FemSpace, l2_norms_sq, h10_norms_sq
from .linalg import SpdSolver
from .pod import PodBasis, project_ritz
from .wave import TimeGrid, Trajectory, WaveParams, energy_series

_REDUCED_MASS_TOL = 1e-10
_RATIO_FLOOR = 1e-14


@dataclass
class RomSystem:
    """Reduced operators and initial coefficients for one (basis, r) run."""

    r: int
    modes: np.ndarray             # (n_dof, r)
    reduced_stiffness: np.ndarray  # (r, r), SPD
    params: WaveParams
    grid: TimeGrid
    space: FemSpace
    a1: np.ndarray
    a2: np.ndarray


def build_rom(basis: PodBasis, r: int, space: FemSpace, params: WaveParams,
              grid: TimeGrid, u1: np.ndarray, u2: np.ndarray) -> RomSystem:
    """Assemble the reduced system; initial coefficients are the L2
    projections of the two starting states."""
    if not 1 <= r <= basis.rank:
        raise ValueError(f"r must be in [1, {basis.rank}], got {r}")
    phi = basis.modes[:, :r]
    m_phi = space.mass.matvec(phi)
    reduced_mass = phi.T @ m_phi
    if np.max(np.abs(reduced_mass - np.eye(r))) > _REDUCED_MASS_TOL:
        raise ValueError("modes are not orthonormal in the L2 inner product")
    s_r = phi.T @ space.stiffness.matvec(phi)
    s_r = 0.5 * (s_r + s_r.T)
    return RomSystem(
        r=r, modes=phi, reduced_stiffness=s_r, params=params, grid=grid,
        space=space, a1=m_phi.T @ u1, a2=m_phi.T @ u2,
    )


def solve_rom(romsys: RomSystem) -> Trajectory:
    """Integrate the reduced system and reconstruct full-order states."""
    r, dt = romsys.r, romsys.grid.dt
    c2, d, g = romsys.params.c**2, romsys.params.D, romsys.params.G
    eye = np.eye(r)
    s_r = romsys.reduced_stiffness
    lhs = (1.0 / dt**2 + d / (2.0 * dt)) * eye + (c2 / 4.0 + g / (2.0 * dt)) * s_r
    b_cur = (2.0 / dt**2) * eye - (c2 / 2.0) * s_r
    b_prev = (-1.0 / dt**2 + d / (2.0 * dt)) * eye + (-c2 / 4.0 + g / (2.0 * dt)) * s_r
    solver = SpdSolver(lhs)
    coeffs = np.empty((romsys.grid.N, r))
    coeffs[0], coeffs[1] = romsys.a1, romsys.a2
    for n in range(2, romsys.grid.N):
        coeffs[n] = solver.solve(b_cur @ coeffs[n - 1] + b_prev @ coeffs[n - 2])
    states = coeffs @ romsys.modes.T
    return Trajectory(space=romsys.space, grid=romsys.grid, states=states)


@dataclass
class RomErrorReport:
    """Error metrics for a ROM run; squared quantities follow the bound
    statements (max_l2_sq = max_n ||e^n||^2), final_l2 is the plain norm."""

    r: int
    method: str
    max_l2_sq: float
    max_energy: float
    final_l2: float
    ratio_energy: Optional[float]
    ratio_pointwise: Optional[float]
    energy_bound_denom: float
    pointwise_bound_denom: float
    l2_sq_series: np.ndarray      # ||e^n||^2 for n = 1..N
    energy_err_series: np.ndarray  # E(e^n) for n = 2..N


def error_report(fe_traj: Trajectory, rom_traj: Trajectory, basis: PodBasis,
                 r: int, space: FemSpace, params: WaveParams) -> RomErrorReport:
    """Compare ROM against FE and evaluate the error-bound quotients.

    The error splits as e^n = eta^n - phi^n with eta^n = u_h^n - R_r u_h^n
    (data projection error) and phi^n = u_r^n - R_r u_h^n (discretization
    error); the bound denominators use phi^1, phi^2 and the Ritz defects of
    the discarded modes.  Ratios are reported as None when the denominator
    falls below round-off scale.
    """
    if fe_traj.grid.N != rom_traj.grid.N:
        raise ValueError("trajectories live on different grids")
    dt = fe_traj.grid.dt
    err = fe_traj.states - rom_traj.states  # (N, m)
    ritz_fe = project_ritz(basis, r, fe_traj.states.T)  # (m, N)
    eta = fe_traj.states.T - ritz_fe
    phi = rom_traj.states.T - ritz_fe
    split_gap = np.max(np.abs(err.T - (eta - phi)))
    if split_gap > 1e-9 * max(np.max(np.abs(err)), 1e-30):
        raise AssertionError("error split failed to reconstruct e = eta - phi")

    l2_sq = l2_norms_sq(space, err.T)
    err_traj = Trajectory(space=space, grid=fe_traj.grid, states=err)
    e_energy = energy_series(err_traj, params.c)
    final_l2 = float(np.sqrt(max(l2_sq[-1], 0.0)))

    # discretization-error energy at the second time level
    bd = (phi[:, 1] - phi[:, 0]) / dt
    avg = 0.5 * (phi[:, 1] + phi[:, 0])
    e_phi2 = float(
        0.5 * l2_norms_sq(space, bd[:, None])[0]
        + 0.5 * params.c**2 * h10_norms_sq(space, avg[:, None])[0]
    )
    phi1_l2_sq = float(l2_norms_sq(space, phi[:, :1])[0])

    tail = basis.eigenvalues[r:]
    if tail.size:
        tail_modes = basis.modes[:, r:]
        defect = tail_modes - project_ritz(basis, r, tail_modes)
        d_l2 = l2_norms_sq(space, defect)
        d_h10 = h10_norms_sq(space, defect)
        tail_l2 = float(np.dot(tail, d_l2))
        tail_both = float(np.dot(tail, d_l2 + d_h10))
    else:
        tail_l2 = tail_both = 0.0

    energy_denom = e_phi2 + tail_both
    pointwise_denom = phi1_l2_sq + e_phi2 + tail_l2
    max_energy = float(np.max(e_energy))
    max_l2_sq = float(np.max(l2_sq))
    scale = max(basis.eigenvalues[0], 1.0)
    ratio_energy = max_energy / energy_denom if energy_denom > _RATIO_FLOOR * scale else None
    ratio_pointwise = max_l2_sq / pointwise_denom if pointwise_denom > _RATIO_FLOOR * scale else None

    return RomErrorReport(
        r=r, method=basis.method, max_l2_sq=max_l2_sq, max_energy=max_energy,
        final_l2=final_l2, ratio_energy=ratio_energy, ratio_pointwise=ratio_pointwise,
        energy_bound_denom=energy_denom, pointwise_bound_denom=pointwise_denom,
        l2_sq_series=l2_sq, energy_err_series=e_energy,
    )
