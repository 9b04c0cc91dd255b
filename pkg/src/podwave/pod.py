"""POD bases from snapshot trajectories, exact data-error formulas, and
pointwise bound checks.

Three data-set conventions are supported for a trajectory u^1..u^N:

    standard   w^j = u^j                weights  dt, ..., dt
    dq1        u^1 and all forward
               difference quotients     weights  1, dt, ..., dt
    ddq        u^1, du^1 and all second
               difference quotients     weights  1, 1, dt, ..., dt

The POD space is L2: modes are M-orthonormal and solve the weighted
eigenproblem of the data Gram operator.  With M = L L^T this is the SVD of
B = L^T W sqrt(Gamma): eigenvalues are squared singular values and modes are
L^{-T} times the left singular vectors.  The SVD is taken of B directly
(not of B B^T) so that small eigenvalues keep relative-level accuracy; the
deep tails of the error formulas in the H1_0 norm need this.
"""

from dataclasses import dataclass

import numpy as np

from . import diffops
from .fem import FemSpace, l2_norms_sq, h10_norms_sq
from .linalg import SpdSolver, cholesky_tridiagonal, thin_svd
from .wave import TimeGrid, Trajectory

METHODS = ("standard", "dq1", "ddq")

NORM_L2 = "l2"
NORM_H10 = "h10"
PROJECTOR_L2 = "l2"
PROJECTOR_RITZ = "ritz"


@dataclass
class PodDataSet:
    """Weighted data columns feeding the POD eigenproblem."""

    columns: np.ndarray  # (n_dof, N_w)
    weights: np.ndarray  # (N_w,)
    method: str
    space: FemSpace
    grid: TimeGrid


@dataclass
class PodBasis:
    """M-orthonormal POD modes with their eigenvalues, sorted descending."""

    modes: np.ndarray        # (n_dof, s)
    eigenvalues: np.ndarray  # (s,)
    method: str
    space: FemSpace
    grid: TimeGrid

    @property
    def rank(self) -> int:
        return self.eigenvalues.shape[0]


def build_dataset(traj: Trajectory, method: str) -> PodDataSet:
    """Assemble the POD data columns and weights for the given convention."""
    if method not in METHODS:
        raise ValueError(f"unknown POD method {method!r}; expected one of {METHODS}")
    u = traj.states  # (N, m)
    n, dt = traj.grid.N, traj.grid.dt
    if method == "standard":
        cols = u.T.copy()
        weights = np.full(n, dt)
    elif method == "dq1":
        if n < 2:
            raise ValueError("dq1 needs at least 2 snapshots")
        cols = np.empty((traj.space.n_dof, n))
        cols[:, 0] = u[0]
        cols[:, 1:] = diffops.forward_diff(u, dt).T
        weights = np.full(n, dt)
        weights[0] = 1.0
    else:  # ddq
        if n < 3:
            raise ValueError("ddq needs at least 3 snapshots")
        cols = np.empty((traj.space.n_dof, n))
        cols[:, 0] = u[0]
        cols[:, 1] = (u[1] - u[0]) / dt
        cols[:, 2:] = diffops.second_diff(u, dt).T
        weights = np.full(n, dt)
        weights[:2] = 1.0
    return PodDataSet(columns=cols, weights=weights, method=method,
                      space=traj.space, grid=traj.grid)


def compute_basis(data: PodDataSet, rank_tol: float = 0.0) -> PodBasis:
    """Solve the weighted POD eigenproblem in the L2 geometry.

    Retains every eigenvalue whose singular value exceeds
    max(sqrt(rank_tol) * sigma_1, 0); the default keeps the full positive
    spectrum so that deep tails of the error formulas remain available.
    """
    space = data.space
    chol = cholesky_tridiagonal(space.mass)
    b = chol.transpose_matvec(data.columns * np.sqrt(data.weights)[None, :])
    u, sing = thin_svd(b)
    if sing[0] <= 0.0:
        raise ValueError("POD data is identically zero")
    cutoff = max(np.sqrt(rank_tol) * sing[0], 0.0)
    s = int(np.sum(sing > cutoff))
    modes = chol.solve_transpose(u[:, :s])
    _fix_mode_signs(modes)
    return PodBasis(modes=modes, eigenvalues=sing[:s] ** 2,
                    method=data.method, space=space, grid=data.grid)


def _fix_mode_signs(modes: np.ndarray):
    """Make the first nonzero coefficient of each mode positive, in place."""
    scale = np.max(np.abs(modes), axis=0)
    for k in range(modes.shape[1]):
        nonzero = np.nonzero(np.abs(modes[:, k]) > 1e-12 * scale[k])[0]
        if nonzero.size and modes[nonzero[0], k] < 0:
            modes[:, k] = -modes[:, k]


def pod_basis(traj: Trajectory, method: str, rank_tol: float = 0.0) -> PodBasis:
    """Convenience: build_dataset followed by compute_basis."""
    return compute_basis(build_dataset(traj, method), rank_tol=rank_tol)


def project_l2(basis: PodBasis, r: int, v: np.ndarray) -> np.ndarray:
    """L2-orthogonal projection onto the span of the first r modes.

    v may be a single vector (n_dof,) or a stack of columns (n_dof, k).
    """
    _check_r(basis, r)
    phi = basis.modes[:, :r]
    return phi @ (phi.T @ basis.space.mass.matvec(v))


def project_ritz(basis: PodBasis, r: int, v: np.ndarray) -> np.ndarray:
    """Ritz (H1_0-orthogonal) projection onto the span of the first r modes."""
    _check_r(basis, r)
    phi = basis.modes[:, :r]
    a_v = basis.space.stiffness.matvec(v)
    reduced = phi.T @ basis.space.stiffness.matvec(phi)
    coeffs = SpdSolver(reduced).solve(phi.T @ a_v)
    return phi @ coeffs


_PROJECTORS = {PROJECTOR_L2: project_l2, PROJECTOR_RITZ: project_ritz}


def _check_r(basis: PodBasis, r: int):
    if not 1 <= r <= basis.rank:
        raise ValueError(f"r must be in [1, {basis.rank}], got {r}")


def _norms_sq(space: FemSpace, cols: np.ndarray, norm: str) -> np.ndarray:
    if norm == NORM_L2:
        return l2_norms_sq(space, cols)
    if norm == NORM_H10:
        return h10_norms_sq(space, cols)
    raise ValueError(f"unknown norm {norm!r}")


def data_error_actual(traj: Trajectory, basis: PodBasis, r: int,
                      norm: str = NORM_L2, projector: str = PROJECTOR_L2) -> float:
    """Weighted sum of squared projection errors over the basis's data set."""
    data = build_dataset(traj, basis.method)
    residual = data.columns - _PROJECTORS[projector](basis, r, data.columns)
    return float(np.dot(data.weights, _norms_sq(basis.space, residual, norm)))


def data_error_formula(basis: PodBasis, r: int,
                       norm: str = NORM_L2, projector: str = PROJECTOR_L2) -> float:
    """Eigenvalue-tail expression equal to data_error_actual.

    sum_{k>r} lambda_k * m_k with m_k = 1 for the native L2 projection,
    ||phi_k||^2 in the requested norm for the L2-orthogonal projector, and
    ||phi_k - P phi_k||^2 for a general projector such as Ritz.
    """
    _check_r(basis, r)
    tail = basis.eigenvalues[r:]
    if tail.size == 0:
        return 0.0
    if projector == PROJECTOR_L2 and norm == NORM_L2:
        return float(np.sum(tail))
    tail_modes = basis.modes[:, r:]
    if projector == PROJECTOR_L2:
        mults = _norms_sq(basis.space, tail_modes, norm)
    else:
        residual = tail_modes - _PROJECTORS[projector](basis, r, tail_modes)
        mults = _norms_sq(basis.space, residual, norm)
    return float(np.dot(tail, mults))


@dataclass(frozen=True)
class BoundConstants:
    """Constants of the pointwise and weighted-sum bound inequalities; all
    are functions of the final time T alone (poincare is fixed by the unit
    interval)."""

    snapshot_max: float       # max over snapshots, dq1 data
    snapshot_max_ddq: float   # max over snapshots, ddq data
    diff_max: float           # max over difference quotients
    weighted_sum_dq1: float   # dt-weighted snapshot sum, dq1 data
    weighted_sum_ddq: float   # dt-weighted snapshot sum, ddq data
    poincare: float

    @classmethod
    def for_final_time(cls, T: float) -> "BoundConstants":
        return cls(
            snapshot_max=2.0 * max(T, 1.0),
            snapshot_max_ddq=3.0 * max(T**3, 1.0),
            diff_max=2.0 * max(T, 1.0),
            weighted_sum_dq1=4.0 * max(T**2, T),
            weighted_sum_ddq=6.0 * max(T**4, T),
            poincare=np.pi**2,
        )


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else np.inf


def pointwise_bound_check(traj: Trajectory, basis: PodBasis, r: int,
                          norm: str = NORM_L2, projector: str = PROJECTOR_L2,
                          statistic: str = "max") -> BoundCheck:
    """Evaluate one side of a snapshot error bound against the other.

    lhs is max_n (statistic="max") or sum_n dt (statistic="sum") of the
    squared projection errors of the snapshots u^n; rhs is the matching
    constant times the eigenvalue-tail formula for the basis's data set.
    Holds with ratio <= 1 for dq1 and ddq bases.
    """
    if basis.method == "standard":
        raise ValueError("snapshot bounds hold for dq1/ddq bases only")
    const = BoundConstants.for_final_time(basis.grid.T)
    if statistic == "max":
        c = const.snapshot_max if basis.method == "dq1" else const.snapshot_max_ddq
    elif statistic == "sum":
        c = const.weighted_sum_dq1 if basis.method == "dq1" else const.weighted_sum_ddq
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    u_cols = traj.states.T
    residual = u_cols - _PROJECTORS[projector](basis, r, u_cols)
    errs = _norms_sq(basis.space, residual, norm)
    lhs = float(np.max(errs)) if statistic == "max" else float(traj.grid.dt * np.sum(errs))
    rhs = c * data_error_formula(basis, r, norm=norm, projector=projector)
    return BoundCheck(lhs=lhs, rhs=rhs)
