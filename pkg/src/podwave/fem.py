"""Uniform linear finite elements on (0, 1) with zero Dirichlet boundary.

Only the interior degrees of freedom are carried; boundary values are
eliminated from every system.  Coefficient vectors are plain numpy arrays of
length n_dof = n_elements - 1.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import TridiagonalMatrix, solve_tridiagonal

# 5-point Gauss-Legendre on [-1, 1]; exact for polynomials of degree 9, so
# load-vector quadrature error is negligible next to the projection error.
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class FemSpace:
    """Mesh plus the Gram matrices of the L2 and H1_0 inner products."""

    n_elements: int
    h: float
    n_dof: int
    mass: TridiagonalMatrix
    stiffness: TridiagonalMatrix

    @property
    def nodes(self) -> np.ndarray:
        """Interior node coordinates (the DOF locations)."""
        return self.h * np.arange(1, self.n_dof + 1)

    @property
    def full_nodes(self) -> np.ndarray:
        """All node coordinates including the boundary."""
        return self.h * np.arange(self.n_elements + 1)

    def pad_boundary(self, u: np.ndarray) -> np.ndarray:
        """Append the zero boundary values, for plotting/output."""
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return np.concatenate(([0.0], u, [0.0]))
        z = np.zeros((1, u.shape[1]))
        return np.concatenate((z, u, z), axis=0)


def assemble(n_elements: int) -> FemSpace:
    """Build the FE space on a uniform mesh of n_elements cells."""
    if n_elements < 2:
        raise ValueError("need at least 2 elements for one interior DOF")
    h = 1.0 / n_elements
    n_dof = n_elements - 1
    mass = TridiagonalMatrix(
        sub=np.full(n_dof - 1, h / 6.0),
        diag=np.full(n_dof, 2.0 * h / 3.0),
        sup=np.full(n_dof - 1, h / 6.0),
    )
    stiffness = TridiagonalMatrix(
        sub=np.full(n_dof - 1, -1.0 / h),
        diag=np.full(n_dof, 2.0 / h),
        sup=np.full(n_dof - 1, -1.0 / h),
    )
    return FemSpace(n_elements=n_elements, h=h, n_dof=n_dof, mass=mass, stiffness=stiffness)


def l2_inner(space: FemSpace, u: np.ndarray, v: np.ndarray) -> float:
    """(u, v) in L2, i.e. u^T M v."""
    return float(np.dot(u, space.mass.matvec(v)))


def h10_inner(space: FemSpace, u: np.ndarray, v: np.ndarray) -> float:
    """(u', v') in L2, i.e. u^T A v."""
    return float(np.dot(u, space.stiffness.matvec(v)))


def l2_norm(space: FemSpace, u: np.ndarray) -> float:
    return float(np.sqrt(max(l2_inner(space, u, u), 0.0)))


def l2_norms_sq(space: FemSpace, cols: np.ndarray) -> np.ndarray:
    """Columnwise squared L2 norms of a (n_dof, k) stack."""
    return np.einsum("ij,ij->j", cols, space.mass.matvec(cols))


def h10_norms_sq(space: FemSpace, cols: np.ndarray) -> np.ndarray:
    """Columnwise squared H1_0 norms of a (n_dof, k) stack."""
    return np.einsum("ij,ij->j", cols, space.stiffness.matvec(cols))


def load_vector(f: Callable[[np.ndarray], np.ndarray], space: FemSpace) -> np.ndarray:
    """b_i = integral of f * phi_i, by per-element Gauss quadrature."""
    h = space.h
    lefts = h * np.arange(space.n_elements)
    # quadrature points per element, shape (n_elements, n_quad)
    xq = lefts[:, None] + 0.5 * h * (_GAUSS_X[None, :] + 1.0)
    wq = 0.5 * h * _GAUSS_W
    fvals = np.asarray(f(xq), dtype=float)
    if fvals.shape != xq.shape:  # f returned a scalar or broadcast shape
        fvals = np.broadcast_to(fvals, xq.shape)
    # local hat values: right node of the element rises, left node falls
    t = 0.5 * (_GAUSS_X + 1.0)
    contrib_right = fvals * (wq * t)        # toward node e+1
    contrib_left = fvals * (wq * (1.0 - t))  # toward node e
    b = np.zeros(space.n_elements + 1)
    np.add.at(b, np.arange(space.n_elements) + 1, contrib_right.sum(axis=1))
    np.add.at(b, np.arange(space.n_elements), contrib_left.sum(axis=1))
    return b[1:-1]


def l2_project(f: Callable[[np.ndarray], np.ndarray], space: FemSpace) -> np.ndarray:
    """Coefficients of the L2 projection of f onto the FE space."""
    return solve_tridiagonal(space.mass, load_vector(f, space))


def interpolate(f: Callable[[np.ndarray], np.ndarray], space: FemSpace) -> np.ndarray:
    """Nodal interpolant coefficients (values of f at interior nodes)."""
    return np.asarray(f(space.nodes), dtype=float)
