"""Local subspace bases and the point-to-subspace residual matrix.

Each point together with its sparse neighbors spans a local subspace; the
residual of every projected point against every such subspace fills a
P x P error matrix whose block structure separates the motions.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-6


@dataclass
class LocalSubspace:
    """Orthonormal basis of the span of one point and its sparse neighbors."""

    members: np.ndarray   # sorted indices, {i} union support(omega_i)
    basis: np.ndarray     # (m, m_i), orthonormal columns
    rank: int


@dataclass
class ErrorMatrix:
    """P x P matrix; entry (i, t) is the squared residual of point t
    against local subspace i."""

    data: np.ndarray


def collect_local_subspace(omega_row, i):
    """Member indices of local subspace i: the point plus its neighbors."""
    members = np.flatnonzero(omega_row)
    return np.unique(np.append(members, i))


def subspace_basis(columns, rank_tol=DEFAULT_RANK_TOL):
    """Orthonormal basis of the member columns via SVD rank truncation.

    Keeps singular directions with sigma_k > rank_tol * sigma_max; without
    the truncation a saturated neighbor set would span the whole global
    space and zero out every residual.
    """
    columns = np.atleast_2d(columns)
    if columns.shape[1] == 0:
        raise ValueError("member set must be nonempty")
    U, s, _ = np.linalg.svd(columns, full_matrices=False)
    rank = max(1, int(np.count_nonzero(s > rank_tol * s[0])))
    return U[:, :rank], rank


def error_vector(basis, subspace):
    """Squared orthogonal-projection residual of every point: e_t =
    ||alpha_t - B B^T alpha_t||^2.

    With an orthonormal basis the Moore-Penrose inverse is the transpose,
    so B B^+ is the orthogonal projector onto the local subspace.
    """
    G = subspace.data
    residual = G - basis @ (basis.T @ G)
    return np.sum(residual ** 2, axis=0)


def error_matrix(subspaces, subspace):
    """Stack the residual vectors of all local subspaces into rows."""
    P = subspace.points
    if len(subspaces) != P:
        raise ValueError("need one local subspace per point")
    E = np.empty((P, P))
    for i, local in enumerate(subspaces):
        E[i] = error_vector(local.basis, subspace)
    return ErrorMatrix(E)


def build_error_matrix(subspace, Omega, rank_tol=DEFAULT_RANK_TOL):
    """Convenience: collect members, orthonormalize, evaluate all residuals."""
    subspaces = []
    for i in range(subspace.points):
        members = collect_local_subspace(Omega[i], i)
        basis, rank = subspace_basis(subspace.data[:, members], rank_tol)
        subspaces.append(LocalSubspace(members, basis, rank))
    return error_matrix(subspaces, subspace), subspaces
