import numpy as np
import pytest

from subseg.projection import GlobalSubspace
from subseg.subspace_error import (build_error_matrix, collect_local_subspace,
                                   error_matrix, error_vector, subspace_basis,
                                   LocalSubspace)


def unit_subspace(M):
    return GlobalSubspace(M / np.linalg.norm(M, axis=0), M.shape[0])


def planted_two_subspace(rng, dim=5, per_block=20, angle_deg=30.0):
    """Unit columns drawn from two planes sharing one direction, the other
    directions separated by the given angle."""
    theta = np.radians(angle_deg)
    basis_a = np.zeros((dim, 2))
    basis_a[0, 0] = 1.0
    basis_a[1, 1] = 1.0
    basis_b = np.zeros((dim, 2))
    basis_b[2, 0] = 1.0
    basis_b[1, 1] = np.cos(theta)
    basis_b[3, 1] = np.sin(theta)
    cols = []
    for basis in (basis_a, basis_b):
        coeff = rng.normal(size=(2, per_block))
        cols.append(basis @ coeff)
    M = np.hstack(cols)
    return unit_subspace(M), np.r_[np.zeros(per_block), np.ones(per_block)]


def test_collect_degenerate_row():
    assert collect_local_subspace(np.zeros(6), 3).tolist() == [3]


def test_collect_one_hot():
    row = np.zeros(6)
    row[4] = 1.0
    assert collect_local_subspace(row, 1).tolist() == [1, 4]


def test_collect_matches_nonzero_pattern():
    rng = np.random.default_rng(0)
    for i in range(5):
        row = rng.normal(size=12) * (rng.uniform(size=12) < 0.3)
        got = collect_local_subspace(row, i)
        expected = sorted(set(np.flatnonzero(row).tolist()) | {i})
        assert got.tolist() == expected


def test_basis_single_member():
    col = np.array([[0.6], [0.8], [0.0]])
    basis, rank = subspace_basis(col)
    assert rank == 1
    assert np.allclose(np.abs(basis[:, 0]), [0.6, 0.8, 0.0])


def test_basis_two_orthogonal_members():
    cols = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    basis, rank = subspace_basis(cols)
    assert rank == 2
    assert np.allclose(basis.T @ basis, np.eye(2), atol=1e-10)


def test_basis_planted_plane():
    rng = np.random.default_rng(1)
    plane = np.zeros((5, 2))
    plane[1, 0] = 1.0
    plane[3, 1] = 1.0
    cols = plane @ rng.normal(size=(2, 5))
    basis, rank = subspace_basis(cols)
    assert rank == 2
    # principal angles against the plant
    s = np.linalg.svd(basis.T @ plane, compute_uv=False)
    assert np.max(np.arccos(np.clip(s, 0, 1))) < 1e-8


def test_error_vector_in_span():
    basis = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    G = unit_subspace(np.array([[0.6], [0.8], [0.0]]))
    assert error_vector(basis, G)[0] < 1e-12


def test_error_vector_orthogonal():
    basis = np.array([[1.0], [0.0], [0.0]])
    G = unit_subspace(np.array([[0.0], [0.0], [1.0]]))
    assert error_vector(basis, G)[0] == pytest.approx(1.0, abs=1e-12)


def test_error_vector_planted_separation():
    rng = np.random.default_rng(2)
    G, labels = planted_two_subspace(rng)
    basis, _ = subspace_basis(G.data[:, labels == 0])
    e = error_vector(basis, G)
    assert e[labels == 0].mean() < 1e-6
    assert e[labels == 1].mean() > 0.1


def test_error_matrix_identical_points():
    col = np.array([0.6, 0.8, 0.0])
    G = unit_subspace(np.tile(col[:, None], (1, 4)))
    Omega = np.ones((4, 4)) - np.eye(4)
    Omega /= 3.0
    E, _ = build_error_matrix(G, Omega)
    assert np.max(E.data) < 1e-12


def test_error_matrix_orthogonal_pair():
    G = unit_subspace(np.array([[1.0, 0.0], [0.0, 1.0]]))
    subspaces = [LocalSubspace(np.array([0]), np.array([[1.0], [0.0]]), 1),
                 LocalSubspace(np.array([1]), np.array([[0.0], [1.0]]), 1)]
    E = error_matrix(subspaces, G)
    assert E.data[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert E.data[1, 0] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.diag(E.data), 0.0, atol=1e-12)


def test_error_matrix_block_structure():
    rng = np.random.default_rng(3)
    G, labels = planted_two_subspace(rng)
    P = len(labels)
    Omega = np.zeros((P, P))
    for i in range(P):
        same = np.flatnonzero((labels == labels[i]) & (np.arange(P) != i))
        picks = rng.choice(same, size=3, replace=False)
        Omega[i, picks] = 1.0 / 3.0
    E, _ = build_error_matrix(G, Omega)
    within = np.concatenate([E.data[np.ix_(labels == k, labels == k)].ravel()
                             for k in (0, 1)])
    cross = E.data[np.ix_(labels == 0, labels == 1)].ravel()
    assert within.mean() * 10 < cross.mean()


def test_projector_idempotent():
    rng = np.random.default_rng(4)
    cols = rng.normal(size=(6, 3))
    basis, _ = subspace_basis(cols)
    G = unit_subspace(rng.normal(size=(6, 10)))
    once = G.data - basis @ (basis.T @ G.data)
    twice = once - basis @ (basis.T @ once)
    assert np.max(np.abs(once - twice)) < 1e-12


def test_self_error_small():
    rng = np.random.default_rng(5)
    G = unit_subspace(rng.normal(size=(5, 15)))
    Omega = np.zeros((15, 15))
    for i in range(15):
        Omega[i, (i + 1) % 15] = 1.0
    E, subspaces = build_error_matrix(G, Omega)
    for i in range(15):
        assert E.data[i, i] < 1e-12  # (rank_tol)^2 bound
        basis = subspaces[i].basis
        assert np.max(np.abs(basis.T @ basis - np.eye(subspaces[i].rank))) < 1e-10


def test_error_entries_in_unit_range():
    rng = np.random.default_rng(6)
    G = unit_subspace(rng.normal(size=(4, 12)))
    Omega = np.zeros((12, 12))
    E, _ = build_error_matrix(G, Omega)
    assert np.all(E.data >= 0)
    assert np.all(E.data <= 1 + 1e-9)


def test_adding_member_never_increases_error():
    rng = np.random.default_rng(7)
    G = unit_subspace(rng.normal(size=(5, 8)))
    members = [0, 2, 5]
    basis_small, _ = subspace_basis(G.data[:, members], rank_tol=1e-12)
    basis_large, _ = subspace_basis(G.data[:, members + [6]], rank_tol=1e-12)
    e_small = error_vector(basis_small, G)
    e_large = error_vector(basis_large, G)
    assert np.all(e_large <= e_small + 1e-12)
