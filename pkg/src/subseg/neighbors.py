"""Sparse neighbor selection in the global subspace.

Each projected trajectory gets a candidate set from its smallest NSI
dissimilarities, then a weighted L1 problem with an affine constraint
picks the few candidates spanning the same local subspace.  The solver is
an alternating-direction scheme: an equality-constrained least-squares
step, entrywise soft-thresholding, and dual ascent.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np


class SolverStall(UserWarning):
    """A row solve plateaued above tolerance; its last iterate is kept."""


@dataclass
class AdmmParams:
    rho: float = 1.0
    tol_abs: float = 1e-8
    tol_rel: float = 1e-6
    max_iter: int = 2000


@dataclass
class RowStats:
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    stalled: bool


@dataclass
class NsiMatrix:
    """P x P symmetric matrix of NSI similarity values in [0, 1]."""

    data: np.ndarray


@dataclass
class SparseNeighborSolution:
    """Row-stacked sparse coefficients with per-row solve metadata."""

    C: np.ndarray                # (P, P), row i = c_i^T, zero diagonal
    candidates: list             # per-row candidate index arrays
    stats: list                  # per-row RowStats

    @property
    def stalled_rows(self):
        return [i for i, s in enumerate(self.stats) if s.stalled]


@dataclass
class WeightMatrix:
    """P x P sparse weight matrix; nonzero rows sum to 1, zero diagonal."""

    Omega: np.ndarray


def nsi(a, b):
    """Normalized subspace inclusion between two (multi-)vectors.

    tr(a^T b b^T a) / min(dim a, dim b); for unit column vectors this is
    the squared inner product.  Symmetric, in [0, 1].
    """
    A = np.atleast_2d(np.asarray(a, dtype=float))
    B = np.atleast_2d(np.asarray(b, dtype=float))
    if A.shape[0] == 1:
        A = A.T
    if B.shape[0] == 1:
        B = B.T
    cross = A.T @ B
    return float(np.sum(cross ** 2) / min(A.shape[1], B.shape[1]))


def nsi_dissimilarity_rows(subspace):
    """All pairwise NSI values and the derived distances X = 1 - NSI.

    Small distance means geometrically close, which is what both the
    solver weights and the final weight-matrix normalization require.
    """
    G = subspace.data
    sim = (G.T @ G) ** 2
    sim = np.clip(0.5 * (sim + sim.T), 0.0, 1.0)
    return NsiMatrix(sim), 1.0 - sim


def search_area(x_row, self_index, size):
    """Indices of the ``size`` smallest distances, excluding the point itself.

    Ties resolve to the lower index (stable sort).
    """
    if size < 1:
        raise ValueError("search area size must be >= 1")
    order = np.argsort(x_row, kind="stable")
    order = order[order != self_index]
    return order[:size]


def proximity_weights(x, sigma):
    """Diagonal solver weights: small for close candidates, near 1 for far.

    exp(x/sigma) normalized over the candidate set, so close points incur a
    lower L1 penalty and stay in the support.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    q = np.exp((x - x.max()) / sigma)
    return q / q.sum()


def neighbor_objective(c, x, q, lam):
    """Value of the Lagrangian surrogate lam*||q c||_1 + 0.5*||x c||_2^2."""
    return lam * np.sum(np.abs(q * c)) + 0.5 * np.sum((x * c) ** 2)


def solve_sparse_neighbors(x, sigma=None, lam=0.07, admm=None):
    """Solve min lam*||Q c||_1 + 0.5*||diag(x) c||_2^2 s.t. 1^T c = 1.

    ``x`` holds the candidate distances.  The quadratic step solves its
    KKT system in closed form (diagonal plus rank-one), the L1 step is
    soft-thresholding with per-entry thresholds lam*q/rho, and a scaled
    dual variable tracks the splitting constraint.  Returns (c, RowStats);
    the affine constraint holds to machine precision.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("candidate set must be nonempty")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    admm = admm or AdmmParams()
    k = x.size
    if k == 1:
        return np.ones(1), RowStats(0, 0.0, 0.0, True, False)

    if sigma is None:
        sigma = float(np.mean(x)) or 1.0
    q = proximity_weights(x, sigma)
    thresh = lam * q / admm.rho

    H = 1.0 / (x ** 2 + admm.rho)
    H_sum = H.sum()

    c = np.full(k, 1.0 / k)
    z = c.copy()
    u = np.zeros(k)
    r_norm = s_norm = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, admm.max_iter + 1):
        v = admm.rho * (z - u)
        w = H * v
        nu = (w.sum() - 1.0) / H_sum
        c = w - nu * H

        z_old = z
        z = _soft_threshold(c + u, thresh)
        u = u + c - z

        r_norm = float(np.linalg.norm(c - z))
        s_norm = float(admm.rho * np.linalg.norm(z - z_old))
        eps_pri = np.sqrt(k) * admm.tol_abs + admm.tol_rel * max(
            np.linalg.norm(c), np.linalg.norm(z))
        eps_dual = np.sqrt(k) * admm.tol_abs + admm.tol_rel * admm.rho * np.linalg.norm(u)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

    stalled = not converged and r_norm > 1e-3
    # keep only the support the L1 step selected; renormalizing the
    # surviving entries restores 1^T c = 1 exactly
    keep = z != 0.0
    if np.any(keep) and abs(c[keep].sum()) > 1e-3:
        c = np.where(keep, c, 0.0)
        c = c / c.sum()
    return c, RowStats(iterations, r_norm, s_norm, converged, stalled)


def solve_all_neighbors(subspace, size=20, sigma=None, lam=0.07, admm=None):
    """Run the sparse-neighbor solve for every projected trajectory.

    All rows share the candidate-set size, so the solves run as one
    vectorized batch with per-row freezing at convergence; the iterates
    match the per-row solver exactly.  SUBSEG_THREADS (when > 1) caps a
    thread pool over per-row solves instead.  Stalled rows are flagged in
    the stats and a single summary warning is issued, never dropped.
    """
    _, X = nsi_dissimilarity_rows(subspace)
    P = X.shape[0]
    size = min(size, P - 1)
    C = np.zeros((P, P))
    candidates = [search_area(X[i], i, size) for i in range(P)]

    workers = int(os.environ.get("SUBSEG_THREADS", "1"))
    if workers > 1:
        def solve_row(i):
            return solve_sparse_neighbors(X[i, candidates[i]], sigma, lam, admm)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_row, range(P)))
        coeffs = [c for c, _ in results]
        stats = [s for _, s in results]
    else:
        x_all = np.stack([X[i, candidates[i]] for i in range(P)])
        coeffs, stats = _solve_batch(x_all, sigma, lam, admm or AdmmParams())

    for i in range(P):
        C[i, candidates[i]] = coeffs[i]

    solution = SparseNeighborSolution(C, candidates, stats)
    if solution.stalled_rows:
        warnings.warn(f"{len(solution.stalled_rows)} row solves stalled "
                      "above tolerance", SolverStall)
    return solution


def _solve_batch(x_all, sigma, lam, admm):
    """Vectorized variant of solve_sparse_neighbors over stacked rows.

    Identical update sequence; each row freezes at its own convergence
    iteration so the result agrees with the per-row solver.
    """
    R, k = x_all.shape
    if k == 1:
        return [np.ones(1)] * R, [RowStats(0, 0.0, 0.0, True, False)] * R
    if lam < 0:
        raise ValueError("lambda must be >= 0")

    if sigma is None:
        sig = x_all.mean(axis=1, keepdims=True)
        sig[sig == 0] = 1.0
    else:
        sig = np.full((R, 1), float(sigma))
    q = np.exp((x_all - x_all.max(axis=1, keepdims=True)) / sig)
    q = q / q.sum(axis=1, keepdims=True)
    thresh = lam * q / admm.rho

    H = 1.0 / (x_all ** 2 + admm.rho)
    H_sum = H.sum(axis=1, keepdims=True)

    c = np.full((R, k), 1.0 / k)
    z = c.copy()
    u = np.zeros((R, k))
    active = np.ones(R, dtype=bool)
    iterations = np.zeros(R, dtype=int)
    r_norm = np.zeros(R)
    s_norm = np.zeros(R)
    sqrt_k = np.sqrt(k)

    for it in range(1, admm.max_iter + 1):
        v = admm.rho * (z[active] - u[active])
        w = H[active] * v
        nu = (w.sum(axis=1, keepdims=True) - 1.0) / H_sum[active]
        c_a = w - nu * H[active]

        z_old = z[active]
        z_a = _soft_threshold(c_a + u[active], thresh[active])
        u_a = u[active] + c_a - z_a

        c[active], z[active], u[active] = c_a, z_a, u_a
        iterations[active] = it

        r = np.linalg.norm(c_a - z_a, axis=1)
        s = admm.rho * np.linalg.norm(z_a - z_old, axis=1)
        r_norm[active], s_norm[active] = r, s
        eps_pri = sqrt_k * admm.tol_abs + admm.tol_rel * np.maximum(
            np.linalg.norm(c_a, axis=1), np.linalg.norm(z_a, axis=1))
        eps_dual = sqrt_k * admm.tol_abs + admm.tol_rel * admm.rho * np.linalg.norm(u_a, axis=1)
        done = (r <= eps_pri) & (s <= eps_dual)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break

    coeffs, stats = [], []
    for i in range(R):
        converged = not active[i]
        stalled = (not converged) and r_norm[i] > 1e-3
        ci = c[i]
        keep = z[i] != 0.0
        if np.any(keep) and abs(ci[keep].sum()) > 1e-3:
            ci = np.where(keep, ci, 0.0)
            ci = ci / ci.sum()
        coeffs.append(ci)
        stats.append(RowStats(int(iterations[i]), float(r_norm[i]),
                              float(s_norm[i]), converged, stalled))
    return coeffs, stats


def weight_matrix(C, X):
    """Distance-normalized weights omega_ij = (c_ij/X_ij) / sum_t c_it/X_it.

    Zero distances (coincident points) are clamped to 1e-12 so duplicates
    get near-total weight instead of a division by zero.  Rows whose
    normalizer vanishes are left zero.
    """
    P = C.shape[0]
    Xc = np.maximum(X, 1e-12)
    Omega = np.zeros_like(C)
    for i in range(P):
        ratios = C[i] / Xc[i]
        ratios[i] = 0.0
        denom = ratios.sum()
        if abs(denom) > 1e-12:
            Omega[i] = ratios / denom
    return WeightMatrix(Omega)


def _soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)
