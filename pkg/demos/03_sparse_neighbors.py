"""
Sparse neighbor selection on the unit sphere
============================================

Each projected trajectory picks a handful of affine-combination
neighbors from its closest candidates, where "close" means a small
subspace-inclusion distance 1 - (alpha_i' alpha_j)^2.  A proximity-
weighted L1 penalty keeps the selection sparse; an alternating-direction
solver handles the affine constraint 1'c = 1.
"""

import numpy as np

from subseg import SceneConfig, make_scene
from subseg.neighbors import (nsi_dissimilarity_rows, solve_all_neighbors,
                              weight_matrix)
from subseg.projection import pca_project

W, truth = make_scene(SceneConfig(n_motions=2, seed=4))
G = pca_project(W, 5)
labels = truth.labels

# Distances: within-motion pairs sit much closer than cross-motion pairs
_, X = nsi_dissimilarity_rows(G)
same = labels[:, None] == labels[None, :]
off = ~np.eye(len(labels), dtype=bool)
print(f"NSI distance, within-motion mean {X[same & off].mean():.3f}, "
      f"cross-motion mean {X[~same].mean():.3f}")

# Solve every row; inspect sparsity and solver health
sol = solve_all_neighbors(G, size=20, lam=0.07)
support_sizes = (sol.C != 0).sum(axis=1)
iters = [s.iterations for s in sol.stats]
print(f"support sizes: min {support_sizes.min()}, "
      f"median {int(np.median(support_sizes))}, max {support_sizes.max()}")
print(f"ADMM iterations: median {int(np.median(iters))}, max {max(iters)}")
print(f"affine constraint worst error "
      f"{np.abs(sol.C.sum(axis=1) - 1).max():.1e}")

# How pure are the selections?  Count neighbors that share the true label
purity = np.array([
    np.mean(labels[np.flatnonzero(sol.C[i])] == labels[i])
    for i in range(len(labels))])
print(f"neighbor purity: mean {purity.mean():.3f}, "
      f"rows fully pure {int((purity == 1).sum())}/{len(labels)}")

# Weight matrix: coefficients rescaled by inverse distance, rows sum to 1
Omega = weight_matrix(sol.C, X).Omega
rows = np.abs(Omega).sum(axis=1)
print(f"weight-matrix rows sum to 1 within {np.abs(rows - 1).max():.1e}")
