"""Distance matrices downstream: clustering, correlation, PCA export.

A six-language matrix with two planted families gets clustered (the families
merge first), compared against a noisy second measure with Spearman's rho,
and a small dataset is projected for visualization.
"""

import numpy as np

from syndiff.analysis import (
    DistanceMatrix,
    agglomerative_cluster,
    compare_measures,
    las_drop,
    pca_project,
    spearman,
    TransferTable,
)

codes = ("aa", "ab", "ac", "ba", "bb", "bc")
rng = np.random.default_rng(1)
values = np.zeros((6, 6))
for i in range(6):
    for j in range(i + 1, 6):
        same_family = codes[i][0] == codes[j][0]
        base = 1.0 if same_family else 4.0
        values[i, j] = values[j, i] = base + rng.uniform(0, 0.3)
matrix = DistanceMatrix(codes=codes, values=values, metadata={"measure": "demo"})

tree = agglomerative_cluster(matrix, linkage="average")
print("merge order (average linkage):")
for a, b, height in tree.merges:
    print(f"  {'+'.join(a)} with {'+'.join(b)} at {height:.3f}")
print("\nNewick:", tree.newick())

perturbed = values.copy()
upper = np.triu_indices(6, 1)
perturbed[upper] += rng.normal(0, 0.15, len(upper[0]))
perturbed = (perturbed + perturbed.T) / 2
np.fill_diagonal(perturbed, 0.0)
other = DistanceMatrix(codes=codes, values=np.abs(perturbed))
comparison = compare_measures(matrix, other)
print(f"\nSpearman rho between the two measures: {comparison.rho:.3f}"
      f" (p = {comparison.p_value:.2e}, {comparison.n_pairs} pairs)")

las = TransferTable(
    codes=("en", "es", "ja"),
    values=np.array([[90.0, 78.0, 55.0], [80.0, 88.0, 52.0], [60.0, 58.0, 82.0]]),
)
print("\nLAS drop matrix (in-language score minus transfer score):")
print(las_drop(las))

points = rng.normal(size=(40, 2)) @ rng.normal(size=(2, 10))
proj = pca_project(points, dims=2)
print(f"\nPCA: explained variance {proj.explained_variance.round(3)}"
      f" (rank-2 data, so two components suffice)")
print(f"reconstruction error: {np.abs(proj.reconstruct() - points).max():.2e}")

x = [0.1, 0.5, 0.9, 1.3, 2.0]
print(f"\nspearman sanity: rho(x, exp(x)) = {spearman(x, np.exp(x)).rho}")
