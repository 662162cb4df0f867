"""Optimal transport distance between labeled datasets.

Three synthetic "languages": aa and bb draw each relation's vectors from the
same per-label Gaussian, cc from mean-shifted ones. The dataset distance
combines Euclidean feature cost with label-to-label Wasserstein distances,
so aa and bb should come out closest, and the label matrix should have a
small diagonal (same relation, different language).
"""

import numpy as np

from syndiff.embeddings import LabeledDataset
from syndiff.otdd import OtddConfig, dataset_distance, label_distance_matrix

rng = np.random.default_rng(42)
LABELS = ("nsubj", "obj", "amod")
MEANS = {label: rng.normal(0.0, 2.0, 8) for label in LABELS}


def sample_language(code, seed, shift=0.0, n=90):
    g = np.random.default_rng(seed)
    feats, labels = [], []
    for i in range(n):
        label = LABELS[i % len(LABELS)]
        feats.append(MEANS[label] + shift + g.normal(0.0, 1.0, 8))
        labels.append(label)
    return LabeledDataset(
        language=code, model_id="demo", layer=7,
        features=np.asarray(feats), labels=tuple(labels),
    )


aa = sample_language("aa", 1)
bb = sample_language("bb", 2)
cc = sample_language("cc", 3, shift=1.5)

cfg = OtddConfig(eps=0.1, max_iter=1500)
for left, right in ((aa, bb), (aa, cc), (bb, cc)):
    res = dataset_distance(left, right, cfg)
    print(f"d({left.language}, {right.language}) = {res.distance:.3f}"
          f"  (converged={res.converged})")

print("\nlabel-to-label W2 between aa and bb (same generators):")
dist = label_distance_matrix(aa, bb, cfg)
header = "        " + "  ".join(f"{l:>7}" for l in dist.labels_b)
print(header)
for i, label in enumerate(dist.labels_a):
    row = "  ".join(f"{v:7.3f}" for v in dist.values[i])
    print(f"{label:>7} {row}")
print("\nthe diagonal (same relation) is clearly the row minimum")

same = dataset_distance(aa, aa, cfg)
print(f"\nself-distance d(aa, aa) = {same.distance:.6f} (entropic, so not exactly 0)")
