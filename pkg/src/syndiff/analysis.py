"""Statistical glue: rank correlation, transfer-score drops, ranking quality,
hierarchical clustering, PCA exports, and comparisons between distance
matrices produced by different measures or models.
"""

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import AnalysisError

LINKAGES = ("single", "complete", "average")

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric language-by-language distance table."""

    codes: tuple
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.codes)
        if self.values.shape != (n, n):
            raise AnalysisError(f"matrix shape {self.values.shape} does not match {n} codes")
        if not np.isfinite(self.values).all():
            raise AnalysisError("distance matrix has non-finite entries")
        scale = max(np.abs(self.values).max(), 1.0)
        if np.abs(self.values - self.values.T).max() > SYMMETRY_TOL * scale:
            raise AnalysisError("distance matrix is asymmetric beyond tolerance")

    def lookup(self, a, b):
        return float(self.values[self.codes.index(a), self.codes.index(b)])

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["language", *self.codes])
        for code, row in zip(self.codes, self.values):
            writer.writerow([code, *[repr(float(v)) for v in row]])
        return out.getvalue()

    @classmethod
    def from_csv(cls, text, metadata=None):
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if not header or header[0] != "language":
            raise AnalysisError("distance CSV must start with a 'language' header column")
        codes = tuple(header[1:])
        rows = {}
        for row in reader:
            if not row:
                continue
            if len(row) != len(codes) + 1:
                raise AnalysisError(f"row {row[0]!r}: expected {len(codes) + 1} cells")
            if any(cell.strip() == "" for cell in row[1:]):
                raise AnalysisError(f"row {row[0]!r}: missing cell")
            rows[row[0]] = [float(cell) for cell in row[1:]]
        missing = [c for c in codes if c not in rows]
        if missing:
            raise AnalysisError(f"rows missing for languages: {missing}")
        values = np.asarray([rows[c] for c in codes], dtype=np.float64)
        return cls(codes=codes, values=values, metadata=metadata or {})


@dataclass(frozen=True)
class TransferTable:
    """LAS[source][target] for models fine-tuned per source language."""

    codes: tuple
    values: np.ndarray  # percentages in [0, 100]

    def __post_init__(self):
        n = len(self.codes)
        if self.values.shape != (n, n):
            raise AnalysisError(f"table shape {self.values.shape} does not match {n} codes")
        if not np.isfinite(self.values).all():
            raise AnalysisError("transfer table has non-finite entries")
        if (self.values < 0).any() or (self.values > 100).any():
            raise AnalysisError("attachment scores must lie in [0, 100]")

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if not header or header[0] != "source":
            raise AnalysisError("LAS CSV must start with a 'source' header column")
        codes = tuple(header[1:])
        rows = {}
        for row in reader:
            if not row:
                continue
            if len(row) != len(codes) + 1 or any(cell.strip() == "" for cell in row[1:]):
                raise AnalysisError(f"row {row[0]!r}: missing cell")
            rows[row[0]] = [float(cell) for cell in row[1:]]
        missing = [c for c in codes if c not in rows]
        if missing:
            raise AnalysisError(f"rows missing for sources: {missing}")
        return cls(codes=codes, values=np.asarray([rows[c] for c in codes]))

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["source", *self.codes])
        for code, row in zip(self.codes, self.values):
            writer.writerow([code, *[repr(float(v)) for v in row]])
        return out.getvalue()


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p_value: float
    n: int
    defined: bool = True


def _midranks(x):
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    sorted_x = x[order]
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y, method="t"):
    """Spearman's rank correlation with average ranks for ties.

    The p-value uses the t approximation with n-2 degrees of freedom;
    method="exact" enumerates all rank permutations instead (n <= 8 only).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-D and the same length")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 observations")
    rx = _midranks(x)
    ry = _midranks(y)
    sx = rx.std()
    sy = ry.std()
    if sx == 0 or sy == 0:
        return SpearmanResult(rho=float("nan"), p_value=float("nan"), n=n, defined=False)
    if np.array_equal(rx, ry):
        rho = 1.0  # identical rank vectors: correlation is exactly 1
    elif np.array_equal(rx + ry, np.full(n, n + 1.0)):
        rho = -1.0  # exactly reversed ranks
    else:
        rho = float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))
        rho = min(max(rho, -1.0), 1.0)
    if method == "exact":
        if n > 8:
            raise ValueError("exact permutation p-value is limited to n <= 8")
        hits = 0
        total = 0
        for perm in itertools.permutations(range(n)):
            rp = ry[list(perm)]
            r = float(((rx - rx.mean()) * (rp - rp.mean())).mean() / (sx * sy))
            total += 1
            if abs(r) >= abs(rho) - 1e-12:
                hits += 1
        return SpearmanResult(rho=rho, p_value=hits / total, n=n)
    if abs(rho) >= 1.0:
        return SpearmanResult(rho=rho, p_value=0.0, n=n)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(stats.t.sf(abs(t), n - 2))
    return SpearmanResult(rho=rho, p_value=min(p, 1.0), n=n)


def las_drop(table):
    """Row-wise LAS drop: in-language score minus transfer score."""
    diag = np.diag(table.values)
    return diag[:, None] - table.values


def ndcg_at_k(order, relevances, k=3):
    """Discounted-cumulative-gain ratio of a predicted ranking, in [0, 1]."""
    if k < 1:
        raise ValueError("k must be >= 1")
    missing = [c for c in order if c not in relevances]
    if missing:
        raise AnalysisError(f"relevance missing for candidates: {missing}")
    rels = np.asarray([relevances[c] for c in order], dtype=np.float64)
    if (rels < 0).any():
        raise ValueError("relevances must be nonnegative")
    discounts = 1.0 / np.log2(np.arange(2, len(rels) + 2))
    dcg = float((rels[:k] * discounts[: min(k, len(rels))]).sum())
    ideal = np.sort(np.asarray(list(relevances.values()), dtype=np.float64))[::-1]
    idcg = float((ideal[:k] * discounts[: min(k, len(ideal))]).sum())
    if idcg == 0:
        return 1.0
    return dcg / idcg


def relevance_grades(las_row):
    """Gold relevances from LAS scores, shifted up only if any are negative."""
    lowest = min(las_row.values())
    shift = -lowest if lowest < 0 else 0.0
    return {code: score + shift for code, score in las_row.items()}


# ---------------------------------------------------------------------------
# Agglomerative clustering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterNode:
    height: float
    leaves: tuple  # sorted language codes under this node
    children: tuple = ()

    @property
    def is_leaf(self):
        return not self.children


@dataclass(frozen=True)
class ClusterTree:
    root: ClusterNode
    linkage: str
    merges: tuple  # ((leaves_a, leaves_b, height), ...) in merge order
    metadata: dict = field(default_factory=dict)

    def newick(self):
        """Newick text with ultrametric branch lengths (leaf depth = height/2)."""

        def render(node, parent_height):
            length = (parent_height - node.height) / 2.0
            if node.is_leaf:
                return f"{node.leaves[0]}:{length!r}"
            inner = ",".join(render(c, node.height) for c in node.children)
            return f"({inner}):{length!r}"

        if self.root.is_leaf:
            return f"{self.root.leaves[0]};"
        inner = ",".join(render(c, self.root.height) for c in self.root.children)
        return f"({inner});"


def _cluster_distance(cross, linkage):
    if linkage == "single":
        return cross.min()
    if linkage == "complete":
        return cross.max()
    return cross.mean()


def agglomerative_cluster(matrix, linkage="average"):
    """Bottom-up merging with deterministic lexicographic tie-breaking."""
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    n = len(matrix.codes)
    if n < 2:
        raise AnalysisError("need at least 2 languages to cluster")
    index = {code: i for i, code in enumerate(matrix.codes)}
    clusters = [ClusterNode(height=0.0, leaves=(code,)) for code in sorted(matrix.codes)]
    merges = []
    while len(clusters) > 1:
        best = None
        for i, a in enumerate(clusters):
            rows = [index[c] for c in a.leaves]
            for b in clusters[i + 1 :]:
                cols = [index[c] for c in b.leaves]
                cross = matrix.values[np.ix_(rows, cols)]
                d = float(_cluster_distance(cross, linkage))
                key = (d, a.leaves, b.leaves)
                if best is None or key < best[0]:
                    best = (key, a, b)
        (height, _, _), a, b = best
        merged_leaves = tuple(sorted(a.leaves + b.leaves))
        merged = ClusterNode(height=height, leaves=merged_leaves, children=(a, b))
        clusters = [c for c in clusters if c is not a and c is not b]
        pos = 0
        while pos < len(clusters) and clusters[pos].leaves < merged_leaves:
            pos += 1
        clusters.insert(pos, merged)
        merges.append((a.leaves, b.leaves, height))
    return ClusterTree(
        root=clusters[0],
        linkage=linkage,
        merges=tuple(merges),
        metadata=dict(matrix.metadata),
    )


# ---------------------------------------------------------------------------
# PCA
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PcaProjection:
    projected: np.ndarray  # (n, dims)
    components: np.ndarray  # (dims, original dim)
    mean: np.ndarray
    explained_variance: np.ndarray  # non-increasing

    def reconstruct(self):
        return self.projected @ self.components + self.mean


def pca_project(X, dims):
    """Project onto the top principal directions by explained variance."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or len(X) < 2:
        raise ValueError("need a 2-D array with at least 2 rows")
    if dims < 1 or dims > X.shape[1]:
        raise ValueError(f"dims must be in 1..{X.shape[1]}")
    mean = X.mean(axis=0)
    centered = X - mean
    full = dims > min(X.shape[0], X.shape[1])
    _, s, vt = np.linalg.svd(centered, full_matrices=full)
    # deterministic sign: largest-magnitude loading of each component positive
    flip = np.sign(vt[np.arange(len(vt)), np.abs(vt).argmax(axis=1)])
    flip[flip == 0] = 1.0
    vt = vt * flip[:, None]
    variance = np.zeros(max(dims, len(s)))
    variance[: len(s)] = s**2 / (len(X) - 1)
    return PcaProjection(
        projected=centered @ vt[:dims].T,
        components=vt[:dims],
        mean=mean,
        explained_variance=variance[:dims],
    )


# ---------------------------------------------------------------------------
# Measure comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureComparison:
    rho: float
    p_value: float
    n_pairs: int
    rows: tuple  # (pair_label, value_a, value_b)


def compare_measures(a, b, row=None):
    """Rank-correlate two distance matrices over their shared languages.

    By default the shared upper triangles are compared; with `row` set to a
    language code, the two distance profiles of that single language are
    compared instead (per-source analyses).
    """
    shared = sorted(set(a.codes) & set(b.codes))
    rows = []
    if row is not None:
        if row not in shared:
            raise AnalysisError(f"language {row!r} absent from one of the matrices")
        for code in shared:
            if code == row:
                continue
            rows.append((f"{row}-{code}", a.lookup(row, code), b.lookup(row, code)))
    else:
        for la, lb in itertools.combinations(shared, 2):
            rows.append((f"{la}-{lb}", a.lookup(la, lb), b.lookup(la, lb)))
    if len(rows) < 3:
        raise AnalysisError(f"need at least 3 shared pairs, got {len(rows)}")
    result = spearman([r[1] for r in rows], [r[2] for r in rows])
    return MeasureComparison(
        rho=result.rho, p_value=result.p_value, n_pairs=len(rows), rows=tuple(rows)
    )


def scatter_csv(comparison, name_a="measure_a", name_b="measure_b"):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["pair", name_a, name_b])
    for label, va, vb in comparison.rows:
        writer.writerow([label, repr(float(va)), repr(float(vb))])
    return out.getvalue()
