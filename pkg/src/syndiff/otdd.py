"""Optimal transport dataset distance between labeled vector datasets.

The ground space is feature x label. Feature cost is Euclidean; label cost
is the p-Wasserstein distance between the label-conditional empirical
distributions, so two datasets are close when their per-relation clouds
occupy similar regions of the representation space. The joint metric is

    d((x, y), (x', y')) = (||x - x'||^p + W_p(y, y')^p)^(1/p)

and the dataset distance is the entropic-regularized optimal transport cost
between the two empirical joint distributions under that metric, solved by
log-domain Sinkhorn iterations.
"""

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import EmptyDatasetError, SinkhornNumericalError

LABEL_MODES = ("empirical-sinkhorn", "gaussian-bures")
COST_MODES = ("squared", "plain")

DEFAULT_EPS = 0.1
DEFAULT_MAX_ITER = 10000
DEFAULT_MARGINAL_TOL = 1e-6


@dataclass(frozen=True)
class OtddConfig:
    """Knobs of the transport solve.

    cost_mode "squared" runs the outer solve on d^p and takes the p-th root
    (a true p-Wasserstein distance); "plain" runs directly on d and reports
    the raw transport cost. Results record which mode produced them, since
    the two are not numerically comparable.
    """

    p: float = 2.0
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    marginal_tol: float = DEFAULT_MARGINAL_TOL
    label_mode: str = "empirical-sinkhorn"
    cost_mode: str = "squared"
    gaussian_reg: float = 1e-6
    block_size: int = 1024

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"order p must be >= 1, got {self.p}")
        if self.eps <= 0:
            raise ValueError(f"regularization eps must be > 0, got {self.eps}")
        if self.label_mode not in LABEL_MODES:
            raise ValueError(f"label_mode must be one of {LABEL_MODES}")
        if self.cost_mode not in COST_MODES:
            raise ValueError(f"cost_mode must be one of {COST_MODES}")
        if self.label_mode == "gaussian-bures" and self.p != 2:
            raise ValueError("gaussian-bures label mode is defined only for p=2")


@dataclass(frozen=True)
class SinkhornResult:
    coupling: np.ndarray
    cost: float  # <coupling, C>
    objective: float  # cost - eps * H(coupling); decreases as eps grows
    converged: bool
    iterations: int
    marginal_error: float


@dataclass(frozen=True)
class LabelDistances:
    labels_a: tuple
    labels_b: tuple
    values: np.ndarray  # (len(labels_a), len(labels_b)) of W_p distances
    converged: bool = True

    def lookup(self, label_a, label_b):
        return self.values[self.labels_a.index(label_a), self.labels_b.index(label_b)]


@dataclass(frozen=True)
class OtddResult:
    language_a: str
    language_b: str
    model_id: str
    layer: object
    distance: float
    label_distances: LabelDistances
    converged: bool
    n_a: int
    n_b: int
    config: OtddConfig = field(repr=False, default=None)


def euclidean_cost(xa, xb, squared=False, block_size=1024):
    """Pairwise Euclidean (or squared Euclidean) costs, built in row blocks."""
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    if xa.ndim != 2 or xb.ndim != 2 or xa.shape[1] != xb.shape[1]:
        raise ValueError(
            f"incompatible feature widths: {xa.shape} vs {xb.shape}"
        )
    metric = "sqeuclidean" if squared else "euclidean"
    out = np.empty((xa.shape[0], xb.shape[0]), dtype=np.float64)
    for start in range(0, xa.shape[0], block_size):
        stop = min(start + block_size, xa.shape[0])
        out[start:stop] = cdist(xa[start:stop], xb, metric=metric)
    return out


def _check_marginal(v, n, name):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"{name} has shape {v.shape}, expected ({n},)")
    if (v < 0).any():
        raise ValueError(f"{name} has negative entries")
    if abs(v.sum() - 1.0) > 1e-8:
        raise ValueError(f"{name} sums to {v.sum()}, expected 1")
    return v


def _logsumexp(M, axis):
    mx = M.max(axis=axis, keepdims=True)
    safe = np.where(np.isfinite(mx), mx, 0.0)
    with np.errstate(divide="ignore"):
        return np.log(np.exp(M - safe).sum(axis=axis)) + safe.squeeze(axis)


def sinkhorn(
    C,
    a,
    b,
    eps=DEFAULT_EPS,
    max_iter=DEFAULT_MAX_ITER,
    marginal_tol=DEFAULT_MARGINAL_TOL,
    anneal=False,
):
    """Entropic-regularized optimal transport by log-domain scaling.

    Alternates the two potential updates until the worst marginal violation
    of the implied plan drops below `marginal_tol` or `max_iter` iterations
    elapse; a non-converged run is flagged, not raised. The violation is
    read off the potential updates themselves (after the column update the
    column sums are exact, and the row sums equal a * exp(F_old - F_new)),
    so checking costs nothing.

    With `anneal`, the regularization starts at the cost scale and decays
    geometrically to `eps`, warm-starting the potentials - useful when
    `eps` is far below the typical cost, with the same fixed point.
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2:
        raise ValueError("cost matrix must be 2-D")
    if not np.isfinite(C).all() or (C < 0).any():
        raise ValueError("cost matrix entries must be finite and nonnegative")
    n, m = C.shape
    a = _check_marginal(a, n, "row marginal")
    b = _check_marginal(b, m, "column marginal")
    if eps <= 0:
        raise ValueError("eps must be positive")

    with np.errstate(divide="ignore"):
        la = np.log(a)
        lb = np.log(b)

    if anneal:
        levels = [max(float(np.median(C)), eps)]
        while levels[-1] > eps * 2:
            levels.append(levels[-1] / 2)
        levels.append(eps)
    else:
        levels = [eps]

    f = np.zeros(n)
    g = np.zeros(m)
    iterations = 0
    for level_idx, level_eps in enumerate(levels):
        final = level_idx == len(levels) - 1
        Ce = C / level_eps
        F = f / level_eps
        G = g / level_eps
        budget = (max_iter - iterations) if final else min(50, max(0, max_iter - iterations))
        tol = marginal_tol if final else max(marginal_tol, 1e-3)
        for step in range(budget):
            iterations += 1
            F_new = la - _logsumexp(G[None, :] - Ce, axis=1)
            G = lb - _logsumexp(F_new[:, None] - Ce, axis=0)
            if np.isnan(F_new).any() or np.isnan(G).any():
                raise SinkhornNumericalError(
                    "scaling produced NaN; increase eps or rescale the costs"
                )
            row_err = np.abs(a * np.expm1(F - F_new)).max()
            F = F_new
            # the error identity needs G derived from F at this same level,
            # which only holds from the second step on
            if step >= 1 and row_err <= tol:
                break
        f = F * level_eps
        g = G * level_eps

    Ce = C / eps
    plan = np.exp((f[:, None] + g[None, :]) / eps - Ce)
    err = max(np.abs(plan.sum(axis=1) - a).max(), np.abs(plan.sum(axis=0) - b).max())
    cost = float((plan * C).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(plan > 0, plan * np.log(plan), 0.0)
    entropy = float(plan.sum() - plogp.sum())
    return SinkhornResult(
        coupling=plan,
        cost=cost,
        objective=cost - eps * entropy,
        converged=bool(err <= marginal_tol),
        iterations=iterations,
        marginal_error=float(err),
    )


def _wasserstein_empirical(xa, xb, cfg):
    """W_p between two uniform empirical clouds via Sinkhorn on d^p."""
    if cfg.p == 2:
        C = euclidean_cost(xa, xb, squared=True, block_size=cfg.block_size)
    else:
        C = euclidean_cost(xa, xb, block_size=cfg.block_size) ** cfg.p
    a = np.full(len(xa), 1.0 / len(xa))
    b = np.full(len(xb), 1.0 / len(xb))
    res = sinkhorn(C, a, b, eps=cfg.eps, max_iter=cfg.max_iter, marginal_tol=cfg.marginal_tol)
    return max(res.cost, 0.0) ** (1.0 / cfg.p), res.converged


def _psd_sqrt(M):
    w, V = np.linalg.eigh((M + M.T) / 2.0)
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T


def _wasserstein_gaussian(xa, xb, reg):
    """Closed-form W_2 between Gaussian fits of the two clouds."""
    mu_a = xa.mean(axis=0)
    mu_b = xb.mean(axis=0)
    d = xa.shape[1]
    ca = (xa - mu_a).T @ (xa - mu_a) / len(xa) + reg * np.eye(d)
    cb = (xb - mu_b).T @ (xb - mu_b) / len(xb) + reg * np.eye(d)
    root_a = _psd_sqrt(ca)
    cross = np.linalg.eigvalsh(root_a @ cb @ root_a)
    bures = np.trace(ca) + np.trace(cb) - 2.0 * np.sqrt(np.clip(cross, 0.0, None)).sum()
    w2sq = float(((mu_a - mu_b) ** 2).sum() + max(bures, 0.0))
    return np.sqrt(w2sq), True


def label_distance_matrix(A, B, cfg=None, jobs=1):
    """W_p distances between every label class of A and every class of B."""
    cfg = cfg or OtddConfig()
    labels_a = sorted(A.label_set)
    labels_b = sorted(B.label_set)
    groups_a = {y: A.features[np.fromiter((l == y for l in A.labels), bool)] for y in labels_a}
    groups_b = {y: B.features[np.fromiter((l == y for l in B.labels), bool)] for y in labels_b}
    for side, groups in (("A", groups_a), ("B", groups_b)):
        empty = [y for y, x in groups.items() if len(x) == 0]
        if empty:
            raise EmptyDatasetError(f"label classes without samples in dataset {side}: {empty}")

    def entry(ya, yb):
        if cfg.label_mode == "gaussian-bures":
            return _wasserstein_gaussian(groups_a[ya], groups_b[yb], cfg.gaussian_reg)
        return _wasserstein_empirical(groups_a[ya], groups_b[yb], cfg)

    values = np.zeros((len(labels_a), len(labels_b)))
    pairs = [(i, j) for i in range(len(labels_a)) for j in range(len(labels_b))]
    all_converged = True
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda ij: entry(labels_a[ij[0]], labels_b[ij[1]]), pairs))
    else:
        results = [entry(labels_a[i], labels_b[j]) for i, j in pairs]
    for (i, j), (value, conv) in zip(pairs, results):
        values[i, j] = value
        all_converged = all_converged and conv
    return LabelDistances(
        labels_a=tuple(labels_a),
        labels_b=tuple(labels_b),
        values=values,
        converged=all_converged,
    )


def _content_key(ds):
    """Digest for canonical pair orientation.

    Labels enter only through their partition structure (first-occurrence
    numbering), so renaming labels cannot flip the orientation and change
    the floating-point path.
    """
    h = hashlib.sha256()
    h.update(ds.language.encode())
    h.update(ds.model_id.encode())
    h.update(str(ds.layer).encode())
    h.update(np.ascontiguousarray(ds.features, dtype=np.float64).tobytes())
    seen = {}
    partition = np.fromiter(
        (seen.setdefault(l, len(seen)) for l in ds.labels), dtype="<u4", count=len(ds.labels)
    )
    h.update(partition.tobytes())
    return h.digest()


def dataset_distance(A, B, cfg=None, jobs=1):
    """Optimal transport distance between two labeled datasets.

    The two inputs are internally put in a canonical order before solving,
    so d(A, B) and d(B, A) are the same floating-point number, not merely
    close. Label names never enter the arithmetic; only the per-class
    sample clouds do.
    """
    cfg = cfg or OtddConfig()
    if len(A) == 0 or len(B) == 0:
        raise EmptyDatasetError("dataset distance needs nonempty datasets on both sides")
    if A.features.shape[1] != B.features.shape[1]:
        raise ValueError(
            f"feature widths differ: {A.features.shape[1]} vs {B.features.shape[1]}"
        )

    swapped = _content_key(B) < _content_key(A)
    first, second = (B, A) if swapped else (A, B)

    label_dist = label_distance_matrix(first, second, cfg, jobs=jobs)
    index_a = {y: i for i, y in enumerate(label_dist.labels_a)}
    index_b = {y: i for i, y in enumerate(label_dist.labels_b)}
    ia = np.fromiter((index_a[l] for l in first.labels), dtype=np.intp)
    ib = np.fromiter((index_b[l] for l in second.labels), dtype=np.intp)

    p = cfg.p
    dyp = label_dist.values**p
    n, m = len(first), len(second)
    C = np.empty((n, m), dtype=np.float64)
    for start in range(0, n, cfg.block_size):
        stop = min(start + cfg.block_size, n)
        dx2 = cdist(first.features[start:stop], second.features, metric="sqeuclidean")
        dxp = dx2 if p == 2 else dx2 ** (p / 2.0)
        C[start:stop] = dxp + dyp[ia[start:stop]][:, ib]
    if cfg.cost_mode == "plain":
        C = C ** (1.0 / p)

    a = np.full(n, 1.0 / n)
    b = np.full(m, 1.0 / m)
    outer = sinkhorn(C, a, b, eps=cfg.eps, max_iter=cfg.max_iter, marginal_tol=cfg.marginal_tol)
    cost = max(outer.cost, 0.0)
    distance = cost ** (1.0 / p) if cfg.cost_mode == "squared" else cost

    if swapped:
        label_dist = LabelDistances(
            labels_a=label_dist.labels_b,
            labels_b=label_dist.labels_a,
            values=label_dist.values.T.copy(),
            converged=label_dist.converged,
        )

    model_id = A.model_id if A.model_id == B.model_id else f"{A.model_id}+{B.model_id}"
    layer = A.layer if A.layer == B.layer else f"{A.layer}+{B.layer}"
    return OtddResult(
        language_a=A.language,
        language_b=B.language,
        model_id=model_id,
        layer=layer,
        distance=float(distance),
        label_distances=label_dist,
        converged=outer.converged and label_dist.converged,
        n_a=len(A),
        n_b=len(B),
        config=cfg,
    )


def result_to_json(result):
    """JSON-ready mapping in the documented output schema."""
    return {
        "language_a": result.language_a,
        "language_b": result.language_b,
        "model_id": result.model_id,
        "layer": result.layer,
        "distance": result.distance,
        "converged": result.converged,
        "samples": {"a": result.n_a, "b": result.n_b},
        "config": asdict(result.config),
        "label_matrix": {
            "labels_a": list(result.label_distances.labels_a),
            "labels_b": list(result.label_distances.labels_b),
            "values": result.label_distances.values.tolist(),
        },
    }
