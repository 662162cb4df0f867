"""Gradient-boosted regression trees, written out in full.

Each stage fits a depth-limited tree to the current residuals with an exact
split search: every feature, every distinct threshold, best variance
reduction, ties broken by lowest feature index then lowest threshold. No
feature or row subsampling, so training is deterministic and permutation of
the training rows cannot change the model on distinct-valued data.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import RegressionDataError
from .typology import SENTINEL, feature_distance_vector
from ._util import substream

DEFAULT_ESTIMATORS = 100
DEFAULT_MAX_DEPTH = 3
DEFAULT_LEARNING_RATE = 0.1

# relative gain below which a split is considered noise, not structure
_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class TreeNode:
    feature: int = None
    threshold: float = None
    left: "TreeNode" = None
    right: "TreeNode" = None
    value: float = None
    gain: float = 0.0  # SSE reduction achieved by this split

    @property
    def is_leaf(self):
        return self.value is not None

    def to_dict(self):
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "gain": self.gain,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj):
        if "value" in obj:
            return cls(value=float(obj["value"]))
        return cls(
            feature=int(obj["feature"]),
            threshold=float(obj["threshold"]),
            gain=float(obj.get("gain", 0.0)),
            left=cls.from_dict(obj["left"]),
            right=cls.from_dict(obj["right"]),
        )


def _best_split(X, y, min_samples_leaf):
    """Exhaustive scan; returns (feature, threshold, gain) or None."""
    n = len(y)
    sse_parent = float((y * y).sum() - y.sum() ** 2 / n)
    if sse_parent <= 0:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]
    csum = np.cumsum(ys, axis=0)
    csq = np.cumsum(ys * ys, axis=0)
    k = np.arange(1, n, dtype=np.float64)[:, None]
    left_sse = csq[:-1] - csum[:-1] ** 2 / k
    right_sse = (csq[-1] - csq[:-1]) - (csum[-1] - csum[:-1]) ** 2 / (n - k)
    gains = sse_parent - left_sse - right_sse
    valid = Xs[:-1] < Xs[1:]
    if min_samples_leaf > 1:
        sizes = np.arange(1, n)[:, None]
        valid &= (sizes >= min_samples_leaf) & (n - sizes >= min_samples_leaf)
    gains = np.where(valid, gains, -np.inf)
    best = gains.max()
    if not np.isfinite(best) or best <= _MIN_GAIN * sse_parent:
        return None
    rows, cols = np.nonzero(gains == best)
    candidates = sorted(
        (int(f), (Xs[i, f] + Xs[i + 1, f]) / 2.0) for i, f in zip(rows, cols)
    )
    feature, threshold = candidates[0]
    return feature, float(threshold), float(best)


def _build_tree(X, y, depth, max_depth, min_samples_leaf):
    if depth >= max_depth or len(y) < max(2, 2 * min_samples_leaf):
        return TreeNode(value=float(y.mean()))
    split = _best_split(X, y, min_samples_leaf)
    if split is None:
        return TreeNode(value=float(y.mean()))
    feature, threshold, gain = split
    mask = X[:, feature] <= threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        gain=gain,
        left=_build_tree(X[mask], y[mask], depth + 1, max_depth, min_samples_leaf),
        right=_build_tree(X[~mask], y[~mask], depth + 1, max_depth, min_samples_leaf),
    )


def _tree_predict(node, X, out, idx):
    if node.is_leaf:
        out[idx] = node.value
        return
    mask = X[idx, node.feature] <= node.threshold
    _tree_predict(node.left, X, out, idx[mask])
    _tree_predict(node.right, X, out, idx[~mask])


def _eval_tree(node, X):
    out = np.empty(len(X))
    _tree_predict(node, X, out, np.arange(len(X)))
    return out


class _CompiledForest:
    """Flat node tables for evaluating every tree of a model at once.

    Leaves point to themselves, so a fixed number of descent steps parks
    every sample at its leaf regardless of the individual tree shapes.
    """

    def __init__(self, trees):
        feats, thrs, lefts, rights, vals = [], [], [], [], []
        self.roots = []
        self.depth = 0

        def add(node, depth):
            self.depth = max(self.depth, depth)
            pos = len(feats)
            feats.append(node.feature if not node.is_leaf else 0)
            thrs.append(node.threshold if not node.is_leaf else 0.0)
            vals.append(node.value if node.is_leaf else 0.0)
            lefts.append(pos)
            rights.append(pos)
            if not node.is_leaf:
                lefts[pos] = add(node.left, depth + 1)
                rights[pos] = add(node.right, depth + 1)
            return pos

        for tree in trees:
            self.roots.append(add(tree, 0))
        self.feat = np.asarray(feats, dtype=np.intp)
        self.thr = np.asarray(thrs)
        self.left = np.asarray(lefts, dtype=np.intp)
        self.right = np.asarray(rights, dtype=np.intp)
        self.val = np.asarray(vals)
        self.roots = np.asarray(self.roots, dtype=np.intp)

    def sum_outputs(self, X):
        at = np.broadcast_to(self.roots, (len(X), len(self.roots))).copy()
        rows = np.arange(len(X))[:, None]
        for _ in range(self.depth):
            xv = X[rows, self.feat[at]]
            step = np.where(xv <= self.thr[at], self.left[at], self.right[at])
            at = step
        return self.val[at].sum(axis=1)


@dataclass(frozen=True)
class GbdtModel:
    init_value: float
    trees: tuple
    learning_rate: float
    n_features: int
    feature_ids: tuple = None
    imputation: dict = None  # {"mode": "mean"|"sentinel", "table": {fid: value}}
    train_mse: tuple = ()  # MSE on the training data after each stage
    _compiled: object = field(default=None, init=False, repr=False, compare=False)

    def to_json(self):
        return json.dumps(
            {
                "init_value": self.init_value,
                "learning_rate": self.learning_rate,
                "n_features": self.n_features,
                "feature_ids": list(self.feature_ids) if self.feature_ids else None,
                "imputation": self.imputation,
                "train_mse": list(self.train_mse),
                "trees": [t.to_dict() for t in self.trees],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(
            init_value=float(obj["init_value"]),
            trees=tuple(TreeNode.from_dict(t) for t in obj["trees"]),
            learning_rate=float(obj["learning_rate"]),
            n_features=int(obj["n_features"]),
            feature_ids=tuple(obj["feature_ids"]) if obj.get("feature_ids") else None,
            imputation=obj.get("imputation"),
            train_mse=tuple(obj.get("train_mse", ())),
        )


def _impute(X, feature_ids, imputation):
    X = np.array(X, dtype=np.float64)
    if imputation is None:
        return X
    missing = np.isnan(X)
    if imputation.get("mode") == "sentinel":
        X[missing] = SENTINEL
        return X
    table = imputation["table"]
    for col in np.nonzero(missing.any(axis=0))[0]:
        fid = feature_ids[col] if feature_ids else str(col)
        if fid not in table:
            raise RegressionDataError(f"no imputation value for feature {fid!r}")
        X[missing[:, col], col] = table[fid]
    return X


def fit_gbdt(
    X,
    y,
    n_estimators=DEFAULT_ESTIMATORS,
    max_depth=DEFAULT_MAX_DEPTH,
    learning_rate=DEFAULT_LEARNING_RATE,
    min_samples_leaf=1,
    feature_ids=None,
    imputation=None,
):
    """Boosted squared-error regression. Training MSE never increases."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one target per row")
    if len(y) < 2:
        raise ValueError("need at least 2 training rows")
    X = _impute(X, feature_ids, imputation)
    if np.isnan(X).any():
        raise RegressionDataError("NaN features after imputation")
    if not np.isfinite(y).all():
        raise RegressionDataError("non-finite regression targets")

    init = float(y.mean())
    pred = np.full(len(y), init)
    trees = []
    mse_path = []
    for _ in range(n_estimators):
        tree = _build_tree(X, y - pred, 0, max_depth, min_samples_leaf)
        pred = pred + learning_rate * _eval_tree(tree, X)
        trees.append(tree)
        mse_path.append(float(((y - pred) ** 2).mean()))
    return GbdtModel(
        init_value=init,
        trees=tuple(trees),
        learning_rate=learning_rate,
        n_features=X.shape[1],
        feature_ids=tuple(feature_ids) if feature_ids else None,
        imputation=imputation,
        train_mse=tuple(mse_path),
    )


def predict(model, X):
    """Model output for a single vector or a matrix of rows."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise RegressionDataError(
            f"expected {model.n_features} features, got {X.shape[1]}"
        )
    X = _impute(X, model.feature_ids, model.imputation)
    if np.isnan(X).any():
        raise RegressionDataError("NaN features after imputation")
    if not model.trees:
        out = np.full(len(X), model.init_value)
        return float(out[0]) if single else out
    if model._compiled is None:
        object.__setattr__(model, "_compiled", _CompiledForest(model.trees))
    out = model.init_value + model.learning_rate * model._compiled.sum_outputs(X)
    return float(out[0]) if single else out


def _r2(y_true, y_pred):
    sst = float(((y_true - y_true.mean()) ** 2).sum())
    if sst == 0:
        return None
    return 1.0 - float(((y_true - y_pred) ** 2).sum()) / sst


@dataclass(frozen=True)
class CvResult:
    r2_per_fold: tuple  # None where the fold target had zero variance
    r2_mean: float


def cross_validate(X, y, k=10, seed=0, **fit_params):
    """Shuffled k-fold cross-validation; R^2 on each held-out fold."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) < k:
        raise ValueError(f"need at least k={k} rows, got {len(X)}")
    rng = substream(seed, "cv")
    order = rng.permutation(len(X))
    folds = np.array_split(order, k)
    scores = []
    for fold in folds:
        train = np.setdiff1d(order, fold)
        model = fit_gbdt(X[train], y[train], **fit_params)
        scores.append(_r2(y[fold], predict(model, X[fold])))
    defined = [s for s in scores if s is not None]
    return CvResult(
        r2_per_fold=tuple(scores),
        r2_mean=float(np.mean(defined)) if defined else float("nan"),
    )


def cross_validate_leave_one_language_out(X, y, pairs, **fit_params):
    """Hold out every pair touching one language at a time; R^2 per language."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    languages = sorted({lang for pair in pairs for lang in pair})
    scores = {}
    for lang in languages:
        test = np.asarray([lang in pair for pair in pairs])
        if test.all() or not test.any():
            continue
        model = fit_gbdt(X[~test], y[~test], **fit_params)
        scores[lang] = _r2(y[test], predict(model, X[test]))
    return scores


@dataclass(frozen=True)
class ImportanceReport:
    feature_ids: tuple
    impurity: np.ndarray  # normalized, sums to 1 when any split exists
    permutation_mean: np.ndarray
    permutation_std: np.ndarray

    def to_csv(self):
        order = np.argsort(-self.permutation_mean, kind="stable")
        lines = ["feature,impurity_importance,permutation_mean,permutation_std"]
        for i in order:
            lines.append(
                f"{self.feature_ids[i]},{self.impurity[i]!r},"
                f"{self.permutation_mean[i]!r},{self.permutation_std[i]!r}"
            )
        return "\n".join(lines) + "\n"


def impurity_importance(model):
    """Summed split gains per feature, normalized to total 1."""
    totals = np.zeros(model.n_features)

    def walk(node):
        if node.is_leaf:
            return
        totals[node.feature] += node.gain
        walk(node.left)
        walk(node.right)

    for tree in model.trees:
        walk(tree)
    total = totals.sum()
    return totals / total if total > 0 else totals


def permutation_importance(model, X, y, repeats=30, seed=0):
    """Mean and std, over shuffles, of the R^2 drop when one column is scrambled."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) < 2:
        raise ValueError("need at least 2 rows")
    rng = substream(seed, "permutation")
    baseline = _r2(y, predict(model, X))
    if baseline is None:
        raise RegressionDataError("target has zero variance; R^2 undefined")
    drops = np.empty((repeats, X.shape[1]))
    for r in range(repeats):
        for col in range(X.shape[1]):
            shuffled = X.copy()
            shuffled[:, col] = shuffled[rng.permutation(len(X)), col]
            drops[r, col] = baseline - _r2(y, predict(model, shuffled))
    return drops.mean(axis=0), drops.std(axis=0)


def importance_report(model, X, y, repeats=30, seed=0):
    mean, std = permutation_importance(model, X, y, repeats=repeats, seed=seed)
    ids = model.feature_ids or tuple(str(i) for i in range(model.n_features))
    return ImportanceReport(
        feature_ids=ids,
        impurity=impurity_importance(model),
        permutation_mean=mean,
        permutation_std=std,
    )


@dataclass(frozen=True)
class SourceCandidate:
    language: str
    predicted_distance: float


def select_source(model, target, candidates):
    """Rank candidate source languages by predicted distance to the target.

    Ascending order: the first entry is the recommended source. Ties fall
    back to the language code so the ranking is total.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    if model.feature_ids is None:
        raise RegressionDataError("model lacks feature ids; cannot build distance vectors")
    ranked = []
    for cand in candidates:
        v = feature_distance_vector(cand, target, model.feature_ids, imputation="none")
        value = predict(model, v.distances)
        ranked.append(SourceCandidate(language=cand.language, predicted_distance=float(value)))
    ranked.sort(key=lambda c: (c.predicted_distance, c.language))
    return ranked
