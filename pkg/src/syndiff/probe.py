"""Linear probe recovering relation labels from relation vectors.

Multinomial logistic regression trained by minibatch SGD with an L2 penalty
and early stopping on a held-out slice of the training data. Deliberately
minimal: the point of the probe is to measure what the vectors encode, not
to add modeling capacity.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateTaskError, ScoringError
from ._util import substream

# Eight penalty strengths spanning 1e-9 .. 1e-2.
DEFAULT_STRENGTHS = tuple(10.0**k for k in range(-9, -1))

DEFAULT_MAX_EPOCHS = 10000
DEFAULT_PATIENCE = 5
DEFAULT_BATCH_SIZE = 32
DEFAULT_LR = 0.01


@dataclass(frozen=True)
class ProbeModel:
    weights: np.ndarray  # (num_labels, dim)
    bias: np.ndarray  # (num_labels,)
    labels: tuple
    l2: float
    checkpoint_losses: tuple = ()  # dev loss at each accepted checkpoint

    def scores(self, X):
        return X @ self.weights.T + self.bias

    def predict(self, X):
        idx = np.argmax(self.scores(X), axis=1)
        return [self.labels[i] for i in idx]

    def to_json(self):
        return json.dumps(
            {
                "labels": list(self.labels),
                "l2": self.l2,
                "bias": self.bias.tolist(),
                "weights": self.weights.tolist(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(
            weights=np.asarray(obj["weights"], dtype=np.float64),
            bias=np.asarray(obj["bias"], dtype=np.float64),
            labels=tuple(obj["labels"]),
            l2=obj["l2"],
        )


@dataclass(frozen=True)
class ProbeReport:
    strengths: tuple
    accuracies: tuple
    mean_accuracy: float
    ci_low: float
    ci_high: float


def _softmax(scores):
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _cross_entropy(probs, y_idx):
    return float(-np.log(np.clip(probs[np.arange(len(y_idx)), y_idx], 1e-300, None)).mean())


def _stratified_split(y_idx, frac, rng):
    """Indices for a held-out slice with at least one item per class kept in train."""
    holdout = []
    for cls in np.unique(y_idx):
        members = np.flatnonzero(y_idx == cls)
        take = int(round(frac * len(members)))
        take = min(take, len(members) - 1)
        if take > 0:
            holdout.extend(rng.choice(members, size=take, replace=False))
    holdout = np.sort(np.asarray(holdout, dtype=np.intp))
    train = np.setdiff1d(np.arange(len(y_idx)), holdout)
    return train, holdout


def train_probe(
    train,
    l2=1e-4,
    max_epochs=DEFAULT_MAX_EPOCHS,
    patience=DEFAULT_PATIENCE,
    tol=1e-4,
    batch_size=DEFAULT_BATCH_SIZE,
    lr=DEFAULT_LR,
    seed=0,
):
    """Fit a :class:`ProbeModel` on a labeled dataset.

    10% of the items (stratified) are held out for early stopping: training
    stops after `patience` epochs without a dev-loss improvement above `tol`,
    and the best checkpoint is returned. The step size decays as the inverse
    square root of the update count. Fully deterministic given `seed`.
    """
    labels = sorted(train.label_set)
    if len(labels) < 2:
        raise DegenerateTaskError(f"need at least 2 labels to train a probe, got {labels}")
    index = {label: i for i, label in enumerate(labels)}
    X = train.features
    y_idx = np.fromiter((index[l] for l in train.labels), dtype=np.intp)

    rng = substream(seed, "probe")
    tr, dev = _stratified_split(y_idx, 0.1, rng)
    if len(dev) == 0:  # tiny dataset: stop on training loss instead
        tr = np.arange(len(y_idx))
        dev = tr
    Xtr, ytr = X[tr], y_idx[tr]
    Xdev, ydev = X[dev], y_idx[dev]

    k, d = len(labels), X.shape[1]
    W = np.zeros((k, d))
    b = np.zeros(k)
    best = (np.inf, W.copy(), b.copy())
    checkpoints = []
    stale = 0
    updates = 0
    for _ in range(max_epochs):
        order = rng.permutation(len(Xtr))
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            xb, yb = Xtr[batch], ytr[batch]
            probs = _softmax(xb @ W.T + b)
            probs[np.arange(len(batch)), yb] -= 1.0
            updates += 1
            step = lr / np.sqrt(updates)
            W -= step * (probs.T @ xb / len(batch) + l2 * W)
            b -= step * probs.mean(axis=0)
        dev_loss = _cross_entropy(_softmax(Xdev @ W.T + b), ydev)
        if dev_loss < best[0] - tol:
            best = (dev_loss, W.copy(), b.copy())
            checkpoints.append(dev_loss)
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break
    return ProbeModel(
        weights=best[1],
        bias=best[2],
        labels=tuple(labels),
        l2=l2,
        checkpoint_losses=tuple(checkpoints),
    )


def probe_accuracy(model, eval_ds):
    """Fraction of argmax-correct predictions on an evaluation dataset."""
    if len(eval_ds) == 0:
        raise ScoringError("accuracy of an empty dataset is undefined")
    unseen = eval_ds.label_set - set(model.labels)
    if unseen:
        raise ScoringError(f"evaluation labels unseen by the model: {sorted(unseen)}")
    predicted = model.predict(eval_ds.features)
    hits = sum(p == g for p, g in zip(predicted, eval_ds.labels))
    return hits / len(eval_ds)


def probe_sweep(train, dev, strengths=DEFAULT_STRENGTHS, seed=0, **sched):
    """One probe per penalty strength; accuracy mean and 95% CI across them."""
    if not strengths:
        raise ValueError("need at least one regularization strength")
    accuracies = []
    for l2 in strengths:
        model = train_probe(train, l2=l2, seed=seed, **sched)
        accuracies.append(probe_accuracy(model, dev))
    acc = np.asarray(accuracies)
    mean = float(acc.mean())
    if len(acc) > 1 and acc.std(ddof=1) > 0:
        half = stats.t.ppf(0.975, len(acc) - 1) * acc.std(ddof=1) / np.sqrt(len(acc))
    else:
        half = 0.0
    return ProbeReport(
        strengths=tuple(strengths),
        accuracies=tuple(accuracies),
        mean_accuracy=mean,
        ci_low=mean - half,
        ci_high=mean + half,
    )
