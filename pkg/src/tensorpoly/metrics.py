"""Evaluation metrics and cross-validation orchestration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def pearson(y, yhat):
    """Sample Pearson correlation.

    Returns NaN when either argument has zero variance; callers must
    treat that as "undefined", never as zero correlation.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    yhat = np.asarray(yhat, dtype=float).reshape(-1)
    if y.shape[0] != yhat.shape[0]:
        raise ValueError("length mismatch")
    if y.shape[0] < 2:
        raise ValueError("pearson needs at least 2 points")
    dy = y - y.mean()
    dz = yhat - yhat.mean()
    denom = np.sqrt(np.sum(dy * dy) * np.sum(dz * dz))
    if denom == 0.0:
        return float("nan")
    return float(np.sum(dy * dz) / denom)


def rmse(y, yhat):
    """Root mean squared error."""
    y = np.asarray(y, dtype=float).reshape(-1)
    yhat = np.asarray(yhat, dtype=float).reshape(-1)
    if y.shape[0] != yhat.shape[0]:
        raise ValueError("length mismatch")
    if y.shape[0] == 0:
        raise ValueError("empty input")
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def accuracy(y_true, y_prob, threshold=0.5):
    """Fraction of correct {0,1} decisions at the given threshold."""
    y_true = np.asarray(y_true, dtype=float).reshape(-1)
    pred = (np.asarray(y_prob, dtype=float).reshape(-1) >= threshold).astype(float)
    if y_true.shape[0] != pred.shape[0]:
        raise ValueError("length mismatch")
    if y_true.shape[0] == 0:
        raise ValueError("empty input")
    return float(np.mean(pred == y_true))


def _check_binary(A, name):
    A = np.asarray(A)
    if not np.all((A == 0) | (A == 1)):
        raise ValueError(f"{name} must be binary 0/1")
    return A.astype(bool)


def f1_multilabel(Y_true, Y_pred):
    """Micro-averaged F1 pooled over all (example, label) cells.

    Defined as 0 when there are no positives anywhere in either matrix.
    """
    T = _check_binary(Y_true, "Y_true")
    P = _check_binary(Y_pred, "Y_pred")
    if T.shape != P.shape:
        raise ValueError(f"shape mismatch: {T.shape} vs {P.shape}")
    tp = int(np.sum(T & P))
    fp = int(np.sum(~T & P))
    fn = int(np.sum(T & ~P))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2.0 * tp / denom


def top_k_binarize(scores, k):
    """Set the k largest scores per row to 1, the rest to 0."""
    S = np.asarray(scores, dtype=float)
    if S.ndim != 2:
        raise ValueError("scores must be 2-d")
    k = min(int(k), S.shape[1])
    out = np.zeros_like(S, dtype=int)
    idx = np.argpartition(-S, k - 1, axis=1)[:, :k]
    np.put_along_axis(out, idx, 1, axis=1)
    return out


def correlation_ratio(layer_outputs):
    """Correlation ratio (eta squared) of per-layer prediction vectors.

    ``layer_outputs`` is (n_layers, m): between-layer variance of the
    layer means over total variance around the grand mean. Lies in
    [0, 1]; NaN when the total variance is zero.
    """
    A = np.asarray(layer_outputs, dtype=float)
    if A.ndim != 2:
        raise ValueError("layer_outputs must be a (n_layers, m) matrix")
    n_b, m = A.shape
    if n_b < 1 or m < 2:
        raise ValueError("need at least one layer and two examples")
    grand = A.mean()
    layer_means = A.mean(axis=1)
    between = m * np.sum((layer_means - grand) ** 2)
    total = np.sum((A - grand) ** 2)
    if total == 0.0:
        return float("nan")
    return float(between / total)


@dataclass
class CvPlan:
    """Seeded fold assignment; folds partition the rows, sizes differ by <= 1."""

    folds: int
    assignment: np.ndarray

    def test_indices(self, fold):
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignment != fold)


def make_cv_plan(m, folds, seed=0):
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if m < folds:
        raise ValueError("need at least as many examples as folds")
    rng = np.random.default_rng(seed)
    assignment = np.empty(m, dtype=int)
    assignment[rng.permutation(m)] = np.arange(m) % folds
    return CvPlan(folds=folds, assignment=assignment)


@dataclass
class CvResult:
    fold_pearson: list
    fold_rmse: list
    mean_pearson: float
    stderr_pearson: float
    mean_rmse: float
    stderr_rmse: float

    def to_dict(self):
        return {
            "fold_pearson": [float(v) for v in self.fold_pearson],
            "fold_rmse": [float(v) for v in self.fold_rmse],
            "mean_pearson": float(self.mean_pearson),
            "stderr_pearson": float(self.stderr_pearson),
            "mean_rmse": float(self.mean_rmse),
            "stderr_rmse": float(self.stderr_rmse),
        }


def _stderr(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def cross_validate(dataset, learner, folds, seed=0):
    """K-fold CV of a learner.

    ``learner`` takes a training Dataset and returns a predictor mapping
    a held-out Dataset to predictions of shape (m, n_y). Pearson and
    RMSE are averaged over output columns within each fold; learner
    failures are re-raised annotated with the fold index.
    """
    plan = make_cv_plan(dataset.m, folds, seed)
    fold_p, fold_r = [], []
    for f in range(folds):
        train = dataset.take(plan.train_indices(f))
        test = dataset.take(plan.test_indices(f))
        try:
            predictor = learner(train)
            yhat = np.asarray(predictor(test), dtype=float)
        except Exception as exc:
            raise RuntimeError(f"learner failed on fold {f}: {exc}") from exc
        if yhat.ndim == 1:
            yhat = yhat.reshape(-1, 1)
        cols_p = [pearson(test.Y[:, j], yhat[:, j]) for j in range(test.n_y)]
        cols_r = [rmse(test.Y[:, j], yhat[:, j]) for j in range(test.n_y)]
        fold_p.append(float(np.mean(cols_p)))
        fold_r.append(float(np.mean(cols_r)))
    return CvResult(
        fold_pearson=fold_p,
        fold_rmse=fold_r,
        mean_pearson=float(np.mean(fold_p)),
        stderr_pearson=_stderr(fold_p),
        mean_rmse=float(np.mean(fold_r)),
        stderr_rmse=_stderr(fold_r),
    )
