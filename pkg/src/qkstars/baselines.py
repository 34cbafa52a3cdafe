"""Classical comparison models: k-nearest neighbours and logistic regression."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass
class KnnModel:
    X: np.ndarray
    labels: np.ndarray
    k: int = 5

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.labels = np.asarray(self.labels)
        if len(self.X) == 0:
            raise ValidationError("KNN model has no training samples")
        if not 1 <= self.k <= len(self.X):
            raise ValidationError(f"k={self.k} must lie in [1, {len(self.X)}]")


def knn_fit(X, labels, k: int = 5) -> KnnModel:
    return KnnModel(X, labels, k)


def _vote(neigh_labels) -> object:
    classes, counts = np.unique(neigh_labels, return_counts=True)
    # np.unique sorts, so argmax picks the lexicographically smallest among tied classes
    return classes[np.argmax(counts)]


def knn_predict(model: KnnModel, x) -> object:
    """Majority label among the ``k`` nearest training points.

    Distance ties go to the lower training index, vote ties to the
    lexicographically smallest class.
    """
    return knn_predict_many(model, np.asarray(x, dtype=np.float64)[None, :])[0]


def knn_predict_many(model: KnnModel, X, chunk: int = 512) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.X.shape[1]:
        raise ValidationError(
            f"expected {model.X.shape[1]} features, got shape {X.shape}"
        )
    out = []
    for a in range(0, len(X), chunk):
        block = X[a:a + chunk]
        diff = block[:, None, :] - model.X[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        # stable sort keeps equal distances in training order
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : model.k]
        out.extend(_vote(model.labels[row]) for row in nearest)
    return np.asarray(out, dtype=model.labels.dtype)


@dataclass
class LogisticModel:
    """Binary weights ``w, b`` or one-vs-rest stacks ``W (n_classes, d), B``."""

    w: np.ndarray
    b: np.ndarray | float
    lam: float
    classes: list = field(default_factory=list)
    n_iter: int = 0
    grad_norm: float = 0.0
    history: list = field(default_factory=list, repr=False)

    @property
    def multiclass(self) -> bool:
        return np.ndim(self.w) == 2


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_loss(w, b, X, t, lam) -> float:
    """Mean log-loss for targets ``t`` in {0, 1} plus ``lam/2 ||w||^2``."""
    z = X @ w + b
    # log(1 + exp(-z)) for t=1, log(1 + exp(z)) for t=0
    loss = np.logaddexp(0.0, np.where(t > 0, -z, z))
    return float(loss.mean() + 0.5 * lam * np.dot(w, w))


def logistic_grad(w, b, X, t, lam):
    r = _sigmoid(X @ w + b) - t
    gw = X.T @ r / len(t) + lam * w
    gb = float(r.mean())
    return gw, gb


def _to_targets(y):
    y = np.asarray(y)
    vals = np.unique(y)
    if len(vals) != 2:
        raise ValidationError(f"logistic regression needs two classes, got {vals.tolist()}")
    return vals, (y == vals[1]).astype(np.float64)


def _gradient_descent(X, t, lam, lr, max_iter, grad_tol, track=False):
    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    gnorm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        gw, gb = logistic_grad(w, b, X, t, lam)
        gnorm = max(np.max(np.abs(gw)), abs(gb))
        if track:
            history.append(logistic_loss(w, b, X, t, lam))
        if gnorm <= grad_tol:
            break
        w = w - lr * gw
        b = b - lr * gb
    return w, b, it, float(gnorm), history


def logistic_train(X, y, lam: float = 1e-4, lr: float = 0.1, max_iter: int = 5000,
                   grad_tol: float = 1e-6, track_loss: bool = False) -> LogisticModel:
    """Full-batch gradient descent on the L2-regularised logistic loss.

    With two distinct labels the larger one is the positive class. With more
    than two, one binary problem per class (one-vs-rest) is solved.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = sorted(set(y.tolist()))
    if len(classes) < 2:
        raise ValidationError("training labels contain a single class")
    if len(classes) == 2:
        _, t = _to_targets(y)
        w, b, it, g, hist = _gradient_descent(X, t, lam, lr, max_iter, grad_tol, track_loss)
        return LogisticModel(w, b, lam, classes, it, g, hist)
    W, B, iters, gnorm = [], [], 0, 0.0
    for c in classes:
        t = (y == c).astype(np.float64)
        w, b, it, g, _ = _gradient_descent(X, t, lam, lr, max_iter, grad_tol)
        W.append(w)
        B.append(b)
        iters, gnorm = max(iters, it), max(gnorm, g)
    return LogisticModel(np.array(W), np.array(B), lam, classes, iters, gnorm)


def logistic_scores(model: LogisticModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if model.multiclass:
        return X @ model.w.T + model.b
    return X @ model.w + model.b


def logistic_predict(model: LogisticModel, x):
    """Label for one vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    scores = logistic_scores(model, x)
    classes = np.asarray(model.classes, dtype=object)
    if model.multiclass:
        pred = classes[np.argmax(scores, axis=1)]
    else:
        pred = np.where(_sigmoid(scores) >= 0.5, classes[1], classes[0])
    pred = np.asarray(pred.tolist())
    return pred[0] if single else pred
