"""Soft-margin SVM on a precomputed kernel, trained with SMO.

The decision function is ``f(x) = sum_j alpha_j y_j k(x, x_j) + b``.
Multi-class problems use one-vs-rest with argmax over decision values.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceWarning, ValidationError

SUPPORT_THRESHOLD = 1e-8
_EPS = 1e-12


@dataclass
class SvmModel:
    alpha: np.ndarray
    b: float
    y: np.ndarray
    C: float
    tol: float = 1e-3
    converged: bool = True
    n_passes: int = 0
    max_kkt_violation: float = 0.0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alpha > SUPPORT_THRESHOLD)

    @property
    def dual_coef(self) -> np.ndarray:
        return self.alpha * self.y

    def dual_objective(self, K) -> float:
        return dual_objective(self.alpha, self.y, K)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.tolist(),
            "b": self.b,
            "y": self.y.astype(int).tolist(),
            "C": self.C,
            "tol": self.tol,
            "converged": self.converged,
            "n_passes": self.n_passes,
            "max_kkt_violation": self.max_kkt_violation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(
            alpha=np.asarray(d["alpha"], dtype=np.float64),
            b=float(d["b"]),
            y=np.asarray(d["y"], dtype=np.float64),
            C=float(d["C"]),
            tol=float(d.get("tol", 1e-3)),
            converged=bool(d.get("converged", True)),
            n_passes=int(d.get("n_passes", 0)),
            max_kkt_violation=float(d.get("max_kkt_violation", 0.0)),
        )


@dataclass
class MultiClassModel:
    classes: list
    models: list[SvmModel] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return all(m.converged for m in self.models)

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "models": [m.to_dict() for m in self.models]}

    @classmethod
    def from_dict(cls, d: dict) -> "MultiClassModel":
        return cls(list(d["classes"]), [SvmModel.from_dict(m) for m in d["models"]])


def dual_objective(alpha, y, K) -> float:
    """``W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij``."""
    K = np.asarray(K, dtype=np.float64)
    ay = np.asarray(alpha) * np.asarray(y)
    return float(np.sum(alpha) - 0.5 * ay @ K @ ay)


def kkt_violations(alpha, y, K, b, C) -> np.ndarray:
    """Amount by which each sample breaks the soft-margin KKT conditions."""
    K = np.asarray(K, dtype=np.float64)
    margin = y * (K @ (alpha * y) + b)
    viol = np.zeros_like(margin)
    at_zero = alpha <= SUPPORT_THRESHOLD
    at_c = alpha >= C - SUPPORT_THRESHOLD
    free = ~at_zero & ~at_c
    viol[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    viol[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    viol[free] = np.abs(margin[free] - 1.0)
    return viol


def _fit_bias(alpha, y, g, C) -> float:
    """Average over free support vectors, else midpoint of the feasible interval."""
    free = (alpha > SUPPORT_THRESHOLD) & (alpha < C - SUPPORT_THRESHOLD)
    if free.any():
        return float(np.mean(y[free] - g[free]))
    at_zero = alpha <= SUPPORT_THRESHOLD
    # alpha = 0 needs y f >= 1; alpha = C needs y f <= 1
    lower_mask = (at_zero & (y > 0)) | (~at_zero & (y < 0))
    upper_mask = (at_zero & (y < 0)) | (~at_zero & (y > 0))
    lo = np.max(y[lower_mask] - g[lower_mask]) if lower_mask.any() else None
    hi = np.min(y[upper_mask] - g[upper_mask]) if upper_mask.any() else None
    if lo is None:
        return float(hi)
    if hi is None:
        return float(lo)
    return float(0.5 * (lo + hi))


class _Smo:
    def __init__(self, K, y, C, tol):
        self.K = K
        self.y = y
        self.C = C
        self.tol = tol
        n = len(y)
        self.alpha = np.zeros(n)
        # error cache E_i = sum_j alpha_j y_j K_ij - y_i (bias excluded)
        self.E = -y.astype(np.float64).copy()
        self.n = n

    def _snap(self, a: float) -> float:
        # rounding leaves values like C - 1e-16 that would stay selectable forever
        if a < _EPS * self.C:
            return 0.0
        if a > self.C * (1.0 - _EPS):
            return self.C
        return a

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        K, y, C = self.K, self.y, self.C
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = y[i1], y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            L, H = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        if H - L < _EPS:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > _EPS:
            a2_new = a2 + y2 * (E1 - E2) / eta
            a2_new = min(max(a2_new, L), H)
        else:
            # dual gain along the constraint line: y2 (E1 - E2) t - eta t^2 / 2
            def gain(t):
                return y2 * (E1 - E2) * t - 0.5 * eta * t * t

            obj_l, obj_h = gain(L - a2), gain(H - a2)
            if obj_l > obj_h + _EPS:
                a2_new = L
            elif obj_h > obj_l + _EPS:
                a2_new = H
            else:
                a2_new = a2
        if abs(a2_new - a2) < _EPS * (a2_new + a2 + _EPS):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        # keep the equality constraint exact when a1 spills over the box
        if a1_new < 0.0:
            a2_new += s * a1_new
            a1_new = 0.0
        elif a1_new > C:
            a2_new += s * (a1_new - C)
            a1_new = C
        a1_new, a2_new = self._snap(a1_new), self._snap(a2_new)
        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        self.E += d1 * K[i1] + d2 * K[i2]
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        return True

    def run(self, max_passes: int) -> int:
        """Repeatedly update the maximal violating pair.

        ``up``/``low`` are the index sets along which a coefficient may move
        so that ``y_i f(x_i)`` increases / decreases. The gap
        ``max E[low] - min E[up]`` bounds the KKT violation of every sample
        for any bias inside it, so stopping at ``gap <= tol`` gives KKT
        within ``tol``. One pass is ``n`` pair updates.
        """
        y, C, n = self.y, self.C, self.n
        pos, neg = y > 0, y < 0
        budget = max_passes * n
        steps = 0
        while steps < budget:
            alpha = self.alpha
            below_c, above_0 = alpha < C, alpha > 0.0
            up = (pos & below_c) | (neg & above_0)
            low = (neg & below_c) | (pos & above_0)
            i = int(np.argmin(np.where(up, self.E, np.inf)))
            j = int(np.argmax(np.where(low, self.E, -np.inf)))
            if self.E[j] - self.E[i] <= self.tol:
                break
            if not self.take_step(i, j):
                break
            steps += 1
        return -(-steps // max(n, 1))


def _as_kernel(K) -> np.ndarray:
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValidationError(f"kernel must be a square matrix, got shape {K.shape}")
    return K


def train_svm(K, y, C: float = 1.0, tol: float = 1e-3, max_passes: int = 100) -> SvmModel:
    """Solve the soft-margin SVM dual for a precomputed Gram matrix.

    Parameters
    ----------
    K : (n, n) array or KernelMatrix
    y : labels in {-1, +1}
    C : box constraint on each dual coefficient
    tol : KKT tolerance on ``y_i f(x_i)``
    max_passes : cap on work, in units of ``n`` pair updates. When it is
        hit with KKT violations above ``tol`` the model is returned with
        ``converged=False`` and a :class:`ConvergenceWarning` is issued.
    """
    K = _as_kernel(K)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (K.shape[0],):
        raise ValidationError(f"{len(y)} labels for a {K.shape[0]}x{K.shape[0]} kernel")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValidationError("binary labels must be -1 or +1")
    if not ((y > 0).any() and (y < 0).any()):
        raise ValidationError("training labels contain a single class")
    if not C > 0:
        raise ValidationError(f"C must be positive, got {C}")

    smo = _Smo(K, y, float(C), float(tol))
    passes = smo.run(max_passes)
    alpha = smo.alpha
    g = K @ (alpha * y)
    b = _fit_bias(alpha, y, g, C)
    viol = kkt_violations(alpha, y, K, b, C)
    worst = float(viol.max())
    converged = worst <= tol
    if not converged:
        warnings.warn(
            f"SMO stopped after {passes} passes with KKT violation {worst:.3g} > tol {tol:g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return SvmModel(alpha.copy(), b, y.copy(), float(C), float(tol), converged, passes, worst)


def decision_values(model: SvmModel, k_rows) -> np.ndarray:
    k_rows = np.asarray(k_rows, dtype=np.float64)
    if k_rows.ndim == 1:
        k_rows = k_rows[None, :]
    if k_rows.shape[1] != len(model.alpha):
        raise ValidationError(
            f"kernel rows have width {k_rows.shape[1]}, model has {len(model.alpha)} training samples"
        )
    return k_rows @ model.dual_coef + model.b


def predict_binary(model: SvmModel, k_rows) -> np.ndarray:
    f = decision_values(model, k_rows)
    return np.where(f >= 0.0, 1, -1)


def train_one_vs_rest(K, class_labels, C: float = 1.0, tol: float = 1e-3, max_passes: int = 100) -> MultiClassModel:
    """One binary SVM per class (sorted order), all on the same Gram matrix."""
    K = _as_kernel(K)
    labels = np.asarray(class_labels)
    if labels.shape != (K.shape[0],):
        raise ValidationError(f"{len(labels)} labels for a {K.shape[0]}x{K.shape[0]} kernel")
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise ValidationError("one-vs-rest needs at least two classes")
    models = []
    for c in classes:
        y = np.where(labels == c, 1.0, -1.0)
        models.append(train_svm(K, y, C=C, tol=tol, max_passes=max_passes))
    return MultiClassModel(classes, models)


def multi_decision_values(model: MultiClassModel, k_rows) -> np.ndarray:
    """``(n_test, n_classes)`` matrix of per-class decision values."""
    return np.column_stack([decision_values(m, k_rows) for m in model.models])


def predict_multi(model: MultiClassModel, k_rows) -> np.ndarray:
    scores = multi_decision_values(model, k_rows)
    # np.argmax returns the first maximum; classes are sorted, so ties go lexicographically first
    idx = np.argmax(scores, axis=1)
    return np.asarray(model.classes, dtype=object)[idx]


def fingerprint(X, labels) -> str:
    """Stable hash of a training set, stored alongside serialized models."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(np.asarray(X, dtype=np.float64)).tobytes())
    h.update(json.dumps([str(v) for v in np.asarray(labels).tolist()]).encode())
    return h.hexdigest()
