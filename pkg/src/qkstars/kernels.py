"""Fidelity quantum kernel, Gaussian (RBF) kernel and parallel Gram builders.

Every kernel entry is produced by a per-pair reduction over a contiguous
axis, so the value of ``K[i, j]`` does not depend on how rows are grouped
into work blocks. That is what makes the builders bitwise reproducible for
any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .statevector import FeatureMapConfig, StateVector, encode_batch, encode_feature_map, inner_product

# cap on pair-products materialised per block (complex entries)
_BLOCK_BUDGET = 1 << 21


@dataclass(frozen=True)
class QuantumKernel:
    """``K(x, y) = |<phi(x)|phi(y)>|**2`` for the ZZ feature map ``config``."""

    config: FeatureMapConfig
    kind = "quantum-fidelity"

    def provenance(self) -> dict:
        return {"feature_map": self.config.to_dict()}


@dataclass(frozen=True)
class RBFKernel:
    """``K(x, y) = exp(-||x - y||**2 / (2 sigma**2))``."""

    sigma: float = 1.0
    kind = "rbf"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def provenance(self) -> dict:
        return {"sigma": self.sigma}


KernelSpec = Union[QuantumKernel, RBFKernel]


@dataclass
class KernelMatrix:
    entries: np.ndarray
    kind: str
    provenance: dict

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_csv(self, path) -> None:
        """Write the full matrix row-major with 17 significant digits."""
        np.savetxt(path, self.entries, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, kind: str = "precomputed", provenance: dict | None = None):
        entries = np.loadtxt(path, delimiter=",", ndmin=2)
        if entries.shape[0] != entries.shape[1]:
            raise ValueError(f"kernel CSV is not square: {entries.shape}")
        return cls(entries, kind, provenance or {"source": str(path)})


def fidelity_kernel(x, y, config: FeatureMapConfig) -> float:
    """Squared overlap of the encoded states of ``x`` and ``y``."""
    ov = inner_product(encode_feature_map(x, config), encode_feature_map(y, config))
    return min(ov.real * ov.real + ov.imag * ov.imag, 1.0)


def rbf_kernel(x, y, sigma: float) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    d2 = float(np.sum((x - y) ** 2))
    return float(np.exp(-d2 / (2.0 * sigma * sigma)))


def precompute_encodings(X, config: FeatureMapConfig) -> list[StateVector]:
    """Encode each sample once so Gram builds need O(n) circuit runs."""
    if len(X) == 0:
        return []
    amps = encode_batch(np.asarray(X, dtype=np.float64), config)
    return [StateVector(config.n_features, a) for a in amps]


def _as_samples(X, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0 or X.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    if X.ndim != 2:
        raise ValueError(f"{name} must be a list of equal-length feature vectors")
    return X


def _prepare(kernel: KernelSpec, X: np.ndarray) -> np.ndarray:
    if isinstance(kernel, QuantumKernel):
        return encode_batch(X, kernel.config)
    if isinstance(kernel, RBFKernel):
        return X
    raise TypeError(f"unsupported kernel spec {kernel!r}")


def _block_values(kernel: KernelSpec, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Kernel values between each of ``rows`` and each of ``cols``.

    Broadcast to ``(len(rows), len(cols), dim)`` and reduce the last axis;
    the reduction per entry is identical regardless of block shape.
    """
    if isinstance(kernel, QuantumKernel):
        prod = np.conj(rows)[:, None, :] * cols[None, :, :]
        ov = prod.sum(axis=-1)
        return np.minimum(ov.real * ov.real + ov.imag * ov.imag, 1.0)
    diff = rows[:, None, :] - cols[None, :, :]
    d2 = (diff * diff).sum(axis=-1)
    return np.exp(-d2 / (2.0 * kernel.sigma * kernel.sigma))


def _row_blocks(n_rows: int, workers: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, n_rows, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run(blocks, fn, workers: int) -> None:
    if workers == 1 or len(blocks) == 1:
        for blk in blocks:
            fn(*blk)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(fn, *blk) for blk in blocks]:
            fut.result()


def _check_workers(workers: int) -> int:
    if int(workers) < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return int(workers)


def kernel_matrix(X, kernel: KernelSpec, workers: int = 1) -> KernelMatrix:
    """Symmetric Gram matrix of ``kernel`` over the rows of ``X``.

    Only the strict upper triangle is evaluated, split into contiguous row
    blocks (one per worker), and each row is mirrored into the lower
    triangle by the worker that computed it. The diagonal is set to exactly 1.
    """
    workers = _check_workers(workers)
    X = _as_samples(X, "X")
    feats = _prepare(kernel, X)
    n, dim = feats.shape
    K = np.empty((n, n), dtype=np.float64)
    chunk = max(1, _BLOCK_BUDGET // max(1, n * dim))

    def fill(r0: int, r1: int) -> None:
        for a in range(r0, r1, chunk):
            b = min(a + chunk, r1)
            vals = _block_values(kernel, feats[a:b], feats[a:])
            for k, i in enumerate(range(a, b)):
                K[i, i + 1:] = vals[k, i - a + 1:]
                K[i + 1:, i] = K[i, i + 1:]

    _run(_row_blocks(n, workers), fill, workers)
    np.fill_diagonal(K, 1.0)
    return KernelMatrix(K, kernel.kind, kernel.provenance())


def cross_kernel_matrix(X_train, X_test, kernel: KernelSpec, workers: int = 1) -> np.ndarray:
    """Rectangular matrix with ``[i, j] = kernel(X_test[i], X_train[j])``."""
    workers = _check_workers(workers)
    X_train = _as_samples(X_train, "X_train")
    X_test = _as_samples(X_test, "X_test")
    if X_train.shape[1] != X_test.shape[1]:
        raise ValueError(
            f"dimension mismatch: train {X_train.shape[1]} vs test {X_test.shape[1]}"
        )
    train = _prepare(kernel, X_train)
    test = _prepare(kernel, X_test)
    m, (n, dim) = test.shape[0], train.shape
    out = np.empty((m, n), dtype=np.float64)
    chunk = max(1, _BLOCK_BUDGET // max(1, n * dim))

    def fill(r0: int, r1: int) -> None:
        for a in range(r0, r1, chunk):
            b = min(a + chunk, r1)
            out[a:b] = _block_values(kernel, test[a:b], train)

    _run(_row_blocks(m, workers), fill, workers)
    return out


def save_matrix_csv(matrix, path) -> None:
    np.savetxt(path, np.asarray(matrix), delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
