"""Dense statevector simulation restricted to the ZZ feature-map gate set.

Qubit 0 is the least-significant bit of the basis-state index, so the
amplitude of ``|q_{n-1} ... q_1 q_0>`` lives at index ``sum(q_k << k)``.

Gates are pure: they return a new :class:`StateVector` and never touch the
input. The private ``_*_inplace`` helpers work on arrays of shape
``(..., 2**n)`` so that whole batches of samples can be encoded at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import CapacityError, EncodingDomainError

MAX_QUBITS = 20
_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes of an ``n_qubits`` register."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __len__(self):
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class FeatureMapConfig:
    """Layout of the ZZ feature map.

    Parameters
    ----------
    n_features : int
        Number of encoded features, one qubit each.
    repetitions : int
        How many times the H / P / ZZ block is stacked.
    entanglement : sequence of (i, j) pairs, or None
        Pairs receiving a ZZ phase, in application order. ``None`` means
        "full": every ``i < j`` in lexicographic order.
    interval : (lo, hi)
        Admissible range of each encoded feature value.
    """

    n_features: int
    repetitions: int = 2
    entanglement: tuple[tuple[int, int], ...] | None = None
    interval: tuple[float, float] = (0.0, float(np.pi))

    def __post_init__(self):
        if self.n_features < 1:
            raise ValueError("n_features must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        if self.entanglement is None:
            pairs = tuple(combinations(range(self.n_features), 2))
        else:
            pairs = tuple((int(i), int(j)) for i, j in self.entanglement)
        seen = set()
        for i, j in pairs:
            if not 0 <= i < j < self.n_features:
                raise ValueError(f"invalid entanglement pair ({i}, {j})")
            if (i, j) in seen:
                raise ValueError(f"duplicate entanglement pair ({i}, {j})")
            seen.add((i, j))
        object.__setattr__(self, "entanglement", pairs)
        lo, hi = (float(v) for v in self.interval)
        if not lo < hi:
            raise ValueError("interval must satisfy lo < hi")
        object.__setattr__(self, "interval", (lo, hi))

    @classmethod
    def linear(cls, n_features: int, **kwargs) -> "FeatureMapConfig":
        """Nearest-neighbour chain (0,1), (1,2), ..."""
        pairs = tuple((i, i + 1) for i in range(n_features - 1))
        return cls(n_features, entanglement=pairs, **kwargs)

    def to_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "repetitions": self.repetitions,
            "entanglement": [list(p) for p in self.entanglement],
            "interval": list(self.interval),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMapConfig":
        ent = d.get("entanglement")
        if isinstance(ent, str):
            if ent == "full":
                ent = None
            elif ent == "linear":
                ent = tuple((i, i + 1) for i in range(d["n_features"] - 1))
            else:
                raise ValueError(f"unknown entanglement {ent!r}")
        elif ent is not None:
            ent = tuple(tuple(p) for p in ent)
        return cls(
            n_features=int(d["n_features"]),
            repetitions=int(d.get("repetitions", 2)),
            entanglement=ent,
            interval=tuple(d.get("interval", (0.0, float(np.pi)))),
        )


def new_zero_state(n_qubits: int) -> StateVector:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.n_qubits} qubits")


def _split_axis(amps: np.ndarray, n: int, qubit: int) -> np.ndarray:
    # view (..., high, 2, low) where the middle axis is the target bit
    return amps.reshape(amps.shape[:-1] + (1 << (n - qubit - 1), 2, 1 << qubit))


def _hadamard_inplace(amps: np.ndarray, n: int, qubit: int) -> None:
    v = _split_axis(amps, n, qubit)
    a = v[..., 0, :].copy()
    b = v[..., 1, :]
    v[..., 0, :] = (a + b) * _INV_SQRT2
    v[..., 1, :] = (a - b) * _INV_SQRT2


def _phase_factor(angle):
    angle = np.asarray(angle, dtype=np.float64)
    return np.cos(angle) + 1j * np.sin(angle)


def _phase_inplace(amps: np.ndarray, n: int, qubit: int, angle) -> None:
    v = _split_axis(amps, n, qubit)
    factor = _phase_factor(angle)
    v[..., 1, :] *= factor[..., None, None]


def _zz_mask(n: int, q1: int, q2: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return ((idx >> q1) & 1).astype(bool) & ((idx >> q2) & 1).astype(bool)


def _zz_inplace(amps: np.ndarray, n: int, q1: int, q2: int, angle) -> None:
    mask = _zz_mask(n, q1, q2)
    factor = _phase_factor(angle)
    amps[..., mask] *= factor[..., None]


def apply_hadamard(state: StateVector, qubit: int) -> StateVector:
    _check_qubit(state, qubit)
    amps = state.amplitudes.copy()
    _hadamard_inplace(amps, state.n_qubits, qubit)
    return StateVector(state.n_qubits, amps)


def apply_phase(state: StateVector, qubit: int, angle: float) -> StateVector:
    """Multiply amplitudes whose ``qubit`` bit is 1 by ``exp(i*angle)``."""
    _check_qubit(state, qubit)
    if not np.isfinite(angle):
        raise ValueError(f"phase angle must be finite, got {angle}")
    amps = state.amplitudes.copy()
    _phase_inplace(amps, state.n_qubits, qubit, angle)
    return StateVector(state.n_qubits, amps)


def apply_zz_phase(state: StateVector, q1: int, q2: int, angle: float) -> StateVector:
    """Phase ``exp(i*angle)`` on basis states where both ``q1`` and ``q2`` are 1.

    Equivalent to CNOT(q1, q2) . P(angle) on q2 . CNOT(q1, q2).
    """
    if q1 == q2:
        raise ValueError("ZZ phase needs two distinct qubits")
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if not np.isfinite(angle):
        raise ValueError(f"phase angle must be finite, got {angle}")
    amps = state.amplitudes.copy()
    _zz_inplace(amps, state.n_qubits, q1, q2, angle)
    return StateVector(state.n_qubits, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b> = sum(conj(a_k) * b_k)``."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _validate_features(X: np.ndarray, config: FeatureMapConfig) -> None:
    if X.ndim != 2 or X.shape[1] != config.n_features:
        raise ValueError(
            f"expected feature vectors of length {config.n_features}, got shape {X.shape[1:]}"
        )
    if not np.all(np.isfinite(X)):
        raise EncodingDomainError("feature values must be finite")
    lo, hi = config.interval
    slack = 1e-9 * max(1.0, abs(lo), abs(hi))
    bad = (X < lo - slack) | (X > hi + slack)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise EncodingDomainError(
            f"feature {col} = {X[row, col]!r} lies outside [{lo}, {hi}]"
        )


def encode_batch(X, config: FeatureMapConfig) -> np.ndarray:
    """Encode each row of ``X``; returns an ``(n_samples, 2**n)`` complex array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    _validate_features(X, config)
    n = config.n_features
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
    amps = np.zeros((X.shape[0], 1 << n), dtype=np.complex128)
    amps[:, 0] = 1.0
    single = 2.0 * X
    shifted = np.pi - X
    pair = {(i, j): 2.0 * shifted[:, i] * shifted[:, j] for i, j in config.entanglement}
    for _ in range(config.repetitions):
        for q in range(n):
            _hadamard_inplace(amps, n, q)
        for q in range(n):
            _phase_inplace(amps, n, q, single[:, q])
        for i, j in config.entanglement:
            _zz_inplace(amps, n, i, j, pair[(i, j)])
    return amps


def encode_feature_map(x: Sequence[float], config: FeatureMapConfig) -> StateVector:
    """Prepare ``U(x)|0...0>`` for the ZZ feature map.

    Each repetition applies H to every qubit, ``P(2 x_i)`` to qubit ``i`` and
    a ZZ phase of ``2 (pi - x_i)(pi - x_j)`` for every entangled pair.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("x must be a 1-D feature vector")
    amps = encode_batch(x[None, :], config)[0]
    return StateVector(config.n_features, amps)
