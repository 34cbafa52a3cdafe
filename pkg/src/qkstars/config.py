"""Experiment configuration: one JSON document, defaults materialised on load."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .data import DEFAULT_FEATURES, check_features
from .errors import ValidationError
from .statevector import FeatureMapConfig

TASKS = ("binary", "multiclass")
KERNELS = ("quantum", "rbf")


@dataclass
class ExperimentConfig:
    dataset: str | None = None
    features: list = field(default_factory=lambda: list(DEFAULT_FEATURES))
    n_features: int | None = None
    task: str = "binary"
    kernel: str = "quantum"
    sigma: float = 1.0
    repetitions: int = 2
    entanglement: object = "full"
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 100
    knn_k: int = 5
    lr_lambda: float = 1e-4
    lr_rate: float = 0.1
    lr_max_iter: int = 5000
    lr_grad_tol: float = 1e-6
    test_fraction: float = 0.2
    train_size: int | None = 2000
    test_size: int | None = 2000
    train_sizes: list = field(default_factory=lambda: [1000, 2000, 5000, 10000, 15000, 20000])
    max_kernel_size: int = 5000
    min_class_size: int = 50
    classes: list | None = None
    eval_split: str = "test"
    save_kernel: bool = False
    kernel_csv: str | None = None
    seed: int = 42
    workers: int = 1
    out: str = "runs"
    bench_size: int = 500
    bench_features: int = 4
    bench_workers: list = field(default_factory=lambda: [1, 2, 4, 8])
    bench_repeats: int = 3

    def validate(self) -> "ExperimentConfig":
        self.features = list(check_features(self.features))
        if self.n_features is not None and self.n_features != len(self.features):
            raise ValidationError(
                f"n_features={self.n_features} does not match the {len(self.features)} selected features"
            )
        if self.task not in TASKS:
            raise ValidationError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.kernel not in KERNELS:
            raise ValidationError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.eval_split not in ("train", "test"):
            raise ValidationError(f"eval_split must be 'train' or 'test', got {self.eval_split!r}")
        for name in ("C", "tol", "sigma", "lr_rate"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        for name in ("workers", "max_passes", "knn_k", "repetitions", "bench_repeats"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValidationError("test_fraction must be in (0, 1)")
        if any(int(w) < 1 for w in self.bench_workers):
            raise ValidationError("bench_workers entries must be >= 1")
        self.feature_map()
        return self

    def feature_map(self) -> FeatureMapConfig:
        try:
            return FeatureMapConfig.from_dict({
                "n_features": len(self.features),
                "repetitions": self.repetitions,
                "entanglement": self.entanglement,
            })
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {unknown}")
        return cls(**d).validate()

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(d)
