"""Star catalogue ingestion, cleaning, feature engineering, scaling and splits.

The input table follows the giants/dwarfs catalogue schema::

    Vmag, Plx, e_Plx, B-V, SpType, Amag, TargetClass

``Plx`` is in milliarcseconds. ``TargetClass`` is 0 for dwarfs and 1 for giants.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import SchemaError, ValidationError

COLUMNS = ("Vmag", "Plx", "e_Plx", "B-V", "SpType", "Amag", "TargetClass")
REQUIRED = ("Vmag", "Plx", "B-V", "SpType", "Amag", "TargetClass")
SPECTRAL_CLASSES = ("O", "B", "A", "F", "G", "K", "M")
DEFAULT_FEATURES = ("Amag", "B-V", "B-V+Amag", "B-V-Amag")


@dataclass(frozen=True)
class StarRecord:
    Vmag: float | None
    Plx: float | None
    e_Plx: float | None
    BV: float | None
    SpType: str | None
    Amag: float | None
    TargetClass: int | None

    def get(self, column: str):
        return getattr(self, "BV" if column == "B-V" else column)

    def missing(self, columns: Iterable[str] = REQUIRED) -> list[str]:
        return [c for c in columns if self.get(c) is None]


def _parse_float(text):
    try:
        v = float(text)
    except (TypeError, ValueError):
        return None
    return v if math.isfinite(v) else None


def _parse_class(text):
    v = _parse_float(text)
    if v is None or v not in (0.0, 1.0):
        return None
    return int(v)


def _parse_str(text):
    text = (text or "").strip()
    return text or None


def load_csv(path) -> list[StarRecord]:
    """Read one :class:`StarRecord` per data row; unparseable cells become ``None``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such dataset: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path} is missing required columns: {', '.join(missing)}")
        return [
            StarRecord(
                Vmag=_parse_float(row["Vmag"]),
                Plx=_parse_float(row["Plx"]),
                e_Plx=_parse_float(row["e_Plx"]),
                BV=_parse_float(row["B-V"]),
                SpType=_parse_str(row["SpType"]),
                Amag=_parse_float(row["Amag"]),
                TargetClass=_parse_class(row["TargetClass"]),
            )
            for row in reader
        ]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(records: Sequence[StarRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in records:
            w.writerow([_fmt(r.get(c)) for c in COLUMNS])


def clean(records: Sequence[StarRecord]) -> tuple[list[StarRecord], dict]:
    """Drop exact duplicates (first kept), rows missing a required field and
    rows with non-positive parallax. Returns the survivors and per-reason counts."""
    seen = set()
    out = []
    report = Counter({"duplicates": 0, "missing": 0, "non-positive parallax": 0})
    for r in records:
        key = astuple(r)
        if key in seen:
            report["duplicates"] += 1
            continue
        seen.add(key)
        if r.missing():
            report["missing"] += 1
            continue
        if r.Plx <= 0:
            report["non-positive parallax"] += 1
            continue
        out.append(r)
    report = {"input_rows": len(records), **dict(report), "output_rows": len(out)}
    return out, report


def absolute_magnitude(vmag, plx, unit: str = "arcsec"):
    """``M = V + 5 log10(plx) + 5`` with ``plx`` in arcseconds.

    ``unit="mas"`` converts a milliarcsecond parallax first.
    """
    plx = np.asarray(plx, dtype=np.float64)
    if np.any(plx <= 0):
        raise ValueError("parallax must be positive")
    scale = {"arcsec": 1.0, "mas": 1e-3}[unit]
    m = np.asarray(vmag, dtype=np.float64) + 5.0 * np.log10(plx * scale) + 5.0
    return float(m) if m.ndim == 0 else m


def amag_consistency(records: Sequence[StarRecord], n: int = 100) -> dict:
    """Compare the file's Amag column with the distance-modulus formula.

    Reported only; the file column is what the models use.
    """
    rows = [r for r in records[:n] if r.Plx and r.Plx > 0 and r.Vmag is not None and r.Amag is not None]
    if not rows:
        return {"rows": 0}
    v = np.array([r.Vmag for r in rows])
    p = np.array([r.Plx for r in rows])
    a = np.array([r.Amag for r in rows])
    out = {"rows": len(rows)}
    for unit in ("arcsec", "mas"):
        dev = a - absolute_magnitude(v, p, unit)
        out[f"max_abs_deviation_{unit}"] = float(np.max(np.abs(dev)))
        out[f"mean_offset_{unit}"] = float(np.mean(dev))
    return out


# --- features and labels -------------------------------------------------

FEATURES = {
    "Amag": lambda r: r.Amag,
    "B-V": lambda r: r.BV,
    "Vmag": lambda r: r.Vmag,
    "Plx": lambda r: r.Plx,
    "e_Plx": lambda r: r.e_Plx,
    "Amag_SQ": lambda r: r.Amag * r.Amag,
    "B-V_SQ": lambda r: r.BV * r.BV,
    "B-V+Amag": lambda r: r.BV + r.Amag,
    "B-V-Amag": lambda r: r.BV - r.Amag,
}


def check_features(selection: Sequence[str]) -> tuple[str, ...]:
    selection = tuple("B-V-Amag" if s == "B-V−Amag" else s for s in selection)
    unknown = [s for s in selection if s not in FEATURES]
    if unknown:
        raise ValidationError(f"unknown features {unknown}; choose from {list(FEATURES)}")
    if not selection:
        raise ValidationError("feature selection is empty")
    if len(set(selection)) != len(selection):
        raise ValidationError(f"duplicate features in {list(selection)}")
    return selection


@dataclass
class EngineeredSample:
    features: np.ndarray
    names: tuple[str, ...]
    binary: int
    spectral: str | None


def extract_labels(record: StarRecord) -> tuple[int, str | None]:
    """``(+1 giant / -1 dwarf, spectral letter or None)``."""
    binary = 1 if record.TargetClass == 1 else -1
    letter = record.SpType[0].upper() if record.SpType else None
    if letter not in SPECTRAL_CLASSES:
        letter = None
    return binary, letter


def engineer_features(record: StarRecord, selection: Sequence[str] = DEFAULT_FEATURES) -> EngineeredSample:
    selection = check_features(selection)
    x = np.array([FEATURES[name](record) for name in selection], dtype=np.float64)
    binary, spectral = extract_labels(record)
    return EngineeredSample(x, selection, binary, spectral)


@dataclass
class Samples:
    """Feature matrix with aligned binary and spectral labels."""

    X: np.ndarray
    y: np.ndarray
    spectral: np.ndarray
    names: tuple[str, ...]

    def __len__(self):
        return len(self.y)

    def take(self, idx) -> "Samples":
        idx = np.asarray(idx, dtype=np.intp)
        return Samples(self.X[idx], self.y[idx], self.spectral[idx], self.names)

    def labels(self, by: str) -> np.ndarray:
        if by == "binary":
            return self.y
        if by == "spectral":
            return self.spectral
        raise ValueError(f"unknown label kind {by!r}")


def build_samples(records: Sequence[StarRecord], selection: Sequence[str] = DEFAULT_FEATURES) -> Samples:
    selection = check_features(selection)
    need = {"e_Plx"} & set(selection)
    rows = [r for r in records if not r.missing(REQUIRED + tuple(need))]
    if len(rows) != len(records):
        raise ValidationError(f"{len(records) - len(rows)} records have missing values; clean first")
    X = np.array([[FEATURES[n](r) for n in selection] for r in rows], dtype=np.float64).reshape(len(rows), len(selection))
    labels = [extract_labels(r) for r in rows]
    y = np.array([b for b, _ in labels], dtype=np.int64)
    spectral = np.array([s for _, s in labels], dtype=object)
    return Samples(X, y, spectral, selection)


def one_hot(labels, classes: Sequence[str] = SPECTRAL_CLASSES) -> np.ndarray:
    """Indicator columns, one per class; unknown labels give an all-zero row."""
    labels = np.asarray(labels, dtype=object)
    return np.stack([(labels == c).astype(np.int64) for c in classes], axis=1)


def write_samples_csv(samples: Samples, path, classes: Sequence[str] = SPECTRAL_CLASSES) -> None:
    hot = one_hot(samples.spectral, classes)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(samples.names) + ["binary", "spectral"] + [f"SpType_{c}" for c in classes])
        for x, y, s, h in zip(samples.X, samples.y, samples.spectral, hot):
            w.writerow([repr(float(v)) for v in x] + [int(y), s or ""] + h.tolist())


def restrict_classes(samples: Samples, min_count: int = 50, classes: Sequence[str] | None = None):
    """Keep samples whose spectral class is accepted and has at least ``min_count`` members.

    Returns the filtered samples and a report of dropped classes.
    """
    counts = Counter(s for s in samples.spectral.tolist() if s is not None)
    allowed = SPECTRAL_CLASSES if classes is None else tuple(classes)
    keep = sorted(c for c in allowed if counts.get(c, 0) >= min_count)
    dropped = {c: counts.get(c, 0) for c in allowed if c not in keep}
    mask = np.array([s in keep for s in samples.spectral.tolist()], dtype=bool)
    report = {
        "kept_classes": keep,
        "dropped_classes": dropped,
        "unclassified": int(sum(1 for s in samples.spectral.tolist() if s is None)),
    }
    return samples.take(np.flatnonzero(mask)), report


# --- scaling -------------------------------------------------------------

@dataclass
class ScalerParams:
    names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    target: tuple[float, float] = (0.0, math.pi)

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "lo": self.lo.tolist(),
            "hi": self.hi.tolist(),
            "target": list(self.target),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        return cls(
            tuple(d["names"]),
            np.asarray(d["mean"], dtype=np.float64),
            np.asarray(d["std"], dtype=np.float64),
            np.asarray(d["lo"], dtype=np.float64),
            np.asarray(d["hi"], dtype=np.float64),
            tuple(d.get("target", (0.0, math.pi))),
        )


def fit_scaler(X, names: Sequence[str] | None = None, target=(0.0, math.pi)) -> ScalerParams:
    """Standardisation (mean 0, population std 1) followed by an affine map of
    the standardised training range onto ``target``. Fit on training data only."""
    X = np.asarray(X, dtype=np.float64)
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(X.shape[1]))
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    flat = [n for n, s in zip(names, std) if not s > 0]
    if flat:
        raise ValidationError(f"zero-variance features cannot be scaled: {flat}")
    Z = (X - mean) / std
    return ScalerParams(names, mean, std, Z.min(axis=0), Z.max(axis=0), tuple(float(t) for t in target))


def standardize(params: ScalerParams, X) -> np.ndarray:
    return (np.asarray(X, dtype=np.float64) - params.mean) / params.std


def apply_scaler(params: ScalerParams, X, range_map: bool = True) -> np.ndarray:
    """Standardise ``X``; with ``range_map`` also send ``[lo, hi]`` to the
    target interval and clip values that fall outside it."""
    Z = standardize(params, X)
    if not range_map:
        return Z
    t0, t1 = params.target
    U = t0 + (Z - params.lo) / (params.hi - params.lo) * (t1 - t0)
    return np.clip(U, t0, t1)


# --- splitting -------------------------------------------------------------

def _allocate(counts: dict, total: int) -> dict:
    """Largest-remainder apportionment of ``total`` across classes."""
    n = sum(counts.values())
    quotas = {c: total * k / n for c, k in counts.items()}
    alloc = {c: int(math.floor(q)) for c, q in quotas.items()}
    rest = total - sum(alloc.values())
    order = sorted(counts, key=lambda c: (-(quotas[c] - alloc[c]), str(c)))
    for c in order[:rest]:
        alloc[c] += 1
    return alloc


def _class_groups(labels, rng):
    perm = rng.permutation(len(labels))
    groups: dict = {}
    for i in perm.tolist():
        groups.setdefault(labels[i], []).append(i)
    return groups


def split(samples: Samples, test_fraction: float = 0.2, seed: int = 42, stratify: str = "binary"):
    """Seeded stratified train/test split. Per-class test counts are
    ``round(fraction * class_size)`` apportioned so the total is ``round(fraction * n)``."""
    if not 0.0 < test_fraction < 1.0:
        raise ValidationError(f"test fraction must be in (0, 1), got {test_fraction}")
    labels = samples.labels(stratify).tolist()
    if any(v is None for v in labels):
        raise ValidationError(f"some samples have no {stratify} label")
    rng = np.random.default_rng(seed)
    groups = _class_groups(labels, rng)
    alloc = _allocate({c: len(g) for c, g in groups.items()}, int(round(test_fraction * len(labels))))
    test_idx, train_idx = [], []
    for c in sorted(groups, key=str):
        g = groups[c]
        test_idx += g[: alloc[c]]
        train_idx += g[alloc[c]:]
    return samples.take(sorted(train_idx)), samples.take(sorted(test_idx))


def subsample(samples: Samples, size: int, seed: int = 42, stratify: str = "binary") -> Samples:
    """Seeded stratified subset of exactly ``size`` samples (original order kept)."""
    n = len(samples)
    if size > n:
        raise ValidationError(f"requested {size} samples but only {n} are available")
    if size < 1:
        raise ValidationError(f"subsample size must be positive, got {size}")
    if size == n:
        return samples
    labels = samples.labels(stratify).tolist()
    rng = np.random.default_rng(seed)
    groups = _class_groups(labels, rng)
    alloc = _allocate({c: len(g) for c, g in groups.items()}, size)
    idx = []
    for c in sorted(groups, key=str):
        idx += groups[c][: alloc[c]]
    return samples.take(sorted(idx))


subsample_train = subsample
