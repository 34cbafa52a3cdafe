"""End-to-end runners behind the command-line subcommands.

Each ``run_*`` function reads an :class:`ExperimentConfig`, writes its
artefacts under ``cfg.out`` and returns a small summary dict. Apart from the
timing columns of ``run_bench``, outputs are byte-identical across reruns
with the same config and seed.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import data as D
from .baselines import knn_fit, knn_predict_many, logistic_predict, logistic_train
from .config import ExperimentConfig
from .errors import ValidationError
from .kernels import (
    KernelMatrix,
    QuantumKernel,
    RBFKernel,
    cross_kernel_matrix,
    kernel_matrix,
    load_matrix_csv,
)
from .metrics import binary_metrics, confusion, multiclass_summary, to_percent
from .statevector import FeatureMapConfig
from .svm import (
    MultiClassModel,
    SvmModel,
    fingerprint,
    predict_binary,
    predict_multi,
    train_one_vs_rest,
    train_svm,
)

log = logging.getLogger(__name__)


def _clean_json(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean_json(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean_json(obj.item())
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_clean_json(obj), indent=2, sort_keys=True) + "\n")


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _stratify(task: str) -> str:
    return "binary" if task == "binary" else "spectral"


def _labels(samples: D.Samples, task: str) -> np.ndarray:
    return samples.y if task == "binary" else samples.spectral


# --- data preparation ---------------------------------------------------

def load_clean(cfg: ExperimentConfig):
    if not cfg.dataset:
        raise ValidationError("config has no dataset path")
    records = D.load_csv(cfg.dataset)
    return D.clean(records)


@dataclass
class Split:
    train: D.Samples
    test: D.Samples
    info: dict


def split_for(cfg: ExperimentConfig, task: str | None = None) -> Split:
    """Clean, engineer, (for multiclass) restrict classes, then split and trim the test set."""
    task = task or cfg.task
    records, report = load_clean(cfg)
    samples = D.build_samples(records, cfg.features)
    info = {"cleaning": report}
    if task == "multiclass":
        samples, class_report = D.restrict_classes(samples, cfg.min_class_size, cfg.classes)
        info["classes"] = class_report
        if len(class_report["kept_classes"]) < 2:
            raise ValidationError(f"fewer than two spectral classes survive: {class_report}")
    strat = _stratify(task)
    train, test = D.split(samples, cfg.test_fraction, cfg.seed, strat)
    if cfg.test_size is not None and cfg.test_size < len(test):
        test = D.subsample(test, cfg.test_size, cfg.seed, strat)
    info["available_train"] = len(train)
    return Split(train, test, info)


def trim_train(split: Split, size: int | None, cfg: ExperimentConfig, task: str) -> D.Samples:
    if size is None:
        return split.train
    if size > len(split.train):
        raise ValidationError(f"train size {size} exceeds the {len(split.train)} available training samples")
    return D.subsample(split.train, size, cfg.seed, _stratify(task))


def make_kernel(kind: str, cfg: ExperimentConfig):
    if kind == "quantum":
        return QuantumKernel(cfg.feature_map())
    return RBFKernel(cfg.sigma)


def kernel_inputs(kind: str, scaler: D.ScalerParams, X) -> np.ndarray:
    """Quantum encodings take features mapped into [0, pi]; RBF takes standardised features."""
    return D.apply_scaler(scaler, X, range_map=(kind == "quantum"))


# --- SVM fit / predict ----------------------------------------------------

def fit_svm(cfg: ExperimentConfig, kind: str, task: str, train: D.Samples, K=None):
    """Returns (model document, Gram matrix)."""
    if len(train) > cfg.max_kernel_size:
        raise ValidationError(
            f"train size {len(train)} exceeds max_kernel_size {cfg.max_kernel_size}"
        )
    scaler = D.fit_scaler(train.X, train.names)
    Xk = kernel_inputs(kind, scaler, train.X)
    kernel = make_kernel(kind, cfg)
    if K is None:
        K = kernel_matrix(Xk, kernel, cfg.workers).entries
    elif K.shape != (len(train), len(train)):
        raise ValidationError(f"precomputed kernel has shape {K.shape}, expected {(len(train),) * 2}")
    labels = _labels(train, task)
    if task == "binary":
        model = train_svm(K, labels, C=cfg.C, tol=cfg.tol, max_passes=cfg.max_passes)
    else:
        model = train_one_vs_rest(K, labels, C=cfg.C, tol=cfg.tol, max_passes=cfg.max_passes)
    doc = {
        "task": task,
        "kernel": {"kind": kind, **kernel.provenance()},
        "features": list(train.names),
        "scaler": scaler.to_dict(),
        "train_X": Xk.tolist(),
        "train_labels": [v if isinstance(v, str) else int(v) for v in labels.tolist()],
        "fingerprint": fingerprint(Xk, labels),
        "converged": bool(model.converged),
        "model": model.to_dict(),
    }
    return doc, K


def _kernel_from_doc(doc: dict):
    k = doc["kernel"]
    if k["kind"] == "quantum":
        return QuantumKernel(FeatureMapConfig.from_dict(k["feature_map"]))
    return RBFKernel(float(k["sigma"]))


def predict_with(doc: dict, X_raw, workers: int = 1) -> np.ndarray:
    scaler = D.ScalerParams.from_dict(doc["scaler"])
    X = kernel_inputs(doc["kernel"]["kind"], scaler, X_raw)
    rows = cross_kernel_matrix(np.asarray(doc["train_X"]), X, _kernel_from_doc(doc), workers)
    if doc["task"] == "binary":
        return predict_binary(SvmModel.from_dict(doc["model"]), rows)
    return predict_multi(MultiClassModel.from_dict(doc["model"]), rows)


def score(task: str, y_true, y_pred, classes=None) -> tuple[dict, object]:
    if task == "binary":
        cm = confusion(y_true, y_pred, [-1, 1])
        m = binary_metrics(cm, positive=1).as_dict()
    else:
        classes = classes if classes is not None else sorted(set(np.asarray(y_true).tolist()))
        cm = confusion(y_true, y_pred, classes)
        m = multiclass_summary(cm)
    m["n"] = int(len(y_true))
    m["confusion"] = cm.counts.tolist()
    m["classes"] = [c if isinstance(c, str) else int(c) for c in cm.classes]
    return m, cm


def write_predictions(path, y_true, y_pred) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "true", "pred"])
        for i, (t, p) in enumerate(zip(np.asarray(y_true).tolist(), np.asarray(y_pred).tolist())):
            w.writerow([i, t, p])


def read_predictions(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [r["true"] for r in rows], [r["pred"] for r in rows]


def write_confusion(out: Path, stem: str, cm) -> None:
    cm.to_csv(out / f"{stem}_counts.csv")
    pct = to_percent(cm)
    cm.to_csv(out / f"{stem}_percent.csv", values=pct.values, fmt="{:.6f}")


# --- subcommands -----------------------------------------------------------

def run_prep(cfg: ExperimentConfig) -> dict:
    out = _outdir(cfg)
    records = D.load_csv(cfg.dataset) if cfg.dataset else None
    if records is None:
        raise ValidationError("config has no dataset path")
    cleaned, report = D.clean(records)
    report["amag_check"] = D.amag_consistency(cleaned)
    D.write_csv(cleaned, out / "cleaned.csv")
    samples = D.build_samples(cleaned, cfg.features)
    D.write_samples_csv(samples, out / "engineered.csv")
    write_json(out / "cleaning_report.json", report)
    cfg.dump(out / "effective_config.json")
    log.info("cleaned %d -> %d rows", report["input_rows"], report["output_rows"])
    return report


def run_train(cfg: ExperimentConfig) -> dict:
    """Fit the SVM; ``cfg.kernel_csv`` substitutes a precomputed Gram matrix
    and ``cfg.save_kernel`` exports the one used."""
    out = _outdir(cfg)
    split = split_for(cfg)
    train = trim_train(split, cfg.train_size, cfg, cfg.task)
    K = load_matrix_csv(cfg.kernel_csv) if cfg.kernel_csv else None
    doc, K = fit_svm(cfg, cfg.kernel, cfg.task, train, K)
    doc["config"] = cfg.to_dict()
    write_json(out / "model.json", doc)
    if cfg.save_kernel:
        KernelMatrix(K, doc["kernel"]["kind"], doc["kernel"]).to_csv(out / "kernel.csv")
    if cfg.task == "binary":
        pred = predict_binary(SvmModel.from_dict(doc["model"]), K)
    else:
        pred = predict_multi(MultiClassModel.from_dict(doc["model"]), K)
    metrics, _ = score(cfg.task, _labels(train, cfg.task), pred)
    metrics["converged"] = doc["converged"]
    metrics["train_size"] = len(train)
    write_json(out / "train_metrics.json", metrics)
    cfg.dump(out / "effective_config.json")
    return metrics


def run_eval(cfg: ExperimentConfig, model_path) -> dict:
    out = _outdir(cfg)
    model_path = Path(model_path)
    if not model_path.exists():
        raise FileNotFoundError(f"no such model file: {model_path}")
    doc = json.loads(model_path.read_text())
    task = doc["task"]
    if list(doc["features"]) != list(cfg.features):
        raise ValidationError(f"model features {doc['features']} differ from config {cfg.features}")
    split = split_for(cfg, task)
    if cfg.eval_split == "train":
        samples = trim_train(split, cfg.train_size, cfg, task)
    else:
        samples = split.test
    pred = predict_with(doc, samples.X, cfg.workers)
    truth = _labels(samples, task)
    classes = None if task == "binary" else doc["model"]["classes"]
    metrics, cm = score(task, truth, pred, classes)
    metrics["split"] = cfg.eval_split
    write_predictions(out / "predictions.csv", truth, pred)
    write_confusion(out, "confusion", cm)
    write_json(out / "metrics.json", metrics)
    cfg.dump(out / "effective_config.json")
    return metrics


CURVE_BINARY = ["kernel", "size", "accuracy", "f1", "specificity", "sensitivity", "converged", "status"]
CURVE_MULTI = ["kernel", "size", "accuracy", "macro_f1", "converged", "status"]


def run_curve(cfg: ExperimentConfig, kinds=("quantum", "rbf")) -> list[dict]:
    out = _outdir(cfg)
    split = split_for(cfg)
    too_big = [s for s in cfg.train_sizes if s > len(split.train)]
    if too_big:
        raise ValidationError(
            f"train sizes {too_big} exceed the {len(split.train)} available training samples"
        )
    truth = _labels(split.test, cfg.task)
    rows = []
    for kind in kinds:
        for size in cfg.train_sizes:
            row = {"kernel": kind, "size": int(size)}
            if size > cfg.max_kernel_size:
                row["status"] = f"skipped: above max_kernel_size {cfg.max_kernel_size}"
                rows.append(row)
                continue
            train = trim_train(split, size, cfg, cfg.task)
            doc, _ = fit_svm(cfg, kind, cfg.task, train)
            pred = predict_with(doc, split.test.X, cfg.workers)
            classes = None if cfg.task == "binary" else doc["model"]["classes"]
            m, _ = score(cfg.task, truth, pred, classes)
            row.update({k: m[k] for k in ("accuracy", "f1", "specificity", "sensitivity", "macro_f1") if k in m})
            row["converged"] = doc["converged"]
            row["status"] = "ok"
            rows.append(row)
            log.info("curve %s n=%d acc=%.4f", kind, size, m["accuracy"])
    cols = CURVE_BINARY if cfg.task == "binary" else CURVE_MULTI
    with open(out / "curve.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    cfg.dump(out / "effective_config.json")
    return rows


def run_baseline(cfg: ExperimentConfig, tasks=("binary", "multiclass")) -> dict:
    out = _outdir(cfg)
    result = {}
    for task in tasks:
        split = split_for(cfg, task)
        train = trim_train(split, cfg.train_size, cfg, task)
        scaler = D.fit_scaler(train.X, train.names)
        Xtr = D.standardize(scaler, train.X)
        Xte = D.standardize(scaler, split.test.X)
        ytr, yte = _labels(train, task), _labels(split.test, task)
        classes = None if task == "binary" else sorted(set(ytr.tolist()))
        knn = knn_fit(Xtr, ytr, cfg.knn_k)
        lr = logistic_train(Xtr, ytr, cfg.lr_lambda, cfg.lr_rate, cfg.lr_max_iter, cfg.lr_grad_tol)
        preds = {"knn": knn_predict_many(knn, Xte), "lr": logistic_predict(lr, Xte)}
        result[task] = {}
        for name, pred in preds.items():
            if task == "binary":
                pred = np.asarray(pred, dtype=np.int64)
            m, cm = score(task, yte, pred, classes)
            if name == "lr":
                m["iterations"] = int(lr.n_iter)
                m["grad_norm"] = float(lr.grad_norm)
            result[task][name] = m
            write_predictions(out / f"predictions_{name}_{task}.csv", yte, pred)
            write_confusion(out, f"confusion_{name}_{task}", cm)
    write_json(out / "baseline_metrics.json", result)
    cfg.dump(out / "effective_config.json")
    return result


def run_bench(cfg: ExperimentConfig) -> list[dict]:
    """Wall time of a quantum Gram build for each worker count (best of repeats)."""
    out = _outdir(cfg)
    rng = np.random.default_rng(cfg.seed)
    X = rng.uniform(0.0, np.pi, size=(cfg.bench_size, cfg.bench_features))
    fmap = FeatureMapConfig.from_dict({
        "n_features": cfg.bench_features,
        "repetitions": cfg.repetitions,
        "entanglement": cfg.entanglement,
    })
    kernel = QuantumKernel(fmap)
    workers = [1] + [int(w) for w in cfg.bench_workers if int(w) != 1]
    ref, base, rows = None, None, []
    for w in workers:
        times = []
        for _ in range(cfg.bench_repeats):
            t0 = time.perf_counter()
            K = kernel_matrix(X, kernel, w).entries
            times.append(time.perf_counter() - t0)
        if ref is None:
            ref = K
        best = min(times)
        base = base if base is not None else best
        rows.append({
            "workers": w,
            "seconds": best,
            "speedup": 1.0 if w == 1 else base / best,
            "identical": bool(np.array_equal(K, ref)),
        })
    with open(out / "bench.csv", "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=["workers", "seconds", "speedup", "identical"], lineterminator="\n")
        wr.writeheader()
        wr.writerows(rows)
    np.savetxt(out / "bench_kernel.csv", ref, delimiter=",", fmt="%.17g")
    cfg.dump(out / "effective_config.json")
    return rows
