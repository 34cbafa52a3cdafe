"""
Dwarfs vs giants with a quantum kernel
======================================

Synthetic catalogue with the same columns as the public giants/dwarfs file.
Swap in the real CSV with ``load_csv`` if you have it.
"""

import numpy as np

from qkstars import QuantumKernel, RBFKernel, FeatureMapConfig, cross_kernel_matrix, kernel_matrix, predict_binary, train_svm
from qkstars.baselines import knn_fit, knn_predict_many, logistic_predict, logistic_train
from qkstars.data import apply_scaler, build_samples, clean, fit_scaler, split, standardize, subsample
from qkstars.metrics import binary_metrics, confusion
from qkstars.synthetic import synthetic_catalogue

records, report = clean(synthetic_catalogue(6000, seed=1, dirty=True))
print(report)

samples = build_samples(records)  # Amag, B-V, B-V+Amag, B-V-Amag
train, test = split(samples, test_fraction=0.2, seed=42)
train = subsample(train, 800, seed=42)
test = subsample(test, 800, seed=42)
print(len(train), "train /", len(test), "test")

scaler = fit_scaler(train.X, train.names)


def report_scores(name, pred):
    m = binary_metrics(confusion(test.y, pred, [-1, 1]))
    print(f"{name:8s} acc={m.accuracy:.3f} f1={m.f1:.3f} spec={m.specificity:.3f} sens={m.sensitivity:.3f}")


# quantum kernel: features squeezed into [0, pi]
Xtr, Xte = apply_scaler(scaler, train.X), apply_scaler(scaler, test.X)
qk = QuantumKernel(FeatureMapConfig(4))
model = train_svm(kernel_matrix(Xtr, qk).entries, train.y, C=1.0)
report_scores("quantum", predict_binary(model, cross_kernel_matrix(Xtr, Xte, qk)))
print("support vectors:", len(model.support))

# Gaussian kernel on standardised features
Ztr, Zte = standardize(scaler, train.X), standardize(scaler, test.X)
rbf = RBFKernel(1.0)
model = train_svm(kernel_matrix(Ztr, rbf).entries, train.y, C=1.0)
report_scores("rbf", predict_binary(model, cross_kernel_matrix(Ztr, Zte, rbf)))

report_scores("knn", knn_predict_many(knn_fit(Ztr, train.y, k=5), Zte))
report_scores("logistic", logistic_predict(logistic_train(Ztr, train.y), Zte))

# which way do the errors go?
cm = confusion(test.y, predict_binary(model, cross_kernel_matrix(Ztr, Zte, rbf)), [-1, 1])
print(np.asarray(cm.counts))
