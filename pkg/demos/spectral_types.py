"""
Spectral types, one-vs-rest
===========================

Seven Harvard letters, but only classes with enough members are kept.
"""

import numpy as np

from qkstars import FeatureMapConfig, QuantumKernel, cross_kernel_matrix, kernel_matrix, predict_multi, train_one_vs_rest
from qkstars.baselines import knn_fit, knn_predict_many
from qkstars.data import apply_scaler, build_samples, clean, fit_scaler, restrict_classes, split, standardize, subsample
from qkstars.metrics import confusion, multiclass_summary, to_percent
from qkstars.synthetic import synthetic_catalogue

records, _ = clean(synthetic_catalogue(5000, seed=2))
samples, kept = restrict_classes(build_samples(records), min_count=50)
print(kept)

train, test = split(samples, 0.2, seed=42, stratify="spectral")
train = subsample(train, 1000, seed=42, stratify="spectral")
classes = kept["kept_classes"]

scaler = fit_scaler(train.X, train.names)
Xtr, Xte = apply_scaler(scaler, train.X), apply_scaler(scaler, test.X)
qk = QuantumKernel(FeatureMapConfig(4))
model = train_one_vs_rest(kernel_matrix(Xtr, qk).entries, train.spectral, C=1.0)
pred = predict_multi(model, cross_kernel_matrix(Xtr, Xte, qk))

cm = confusion(test.spectral, pred, classes)
print(multiclass_summary(cm))
print(classes)
print(np.round(to_percent(cm).values, 1))

knn = knn_predict_many(knn_fit(standardize(scaler, train.X), train.spectral, 5), standardize(scaler, test.X))
print("knn accuracy", confusion(test.spectral, knn, classes).accuracy())
