"""
Gram-matrix build time vs threads
=================================

Same matrix at every worker count, bit for bit; only the wall time moves.
"""

import os
import time

import numpy as np

from qkstars import FeatureMapConfig, QuantumKernel, kernel_matrix

rng = np.random.default_rng(42)
X = rng.uniform(0, np.pi, size=(300, 4))
qk = QuantumKernel(FeatureMapConfig(4))

print("cpus:", os.cpu_count())
ref = None
for workers in (1, 2, 4):
    t0 = time.perf_counter()
    K = kernel_matrix(X, qk, workers=workers).entries
    dt = time.perf_counter() - t0
    ref = K if ref is None else ref
    print(f"workers={workers} {dt:.3f}s identical={np.array_equal(K, ref)}")
