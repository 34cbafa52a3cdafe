"""
A tour of the ZZ feature map
============================

Encode a few points, look at the amplitudes, and check the one-qubit kernel
against its closed form.
"""

import numpy as np

from qkstars import FeatureMapConfig, encode_feature_map, fidelity_kernel, kernel_matrix, QuantumKernel

# one qubit, one repetition: H then P(2x)
one = FeatureMapConfig(n_features=1, repetitions=1)
for x in (0.0, np.pi / 4, np.pi / 2):
    print(x, np.round(encode_feature_map([x], one).amplitudes, 4))

# the kernel reduces to cos^2(x - y)
x, y = 0.3, 1.2
print("K =", fidelity_kernel([x], [y], one), " cos^2 =", np.cos(x - y) ** 2)

# two features, default two repetitions, full entanglement
cfg = FeatureMapConfig(2)
s = encode_feature_map([0.3, 1.1], cfg)
print("norm", s.norm_squared())
print(np.round(s.amplitudes, 4))

# a small Gram matrix
rng = np.random.default_rng(0)
X = rng.uniform(0, np.pi, size=(6, 2))
K = kernel_matrix(X, QuantumKernel(cfg)).entries
print(np.round(K, 3))
print("smallest eigenvalue", np.linalg.eigvalsh(K).min())
