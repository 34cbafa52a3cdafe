import numpy as np
import pytest

from oracles import oracle_fidelity, oracle_state
from qkstars import (
    EncodingDomainError,
    FeatureMapConfig,
    KernelMatrix,
    QuantumKernel,
    RBFKernel,
    cross_kernel_matrix,
    encode_feature_map,
    fidelity_kernel,
    kernel_matrix,
    precompute_encodings,
    rbf_kernel,
)
from qkstars.kernels import load_matrix_csv, save_matrix_csv


def test_self_fidelity(rng):
    cfg = FeatureMapConfig(3)
    for _ in range(10):
        x = rng.uniform(0, np.pi, 3)
        assert abs(fidelity_kernel(x, x, cfg) - 1.0) <= 1e-10


def test_single_qubit_closed_form(rng):
    cfg = FeatureMapConfig(1, repetitions=1)
    assert abs(fidelity_kernel([0.0], [np.pi / 2], cfg)) <= 1e-10
    for x, y in rng.uniform(0, np.pi, (50, 2)):
        assert abs(fidelity_kernel([x], [y], cfg) - np.cos(x - y) ** 2) <= 1e-10


def test_two_feature_oracle():
    k = fidelity_kernel([0.3, 1.1], [0.9, 0.2], FeatureMapConfig(2))
    assert abs(k - oracle_fidelity([0.3, 1.1], [0.9, 0.2], 2)) <= 1e-10


def test_fidelity_domain_error():
    with pytest.raises(EncodingDomainError):
        fidelity_kernel([0.1, -0.5], [0.1, 0.1], FeatureMapConfig(2))


def test_rbf_examples():
    assert rbf_kernel([1.0, 2.0], [1.0, 2.0], 0.3) == 1.0
    sigma = 0.7
    y = [np.sqrt(2) * sigma, 0.0]
    assert abs(rbf_kernel([0.0, 0.0], y, sigma) - np.exp(-1)) <= 1e-12
    assert abs(rbf_kernel([0, 0], [3, 4], 5) - np.exp(-0.5)) <= 1e-15
    with pytest.raises(ValueError):
        rbf_kernel([0], [1], 0.0)
    with pytest.raises(ValueError):
        rbf_kernel([0, 1], [1], 1.0)


def test_gram_small_cases():
    q = QuantumKernel(FeatureMapConfig(2))
    assert kernel_matrix([[0.4, 1.0]], q).entries.tolist() == [[1.0]]
    K = kernel_matrix([[0.4, 1.0]] * 3, q).entries
    np.testing.assert_allclose(K, np.ones((3, 3)), atol=1e-12)


@pytest.mark.parametrize("kernel", [QuantumKernel(FeatureMapConfig(3)), RBFKernel(0.8)])
def test_gram_properties(rng, kernel):
    X = rng.uniform(0, np.pi, (60, 3))
    K = kernel_matrix(X, kernel).entries
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
    assert K.min() >= 0.0 and K.max() <= 1.0
    assert np.linalg.eigvalsh(K).min() >= -1e-8


def test_gram_matches_pairwise_oracle(rng):
    cfg = FeatureMapConfig(2)
    X = rng.uniform(0, np.pi, (6, 2))
    K = kernel_matrix(X, QuantumKernel(cfg)).entries
    for i in range(6):
        for j in range(6):
            assert abs(K[i, j] - oracle_fidelity(X[i], X[j], 2)) <= 1e-10


@pytest.mark.parametrize("kernel", [QuantumKernel(FeatureMapConfig(4)), RBFKernel(1.3)])
def test_gram_worker_determinism(rng, kernel):
    X = rng.uniform(0, np.pi, (97, 4))
    ref = kernel_matrix(X, kernel, workers=1).entries
    for w in (2, 3, 8, 200):
        assert np.array_equal(kernel_matrix(X, kernel, workers=w).entries, ref)


def test_gram_errors():
    q = QuantumKernel(FeatureMapConfig(2))
    with pytest.raises(ValueError):
        kernel_matrix([], q)
    with pytest.raises(ValueError):
        kernel_matrix([[0.1, 0.2]], q, workers=0)
    with pytest.raises(ValueError):
        kernel_matrix([[0.1, 0.2, 0.3]], q)


def test_cross_kernel(rng):
    cfg = FeatureMapConfig(3)
    q = QuantumKernel(cfg)
    Xtr = rng.uniform(0, np.pi, (6, 3))
    Xte = rng.uniform(0, np.pi, (4, 3))
    R = cross_kernel_matrix(Xtr, Xte, q, workers=3)
    assert R.shape == (4, 6)
    for i in range(4):
        for j in range(6):
            assert abs(R[i, j] - oracle_fidelity(Xte[i], Xtr[j], 2)) <= 1e-10
    row = cross_kernel_matrix(Xtr, Xtr[2:3], q)
    assert abs(row[0, 2] - 1.0) <= 1e-12
    same = cross_kernel_matrix(Xtr, Xtr, q)
    np.testing.assert_allclose(same, kernel_matrix(Xtr, q).entries, atol=1e-12)
    with pytest.raises(ValueError):
        cross_kernel_matrix(Xtr, Xte[:, :2], q)


def test_cross_kernel_worker_determinism(rng):
    q = QuantumKernel(FeatureMapConfig(4))
    Xtr = rng.uniform(0, np.pi, (40, 4))
    Xte = rng.uniform(0, np.pi, (23, 4))
    ref = cross_kernel_matrix(Xtr, Xte, q, 1)
    for w in (2, 8):
        assert np.array_equal(cross_kernel_matrix(Xtr, Xte, q, w), ref)


def test_precompute_encodings(rng):
    cfg = FeatureMapConfig(2)
    assert precompute_encodings([], cfg) == []
    x = rng.uniform(0, np.pi, 2)
    (s,) = precompute_encodings([x], cfg)
    assert np.array_equal(s.amplitudes, encode_feature_map(x, cfg).amplitudes)
    np.testing.assert_allclose(s.amplitudes, oracle_state(x, 2), atol=1e-12)


def test_provenance():
    q = QuantumKernel(FeatureMapConfig(3, repetitions=1))
    p = q.provenance()
    assert p["feature_map"]["repetitions"] == 1
    assert RBFKernel(2.0).provenance()["sigma"] == 2.0
    with pytest.raises(ValueError):
        RBFKernel(-1.0)


def test_csv_round_trip(tmp_path, rng):
    X = rng.uniform(0, np.pi, (12, 2))
    km = kernel_matrix(X, QuantumKernel(FeatureMapConfig(2)))
    km.to_csv(tmp_path / "k.csv")
    back = KernelMatrix.from_csv(tmp_path / "k.csv")
    assert np.array_equal(back.entries, km.entries)
    save_matrix_csv(km.entries[:3], tmp_path / "r.csv")
    assert np.array_equal(load_matrix_csv(tmp_path / "r.csv"), km.entries[:3])
    with pytest.raises(ValueError):
        KernelMatrix.from_csv(tmp_path / "r.csv")
