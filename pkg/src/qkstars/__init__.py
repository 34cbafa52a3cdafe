"""Quantum-kernel SVM toolkit for dwarf/giant and spectral-type star classification."""

from .errors import (
    CapacityError,
    ConvergenceWarning,
    EncodingDomainError,
    SchemaError,
    ValidationError,
)
from .statevector import (
    FeatureMapConfig,
    StateVector,
    apply_hadamard,
    apply_phase,
    apply_zz_phase,
    encode_feature_map,
    inner_product,
    new_zero_state,
)
from .kernels import (
    KernelMatrix,
    QuantumKernel,
    RBFKernel,
    cross_kernel_matrix,
    fidelity_kernel,
    kernel_matrix,
    precompute_encodings,
    rbf_kernel,
)
from .svm import (
    MultiClassModel,
    SvmModel,
    decision_values,
    predict_binary,
    predict_multi,
    train_one_vs_rest,
    train_svm,
)

__version__ = "0.1.0"
