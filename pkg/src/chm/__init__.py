"""Circuit harmonic matrices for re-uploading parametrised quantum circuits.

The joint Fourier coefficients C_{omega k} of f(x; theta) over the input
variable and the parameter torus are computed two independent ways (exact
symbolic Pauli propagation; truncated Monte-Carlo estimation) and drive the
derived coefficient statistics and training kernels.
"""

from .circuits import (
    Circuit,
    CliffordGate,
    EncoderGate,
    Layer,
    RotationGate,
    ValidationReport,
    build_family,
    validate,
)
from .cmatrix import CMatrix, HarmonicIndex
from .estimation import (
    TruncatedK,
    dft_coefficients,
    enumerate_K,
    estimate_C,
    mc_covariance,
    mc_jacobian_gram,
    mc_moments,
    mc_variance,
)
from .kernels import (
    CorrelationMatrix,
    H_averaged,
    H_kernel,
    M_averaged,
    M_kernel,
    correlation,
    cosine_similarity,
    covariance_from_C,
    data_qntk,
    design_matrix,
    frobenius_error,
    mean_offdiag,
    row_energy,
    variance_profile,
)
from .paulis import PauliString
from .pauliprop import (
    ExactPropagationError,
    PropNode,
    TrigMonomial,
    backpropagate,
    conjugate_rotation,
    exact_C,
    support_bound,
    trig_to_characters,
)
from .pipelines import (
    ExperimentConfig,
    analytic_circuit,
    run_analytic_suite,
    run_correlation_pipeline,
    run_pipelines,
    run_qntk_pipeline,
    run_variance_pipeline,
)
from .sampling import SampleEnsemble, sample_theta
from .simulator import CompiledCircuit, expectation, gradient
from .spectral import FrequencySet, difference_set, minkowski_sum, redundancy

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CliffordGate",
    "CMatrix",
    "CompiledCircuit",
    "CorrelationMatrix",
    "EncoderGate",
    "ExactPropagationError",
    "ExperimentConfig",
    "FrequencySet",
    "HarmonicIndex",
    "H_averaged",
    "H_kernel",
    "Layer",
    "M_averaged",
    "M_kernel",
    "PauliString",
    "PropNode",
    "RotationGate",
    "SampleEnsemble",
    "TrigMonomial",
    "TruncatedK",
    "ValidationReport",
    "analytic_circuit",
    "backpropagate",
    "build_family",
    "conjugate_rotation",
    "correlation",
    "cosine_similarity",
    "covariance_from_C",
    "data_qntk",
    "design_matrix",
    "dft_coefficients",
    "difference_set",
    "enumerate_K",
    "estimate_C",
    "exact_C",
    "expectation",
    "frobenius_error",
    "gradient",
    "mc_covariance",
    "mc_jacobian_gram",
    "mc_moments",
    "mc_variance",
    "mean_offdiag",
    "minkowski_sum",
    "redundancy",
    "row_energy",
    "run_analytic_suite",
    "run_correlation_pipeline",
    "run_pipelines",
    "run_qntk_pipeline",
    "run_variance_pipeline",
    "sample_theta",
    "support_bound",
    "trig_to_characters",
    "validate",
    "variance_profile",
]
