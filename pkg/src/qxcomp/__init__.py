"""Lossless quantum data compression under a mismatched source model."""

from .coding import (
    Codebook,
    build_prefix_code,
    cross_entropy,
    expected_length,
    shannon_entropy,
    shannon_lengths,
)
from .estimator import MismatchedSourceCompressor
from .linalg import SpectralDecomposition, eig_hermitian, fidelity, kron, matrix_fn
from .protocol import (
    LengthConditionSpec,
    ProtocolReport,
    QuantumSource,
    basis_change,
    compress_exact,
    induced_distribution,
    length_condition,
    length_observable,
    mean_codeword_length,
    pi_mass_exact,
    pi_mass_mc,
    protocol_report,
    quantum_cross_entropy,
    von_neumann_entropy,
)
from .typicality import (
    MassEstimate,
    empirical_type,
    enumerate_typical,
    is_strong_typical,
    is_weak_typical,
    sequence_log_prob,
    typical_mass_exact,
    typical_mass_mc,
)

__version__ = "0.1.0"
