"""Exact linear algebra for the handful of qubits a protocol round touches."""
from .density import (
    DensityMatrix,
    density_from_pure,
    entropy_from_eigenvalues,
    partial_trace,
    von_neumann_entropy,
)
from .eigen import eigvalsh
from .states import (
    ATOL,
    BELL_BASIS,
    BELL_KINDS,
    BellKind,
    CodingOp,
    MeasBasis,
    PureState,
    QuantumStateError,
    apply_coding,
    apply_unitary,
    apply_utb,
    basis_state,
    bell_measure,
    bell_measure_split,
    bell_probabilities,
    bell_state,
    decode_key,
    ket,
    measure_qubit,
    measure_split,
    utb_matrix,
)

__all__ = [
    "ATOL",
    "BELL_BASIS",
    "BELL_KINDS",
    "BellKind",
    "CodingOp",
    "DensityMatrix",
    "MeasBasis",
    "PureState",
    "QuantumStateError",
    "apply_coding",
    "apply_unitary",
    "apply_utb",
    "basis_state",
    "bell_measure",
    "bell_measure_split",
    "bell_probabilities",
    "bell_state",
    "decode_key",
    "density_from_pure",
    "eigvalsh",
    "entropy_from_eigenvalues",
    "ket",
    "measure_qubit",
    "measure_split",
    "partial_trace",
    "utb_matrix",
    "von_neumann_entropy",
]
