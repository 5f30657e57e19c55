"""Density matrices over labelled qubits, partial traces and entropy."""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .eigen import eigvalsh
from .states import PureState, QuantumStateError

HERMITIAN_TOL = 1e-12
EIG_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    labels: tuple
    matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        m = np.array(self.matrix, dtype=np.complex128)
        dim = 1 << len(labels)
        if m.shape != (dim, dim):
            raise QuantumStateError(f"{len(labels)} qubits need a {dim}x{dim} matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise QuantumStateError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > HERMITIAN_TOL:
            raise QuantumStateError(f"density matrix trace is {np.trace(m).real!r}")
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", m)
        if eigvalsh(m)[0] < EIG_FLOOR:
            raise QuantumStateError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh(self.matrix)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(self.labels + other.labels, np.kron(self.matrix, other.matrix))

    def in_basis(self, basis_bits) -> np.ndarray:
        """Entries re-indexed by computational basis strings, e.g. ``["00", "11", "01", "10"]``."""
        idx = [int(b, 2) for b in basis_bits]
        return self.matrix[np.ix_(idx, idx)]


def density_from_pure(state: PureState) -> DensityMatrix:
    return DensityMatrix(state.labels, np.outer(state.amps, state.amps.conj()))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    keep = [lab for lab in rho.labels if lab in set(keep)]
    if not keep:
        raise QuantumStateError("partial trace must keep at least one qubit")
    missing = set(keep) - set(rho.labels)
    if missing:
        raise QuantumStateError(f"unknown qubits {sorted(missing)}")
    n = len(rho.labels)
    kept = [rho.labels.index(lab) for lab in keep]
    traced = [i for i in range(n) if i not in kept]
    t = rho.matrix.reshape((2,) * (2 * n))
    # bring kept row axes, kept column axes, then traced row/column pairs together
    order = kept + [n + i for i in kept] + traced + [n + i for i in traced]
    t = t.transpose(order)
    dk, dt = 1 << len(kept), 1 << len(traced)
    t = t.reshape(dk, dk, dt, dt)
    return DensityMatrix(tuple(keep), np.einsum("abii->ab", t))


def entropy_from_eigenvalues(eigs) -> float:
    total = 0.0
    for lam in eigs:
        lam = float(lam)
        if lam > 0:
            total -= lam * math.log2(lam)
    return total


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; eigenvalues below zero by rounding count as zero."""
    return max(entropy_from_eigenvalues(rho.eigenvalues()), 0.0)
