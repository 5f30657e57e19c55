"""Pure-numpy versions of the state-vector kernels.

Qubit ``k`` of an ``n``-qubit register is bit ``n - 1 - k`` of the amplitude
index, so the first label is the most significant bit.
"""
import numpy as np


def _as_tensor(amps, n):
    return np.asarray(amps, dtype=np.complex128).reshape((2,) * n)


def apply_1q(amps, n, k, u):
    psi = _as_tensor(amps, n)
    psi = np.tensordot(u, psi, axes=([1], [k]))
    return np.ascontiguousarray(np.moveaxis(psi, 0, k)).reshape(-1)


def apply_2q(amps, n, k1, k2, u):
    psi = _as_tensor(amps, n)
    u4 = np.asarray(u, dtype=np.complex128).reshape(2, 2, 2, 2)
    psi = np.tensordot(u4, psi, axes=([2, 3], [k1, k2]))
    return np.ascontiguousarray(np.moveaxis(psi, [0, 1], [k1, k2])).reshape(-1)


def qubit_probs(amps, n, k):
    psi = _as_tensor(amps, n)
    axes = tuple(i for i in range(n) if i != k)
    p = np.sum(np.abs(psi) ** 2, axis=axes) if axes else np.abs(psi) ** 2
    return float(p[0]), float(p[1])


def project_qubit(amps, n, k, vec):
    psi = _as_tensor(amps, n)
    rest = np.tensordot(np.conj(vec), psi, axes=([0], [k]))
    return np.ascontiguousarray(rest).reshape(-1)


def pair_probs(amps, n, k1, k2, basis):
    """Probabilities of projecting qubits (k1, k2) onto each row of ``basis``."""
    psi = np.moveaxis(_as_tensor(amps, n), [k1, k2], [0, 1]).reshape(4, -1)
    overlaps = np.conj(np.asarray(basis)) @ psi
    return np.sum(np.abs(overlaps) ** 2, axis=1)


def project_pair(amps, n, k1, k2, vec):
    psi = np.moveaxis(_as_tensor(amps, n), [k1, k2], [0, 1]).reshape(4, -1)
    return np.ascontiguousarray(np.conj(np.asarray(vec)) @ psi)
