"""Pure states of a few labelled qubits and the operations the protocol needs.

Amplitudes are stored in lexicographic order of the labels with ``|0>``
before ``|1>``: the first label is the most significant bit of the index.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..rng import RngStream

ATOL = 1e-12
MAX_QUBITS = 6

_S = 1 / math.sqrt(2)


class QuantumStateError(ValueError):
    """Raised for malformed states or calls that address missing qubits."""


class MeasBasis(enum.Enum):
    Z = "Z"
    X = "X"

    @property
    def eigenvectors(self) -> np.ndarray:
        """Rows are the eigenvectors for outcome 0 and outcome 1."""
        return _BASIS_VECTORS[self]


_BASIS_VECTORS = {
    MeasBasis.Z: np.array([[1, 0], [0, 1]], dtype=np.complex128),
    # outcome 0 is |+x>, outcome 1 is |-x>
    MeasBasis.X: np.array([[_S, _S], [_S, -_S]], dtype=np.complex128),
}


class CodingOp(enum.IntEnum):
    """Dense-coding operations; the integer value is the encoded 2-bit key."""

    U0 = 0b00
    U1 = 0b01
    U2 = 0b10
    U3 = 0b11

    @property
    def bits(self) -> str:
        return format(int(self), "02b")

    @property
    def matrix(self) -> np.ndarray:
        return _CODING_MATRICES[self]

    def flips(self, basis: MeasBasis) -> bool:
        """Whether this op exchanges the two eigenstates of ``basis``."""
        if basis is MeasBasis.Z:
            return self in (CodingOp.U2, CodingOp.U3)
        return self in (CodingOp.U1, CodingOp.U3)


_CODING_MATRICES = {
    CodingOp.U0: np.array([[1, 0], [0, 1]], dtype=np.complex128),
    CodingOp.U1: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    CodingOp.U2: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    CodingOp.U3: np.array([[0, 1], [-1, 0]], dtype=np.complex128),
}


class BellKind(enum.Enum):
    PSI_MINUS = "psi-"
    PSI_PLUS = "psi+"
    PHI_MINUS = "phi-"
    PHI_PLUS = "phi+"

    @property
    def vector(self) -> np.ndarray:
        return _BELL_VECTORS[self]

    def correlated(self, basis: MeasBasis) -> bool:
        """True if both halves give equal outcomes when measured in ``basis``."""
        return _CORRELATED[self, basis]


BELL_KINDS = tuple(BellKind)

_BELL_VECTORS = {
    BellKind.PSI_MINUS: np.array([0, _S, -_S, 0], dtype=np.complex128),
    BellKind.PSI_PLUS: np.array([0, _S, _S, 0], dtype=np.complex128),
    BellKind.PHI_MINUS: np.array([_S, 0, 0, -_S], dtype=np.complex128),
    BellKind.PHI_PLUS: np.array([_S, 0, 0, _S], dtype=np.complex128),
}
BELL_BASIS = np.array([_BELL_VECTORS[k] for k in BELL_KINDS])

_CORRELATED = {
    (BellKind.PSI_MINUS, MeasBasis.Z): False,
    (BellKind.PSI_PLUS, MeasBasis.Z): False,
    (BellKind.PHI_MINUS, MeasBasis.Z): True,
    (BellKind.PHI_PLUS, MeasBasis.Z): True,
    (BellKind.PSI_MINUS, MeasBasis.X): False,
    (BellKind.PSI_PLUS, MeasBasis.X): True,
    (BellKind.PHI_MINUS, MeasBasis.X): False,
    (BellKind.PHI_PLUS, MeasBasis.X): True,
}


@dataclass(frozen=True, eq=False)
class PureState:
    labels: tuple
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128).reshape(-1)
        n = len(labels)
        if not 1 <= n <= MAX_QUBITS:
            raise QuantumStateError(f"expected 1..{MAX_QUBITS} qubits, got {n}")
        if len(set(labels)) != n:
            raise QuantumStateError(f"duplicate labels in {labels}")
        if amps.shape != (1 << n,):
            raise QuantumStateError(f"{n} qubits need {1 << n} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if not math.isfinite(norm):
            raise QuantumStateError("amplitudes must be finite")
        if abs(norm - 1) > 1e-9:
            raise QuantumStateError(f"state not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amps", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise QuantumStateError(f"qubit {label!r} not in {self.labels}") from None

    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(self.labels + other.labels, np.kron(self.amps, other.amps))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amps, other.reorder(self.labels).amps))

    def reorder(self, labels) -> "PureState":
        labels = tuple(labels)
        if labels == self.labels:
            return self
        if sorted(map(str, labels)) != sorted(map(str, self.labels)):
            raise QuantumStateError(f"cannot reorder {self.labels} as {labels}")
        perm = [self.labels.index(lab) for lab in labels]
        psi = self.amps.reshape((2,) * self.n_qubits).transpose(perm)
        return PureState(labels, psi.reshape(-1))

    def equiv(self, other: "PureState", atol: float = ATOL) -> bool:
        """Equality up to a global phase."""
        if set(self.labels) != set(other.labels):
            return False
        return abs(abs(self.overlap(other)) - 1) <= atol


def basis_state(label, basis: MeasBasis, bit: int) -> PureState:
    return PureState((label,), basis.eigenvectors[bit])


def ket(bits: str, labels) -> PureState:
    """Computational basis state, e.g. ``ket("10", ("C", "P"))``."""
    amps = np.zeros(1 << len(bits), dtype=np.complex128)
    amps[int(bits, 2)] = 1
    return PureState(tuple(labels), amps)


def bell_state(kind: BellKind, labels=("B", "C")) -> PureState:
    return PureState(tuple(labels), kind.vector)


def apply_unitary(state: PureState, target, u) -> PureState:
    k = state.index(target)
    return PureState(state.labels, kernels.apply_1q(state.amps, state.n_qubits, k, u))


def apply_coding(state: PureState, target, op: CodingOp) -> PureState:
    return apply_unitary(state, target, CodingOp(op).matrix)


def _choose(probs, rng: RngStream) -> int:
    u = rng.random() * float(sum(probs))
    acc = 0.0
    last = 0
    for i, p in enumerate(probs):
        if p <= 0:
            continue
        last = i
        acc += p
        if u < acc:
            return i
    return last


def measure_split(state: PureState, target, basis: MeasBasis, rng: RngStream):
    """Measure ``target`` and factor it out.

    Returns ``(outcome, rest)`` where ``rest`` is the renormalized state of the
    remaining qubits, or ``None`` when ``target`` was the only qubit.
    """
    k = state.index(target)
    n = state.n_qubits
    vecs = MeasBasis(basis).eigenvectors
    if basis is MeasBasis.Z:
        probs = kernels.qubit_probs(state.amps, n, k)
    else:
        rotated = kernels.apply_1q(state.amps, n, k, vecs.conj())
        probs = kernels.qubit_probs(rotated, n, k)
    outcome = _choose(probs, rng)
    if n == 1:
        return outcome, None
    rest = kernels.project_qubit(state.amps, n, k, vecs[outcome])
    rest = rest / math.sqrt(probs[outcome])
    labels = state.labels[:k] + state.labels[k + 1:]
    return outcome, PureState(labels, rest)


def measure_qubit(state: PureState, target, basis: MeasBasis, rng: RngStream):
    """Projective measurement of one qubit.

    The measured qubit stays in the returned state as the eigenstate that was
    observed, in its original position.
    """
    outcome, rest = measure_split(state, target, basis, rng)
    eig = basis_state(target, basis, outcome)
    if rest is None:
        return outcome, eig
    return outcome, eig.tensor(rest).reorder(state.labels)


def bell_probabilities(state: PureState, pair) -> np.ndarray:
    k1, k2 = state.index(pair[0]), state.index(pair[1])
    return kernels.pair_probs(state.amps, state.n_qubits, k1, k2, BELL_BASIS)


def bell_measure_split(state: PureState, pair, rng: RngStream):
    """Bell-basis measurement of ``pair``; returns ``(kind, rest)``."""
    k1, k2 = state.index(pair[0]), state.index(pair[1])
    n = state.n_qubits
    probs = kernels.pair_probs(state.amps, n, k1, k2, BELL_BASIS)
    m = _choose(probs, rng)
    kind = BELL_KINDS[m]
    if n == 2:
        return kind, None
    rest = kernels.project_pair(state.amps, n, k1, k2, kind.vector) / math.sqrt(probs[m])
    labels = tuple(lab for i, lab in enumerate(state.labels) if i not in (k1, k2))
    return kind, PureState(labels, rest)


def bell_measure(state: PureState, pair, rng: RngStream) -> BellKind:
    return bell_measure_split(state, pair, rng)[0]


def _decode_table():
    table = {}
    for initial in BELL_KINDS:
        for op in CodingOp:
            out = apply_coding(bell_state(initial), "B", op).amps
            overlaps = np.abs(BELL_BASIS.conj() @ out)
            table[initial, BELL_KINDS[int(np.argmax(overlaps))]] = op
    return table


_DECODE = _decode_table()


def decode_key(initial: BellKind, measured: BellKind) -> int:
    """Two-bit key of the combined operation taking ``initial`` to ``measured``.

    The combined operation of both agents is, up to phase, a single coding
    op on one half; its bit value is the XOR of the two agents' bit values.
    """
    return int(_DECODE[initial, measured])


def utb_matrix(phi: float) -> np.ndarray:
    """Attack unitary on (target, ancilla) in the basis |00>, |01>, |10>, |11>.

    |00> -> |00> and |10> -> cos(phi)|10> + sin(phi)|01>; the ancilla-excited
    inputs are completed so the matrix is unitary.
    """
    c, s = math.cos(phi), math.sin(phi)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c, s, 0],
            [0, -s, c, 0],
            [0, 0, 0, 1],
        ],
        dtype=np.complex128,
    )


def apply_utb(state: PureState, target, ancilla, phi: float) -> PureState:
    if not 0 <= phi <= math.pi / 4 + ATOL:
        raise ValueError(f"attack strength phi={phi!r} outside [0, pi/4]")
    ka, kt = state.index(ancilla), state.index(target)
    _, p1 = kernels.qubit_probs(state.amps, state.n_qubits, ka)
    if p1 > ATOL:
        raise QuantumStateError(f"ancilla {ancilla!r} is not in |0>")
    amps = kernels.apply_2q(state.amps, state.n_qubits, kt, ka, utb_matrix(phi))
    return PureState(state.labels, amps)
