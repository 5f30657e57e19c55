"""Joint quantum state of every particle in flight.

Particles live in small independent components; a component is merged with
another only while a joint operation needs both, and measured qubits are
split back out immediately so components stay a few qubits wide.
"""
import itertools

from ..quantum_core import (
    MeasBasis,
    PureState,
    apply_unitary,
    apply_utb,
    basis_state,
    bell_measure_split,
    bell_state,
    ket,
    measure_split,
)
from ..quantum_core.states import CodingOp


class QuantumRegister:
    def __init__(self):
        self._owner = {}
        self._states = {}
        self._ids = itertools.count()

    def __contains__(self, pid):
        return pid in self._owner

    def add(self, state: PureState):
        cid = next(self._ids)
        for lab in state.labels:
            if lab in self._owner:
                raise KeyError(f"particle {lab!r} already registered")
            self._owner[lab] = cid
        self._states[cid] = state

    def state_of(self, pid) -> PureState:
        return self._states[self._owner[pid]]

    def _merge(self, a, b):
        ca, cb = self._owner[a], self._owner[b]
        if ca == cb:
            return ca
        joint = self._states[ca].tensor(self._states.pop(cb))
        for lab in joint.labels:
            self._owner[lab] = ca
        self._states[ca] = joint
        return ca

    def _split_off(self, cid, single: PureState, rest):
        if rest is None:
            self._states[cid] = single
            return
        self._states[cid] = rest
        self.add_existing(single)

    def add_existing(self, state: PureState):
        cid = next(self._ids)
        for lab in state.labels:
            self._owner[lab] = cid
        self._states[cid] = state

    def apply(self, pid, u):
        cid = self._owner[pid]
        self._states[cid] = apply_unitary(self._states[cid], pid, u)

    def apply_coding(self, pid, op: CodingOp):
        self.apply(pid, CodingOp(op).matrix)

    def measure(self, pid, basis: MeasBasis, rng) -> int:
        cid = self._owner[pid]
        outcome, rest = measure_split(self._states[cid], pid, basis, rng)
        self._split_off(cid, basis_state(pid, basis, outcome), rest)
        return outcome

    def bell_measure(self, p1, p2, rng):
        cid = self._merge(p1, p2)
        kind, rest = bell_measure_split(self._states[cid], (p1, p2), rng)
        self._split_off(cid, bell_state(kind, (p1, p2)), rest)
        return kind

    def attach_ancilla(self, pid, ancilla):
        self.add(ket("0", (ancilla,)))
        self._merge(pid, ancilla)

    def apply_utb(self, pid, ancilla, phi):
        self.attach_ancilla(pid, ancilla)
        cid = self._owner[pid]
        self._states[cid] = apply_utb(self._states[cid], pid, ancilla, phi)

    def rename(self, old, new):
        """Give particle ``old`` the identifier ``new`` (for swapping in fakes)."""
        if new in self._owner:
            raise KeyError(f"particle {new!r} already registered")
        cid = self._owner.pop(old)
        st = self._states[cid]
        labels = tuple(new if lab == old else lab for lab in st.labels)
        self._states[cid] = PureState(labels, st.amps)
        self._owner[new] = cid

    def width(self, pid) -> int:
        return self.state_of(pid).n_qubits
