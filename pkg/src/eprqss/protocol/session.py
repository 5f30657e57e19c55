"""One run of the three-party secret sharing protocol.

Stages run in protocol order over all groups: Alice prepares and dispatches,
Bob and Charlie choose checking or coding per particle, particles come back,
Alice decodes the coded pairs and reconciles the checks, issues a verdict and
only then discloses the rearrangements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..quantum_core import (
    BELL_KINDS,
    BellKind,
    CodingOp,
    MeasBasis,
    basis_state,
    bell_state,
    decode_key,
)
from ..rng import RngStream
from .config import SessionConfig
from .permutations import GROUP_SIZE, Permutation, alphabet, reveal_bits
from .register import QuantumRegister
from .transcript import Transcript

AGENTS = ("bob", "charlie")
SIDE_OF = {"bob": "B", "charlie": "C"}
PAULIS = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


class DecodeError(RuntimeError):
    """Alice tried to decode a pair that carries no key."""


@dataclass(frozen=True)
class DecoySlot:
    group: int
    pair: int
    side: str
    basis: MeasBasis
    bit: int


@dataclass
class PairRecord:
    group: int
    index: int
    kind: BellKind
    b_id: str
    c_id: str
    decoy_b: Optional[DecoySlot] = None
    decoy_c: Optional[DecoySlot] = None

    @property
    def is_decoy(self) -> bool:
        return self.decoy_b is not None or self.decoy_c is not None

    def particle(self, side: str) -> str:
        return self.b_id if side == "B" else self.c_id


@dataclass
class EprGroup:
    index: int
    pairs: list


@dataclass(frozen=True)
class ModeDecision:
    checking: bool
    basis: Optional[MeasBasis] = None
    op: Optional[CodingOp] = None


@dataclass
class AgentAction:
    agent: str
    group: int
    position: int
    pid: str
    decision: ModeDecision
    result: Optional[int] = None


@dataclass
class Tally:
    kept: int = 0
    errors: int = 0

    def add(self, error: bool):
        self.kept += 1
        self.errors += int(error)

    @property
    def rate(self) -> Optional[float]:
        return self.errors / self.kept if self.kept else None


@dataclass
class SessionReport:
    seed: int
    attack: str
    shared_key_alice: str
    key_bob: str
    key_charlie: str
    check_error_rate: Optional[float]
    check_kept: int
    check_errors: int
    check_kept_z: int
    check_errors_z: int
    check_kept_x: int
    check_errors_x: int
    decoy_error_rate: Optional[float]
    decoy_kept: int
    decoy_errors: int
    aborted: bool
    pairs_total: int
    pairs_used: int
    pairs_checked: int
    decoy_pairs: int
    decoys: int
    classical_bits_exchanged: int
    disclosure_bits: int
    key_pair_errors: int
    key_error_rate: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _bits(values) -> str:
    return "".join(format(v, "02b") for v in values)


def noise_step(register: QuantumRegister, pid: str, noise: float, rng: RngStream):
    """Depolarizing event: with probability ``noise`` apply a uniform Pauli (I, X, Y or Z)."""
    if rng.random() < noise:
        register.apply(pid, PAULIS[rng.index(4)])


def alice_prepare(config: SessionConfig, prep_rng: RngStream, decoy_rng: RngStream):
    """Prepare ``n_groups`` groups of four pairs plus the decoy substitutions.

    Returns ``(groups, decoys, register)``. A decoy replaces one particle of a
    pair with a Z or X eigenstate; the displaced particle stays with Alice.
    """
    register = QuantumRegister()
    groups, decoys = [], []
    for g in range(config.n_groups):
        pairs = []
        for i in range(GROUP_SIZE):
            kind = config.fixed_kind or BELL_KINDS[prep_rng.index(4)]
            rec = PairRecord(g, i, kind, f"g{g}.B{i}", f"g{g}.C{i}")
            sides = {}
            for side in ("B", "C"):
                if config.decoy_fraction > 0 and decoy_rng.random() < config.decoy_fraction:
                    slot = DecoySlot(g, i, side, MeasBasis.Z if decoy_rng.bit() == 0 else MeasBasis.X, decoy_rng.bit())
                    sides[side] = slot
                    decoys.append(slot)
            rec.decoy_b, rec.decoy_c = sides.get("B"), sides.get("C")
            if not sides:
                register.add(bell_state(kind, (rec.b_id, rec.c_id)))
            elif len(sides) == 2:
                for side, slot in sides.items():
                    register.add(basis_state(rec.particle(side), slot.basis, slot.bit))
            else:
                (side, slot), = sides.items()
                kept = f"{rec.particle(side)}.kept"
                labels = (kept, rec.c_id) if side == "B" else (rec.b_id, kept)
                register.add(bell_state(kind, labels))
                register.add(basis_state(rec.particle(side), slot.basis, slot.bit))
            pairs.append(rec)
        groups.append(EprGroup(g, pairs))
    return groups, decoys, register


def alice_dispatch(group: EprGroup, rng: RngStream, perms=None):
    """B sequence in original order, C sequence rearranged by a random permutation."""
    perms = perms or alphabet(4)
    perm = perms[rng.index(len(perms))]
    b_seq = [p.b_id for p in group.pairs]
    c_seq = perm.rearrange([p.c_id for p in group.pairs])
    return b_seq, c_seq, perm


def choose_mode(p_check: float, rng: RngStream) -> ModeDecision:
    if rng.random() < p_check:
        return ModeDecision(True, basis=MeasBasis.Z if rng.bit() == 0 else MeasBasis.X)
    return ModeDecision(False, op=CodingOp(rng.index(4)))


def agent_step(agent: str, pid: str, p_check: float, rng: RngStream,
               register: QuantumRegister, nature: RngStream, group: int = 0, position: int = 0) -> AgentAction:
    """Checking mode measures the particle (it is not returned); coding mode encodes on it."""
    decision = choose_mode(p_check, rng)
    action = AgentAction(agent, group, position, pid, decision)
    if decision.checking:
        action.result = register.measure(pid, decision.basis, nature)
    else:
        register.apply_coding(pid, decision.op)
    return action


def alice_decode(register: QuantumRegister, pair: PairRecord, actions: dict, nature: RngStream):
    """Bell-measure a fully coded pair; returns ``(measured kind, 2-bit key)``."""
    if pair.is_decoy:
        raise DecodeError(f"pair {pair.group}.{pair.index} holds a decoy")
    b_act, c_act = actions["B"], actions["C"]
    if b_act.decision.checking or c_act.decision.checking:
        raise DecodeError(f"pair {pair.group}.{pair.index} was chosen for checking")
    measured = register.bell_measure(pair.b_id, pair.c_id, nature)
    return measured, decode_key(pair.kind, measured)


class Session:
    """State of a single run; see :func:`run_session`."""

    def __init__(self, config: SessionConfig, strategy=None):
        self.config = config
        self.strategy = strategy
        self.alphabet = alphabet(config.perm_alphabet)
        self.transcript = Transcript()
        self._streams = {}
        self.groups: list = []
        self.decoys: list = []
        self.register: Optional[QuantumRegister] = None
        self.permutations: dict = {}
        self.sequences: dict = {}
        self.actions = {agent: {} for agent in AGENTS}
        self.key_alice: list = []
        self.key_truth: list = []
        self.key_pairs: list = []
        self.checks = {"all": Tally(), "Z": Tally(), "X": Tally()}
        self.decoy_tally = Tally()
        self._next_check = 0
        n_positions = GROUP_SIZE * config.n_groups
        self.position_bits = max(1, math.ceil(math.log2(n_positions)))
        self.verdict: Optional[bool] = None

    def stream(self, tag: str) -> RngStream:
        if tag not in self._streams:
            self._streams[tag] = RngStream(self.config.seed, tag)
        return self._streams[tag]

    # step 1 and 2
    def prepare_and_dispatch(self):
        cfg = self.config
        self.groups, self.decoys, self.register = alice_prepare(
            cfg, self.stream("alice/prepare"), self.stream("alice/decoy")
        )
        for group in self.groups:
            b_seq, c_seq, perm = alice_dispatch(group, self.stream("alice/perm"), self.alphabet)
            self.permutations[group.index] = perm
            self.sequences[group.index] = (b_seq, c_seq)
            for channel, seq in (("B", b_seq), ("C", c_seq)):
                self.transcript.send("2", "alice", AGENTS[channel == "C"], "send_sequence",
                                     {"group": group.index, "channel": channel, "count": len(seq)})
                self._traverse(channel, group.index, seq)

    def _traverse(self, channel, g, seq):
        if self.strategy is not None:
            self.strategy.forward(self, channel, g, seq)
        if self.config.noise > 0:
            for pid in seq:
                noise_step(self.register, pid, self.config.noise, self.stream("noise"))

    # step 3
    def agents_act(self):
        for agent in AGENTS:
            rng = self.stream(agent)
            nature = self.stream("nature")
            seq_index = 0 if agent == "bob" else 1
            for group in self.groups:
                seq = self.sequences[group.index][seq_index]
                for pos, pid in enumerate(seq):
                    act = agent_step(agent, pid, self.config.p_check, rng, self.register, nature, group.index, pos)
                    self.actions[agent][group.index, pos] = act
                    if act.decision.checking:
                        self.transcript.send("3a", agent, "all", "announce_position",
                                             {"group": group.index, "position": pos}, self.position_bits)

    def return_particles(self):
        for group in self.groups:
            b_seq, c_seq = self.sequences[group.index]
            returned = []
            for agent, seq in zip(AGENTS, (b_seq, c_seq)):
                ret = [None if self.actions[agent][group.index, j].decision.checking else pid
                       for j, pid in enumerate(seq)]
                self.transcript.send("3b", agent, "alice", "return_sequence",
                                     {"group": group.index, "count": sum(p is not None for p in ret)})
                returned.append(ret)
            if self.strategy is not None:
                self.strategy.returned(self, group.index, returned[0], returned[1])
            if self.config.noise > 0:
                for pid in returned[0] + returned[1]:
                    if pid is not None:
                        noise_step(self.register, pid, self.config.noise, self.stream("noise"))

    # step 4
    def pair_actions(self, pair: PairRecord) -> dict:
        perm = self.permutations[pair.group]
        return {
            "B": self.actions["bob"][pair.group, pair.index],
            "C": self.actions["charlie"][pair.group, perm.partner_position(pair.index)],
        }

    def _request(self, agent, act: AgentAction, reveal_op=False) -> int:
        cid = self._next_check
        self._next_check += 1
        self.transcript.send("4", "alice", agent, "request_reveal",
                             {"check": cid, "group": act.group, "position": act.position})
        # the agent answers only once asked
        if reveal_op:
            self.transcript.send("4", agent, "alice", "reveal_coding_op",
                                 {"check": cid, "op": int(act.decision.op)}, 2)
        else:
            self.transcript.send("4", agent, "alice", "reveal_basis_result",
                                 {"check": cid, "basis": act.decision.basis.value, "result": act.result}, 2)
        return cid

    def _revealed_basis_result(self, agent, cid):
        payload = self.transcript.reveal(agent, cid, "reveal_basis_result")
        return MeasBasis(payload["basis"]), payload["result"]

    def check_pair(self, pair: PairRecord, acts: dict):
        """Score one checked pair; returns ``(basis, error)`` or ``None`` if discarded."""
        b_chk, c_chk = acts["B"].decision.checking, acts["C"].decision.checking
        if b_chk and c_chk:
            cb = self._request("bob", acts["B"])
            cc = self._request("charlie", acts["C"])
            basis_b, r_b = self._revealed_basis_result("bob", cb)
            basis_c, r_c = self._revealed_basis_result("charlie", cc)
            if basis_b is not basis_c:
                return None
            return basis_b, (r_b == r_c) != pair.kind.correlated(basis_b)
        checker, coder = ("B", "C") if b_chk else ("C", "B")
        names = {"B": "bob", "C": "charlie"}
        basis_a = MeasBasis.Z if self.stream("alice/check").bit() == 0 else MeasBasis.X
        raw = self.register.measure(pair.particle(coder), basis_a, self.stream("nature"))
        c1 = self._request(names[checker], acts[checker])
        c2 = self._request(names[coder], acts[coder], reveal_op=True)
        basis_x, r_x = self._revealed_basis_result(names[checker], c1)
        op = CodingOp(self.transcript.reveal(names[coder], c2, "reveal_coding_op")["op"])
        if basis_x is not basis_a:
            return None
        corrected = raw ^ int(op.flips(basis_a))
        return basis_a, (r_x == corrected) != pair.kind.correlated(basis_a)

    def check_decoy(self, pair: PairRecord, slot: DecoySlot):
        agent = "bob" if slot.side == "B" else "charlie"
        act = self.pair_actions(pair)[slot.side]
        if not act.decision.checking:
            return None
        cid = self._request(agent, act)
        basis, result = self._revealed_basis_result(agent, cid)
        if basis is not slot.basis:
            return None
        return result != slot.bit

    def alice_step4(self):
        nature = self.stream("nature")
        for group in self.groups:
            for pair in group.pairs:
                acts = self.pair_actions(pair)
                if pair.is_decoy:
                    for slot in (pair.decoy_b, pair.decoy_c):
                        if slot is not None:
                            err = self.check_decoy(pair, slot)
                            if err is not None:
                                self.decoy_tally.add(err)
                    continue
                if acts["B"].decision.checking or acts["C"].decision.checking:
                    scored = self.check_pair(pair, acts)
                    if scored is not None:
                        basis, err = scored
                        self.checks["all"].add(err)
                        self.checks[basis.value].add(err)
                    continue
                _, key = alice_decode(self.register, pair, acts, nature)
                self.key_alice.append(key)
                self.key_truth.append(int(acts["B"].decision.op) ^ int(acts["C"].decision.op))
                self.key_pairs.append(pair)

    def decide(self) -> bool:
        rates = [r for r in (self.checks["all"].rate, self.decoy_tally.rate) if r is not None]
        worst = max(rates) if rates else 0.0
        self.verdict = worst > self.config.epsilon_threshold
        self.transcript.send("4", "alice", "all", "verdict", {
            "check_error_rate": self.checks["all"].rate,
            "decoy_error_rate": self.decoy_tally.rate,
            "aborted": self.verdict,
        })
        return self.verdict

    # step 5
    def disclose(self):
        bits = reveal_bits(len(self.alphabet))
        for group in self.groups:
            self.transcript.send("5", "alice", "all", "reveal_permutation",
                                 {"group": group.index, "permutation": self.permutations[group.index].index}, bits)
        if self.decoys:
            self.transcript.send("5", "alice", "all", "reveal_decoy_positions",
                                 {"slots": [[d.group, d.pair, d.side] for d in self.decoys]},
                                 self.position_bits * len(self.decoys))

    def agent_keys(self):
        """Keys Bob and Charlie assemble once the rearrangements are public."""
        k_b, k_c = [], []
        for pair in self.key_pairs:
            acts = self.pair_actions(pair)
            k_b.append(int(acts["B"].decision.op))
            k_c.append(int(acts["C"].decision.op))
        return k_b, k_c

    def run(self) -> SessionReport:
        self.prepare_and_dispatch()
        self.agents_act()
        self.return_particles()
        self.alice_step4()
        aborted = self.decide()
        k_b = k_c = []
        if not aborted:
            self.disclose()
            k_b, k_c = self.agent_keys()
        return self.report(aborted, k_b, k_c)

    def report(self, aborted, k_b, k_c) -> SessionReport:
        n_pairs = GROUP_SIZE * self.config.n_groups
        decoy_pairs = sum(p.is_decoy for g in self.groups for p in g.pairs)
        checked = sum(
            1 for g in self.groups for p in g.pairs
            if not p.is_decoy and any(a.decision.checking for a in self.pair_actions(p).values())
        )
        key_errors = sum(a != t for a, t in zip(self.key_alice, self.key_truth))
        by_kind = self.transcript.bits_by_kind()
        return SessionReport(
            seed=self.config.seed,
            attack=getattr(self.strategy, "label", "none"),
            shared_key_alice=_bits(self.key_alice),
            key_bob=_bits(k_b),
            key_charlie=_bits(k_c),
            check_error_rate=self.checks["all"].rate,
            check_kept=self.checks["all"].kept,
            check_errors=self.checks["all"].errors,
            check_kept_z=self.checks["Z"].kept,
            check_errors_z=self.checks["Z"].errors,
            check_kept_x=self.checks["X"].kept,
            check_errors_x=self.checks["X"].errors,
            decoy_error_rate=self.decoy_tally.rate,
            decoy_kept=self.decoy_tally.kept,
            decoy_errors=self.decoy_tally.errors,
            aborted=aborted,
            pairs_total=n_pairs,
            pairs_used=len(self.key_alice),
            pairs_checked=checked,
            decoy_pairs=decoy_pairs,
            decoys=len(self.decoys),
            classical_bits_exchanged=self.transcript.classical_bits,
            disclosure_bits=by_kind.get("reveal_permutation", 0),
            key_pair_errors=key_errors,
            key_error_rate=key_errors / len(self.key_alice) if self.key_alice else None,
        )


def run_session(config: SessionConfig, strategy=None) -> SessionReport:
    return Session(config, strategy).run()
