"""Attack strategies that sit on the quantum channels of a session.

A strategy gets two hooks: ``forward`` for each sequence Alice sends out and
``returned`` for the pair of sequences travelling back. Both act on the
session's quantum register and draw randomness from the session's ``eve``
stream only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .protocol.permutations import FULL
from .quantum_core import CodingOp, MeasBasis, basis_state


@dataclass
class AttackRecord:
    """Append-only log of what the attacker did and saw."""

    events: list = field(default_factory=list)

    def log(self, **event):
        self.events.append(event)

    def count(self, kind) -> int:
        return sum(1 for e in self.events if e["kind"] == kind)


class AttackStrategy:
    label = "none"

    def __init__(self):
        self.record = AttackRecord()

    def forward(self, session, channel, group, seq):
        pass

    def returned(self, session, group, b_seq, c_seq):
        pass


class NoAttack(AttackStrategy):
    pass


def _random_basis(rng) -> MeasBasis:
    return MeasBasis.Z if rng.bit() == 0 else MeasBasis.X


def intercept_resend(register, pid, rng, nature, record=None):
    """Measure a particle in a random Z/X basis and let the eigenstate travel on."""
    basis = _random_basis(rng)
    result = register.measure(pid, basis, nature)
    if record is not None:
        record.log(kind="intercept", pid=pid, basis=basis.value, result=result)
    return basis, result


class InterceptResend(AttackStrategy):
    """Measure-and-forward on the outbound channels listed in ``channels``."""

    def __init__(self, channels="C"):
        super().__init__()
        if not channels or set(channels) - {"B", "C"}:
            raise ValueError(f"channels must be drawn from 'B' and 'C', got {channels!r}")
        self.channels = channels
        self.label = f"intercept-resend:{channels}"

    def forward(self, session, channel, group, seq):
        if channel not in self.channels:
            return
        rng, nature = session.stream("eve"), session.stream("nature")
        for pid in seq:
            intercept_resend(session.register, pid, rng, nature, self.record)


class FakeSignal(AttackStrategy):
    """Keep the genuine particle, send a look-alike, and swap back on return.

    Outbound, each genuine particle is measured in a random basis and held;
    a fresh particle prepared in the observed eigenstate goes on instead. On
    the way back the returned fake is measured in the same basis to learn
    whether the agent's operation flipped it, the matching flip is applied to
    the held genuine particle, and the genuine particle is sent to Alice.
    """

    def __init__(self, channels="BC"):
        super().__init__()
        if not channels or set(channels) - {"B", "C"}:
            raise ValueError(f"channels must be drawn from 'B' and 'C', got {channels!r}")
        self.channels = channels
        self.label = f"fake-signal:{channels}"
        self._held = {}

    def forward(self, session, channel, group, seq):
        if channel not in self.channels:
            return
        reg = session.register
        rng, nature = session.stream("eve"), session.stream("nature")
        for pid in seq:
            basis, result = intercept_resend(reg, pid, rng, nature)
            held = f"{pid}.held"
            reg.rename(pid, held)
            reg.add(basis_state(pid, basis, result))
            self._held[pid] = (held, basis, result)
            self.record.log(kind="fake_sent", pid=pid, basis=basis.value, result=result)

    def returned(self, session, group, b_seq, c_seq):
        reg = session.register
        nature = session.stream("nature")
        for pid in b_seq + c_seq:
            if pid is None or pid not in self._held:
                continue
            held, basis, sent = self._held.pop(pid)
            seen = reg.measure(pid, basis, nature)
            flipped = seen != sent
            if flipped:
                reg.apply_coding(held, CodingOp.U2 if basis is MeasBasis.Z else CodingOp.U1)
            reg.rename(pid, f"{pid}.fake")
            reg.rename(held, pid)
            self.record.log(kind="swap_back", pid=pid, basis=basis.value, flipped=flipped)


def bell_guess(register, b_seq, c_seq, guess, nature, record=None):
    """Pair B position ``i`` with the C position ``guess`` would put its partner at, and Bell-measure.

    Positions whose particle was kept back for checking are skipped.
    """
    outcomes = []
    for i, b_pid in enumerate(b_seq):
        c_pid = c_seq[guess.partner_position(i)]
        if b_pid is None or c_pid is None:
            outcomes.append(None)
            continue
        kind = register.bell_measure(b_pid, c_pid, nature)
        outcomes.append(kind)
    if record is not None:
        record.log(kind="bell_guess", guess=guess.index,
                   outcomes=[k.value if k else None for k in outcomes])
    return outcomes


class BellGuess(AttackStrategy):
    """Bell measurements on the returned sequences under a guessed rearrangement.

    One guess per group, drawn uniformly from the alphabet Alice uses. With
    ``per_pair=True`` the attacker ignores the alphabet and draws a uniform
    pairing from all 24 orders instead.
    """

    def __init__(self, per_pair=False):
        super().__init__()
        self.per_pair = per_pair
        self.label = "bell-guess:per-pair" if per_pair else "bell-guess"
        self.correct_guesses = 0
        self.groups_attacked = 0

    def returned(self, session, group, b_seq, c_seq):
        rng = session.stream("eve")
        perms = FULL if self.per_pair else session.alphabet
        guess = perms[rng.index(len(perms))]
        actual = session.permutations[group]
        self.groups_attacked += 1
        self.correct_guesses += guess.mapping == actual.mapping
        bell_guess(session.register, b_seq, c_seq, guess, session.stream("nature"), self.record)
        self.record.events[-1]["correct"] = guess.mapping == actual.mapping


class Individual(AttackStrategy):
    """Entangle each particle bound for Charlie with a fresh ancilla via U_TB(phi)."""

    def __init__(self, phi: float):
        super().__init__()
        if not 0 <= phi <= math.pi / 4 + 1e-12:
            raise ValueError(f"attack strength phi={phi!r} outside [0, pi/4]")
        self.phi = phi
        self.label = f"individual:{phi:.12g}"
        self.ancillas = []

    def forward(self, session, channel, group, seq):
        if channel != "C":
            return
        for pid in seq:
            session.register.apply_utb(pid, f"{pid}.anc", self.phi)
            self.ancillas.append(f"{pid}.anc")
        self.record.log(kind="individual", group=group, count=len(seq))


def individual_attack(register, pid, phi, record=None):
    """Attach a |0> ancilla to ``pid`` and apply U_TB(phi); returns the ancilla id."""
    if not 0 <= phi <= math.pi / 4 + 1e-12:
        raise ValueError(f"attack strength phi={phi!r} outside [0, pi/4]")
    anc = f"{pid}.anc"
    register.apply_utb(pid, anc, phi)
    if record is not None:
        record.log(kind="individual", pid=pid, ancilla=anc, phi=phi)
    return anc


STRATEGIES = {
    "none": lambda arg: NoAttack(),
    "intercept-resend": lambda arg: InterceptResend(arg or "C"),
    "fake-signal": lambda arg: FakeSignal(arg or "BC"),
    "bell-guess": lambda arg: BellGuess(per_pair=(arg == "per-pair")),
    "individual": lambda arg: Individual(_parse_phi(arg)),
}


def _parse_phi(arg) -> float:
    if arg is None:
        return math.pi / 4
    text = arg.strip().lower().replace(" ", "")
    if text.startswith("pi/"):
        return math.pi / float(text[3:])
    return float(text)


def make_strategy(text: str) -> AttackStrategy:
    """Build a strategy from ``name[:param]``, e.g. ``individual:pi/6``."""
    name, _, arg = text.partition(":")
    if name not in STRATEGIES:
        raise ValueError(f"unknown attack {name!r}; choose from {sorted(STRATEGIES)}")
    return STRATEGIES[name](arg or None)
