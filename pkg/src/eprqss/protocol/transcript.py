"""Classical message log of a session.

One JSON object per line with the protocol step, sender, receiver, message
kind, payload and the classical bits the message costs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

REVEAL_KINDS = ("reveal_basis_result", "reveal_coding_op")


class ProtocolFault(RuntimeError):
    """A message was sent out of the order the protocol allows."""


@dataclass(frozen=True)
class Message:
    seq: int
    step: str
    sender: str
    receiver: str
    kind: str
    payload: dict = field(default_factory=dict)
    bits: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "seq": self.seq,
                "step": self.step,
                "sender": self.sender,
                "receiver": self.receiver,
                "kind": self.kind,
                "payload": self.payload,
                "bits": self.bits,
            },
            sort_keys=True,
            separators=(",", ":"),
        )


class Transcript:
    def __init__(self, messages=()):
        self.messages = []
        self._requests = set()
        self._verdict_seen = False
        for m in messages:
            self._check(m)
            self.messages.append(m)

    def __len__(self):
        return len(self.messages)

    def __iter__(self):
        return iter(self.messages)

    def send(self, step, sender, receiver, kind, payload=None, bits=0) -> Message:
        msg = Message(len(self.messages), step, sender, receiver, kind, dict(payload or {}), bits)
        self._check(msg)
        self.messages.append(msg)
        return msg

    def _check(self, msg: Message):
        if msg.kind == "request_reveal":
            self._requests.add((msg.receiver, msg.payload["check"]))
        elif msg.kind in REVEAL_KINDS:
            if (msg.sender, msg.payload["check"]) not in self._requests:
                raise ProtocolFault(f"{msg.sender} revealed check {msg.payload['check']} before Alice asked")
        elif msg.kind == "verdict":
            self._verdict_seen = True
        elif msg.kind == "reveal_permutation" and not self._verdict_seen:
            raise ProtocolFault("permutation disclosed before the check verdict")

    def reveal(self, sender: str, check: int, kind: str):
        """Latest reveal payload for ``check`` from ``sender``."""
        for msg in reversed(self.messages):
            if msg.kind == kind and msg.sender == sender and msg.payload.get("check") == check:
                return msg.payload
        raise ProtocolFault(f"no {kind} from {sender} for check {check}")

    @property
    def classical_bits(self) -> int:
        return sum(m.bits for m in self.messages)

    def bits_by_kind(self) -> dict:
        out = {}
        for m in self.messages:
            out[m.kind] = out.get(m.kind, 0) + m.bits
        return out

    def to_jsonl(self) -> str:
        return "".join(m.to_json() + "\n" for m in self.messages)

    def write(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        """Rebuild a transcript, re-checking reveal ordering while replaying."""
        msgs = []
        for line in text.splitlines():
            if line.strip():
                d = json.loads(line)
                msgs.append(Message(d["seq"], d["step"], d["sender"], d["receiver"], d["kind"], d["payload"], d["bits"]))
        return cls(msgs)

    @classmethod
    def read(cls, path) -> "Transcript":
        with open(path) as fh:
            return cls.from_jsonl(fh.read())


def audit(messages) -> list:
    """Ordering violations found by scanning a message sequence; empty when clean."""
    problems = []
    requested = set()
    verdict = False
    for m in messages:
        if m.kind == "request_reveal":
            requested.add((m.receiver, m.payload["check"]))
        elif m.kind in REVEAL_KINDS and (m.sender, m.payload["check"]) not in requested:
            problems.append(f"#{m.seq}: {m.kind} from {m.sender} without request")
        elif m.kind == "verdict":
            verdict = True
        elif m.kind == "reveal_permutation" and not verdict:
            problems.append(f"#{m.seq}: permutation revealed before verdict")
    return problems
