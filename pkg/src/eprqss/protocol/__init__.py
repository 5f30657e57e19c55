"""The three-party session: preparation, rearrangement, coding, checks and disclosure."""
from .config import THRESHOLD_PRESETS, ConfigError, SessionConfig
from .permutations import E0, E1, E2, E3, STANDARD, Permutation, alphabet
from .register import QuantumRegister
from .session import (
    DecodeError,
    DecoySlot,
    EprGroup,
    ModeDecision,
    PairRecord,
    Session,
    SessionReport,
    agent_step,
    alice_decode,
    alice_dispatch,
    alice_prepare,
    choose_mode,
    run_session,
)
from .transcript import Message, ProtocolFault, Transcript, audit

__all__ = [
    "THRESHOLD_PRESETS", "ConfigError", "SessionConfig",
    "E0", "E1", "E2", "E3", "STANDARD", "Permutation", "alphabet",
    "QuantumRegister",
    "DecodeError", "DecoySlot", "EprGroup", "ModeDecision", "PairRecord", "Session",
    "SessionReport", "agent_step", "alice_decode", "alice_dispatch", "alice_prepare",
    "choose_mode", "run_session",
    "Message", "ProtocolFault", "Transcript", "audit",
]
