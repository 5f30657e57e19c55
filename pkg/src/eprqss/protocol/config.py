from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from ..quantum_core import BellKind
from .permutations import alphabet

# abort thresholds for the error-correction schemes usually quoted for BB84
THRESHOLD_PRESETS = {
    "ideal": 0.0,
    "mayers-biham": 0.07,
    "lo-chau-preskill": 0.11,
    "gottesman-lo": 0.19,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    n_groups: int = 100
    p_check: float = 0.1
    decoy_fraction: float = 0.0
    epsilon_threshold: float = 0.0
    noise: float = 0.0
    seed: int = 0
    perm_alphabet: int = 4
    fixed_kind: Optional[BellKind] = None

    def __post_init__(self):
        if isinstance(self.fixed_kind, str):
            object.__setattr__(self, "fixed_kind", parse_kind(self.fixed_kind))
        if not isinstance(self.n_groups, int) or self.n_groups < 1:
            raise ConfigError(f"n_groups must be a positive integer, got {self.n_groups!r}")
        if not 0 <= self.p_check <= 1:
            raise ConfigError(f"p_check must lie in [0, 1], got {self.p_check!r}")
        if not 0 <= self.decoy_fraction < 1:
            raise ConfigError(f"decoy_fraction must lie in [0, 1), got {self.decoy_fraction!r}")
        if not 0 <= self.noise < 1:
            raise ConfigError(f"noise must lie in [0, 1), got {self.noise!r}")
        if not (math.isfinite(self.epsilon_threshold) and 0 <= self.epsilon_threshold <= 1):
            raise ConfigError(f"epsilon_threshold must lie in [0, 1], got {self.epsilon_threshold!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        try:
            alphabet(self.perm_alphabet)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def with_(self, **changes) -> "SessionConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fixed_kind"] = self.fixed_kind.value if self.fixed_kind else None
        return d


FIELD_TYPES = {f.name: f.type for f in fields(SessionConfig)}


def parse_kind(text: str) -> BellKind:
    for kind in BellKind:
        if text.lower() in (kind.value, kind.name.lower()):
            return kind
    raise ConfigError(f"unknown Bell state {text!r}")


def parse_threshold(text) -> float:
    if isinstance(text, str) and text in THRESHOLD_PRESETS:
        return THRESHOLD_PRESETS[text]
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(
            f"threshold must be a number or one of {sorted(THRESHOLD_PRESETS)}, got {text!r}"
        ) from None
