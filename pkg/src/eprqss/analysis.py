"""Closed-form security quantities and efficiency accounting.

The attacked-system density matrix is built by actually running the attack
unitary on a singlet and tracing out Charlie's particle; the closed forms are
kept alongside so each number has two independent routes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adversary import Individual
from .protocol import run_session
from .quantum_core import (
    BELL_KINDS,
    BellKind,
    CodingOp,
    apply_coding,
    bell_probabilities,
    decode_key,
    DensityMatrix,
    apply_utb,
    bell_state,
    density_from_pure,
    entropy_from_eigenvalues,
    ket,
    partial_trace,
    von_neumann_entropy,
)

PHI_MAX = math.pi / 4
# row/column order used when printing the attacked matrix: |00>, |11>, |01>, |10> over (A, P)
PRINTED_BASIS = ("00", "11", "01", "10")


class Verdict(enum.Enum):
    SECURE = "secure"
    ABORT = "abort"


@dataclass(frozen=True)
class AttackCurvePoint:
    phi: float
    epsilon: float
    eigenvalues: tuple
    i_b: float
    i_b_printed: float


@dataclass(frozen=True)
class EfficiencyReport:
    intrinsic_efficiency: float
    bits_per_pair: float
    classical_bits_per_key_bit: float
    disclosure_bits_per_key_bit: float


def _check_phi(phi):
    if not 0 <= phi <= PHI_MAX + 1e-12:
        raise ValueError(f"phi={phi!r} outside [0, pi/4]")


def error_rate(phi: float, p_flip_state: float = 0.5) -> float:
    """Error the attack introduces: P(signal in the non-fixed eigenstate) * sin^2(phi)."""
    return p_flip_state * math.sin(phi) ** 2


def attacked_state(phi: float):
    """Singlet over (A, C) after U_TB(phi) acts on C with ancilla P."""
    _check_phi(phi)
    s = bell_state(BellKind.PSI_MINUS, ("A", "C")).tensor(ket("0", ("P",)))
    return apply_utb(s, "C", "P", phi)


def build_attacked_rho(phi: float) -> DensityMatrix:
    """Reduced state of Alice's particle and the ancilla, labels ``(A, P)``."""
    return partial_trace(density_from_pure(attacked_state(phi)), {"A", "P"})


def printed_rho(phi: float) -> np.ndarray:
    """The attacked matrix written out entry by entry in the |00>,|11>,|01>,|10> order."""
    c2, s2, s = math.cos(phi) ** 2, math.sin(phi) ** 2, math.sin(phi)
    return np.array(
        [
            [c2 / 2, 0, 0, 0],
            [0, 0, 0, 0],
            [0, 0, s2 / 2, -s / 2],
            [0, 0, -s / 2, 0.5],
        ],
        dtype=np.complex128,
    )


def closed_form_eigenvalues(phi: float) -> np.ndarray:
    return np.sort([0.0, 0.0, math.cos(phi) ** 2 / 2, 0.5 + math.sin(phi) ** 2 / 2])


def attacked_eigenvalues(phi: float) -> np.ndarray:
    """Numerical eigenvalues of :func:`build_attacked_rho`, ascending, negatives clipped."""
    return np.clip(build_attacked_rho(phi).eigenvalues(), 0.0, None)


def i_b_printed(epsilon: float) -> float:
    """Two-term information formula exactly as it is usually printed.

    Its second term uses ``(1 + eps) / 2``; the eigenvalue it stands for is
    ``1/2 + eps``, so this differs from the entropy for every eps > 0.
    """
    total = 0.0
    for lam in (0.5 - epsilon, (1 + epsilon) / 2):
        if lam > 0:
            total -= lam * math.log2(lam)
    return total


def information_curve(phis=None) -> list:
    if phis is None:
        phis = default_phi_grid()
    points = []
    for phi in phis:
        _check_phi(phi)
        eps = error_rate(phi)
        eigs = attacked_eigenvalues(phi)
        points.append(
            AttackCurvePoint(
                phi=float(phi),
                epsilon=eps,
                eigenvalues=tuple(float(x) for x in eigs),
                i_b=von_neumann_entropy(build_attacked_rho(phi)),
                i_b_printed=i_b_printed(eps),
            )
        )
    return points


def default_phi_grid(n: int = 33) -> np.ndarray:
    return np.linspace(0.0, PHI_MAX, n)


def threshold_decide(error_rate: Optional[float], epsilon_threshold: float) -> Verdict:
    if error_rate is not None and error_rate > epsilon_threshold:
        return Verdict.ABORT
    return Verdict.SECURE


def mixed_pairing_rho() -> DensityMatrix:
    """Product of the reduced states of B from one singlet and C from another."""
    rho_1 = density_from_pure(bell_state(BellKind.PSI_MINUS, ("B1", "C1")))
    rho_2 = density_from_pure(bell_state(BellKind.PSI_MINUS, ("B2", "C2")))
    return partial_trace(rho_1, {"B1"}).tensor(partial_trace(rho_2, {"C2"}))


def efficiency_metrics(report) -> Optional[EfficiencyReport]:
    """Efficiency figures for a finished session; ``None`` if it aborted or yielded no key.

    Intrinsic efficiency counts key pairs against the EPR pairs sent, leaving
    out pairs whose particle Alice swapped for a decoy.
    """
    if report.aborted or report.pairs_used == 0:
        return None
    epr_pairs = report.pairs_total - report.decoy_pairs
    key_bits = len(report.shared_key_alice)
    return EfficiencyReport(
        intrinsic_efficiency=report.pairs_used / epr_pairs,
        bits_per_pair=key_bits / report.pairs_used,
        classical_bits_per_key_bit=report.classical_bits_exchanged / key_bits,
        disclosure_bits_per_key_bit=report.disclosure_bits / key_bits,
    )


def dense_coding_table() -> list:
    """Every (initial state, Bob's op, Charlie's op) case, decoded after a Bell measurement.

    Each row records Alice's decoded key and the XOR of the two agents' bit
    values; a correct dense-coding table makes them equal in all 64 rows.
    """
    rows = []
    for initial in BELL_KINDS:
        for op_b in CodingOp:
            for op_c in CodingOp:
                s = apply_coding(apply_coding(bell_state(initial), "B", op_b), "C", op_c)
                probs = bell_probabilities(s, ("B", "C"))
                measured = BELL_KINDS[int(np.argmax(probs))]
                k_a = decode_key(initial, measured)
                rows.append({
                    "initial": initial.value,
                    "op_bob": op_b.name,
                    "op_charlie": op_c.name,
                    "measured": measured.value,
                    "outcome_probability": float(np.max(probs)),
                    "key_alice": format(k_a, "02b"),
                    "key_bob": op_b.bits,
                    "key_charlie": op_c.bits,
                    "ok": k_a == (int(op_b) ^ int(op_c)) and abs(float(np.max(probs)) - 1) < 1e-12,
                })
    return rows


def attack_sweep(phis, config) -> list:
    """Curve points joined with the Z-basis check error measured in simulated sessions."""
    rows = []
    for point in information_curve(phis):
        report = run_session(config, Individual(point.phi))
        rows.append((point, report))
    return rows


def entropy_dual_path(phi: float):
    """Entropy of the attacked matrix from its numerical eigenvalues and from the closed-form ones."""
    return (
        von_neumann_entropy(build_attacked_rho(phi)),
        entropy_from_eigenvalues(closed_form_eigenvalues(phi)),
    )
