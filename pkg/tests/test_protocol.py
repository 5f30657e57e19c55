import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eprqss.protocol import (
    ConfigError,
    DecodeError,
    ProtocolFault,
    QuantumRegister,
    Session,
    SessionConfig,
    Transcript,
    run_session,
)
from eprqss.protocol.config import THRESHOLD_PRESETS, parse_threshold
from eprqss.protocol.permutations import E0, E1, FULL, STANDARD, alphabet, reveal_bits
from eprqss.protocol.session import PairRecord, alice_decode, alice_dispatch, alice_prepare, choose_mode
from eprqss.protocol.transcript import audit
from eprqss.quantum_core import BELL_KINDS, BellKind, CodingOp, MeasBasis, bell_state
from eprqss.rng import RngStream

from .conftest import FixedRng, within_sigma


def _xor_keys(kb, kc):
    return "".join(str(int(a) ^ int(b)) for a, b in zip(kb, kc))


class TestConfig:
    @pytest.mark.parametrize("bad", [dict(n_groups=0), dict(p_check=1.5), dict(decoy_fraction=-0.1),
                                     dict(noise=2.0), dict(perm_alphabet=3), dict(epsilon_threshold=-1)])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            SessionConfig(**bad)

    def test_presets(self):
        assert parse_threshold("lo-chau-preskill") == THRESHOLD_PRESETS["lo-chau-preskill"] == 0.11
        assert parse_threshold("0.05") == 0.05


class TestPermutations:
    def test_e1_swaps_neighbours(self):
        assert E1.rearrange(["c1", "c2", "c3", "c4"]) == ["c2", "c1", "c4", "c3"]

    def test_e0_identity_partner(self):
        assert [E0.partner_position(i) for i in range(4)] == [0, 1, 2, 3]

    @pytest.mark.parametrize("perm", FULL)
    def test_restore_inverts(self, perm):
        seq = ["a", "b", "c", "d"]
        assert perm.restore(perm.rearrange(seq)) == seq

    @pytest.mark.parametrize("perm", FULL)
    def test_partner_lookup(self, perm):
        seq = perm.rearrange([0, 1, 2, 3])
        assert all(seq[perm.partner_position(i)] == i for i in range(4))

    def test_alphabets(self):
        assert alphabet(4) == STANDARD and len(alphabet(24)) == 24 and alphabet(1) == (E0,)
        assert reveal_bits(4) == 2 and reveal_bits(24) == 5 and reveal_bits(1) == 0
        assert len({p.mapping for p in FULL}) == 24


class TestPrepare:
    def test_deterministic(self):
        cfg = SessionConfig(n_groups=50, decoy_fraction=0.2, seed=4)
        a = alice_prepare(cfg, RngStream(4, "p"), RngStream(4, "d"))
        b = alice_prepare(cfg, RngStream(4, "p"), RngStream(4, "d"))
        assert [[p.kind for p in g.pairs] for g in a[0]] == [[p.kind for p in g.pairs] for g in b[0]]
        assert a[1] == b[1]

    def test_kind_frequencies(self):
        cfg = SessionConfig(n_groups=10_000)
        groups, decoys, _ = alice_prepare(cfg, RngStream(1, "p"), RngStream(1, "d"))
        kinds = [p.kind for g in groups for p in g.pairs]
        assert not decoys
        assert all(within_sigma(kinds.count(k), len(kinds), 0.25) for k in BELL_KINDS)

    def test_fixed_kind(self):
        cfg = SessionConfig(n_groups=5, fixed_kind=BellKind.PHI_PLUS)
        groups, _, _ = alice_prepare(cfg, RngStream(0, "p"), RngStream(0, "d"))
        assert {p.kind for g in groups for p in g.pairs} == {BellKind.PHI_PLUS}

    def test_decoy_fraction(self):
        cfg = SessionConfig(n_groups=5000, decoy_fraction=0.1)
        _, decoys, _ = alice_prepare(cfg, RngStream(2, "p"), RngStream(2, "d"))
        assert within_sigma(len(decoys), 2 * 4 * 5000, 0.1)


class TestDispatch:
    def test_b_order_kept_c_rearranged(self):
        cfg = SessionConfig(n_groups=1)
        groups, _, _ = alice_prepare(cfg, RngStream(0, "p"), RngStream(0, "d"))
        b, c, perm = alice_dispatch(groups[0], RngStream(0, "perm"), (E1,))
        assert b == [p.b_id for p in groups[0].pairs]
        assert c == [groups[0].pairs[i].c_id for i in (1, 0, 3, 2)]
        assert perm is E1


class TestModeChoice:
    def test_extremes(self):
        rng = RngStream(0, "m")
        assert all(not choose_mode(0.0, rng).checking for _ in range(1000))
        assert all(choose_mode(1.0, rng).checking for _ in range(1000))

    def test_frequency(self):
        rng = RngStream(1, "m")
        n = 100_000
        hits = sum(choose_mode(0.1, rng).checking for _ in range(n))
        assert within_sigma(hits, n, 0.1)


class TestDecode:
    def _pair(self, kind):
        reg = QuantumRegister()
        reg.add(bell_state(kind, ("b", "c")))
        return reg, PairRecord(0, 0, kind, "b", "c")

    def _acts(self, ob, oc):
        from eprqss.protocol.session import AgentAction, ModeDecision

        return {"B": AgentAction("bob", 0, 0, "b", ModeDecision(False, op=ob)),
                "C": AgentAction("charlie", 0, 0, "c", ModeDecision(False, op=oc))}

    def test_psi_plus_u1_u2(self):
        reg, pair = self._pair(BellKind.PSI_PLUS)
        reg.apply_coding("b", CodingOp.U1)
        reg.apply_coding("c", CodingOp.U2)
        _, key = alice_decode(reg, pair, self._acts(CodingOp.U1, CodingOp.U2), RngStream(0, "n"))
        assert key == 0b11

    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_all_op_pairs(self, kind):
        for ob in CodingOp:
            for oc in CodingOp:
                reg, pair = self._pair(kind)
                reg.apply_coding("b", ob)
                reg.apply_coding("c", oc)
                _, key = alice_decode(reg, pair, self._acts(ob, oc), RngStream(0, "n"))
                assert key == int(ob) ^ int(oc)

    def test_checked_pair_rejected(self):
        from eprqss.protocol.session import AgentAction, ModeDecision

        reg, pair = self._pair(BellKind.PSI_MINUS)
        acts = self._acts(CodingOp.U0, CodingOp.U0)
        acts["C"] = AgentAction("charlie", 0, 0, "c", ModeDecision(True, basis=MeasBasis.Z), 0)
        with pytest.raises(DecodeError):
            alice_decode(reg, pair, acts, RngStream(0, "n"))


class TestCheckWalkthrough:
    def test_bob_checks_charlie_codes(self):
        # singlet, Bob measures Z and gets 0, Charlie applies U3, Alice measures Charlie's particle in Z
        reg = QuantumRegister()
        reg.add(bell_state(BellKind.PSI_MINUS, ("b", "c")))
        assert reg.measure("b", MeasBasis.Z, FixedRng(0.0)) == 0
        reg.apply_coding("c", CodingOp.U3)
        raw = reg.measure("c", MeasBasis.Z, FixedRng(0.0))
        assert raw == 0
        corrected = raw ^ int(CodingOp.U3.flips(MeasBasis.Z))
        assert corrected == 1
        assert (0 == corrected) == BellKind.PSI_MINUS.correlated(MeasBasis.Z)


class TestHonestSession:
    @pytest.mark.parametrize("seed", range(5))
    def test_invariants(self, seed):
        cfg = SessionConfig(n_groups=300, p_check=0.2, decoy_fraction=0.05, seed=seed)
        r = run_session(cfg)
        assert r.check_errors == 0 and r.decoy_errors == 0 and not r.aborted
        assert r.key_pair_errors == 0
        assert r.shared_key_alice == _xor_keys(r.key_bob, r.key_charlie)
        assert len(r.shared_key_alice) == 2 * r.pairs_used

    def test_key_length_from_actions(self):
        s = Session(SessionConfig(n_groups=200, p_check=0.3, decoy_fraction=0.1, seed=9))
        r = s.run()
        expected = sum(
            1 for g in s.groups for p in g.pairs
            if not p.is_decoy and not any(a.decision.checking for a in s.pair_actions(p).values())
        )
        assert r.pairs_used == expected

    def test_all_checking_gives_no_key(self):
        r = run_session(SessionConfig(n_groups=50, p_check=1.0, seed=1))
        assert r.pairs_used == 0 and r.shared_key_alice == ""
        assert r.check_kept > 0 and r.check_errors == 0

    def test_deterministic(self):
        cfg = SessionConfig(n_groups=100, p_check=0.2, decoy_fraction=0.1, seed=5)
        a, b = Session(cfg), Session(cfg)
        assert a.run().to_dict() == b.run().to_dict()
        assert a.transcript.to_jsonl() == b.transcript.to_jsonl()

    def test_seeds_differ(self):
        a = run_session(SessionConfig(n_groups=50, seed=1))
        b = run_session(SessionConfig(n_groups=50, seed=2))
        assert a.shared_key_alice != b.shared_key_alice

    def test_noise_shows_up_in_checks(self):
        r = run_session(SessionConfig(n_groups=500, p_check=0.5, noise=0.2, seed=3, epsilon_threshold=1.0))
        assert r.check_errors > 0

    @pytest.mark.parametrize("size", [1, 4, 24])
    def test_alphabet_sizes(self, size):
        r = run_session(SessionConfig(n_groups=100, p_check=0.2, perm_alphabet=size, seed=2))
        assert r.key_pair_errors == 0 and r.check_errors == 0

    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_fixed_kind_sessions(self, kind):
        r = run_session(SessionConfig(n_groups=100, p_check=0.3, fixed_kind=kind, seed=4))
        assert r.key_pair_errors == 0 and r.check_errors == 0


class TestAccounting:
    @pytest.mark.parametrize("size", [4, 24])
    def test_classical_bits(self, size):
        cfg = SessionConfig(n_groups=150, p_check=0.25, decoy_fraction=0.1, perm_alphabet=size, seed=6)
        s = Session(cfg)
        r = s.run()
        pos_bits = math.ceil(math.log2(4 * cfg.n_groups))
        announcements = sum(a.decision.checking for agent in s.actions.values() for a in agent.values())
        checked_pairs = sum(
            1 for g in s.groups for p in g.pairs
            if not p.is_decoy and any(a.decision.checking for a in s.pair_actions(p).values())
        )
        decoy_reveals = sum(
            1 for g in s.groups for p in g.pairs for slot in (p.decoy_b, p.decoy_c)
            if slot is not None and s.pair_actions(p)[slot.side].decision.checking
        )
        expected = (announcements * pos_bits + 4 * checked_pairs + 2 * decoy_reveals
                    + cfg.n_groups * math.ceil(math.log2(size)) + len(s.decoys) * pos_bits)
        assert not r.aborted
        assert r.classical_bits_exchanged == expected
        assert r.disclosure_bits == cfg.n_groups * math.ceil(math.log2(size))

    def test_abort_skips_disclosure(self):
        from eprqss.adversary import InterceptResend

        s = Session(SessionConfig(n_groups=200, p_check=0.5, seed=1), InterceptResend())
        r = s.run()
        assert r.aborted and r.key_bob == "" and r.key_charlie == ""
        assert not any(m.kind == "reveal_permutation" for m in s.transcript)


class TestTranscript:
    def test_session_audit_clean(self):
        s = Session(SessionConfig(n_groups=100, p_check=0.3, decoy_fraction=0.1, seed=2))
        s.run()
        assert audit(s.transcript) == []

    def test_reveal_before_request(self):
        t = Transcript()
        with pytest.raises(ProtocolFault):
            t.send("4", "bob", "alice", "reveal_basis_result", {"check": 0, "basis": "Z", "result": 0}, 2)

    def test_reveal_for_other_agent_request(self):
        t = Transcript()
        t.send("4", "alice", "charlie", "request_reveal", {"check": 0})
        with pytest.raises(ProtocolFault):
            t.send("4", "bob", "alice", "reveal_coding_op", {"check": 0, "op": 1}, 2)

    def test_permutation_before_verdict(self):
        t = Transcript()
        with pytest.raises(ProtocolFault):
            t.send("5", "alice", "all", "reveal_permutation", {"group": 0, "permutation": 1}, 2)

    def test_jsonl_round_trip(self, tmp_path):
        s = Session(SessionConfig(n_groups=40, p_check=0.3, decoy_fraction=0.1, seed=3))
        s.run()
        path = tmp_path / "t.jsonl"
        s.transcript.write(path)
        back = Transcript.read(path)
        assert back.to_jsonl() == s.transcript.to_jsonl()
        assert back.classical_bits == s.transcript.classical_bits

    def test_tampered_order_rejected(self):
        s = Session(SessionConfig(n_groups=20, p_check=0.5, seed=3))
        s.run()
        lines = s.transcript.to_jsonl().splitlines()
        i = next(k for k, line in enumerate(lines) if '"request_reveal"' in line)
        lines[i], lines[i + 1] = lines[i + 1], lines[i]
        with pytest.raises(ProtocolFault):
            Transcript.from_jsonl("\n".join(lines))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.floats(0, 1), decoy=st.floats(0, 0.3),
       size=st.sampled_from([1, 4, 24]))
def test_honest_properties(seed, p, decoy, size):
    r = run_session(SessionConfig(n_groups=12, p_check=p, decoy_fraction=decoy, perm_alphabet=size, seed=seed))
    assert r.check_errors == 0 and r.decoy_errors == 0 and r.key_pair_errors == 0
    assert r.shared_key_alice == _xor_keys(r.key_bob, r.key_charlie)
    assert r.pairs_used + r.pairs_checked + r.decoy_pairs == r.pairs_total
