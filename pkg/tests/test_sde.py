"""Single-decryptor encryption tests: round trips, rewind, program forms."""

import numpy as np
import pytest

from cosetlab import gf2, obf, qsim, sde, toksig
from cosetlab.gf2 import BitVector
from cosetlab.obf import BOTTOM


def msg(s):
    return BitVector.from_string(s)


@pytest.fixture
def scheme():
    sk, pk = sde.setup(n=8, kappa=3, seed=17)
    return sk, pk


def test_setup_guards():
    with pytest.raises(ValueError):
        sde.setup(7, 2, 0)
    with pytest.raises(ValueError):
        sde.setup(8, 0, 0)


def test_pk_acceptance_counts():
    sk, pk = sde.setup(n=4, kappa=1, seed=3)
    for prog in pk.programs[0]:
        count = sum(prog(BitVector(4, v)) for v in range(16))
        assert count == 4


def test_pk_consistent_with_sk(scheme):
    sk, pk = scheme
    for rec, (r0, r1) in zip(sk.records, pk.programs):
        member0 = obf.coset_membership_program(rec.space, rec.s)
        member1 = obf.coset_membership_program(gf2.complement(rec.space), rec.sp)
        assert obf.equiv_on_domain(r0, member0, obf.all_vectors(8))
        assert obf.equiv_on_domain(r1, member1, obf.all_vectors(8))


def test_distinct_seeds_distinct_keys():
    keys = {sde.setup(6, 2, seed)[0] for seed in range(25)}
    assert len(keys) == 25


def test_qkeygen_registers(scheme):
    sk, _ = scheme
    qkey = sde.qkeygen(sk)
    assert qkey.kappa == 3
    rng = np.random.default_rng(0)
    for rec, st in zip(sk.records, qkey.states):
        ideal = qsim.prepare_coset_state(rec.space, rec.s, rec.sp)
        assert qsim.fidelity(st, ideal) == pytest.approx(1.0)
        out = qsim.measure_all(st, rng).outcome
        assert gf2.coset_contains(rec.space, rec.s, out)


def test_encrypt_program_honest_and_tampered(scheme):
    sk, pk = scheme
    rng = np.random.default_rng(1)
    ct = sde.encrypt(pk, msg("10"), rng)
    honest = []
    for i, rec in enumerate(sk.records):
        if ct.r.bit(i + 1):
            honest.append(gf2.canonical_rep(gf2.complement(rec.space), rec.sp))
        else:
            honest.append(gf2.canonical_rep(rec.space, rec.s))
    assert ct.program(tuple(honest)) == msg("10")
    bad = list(honest)
    bad[1] = bad[1] ^ BitVector(8, 1 << 7)
    if not ct.program.meta["factors"][1](bad[1]):
        assert ct.program(tuple(bad)) is BOTTOM


def test_encrypt_r_marginal_uniform():
    _, pk = sde.setup(n=4, kappa=4, seed=5)
    rng = np.random.default_rng(2)
    trials = 10**4
    ones = np.zeros(4)
    for _ in range(trials):
        ct = sde.encrypt(pk, msg("1"), rng)
        for i in range(4):
            ones[i] += ct.r.bit(i + 1)
    sigma = np.sqrt(0.25 / trials)
    assert np.all(np.abs(ones / trials - 0.5) < 4 * sigma)


def test_roundtrip_and_rewind(scheme):
    sk, pk = scheme
    qkey = sde.qkeygen(sk)
    rng = np.random.default_rng(3)
    ideal = [qsim.prepare_coset_state(r.space, r.s, r.sp) for r in sk.records]
    for trial in range(120):
        m = BitVector.random(2, rng)
        ct = sde.encrypt(pk, m, rng)
        assert sde.decrypt(qkey, ct, rng) == m
        for st, ref in zip(qkey.states, ideal):
            assert qsim.fidelity(st, ref) >= 1 - 1e-8


def test_decrypt_garbage_key(scheme):
    sk, pk = scheme
    rng = np.random.default_rng(4)
    zero_key = sde.QuantumDecKey([qsim.basis_state(8, 0) for _ in range(3)])
    ct = sde.encrypt(pk, msg("11"), rng)
    should_pass = all(
        ct.program.meta["factors"][i](BitVector.zero(8)) for i in range(3)
    )
    got = sde.decrypt(zero_key, ct, rng)
    assert (got == msg("11")) == should_pass


def test_decrypt_flags_unfactorizable():
    _, pk = sde.setup(n=4, kappa=1, seed=7)
    qkey = sde.qkeygen(sde.setup(n=4, kappa=1, seed=7)[0])
    opaque = sde.Ciphertext(
        r=BitVector(1, 0),
        program=obf.ObfProgram(lambda us: BOTTOM, 10, "iO-stub"),
    )
    with pytest.raises(sde.UnfactorizableCiphertextError):
        sde.decrypt(qkey, opaque, 0)


# -- compute-and-compare form -------------------------------------------------------

def test_cc_equivalent_exhaustive_kappa1():
    sk, pk = sde.setup(n=8, kappa=1, seed=9)
    rng = np.random.default_rng(5)
    for _ in range(8):
        m = BitVector.random(3, rng)
        r = BitVector.random(1, rng)
        a = sde.encrypt_with_r(pk, m, r)
        b = sde.encrypt_cc_with_r(sk, pk, m, r)
        domain = ((BitVector(8, v),) for v in range(256))
        assert obf.equiv_on_domain(a.program, b.program, domain)


def test_cc_equivalent_sampled_kappa3(scheme):
    sk, pk = scheme
    rng = np.random.default_rng(6)
    m = msg("01")
    r = BitVector.random(3, rng)
    a = sde.encrypt_with_r(pk, m, r)
    b = sde.encrypt_cc_with_r(sk, pk, m, r)
    for _ in range(2000):
        us = tuple(BitVector.random(8, rng) for _ in range(3))
        assert a.program(us) == b.program(us)
    # honest tuples decrypt identically too
    qkey = sde.qkeygen(sk)
    assert sde.decrypt(qkey, b, rng) == m


def test_cc_lock_matches_canonical_reps(scheme):
    sk, pk = scheme
    ct = sde.encrypt_cc_with_r(sk, pk, msg("00"), BitVector.from_string("101"))
    locks = ct.program.meta["locks"]
    for i, rec in enumerate(sk.records):
        if ct.r.bit(i + 1):
            assert locks[i] == gf2.canonical_rep(gf2.complement(rec.space), rec.sp)
        else:
            assert locks[i] == gf2.canonical_rep(rec.space, rec.s)


def test_sim_swap_all_bottom(scheme):
    sk, pk = scheme
    rng = np.random.default_rng(7)
    qkey = sde.qkeygen(sk)
    ct = sde.swap_for_sim(sde.encrypt_cc(sk, pk, msg("10"), rng))
    for _ in range(20):
        assert sde.decrypt(qkey, ct, rng) is BOTTOM
    # registers untouched by the constant program
    for rec, st in zip(sk.records, qkey.states):
        ideal = qsim.prepare_coset_state(rec.space, rec.s, rec.sp)
        assert qsim.fidelity(st, ideal) == pytest.approx(1.0)


def test_ciphertext_serialization_roundtrip(scheme):
    sk, pk = scheme
    rng = np.random.default_rng(8)
    qkey = sde.qkeygen(sk)
    cc = sde.encrypt_cc(sk, pk, msg("11"), rng)
    back = sde.ciphertext_from_json(sde.ciphertext_to_json(cc))
    assert sde.decrypt(qkey, back, rng) == msg("11")
    stub = sde.encrypt(pk, msg("01"), rng)
    with pytest.raises(ValueError):
        sde.ciphertext_to_json(stub)
    text = sde.ciphertext_to_json(stub, reveal_payload=True)
    back2 = sde.ciphertext_from_json(text, pk=pk)
    assert sde.decrypt(qkey, back2, rng) == msg("01")
    assert back2.r == stub.r


def test_sk_serialization(scheme):
    sk, _ = scheme
    assert sde.sk_from_json(sde.sk_to_json(sk)) == sk


# -- witness-encryption construction --------------------------------------------------

def test_we_roundtrip():
    rng = np.random.default_rng(9)
    ts_sks, ts_pks = sde.we_setup(n=8, kappa=3, seed=11)
    for _ in range(10):
        tokens = sde.we_qkeygen(ts_sks)
        ct = sde.we_encrypt(ts_pks, msg("1"), rng)
        assert sde.we_decrypt(tokens, ct, rng) == msg("1")
        # coherent signing preserves the tokens: decrypt again with the same ones
        ct2 = sde.we_encrypt(ts_pks, msg("0"), rng)
        assert sde.we_decrypt(tokens, ct2, rng) == msg("0")


def test_we_classical_witness_path():
    rng = np.random.default_rng(10)
    ts_sks, ts_pks = sde.we_setup(n=8, kappa=2, seed=12)
    ct = sde.we_encrypt(ts_pks, msg("1"), rng)
    sigs = []
    for i, sk in enumerate(ts_sks):
        _, sig = toksig.sign(ct.r.bit(i + 1), toksig.token_gen(sk), rng)
        sigs.append(sig)
    assert sde.we_decrypt_classical(ct, sigs) == msg("1")
    assert sde.we_decrypt_classical(ct, sigs[:1]) is BOTTOM  # wrong-length witness
    bad = [BitVector.random(8, rng), sigs[1]]
    if not toksig.verify(ts_pks[0], ct.r.bit(1), bad[0]):
        assert sde.we_decrypt_classical(ct, bad) is BOTTOM


def test_we_spent_token_rate():
    # a token spent on the opposite bit passes its coordinate with
    # probability exactly 2^(-n/2)
    n, trials = 8, 3000
    rng = np.random.default_rng(11)
    ts_sks, ts_pks = sde.we_setup(n=n, kappa=1, seed=13)
    hits = 0
    for _ in range(trials):
        tokens = sde.we_qkeygen(ts_sks)
        ct = sde.we_encrypt(ts_pks, msg("1"), rng)
        wrong_bit = 1 - ct.r.bit(1)
        toksig.sign(wrong_bit, tokens[0], rng)
        hits += sde.we_decrypt(tokens, ct, rng) == msg("1")
    p = 2.0 ** (-n / 2)
    sigma = np.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) < 4 * sigma


def test_splitting_attack_floor():
    # all registers to one side: the other side guesses random messages
    rng = np.random.default_rng(12)
    sk, pk = sde.setup(n=6, kappa=2, seed=14)
    m_len, trials = 2, 4000
    hits = 0
    for _ in range(trials):
        challenge = BitVector.random(m_len, rng)
        guess = BitVector.random(m_len, rng)
        hits += guess == challenge
    p = 2.0**-m_len
    sigma = np.sqrt(p * (1 - p) / trials)
    assert hits / trials <= p + 4 * sigma
