"""Tokenized signature tests: correctness, revocation, and exact attack floors."""

import numpy as np
import pytest

from cosetlab import gf2, qsim, toksig
from cosetlab.gf2 import BitVector


@pytest.fixture
def keys():
    return toksig.keygen(8, seed=42)


def test_keygen_rejects_odd_n():
    with pytest.raises(ValueError):
        toksig.keygen(7, seed=0)


def test_public_key_accepts_offsets(keys):
    sk, pk = keys
    assert pk.c0(sk.s) == 1
    assert pk.c1(sk.sp) == 1


def test_public_key_acceptance_count():
    for n in (4, 8, 12):
        sk, pk = toksig.keygen(n, seed=n)
        count = sum(pk.c0(BitVector(n, v)) for v in range(1 << n))
        assert count == 1 << (n // 2)


def test_token_matches_coset_state(keys):
    sk, pk = keys
    tok = toksig.token_gen(sk)
    ideal = qsim.prepare_coset_state(sk.space, sk.s, sk.sp)
    assert qsim.fidelity(tok.state, ideal) == pytest.approx(1.0)
    tok2 = toksig.token_gen(sk)
    assert qsim.fidelity(tok.state, tok2.state) == pytest.approx(1.0)


def test_fresh_token_measures_into_coset(keys):
    sk, _ = keys
    rng = np.random.default_rng(1)
    for _ in range(100):
        rec = qsim.measure_all(toksig.token_gen(sk).state, rng)
        assert gf2.coset_contains(sk.space, sk.s, rec.outcome)


def test_sign_verify_roundtrip():
    rng = np.random.default_rng(2)
    for n in (4, 8, 12, 16):
        sk, pk = toksig.keygen(n, rng)
        for m in (0, 1):
            _, sig = toksig.sign(m, toksig.token_gen(sk), rng)
            assert toksig.verify(pk, m, sig)


def test_sign_lands_in_expected_coset(keys):
    sk, pk = keys
    rng = np.random.default_rng(3)
    perp = gf2.complement(sk.space)
    for _ in range(50):
        _, sig0 = toksig.sign(0, toksig.token_gen(sk), rng)
        assert gf2.coset_contains(sk.space, sk.s, sig0)
        _, sig1 = toksig.sign(1, toksig.token_gen(sk), rng)
        assert gf2.coset_contains(perp, sk.sp, sig1)


def test_token_reuse_flagged(keys):
    sk, _ = keys
    tok = toksig.token_gen(sk)
    toksig.sign(0, tok, seed=0)
    with pytest.raises(toksig.TokenConsumedError):
        toksig.sign(1, tok, seed=0)


def test_verify_random_vector_rate(keys):
    _, pk = keys
    rng = np.random.default_rng(4)
    n, trials = 8, 20000
    hits = sum(toksig.verify(pk, 0, BitVector.random(n, rng)) for _ in range(trials))
    p = 2.0 ** (-n / 2)
    sigma = np.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) < 4 * sigma


def test_verify_l():
    sk, pk = toksig.keygen(8, seed=9)
    rng = np.random.default_rng(5)
    _, sig0 = toksig.sign(0, toksig.token_gen(sk), rng)
    _, sig1 = toksig.sign(1, toksig.token_gen(sk), rng)
    assert toksig.verify_l(pk, [(0, sig0)])
    assert toksig.verify_l(pk, [(0, sig0), (1, sig1)])
    assert not toksig.verify_l(pk, [(0, sig0), (0, sig0)])
    assert not toksig.verify_l(pk, [(0, sig0), (1, sig0)]) or gf2.coset_contains(
        gf2.complement(sk.space), sk.sp, sig0
    )


def test_revoke_fresh_token(keys):
    sk, pk = keys
    rng = np.random.default_rng(6)
    for _ in range(20):
        tok = toksig.token_gen(sk)
        ok, post = toksig.revoke(pk, tok, rng)
        assert ok
        assert qsim.fidelity(post.state, toksig.token_gen(sk).state) == pytest.approx(1.0, abs=1e-9)


def test_revoke_zero_state_first_check():
    sk, pk = toksig.keygen(6, seed=11)
    tok = toksig.Token(qsim.basis_state(6, 0))
    ok, _ = toksig.revoke(pk, tok, seed=0)
    zero_in_coset = gf2.coset_contains(sk.space, sk.s, BitVector.zero(6))
    if not zero_in_coset:
        assert not ok


def test_revoke_after_sign_rate():
    # collapsed to one basis vector, the Hadamard mass on the dual coset is
    # exactly 2^(-n/2)
    n, trials = 8, 4000
    rng = np.random.default_rng(7)
    sk, pk = toksig.keygen(n, rng)
    hits = 0
    for _ in range(trials):
        tok = toksig.token_gen(sk)
        toksig.sign(0, tok, rng)
        ok, _ = toksig.revoke(pk, tok, rng)
        hits += ok
    p = 2.0 ** (-n / 2)
    sigma = np.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) < 4 * sigma


def test_measure_both_bases_forgery_rate():
    # sign 0, then Hadamard-measure the residue: hits the dual coset with
    # probability exactly 2^(-n/2)
    n, trials = 8, 4000
    rng = np.random.default_rng(8)
    sk, pk = toksig.keygen(n, rng)
    perp = gf2.complement(sk.space)
    hits = 0
    for _ in range(trials):
        tok = toksig.token_gen(sk)
        _, sig0 = toksig.sign(0, tok, rng)
        rec = qsim.measure_all(qsim.hadamard_all(tok.state), rng)
        assert toksig.verify(pk, 0, sig0)
        hits += gf2.coset_contains(perp, sk.sp, rec.outcome)
    p = 2.0 ** (-n / 2)
    sigma = np.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) < 4 * sigma


def test_spent_token_coherent_check_other_basis_rate():
    # residue of a token spent on m=1, checked coherently against c0
    n, trials = 8, 4000
    rng = np.random.default_rng(9)
    sk, pk = toksig.keygen(n, rng)
    hits = 0
    for _ in range(trials):
        tok = toksig.token_gen(sk)
        toksig.sign(1, tok, rng)
        rec = qsim.coherent_predicate(tok.state, pk.c0, rng)
        hits += rec.outcome
    p = 2.0 ** (-n / 2)
    sigma = np.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) < 4 * sigma


def test_key_serialization_roundtrip(keys):
    sk, pk = keys
    sk2 = toksig.sk_from_json(toksig.sk_to_json(sk))
    assert sk2 == sk
    pk2 = toksig.pk_from_json(toksig.pk_to_json(pk))
    rng = np.random.default_rng(10)
    for _ in range(100):
        v = BitVector.random(8, rng)
        assert pk2.c0(v) == pk.c0(v) and pk2.c1(v) == pk.c1(v)
