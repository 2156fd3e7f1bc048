"""Obfuscation-stub tests: wrappers preserve behavior exactly."""

import numpy as np
import pytest

from cosetlab import gf2, obf
from cosetlab.gf2 import BitVector
from cosetlab.obf import BOTTOM


def bv(s):
    return BitVector.from_string(s)


def test_io_stub_is_identity_on_membership():
    rng = np.random.default_rng(0)
    a = gf2.sample_subspace(8, 4, rng)
    s = BitVector.random(8, rng)
    raw = obf.coset_membership_program(a, s)
    wrapped = obf.io_stub(raw, pad=100)
    assert wrapped.kind == "iO-stub" and wrapped.padded_size == 100
    for v in obf.all_vectors(8):
        assert wrapped(v) == (1 if gf2.coset_contains(a, s, v) else 0)


def test_io_stub_constant_bottom():
    wrapped = obf.io_stub(lambda x: BOTTOM, pad=10)
    assert wrapped(bv("0101")) is BOTTOM


def test_io_stub_pad_too_small():
    a = gf2.sample_subspace(4, 2, 1)
    raw = obf.coset_membership_program(a, BitVector.zero(4))
    with pytest.raises(ValueError):
        obf.io_stub(raw, pad=1)


def test_sho_stub_accepts_superset():
    rng = np.random.default_rng(2)
    a = gf2.sample_subspace(8, 3, rng)
    prog = obf.sho_stub(a, 5, rng)
    assert prog.kind == "shO-stub"
    for e in a.elements():
        assert prog(BitVector(8, e)) == 1
    accepted = sum(prog(v) for v in obf.all_vectors(8))
    assert accepted == 2**5


def test_sho_stub_degenerate_is_membership():
    a = gf2.sample_subspace(6, 3, 3)
    prog = obf.sho_stub(a, 3, 0)
    for v in obf.all_vectors(6):
        assert prog(v) == (1 if a.contains(v.val) else 0)


def test_sho_stub_acceptance_fraction():
    rng = np.random.default_rng(4)
    for d1 in (3, 4, 5):
        a = gf2.sample_subspace(8, 2, rng)
        prog = obf.sho_stub(a, d1, rng)
        frac = sum(prog(v) for v in obf.all_vectors(8)) / 2**8
        assert frac == 2.0 ** (d1 - 8)


def test_cc_program_identity_lock():
    cc = obf.cc_program(lambda x: x, bv("101"), "secret")
    assert obf.cc_eval(cc, bv("101")) == "secret"
    assert obf.cc_eval(cc, bv("100")) is BOTTOM


def test_cc_canonical_rep_accepts_exactly_the_coset():
    rng = np.random.default_rng(5)
    a = gf2.sample_subspace(8, 4, rng)
    s = BitVector.random(8, rng)
    cc = obf.cc_program(lambda x: gf2.canonical_rep(a, x), gf2.canonical_rep(a, s), 1)
    member = obf.coset_membership_program(a, s)
    for v in obf.all_vectors(8):
        assert (obf.cc_eval(cc, v) == 1) == bool(member(v))


def test_cc_sim_stub_always_bottom_and_size():
    sim = obf.cc_sim_stub(padded_size=77)
    assert sim.padded_size == 77
    for v in obf.all_vectors(6):
        assert sim(v) is BOTTOM


def test_cc_sim_distinguishable_exactly_on_coset():
    rng = np.random.default_rng(6)
    a = gf2.sample_subspace(6, 3, rng)
    s = BitVector.random(6, rng)
    cc = obf.cc_obf(obf.cc_program(lambda x: gf2.canonical_rep(a, x), gf2.canonical_rep(a, s), 1))
    sim = obf.cc_sim_stub(cc.padded_size)
    differ = {v.val for v in obf.all_vectors(6) if cc(v) != sim(v)}
    assert differ == {e ^ s.val for e in a.elements()}


def test_equiv_on_domain():
    rng = np.random.default_rng(7)
    a = gf2.sample_subspace(8, 4, rng)
    s = BitVector.random(8, rng)
    member = obf.coset_membership_program(a, s)
    cc = obf.cc_obf(obf.cc_program(lambda x: gf2.canonical_rep(a, x), gf2.canonical_rep(a, s), 1))
    as_bit = obf.ObfProgram(lambda v: 1 if cc(v) == 1 else 0, 0, "raw")
    assert obf.equiv_on_domain(member, as_bit, obf.all_vectors(8))
    # shifting the offset by a subspace element preserves the program
    t = BitVector(8, a.rows[0])
    member2 = obf.coset_membership_program(a, s ^ t)
    assert obf.equiv_on_domain(member, member2, obf.all_vectors(8))
    # a genuinely different coset does not
    u = s
    while gf2.coset_contains(a, s, u):
        u = BitVector.random(8, rng)
    member3 = obf.coset_membership_program(a, u)
    assert not obf.equiv_on_domain(member, member3, obf.all_vectors(8))


def test_program_mask_matches_evaluator():
    rng = np.random.default_rng(8)
    a = gf2.sample_subspace(6, 2, rng)
    s = BitVector.random(6, rng)
    prog = obf.coset_membership_program(a, s)
    mask = prog.mask(6)
    for v in obf.all_vectors(6):
        assert mask[v.val] == bool(prog(v))
