"""PRF family tests: GGM determinism, puncturing, injectivity, extraction."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cosetlab import prf
from cosetlab.gf2 import BitVector


def all_inputs(n):
    return (BitVector(n, v) for v in range(1 << n))


# -- ggm --------------------------------------------------------------------------

def test_ggm_deterministic():
    key = prf.ggm_keygen(10, 8, 16, seed=0)
    x = BitVector(10, 0b1011001110)
    assert prf.ggm_eval(key, x) == prf.ggm_eval(key, x)


def test_ggm_distinct_keys_distinct_tables():
    rng = np.random.default_rng(1)
    tables = set()
    for _ in range(30):
        key = prf.ggm_keygen(8, 16, 32, rng)
        table = tuple(prf.ggm_eval(key, x).val for x in all_inputs(8))
        assert table not in tables
        tables.add(table)


def test_ggm_output_bit_balance():
    rng = np.random.default_rng(2)
    draws = 10**5
    key = prf.ggm_keygen(17, 1, 32, rng)
    ones = 0
    for _ in range(draws):
        ones += prf.ggm_eval(key, BitVector.random(17, rng)).val
    sigma = np.sqrt(0.25 / draws)
    assert abs(ones / draws - 0.5) < 4 * sigma


def test_ggm_length_mismatch():
    key = prf.ggm_keygen(6, 4, 8, seed=3)
    with pytest.raises(ValueError):
        prf.ggm_eval(key, BitVector(5, 0))


def test_ggm_wide_output_expansion():
    key = prf.ggm_keygen(4, 300, 16, seed=4)
    out = prf.ggm_eval(key, BitVector(4, 9))
    assert out.n == 300


# -- puncturing -------------------------------------------------------------------

@pytest.mark.parametrize("in_len,npts", [(4, 1), (8, 2), (12, 4)])
def test_puncture_preserves_functionality_exhaustive(in_len, npts):
    rng = np.random.default_rng(in_len * 31 + npts)
    for _ in range(6):
        key = prf.ggm_keygen(in_len, 8, 16, rng)
        pts = {BitVector.random(in_len, rng) for _ in range(npts)}
        pkey = prf.puncture(key, pts)
        punctured_vals = {p.val for p in pts}
        for x in all_inputs(in_len):
            if x.val in punctured_vals:
                with pytest.raises(prf.PuncturedPointError):
                    prf.punctured_eval(pkey, x)
            else:
                assert prf.punctured_eval(pkey, x) == prf.ggm_eval(key, x)


@given(
    st.integers(0, 2**32 - 1),
    st.integers(2, 10),
    st.sets(st.integers(0, 2**10 - 1), min_size=1, max_size=4),
)
@settings(max_examples=40, deadline=None)
def test_puncture_functionality_property(seed, in_len, raw_points):
    points = {p % (1 << in_len) for p in raw_points}
    key = prf.ggm_keygen(in_len, 6, 16, seed)
    pkey = prf.puncture(key, points)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        x = BitVector.random(in_len, rng)
        if x.val in points:
            with pytest.raises(prf.PuncturedPointError):
                prf.punctured_eval(pkey, x)
        else:
            assert prf.punctured_eval(pkey, x) == prf.ggm_eval(key, x)


def test_puncture_copath_size_bound():
    rng = np.random.default_rng(5)
    for npts in (1, 2, 3, 4):
        key = prf.ggm_keygen(16, 8, 16, rng)
        pts = {BitVector.random(16, rng) for _ in range(npts)}
        pkey = prf.puncture(key, pts)
        assert len(pkey.copath) <= len(pts) * 16


def test_puncture_empty_set_rejected():
    key = prf.ggm_keygen(8, 8, 16, seed=6)
    with pytest.raises(ValueError):
        prf.puncture(key, [])


def test_punctured_key_serialization():
    key = prf.ggm_keygen(8, 8, 16, seed=7)
    pkey = prf.puncture(key, [BitVector(8, 13), BitVector(8, 200)])
    back = prf.punctured_key_from_json(prf.punctured_key_to_json(pkey))
    assert back == pkey
    x = BitVector(8, 55)
    assert prf.punctured_eval(back, x) == prf.ggm_eval(key, x)


# -- pairwise hash ------------------------------------------------------------------

def test_pairwise_hash_is_affine():
    rng = np.random.default_rng(8)
    h = prf.pairwise_hash(10, 6, rng)
    x = BitVector.random(10, rng)
    y = BitVector.random(10, rng)
    zero = BitVector.zero(10)
    # h(x) + h(y) + h(0) = h(x + y) for an affine map
    lhs = h(x).val ^ h(y).val ^ h(zero).val
    assert lhs == h(x ^ y).val


def test_pairwise_hash_pair_statistics():
    # for fixed x != y the pair (h(x), h(y)) should be uniform over draws of h
    rng = np.random.default_rng(9)
    x, y = BitVector(6, 13), BitVector(6, 44)
    counts = np.zeros((4, 4))
    draws = 20000
    for _ in range(draws):
        h = prf.pairwise_hash(6, 2, rng)
        counts[h(x).val, h(y).val] += 1
    from scipy.stats import chi2

    expected = draws / 16
    stat = ((counts - expected) ** 2 / expected).sum()
    assert stat < chi2.ppf(0.999, 15)


# -- injective variant ---------------------------------------------------------------

def test_injective_constraint_enforced():
    with pytest.raises(prf.ParamConstraintError):
        prf.injective_prf_keygen(6, 10, 4, seed=0)
    key = prf.injective_prf_keygen(6, 10, 4, seed=0, toy=True)
    assert key.toy


def test_injective_key_fraction():
    # l2=6, l1=16, lambda=4: failure probability should be at most 2^-4
    rng = np.random.default_rng(10)
    keys = 200
    injective = 0
    for _ in range(keys):
        key = prf.injective_prf_keygen(6, 16, 4, rng)
        seen = set()
        ok = True
        for x in all_inputs(6):
            v = prf.injective_prf_eval(key, x).val
            if v in seen:
                ok = False
                break
            seen.add(v)
        injective += ok
    p_bound = 1 - 2.0**-4
    sigma = np.sqrt(p_bound * (1 - p_bound) / keys)
    assert injective / keys >= p_bound - 4 * sigma


def test_injective_deterministic_and_punctures():
    rng = np.random.default_rng(11)
    key = prf.injective_prf_keygen(6, 16, 4, rng)
    x = BitVector(6, 33)
    assert prf.injective_prf_eval(key, x) == prf.injective_prf_eval(key, x)
    pkey, h = prf.injective_prf_puncture(key, [BitVector(6, 5)])
    for v in all_inputs(6):
        if v.val == 5:
            continue
        assert prf.injective_punctured_eval(pkey, h, v) == prf.injective_prf_eval(key, v)


# -- extracting variant ---------------------------------------------------------------

def test_extracting_constraint_enforced():
    with pytest.raises(prf.ParamConstraintError):
        prf.extracting_prf_keygen(8, 2, 4, seed=0)
    assert prf.extracting_prf_keygen(8, 2, 1, seed=0).toy is False


def test_extracting_statistical_distance_toy():
    # n=8, m=2, lambda=1: exact per-key distance of F1(K, X) from uniform for
    # uniform X by full enumeration, averaged over sampled keys
    rng = np.random.default_rng(12)
    keys = 60
    total = 0.0
    for _ in range(keys):
        key = prf.extracting_prf_keygen(8, 2, 1, rng)
        counts = np.zeros(4)
        for x in all_inputs(8):
            counts[prf.extracting_prf_eval(key, x).val] += 1
        probs = counts / 256
        total += 0.5 * np.abs(probs - 0.25).sum()
    mean_sd = total / keys
    assert mean_sd <= 2.0 ** (-1 - 1) + 0.05  # stated extraction error plus Monte-Carlo slack


def test_extracting_deterministic_and_punctures():
    rng = np.random.default_rng(13)
    key = prf.extracting_prf_keygen(8, 2, 1, rng)
    x = BitVector(8, 129)
    assert prf.extracting_prf_eval(key, x) == prf.extracting_prf_eval(key, x)
    pkey, h = prf.extracting_prf_puncture(key, [x])
    hx = h(x).val
    for v in all_inputs(8):
        if h(v).val == hx:
            with pytest.raises(prf.PuncturedPointError):
                prf.extracting_punctured_eval(pkey, h, v)
        else:
            assert prf.extracting_punctured_eval(pkey, h, v) == prf.extracting_prf_eval(key, v)


# -- params report ----------------------------------------------------------------------

def test_params_check_all_satisfied():
    report = prf.params_check(l0=2, l1=40, l2=10, lam=4, m_len=2)
    assert report.ok and report.violations == []


def test_params_check_flags_injective_boundary():
    report = prf.params_check(l0=2, l1=2 * 10 + 4 - 1, l2=10, lam=4, m_len=2)
    assert "injective" in report.violations


def test_params_check_toy_preset_waives_only_injectivity():
    report = prf.params_check(l0=2, l1=16, l2=10, lam=4, m_len=2)
    assert report.violations == ["injective"]
    assert report.n == 28


def test_ggm_key_serialization():
    key = prf.ggm_keygen(9, 5, 12, seed=14)
    assert prf.ggm_key_from_json(prf.ggm_key_to_json(key)) == key
