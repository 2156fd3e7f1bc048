"""Inner-product extraction tests: exact amplitudes and sampled success."""

import numpy as np
import pytest

from cosetlab import glx, qsim
from cosetlab.gf2 import BitVector


def test_perfect_predictor_bias_and_success():
    x = BitVector.from_string("10110100")
    pred = glx.build_ip_predictor(x, noise=0.0, seed=0)
    assert pred.bias == pytest.approx(0.5)
    assert glx.exact_success(pred) == pytest.approx(1.0, abs=1e-9)
    res = glx.extract(pred, aux=None, seed=1)
    assert res.candidate == x and res.success


def test_half_flips_zero_bias_bound_tight():
    x = BitVector.from_string("1011")
    pred = glx.build_ip_predictor(x, noise=0.5, seed=2)
    assert pred.bias == pytest.approx(0.0)
    # the 4*eps^2 floor is tight for the exact-fraction family
    assert glx.exact_success(pred) == pytest.approx(0.0, abs=1e-9)


def test_uncorrelated_table_uniform_level():
    # an answer table independent of x extracts x at the uniform level
    # 2^-n on average over tables
    rng = np.random.default_rng(2)
    x = BitVector.from_string("101101")
    tables = 300
    mean = np.mean(
        [glx.exact_success(glx.build_ip_predictor(x, noise="random", seed=rng)) for _ in range(tables)]
    )
    level = 2.0**-6
    assert mean == pytest.approx(level, abs=4 * 1.5 * level / np.sqrt(tables) + 1e-4)


def test_eighth_flip_bias_three_eighths():
    x = BitVector.from_string("10110100")
    pred = glx.build_ip_predictor(x, noise=1 / 8, seed=3)
    assert pred.bias == pytest.approx(3 / 8)


def test_exact_success_matches_phase_formula():
    # success = (E_r[(-1)^{flip_r}])^2 = (1 - 2*fraction)^2 = (2 eps)^2
    rng = np.random.default_rng(4)
    for frac in (0.0, 1 / 16, 1 / 8, 1 / 4, 3 / 8):
        x = BitVector.random(8, rng)
        pred = glx.build_ip_predictor(x, noise=frac, seed=rng)
        expected = (2 * pred.bias) ** 2
        assert glx.exact_success(pred) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(4 * pred.bias**2)


def test_explicit_flip_set():
    x = BitVector.from_string("1100")
    pred = glx.build_ip_predictor(x, noise=[0, 1], seed=0)
    assert pred.bias == pytest.approx(14 / 16 - 0.5)


def test_empirical_success_meets_quadratic_floor():
    rng = np.random.default_rng(5)
    x = BitVector.random(8, rng)
    pred = glx.build_ip_predictor(x, noise=1 / 8, seed=6)
    eps = pred.bias
    reps = 3000
    est = glx.success_estimate(pred, aux=None, reps=reps, seed=7)
    floor = 4 * eps**2
    sigma = np.sqrt(floor * (1 - floor) / reps)
    assert est >= floor - 4 * sigma


def test_success_monotone_in_bias():
    rng = np.random.default_rng(8)
    x = BitVector.random(6, rng)
    succ = [
        glx.exact_success(glx.build_ip_predictor(x, noise=f, seed=9))
        for f in (3 / 8, 1 / 4, 1 / 8, 0.0)
    ]
    assert all(a < b + 1e-12 for a, b in zip(succ, succ[1:]))


def test_norm_preserved_through_circuit():
    x = BitVector.from_string("101101")
    pred = glx.build_ip_predictor(x, noise=1 / 4, seed=10)
    state = glx._final_distribution(pred, None)
    assert np.linalg.norm(state) == pytest.approx(1.0, abs=1e-9)


def test_aux_basis_state_extracts_that_vector():
    pred = glx.build_aux_reader_predictor(4)
    for val in (3, 9, 14):
        aux = np.zeros(16, dtype=complex)
        aux[val] = 1.0
        res = glx.extract(pred, aux, seed=11)
        assert res.candidate.val == val
        assert res.probability == pytest.approx(1.0, abs=1e-9)


def test_aux_superposition_collapses_to_component():
    pred = glx.build_aux_reader_predictor(3)
    aux = np.zeros(8, dtype=complex)
    aux[2] = np.sqrt(0.3)
    aux[5] = np.sqrt(0.7)
    rng = np.random.default_rng(12)
    counts = {2: 0, 5: 0}
    trials = 2000
    for _ in range(trials):
        res = glx.extract(pred, aux, rng)
        assert res.candidate.val in counts
        counts[res.candidate.val] += 1
    sigma = np.sqrt(0.3 * 0.7 / trials)
    assert abs(counts[2] / trials - 0.3) < 4 * sigma


def test_extract_accepts_statevector_aux():
    pred = glx.build_aux_reader_predictor(3)
    res = glx.extract(pred, qsim.basis_state(3, 6), seed=13)
    assert res.candidate.val == 6


def test_guards():
    x = BitVector.from_string("1010")
    with pytest.raises(ValueError):
        glx.build_ip_predictor(x, noise=1.5, seed=0)
    pred = glx.build_ip_predictor(x, noise=0.0, seed=0)
    with pytest.raises(ValueError):
        glx.success_estimate(pred, None, reps=0, seed=0)
    aux_pred = glx.build_aux_reader_predictor(2)
    with pytest.raises(ValueError):
        glx.extract(aux_pred, np.ones(3), seed=0)
