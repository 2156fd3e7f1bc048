"""Executable security games with pluggable strategies and analytic bounds.

Every game is reproducible from (game id, params, seed): trial t draws its
randomness from a generator seeded by (seed, t), so results are identical
regardless of how trials are scheduled or chunked across workers.

Strategies that peek at challenger secrets exist solely to validate the
harness wiring; they are refused unless the caller sets
``allow_secrets=True`` and are never part of reported results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import cprf, meas, prf, sde
from .gf2 import (
    BitVector,
    Subspace,
    complement,
    coset_contains,
    coset_reps,
    enumerate_subspaces,
    intersect_dim,
    sample_subspace,
)
from .obf import ObfProgram, coset_membership_program, io_stub
from .qsim import (
    StateVector,
    hadamard_all,
    measure_all,
    measure_coset_basis,
    prepare_coset_state,
)


class SecretAccessError(PermissionError):
    """A secret-peeking sanity strategy ran without the test-only flag."""


class UnknownStrategyError(KeyError):
    pass


@dataclass
class GameResult:
    game: str
    trials: int
    successes: int
    seed: int
    params: dict
    exact: float | None = None
    queries: float | None = None

    @property
    def estimate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        out = {
            "game": self.game,
            "params": self.params,
            "strategy": self.params.get("strategy"),
            "trials": self.trials,
            "successes": self.successes,
            "estimate": self.estimate,
            "exact": self.exact,
            "seed": self.seed,
        }
        if self.queries is not None:
            out["queries"] = self.queries
        return out


class CountingOracle:
    """Wraps a predicate; classical and coherent queries both count once."""

    def __init__(self, fn: Callable, n: int):
        self._fn = fn
        self.n = n
        self.calls = 0

    def __call__(self, v: BitVector):
        self.calls += 1
        return self._fn(v)

    def mask(self, n: int) -> np.ndarray:
        """One coherent query: the full truth table, counted once."""
        self.calls += 1
        return np.fromiter(
            (bool(self._fn(BitVector(n, x))) for x in range(1 << n)),
            dtype=bool,
            count=1 << n,
        )


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


# ---------------------------------------------------------------------------
# direct product game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectProductChallenge:
    n: int
    state: StateVector
    oracle0: Callable  # membership in A + s (counting in IT mode)
    oracle1: Callable  # membership in A-perp + s'
    programs: tuple[ObfProgram, ObfProgram] | None  # comp mode only
    secrets: tuple | None  # (A, s, s') under the sanity flag


def _dp_honest(ch: DirectProductChallenge, rng) -> tuple[BitVector, BitVector]:
    """Measure the state, then Hadamard-measure the residue."""
    rec = measure_all(ch.state, rng)
    residue = hadamard_all(rec.post_state)
    rec2 = measure_all(residue, rng)
    return rec.outcome, rec2.outcome


def _dp_guess(ch: DirectProductChallenge, rng) -> tuple[BitVector, BitVector]:
    return BitVector.random(ch.n, rng), BitVector.random(ch.n, rng)


def _dp_search(ch: DirectProductChallenge, rng, budget: int = 64) -> tuple[BitVector, BitVector]:
    """Measure for the primal coset, then query-search for the dual one."""
    rec = measure_all(ch.state, rng)
    w = BitVector.random(ch.n, rng)
    for _ in range(budget):
        cand = BitVector.random(ch.n, rng)
        if ch.oracle1(cand):
            w = cand
            break
    return rec.outcome, w


def _dp_cheat(ch: DirectProductChallenge, rng) -> tuple[BitVector, BitVector]:
    if ch.secrets is None:
        raise SecretAccessError("cheating strategy needs the sanity channel")
    _, s, sp = ch.secrets
    return s, sp


DIRECT_PRODUCT_STRATEGIES: dict[str, Callable] = {
    "honest-double-measure": _dp_honest,
    "guess": _dp_guess,
    "measure-then-search": _dp_search,
    "cheat-with-secrets": _dp_cheat,
}

_SECRET_STRATEGIES = {"cheat-with-secrets", "is-trigger-cheat"}


def _resolve(registry: dict, strategy, allow_secrets: bool):
    if callable(strategy) and not isinstance(strategy, str):
        return strategy, getattr(strategy, "__name__", "custom")
    if strategy not in registry:
        raise UnknownStrategyError(
            f"unknown strategy {strategy!r}; registered: {sorted(registry)}"
        )
    if strategy in _SECRET_STRATEGIES and not allow_secrets:
        raise SecretAccessError(
            f"strategy {strategy!r} reads challenger secrets; pass allow_secrets=True in tests only"
        )
    return registry[strategy], strategy


def run_direct_product(
    n: int,
    strategy,
    mode: str = "it",
    trials: int = 1000,
    seed: int = 0,
    allow_secrets: bool = False,
    trial_offset: int = 0,
) -> GameResult:
    """Hand out one coset state; win by returning vectors in both cosets."""
    if mode not in ("it", "comp"):
        raise ValueError(f"mode must be 'it' or 'comp', got {mode!r}")
    fn, name = _resolve(DIRECT_PRODUCT_STRATEGIES, strategy, allow_secrets)
    successes = 0
    query_total = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        a = sample_subspace(n, n // 2, rng)
        s = BitVector.random(n, rng)
        sp = BitVector.random(n, rng)
        perp = complement(a)
        state = prepare_coset_state(a, s, sp)
        o0 = CountingOracle(lambda v, a=a, s=s: coset_contains(a, s, v), n)
        o1 = CountingOracle(lambda v, perp=perp, sp=sp: coset_contains(perp, sp, v), n)
        programs = None
        if mode == "comp":
            programs = (
                io_stub(coset_membership_program(a, s), n * n),
                io_stub(coset_membership_program(perp, sp), n * n),
            )
        ch = DirectProductChallenge(
            n=n,
            state=state,
            oracle0=o0,
            oracle1=o1,
            programs=programs,
            secrets=(a, s, sp) if allow_secrets else None,
        )
        v, w = fn(ch, rng)
        if coset_contains(a, s, v) and coset_contains(perp, sp, w):
            successes += 1
        query_total += o0.calls + o1.calls
    return GameResult(
        game="direct-product",
        trials=trials,
        successes=successes,
        seed=seed,
        params={"n": n, "mode": mode, "strategy": name},
        queries=query_total / trials if mode == "it" else None,
    )


# ---------------------------------------------------------------------------
# monogamy games
# ---------------------------------------------------------------------------

@dataclass
class MonogamyStrategy:
    """Split-stage plus two answer stages; answers see the subspace."""

    name: str
    split: Callable  # (state, n, rng) -> (payload_b, payload_c)
    answer1: Callable  # (payload, a, n, rng) -> answer
    answer2: Callable


def _fwd_split(state, n, rng):
    return state, None


def _coset_measure_answer(payload, a, n, rng):
    c, cp, _, _ = measure_coset_basis(payload, a, rng)
    return c, cp


def _pair_guess_answer(payload, a, n, rng):
    return BitVector.random(n, rng), BitVector.random(n, rng)


def _qubit_split(state, n, rng):
    """Measure half the qubits for one party, the rest for the other."""
    rec = measure_all(state, rng)
    v = rec.outcome
    hi = BitVector(n // 2, v.val >> (n - n // 2))
    lo = BitVector(n - n // 2, v.val & ((1 << (n - n // 2)) - 1))
    return hi, lo


def _qubit_answer_hi(payload, a, n, rng):
    rest = BitVector.random(n - payload.n, rng)
    return payload.concat(rest), BitVector.random(n, rng)


def _qubit_answer_lo(payload, a, n, rng):
    rest = BitVector.random(n - payload.n, rng)
    return rest.concat(payload), BitVector.random(n, rng)


MONOGAMY_STRATEGIES = {
    "forward-to-first": MonogamyStrategy(
        "forward-to-first", _fwd_split, _coset_measure_answer, _pair_guess_answer
    ),
    "split-qubits": MonogamyStrategy(
        "split-qubits", _qubit_split, _qubit_answer_hi, _qubit_answer_lo
    ),
    "blind-guess": MonogamyStrategy(
        "blind-guess", lambda state, n, rng: (None, None), _pair_guess_answer, _pair_guess_answer
    ),
}


def run_monogamy(
    n: int, strategy, trials: int = 1000, seed: int = 0, comp: bool = False, trial_offset: int = 0
) -> GameResult:
    """Both parties must return a full pair in (A+s) x (A-perp+s')."""
    if isinstance(strategy, str):
        if strategy not in MONOGAMY_STRATEGIES:
            raise UnknownStrategyError(
                f"unknown strategy {strategy!r}; registered: {sorted(MONOGAMY_STRATEGIES)}"
            )
        strat = MONOGAMY_STRATEGIES[strategy]
    else:
        strat = strategy
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        a = sample_subspace(n, n // 2, rng)
        s = BitVector.random(n, rng)
        sp = BitVector.random(n, rng)
        perp = complement(a)
        state = prepare_coset_state(a, s, sp)
        pb, pc = strat.split(state, n, rng)
        s1, sp1 = strat.answer1(pb, a, n, rng)
        s2, sp2 = strat.answer2(pc, a, n, rng)
        ok = (
            coset_contains(a, s, s1)
            and coset_contains(perp, sp, sp1)
            and coset_contains(a, s, s2)
            and coset_contains(perp, sp, sp2)
        )
        successes += ok
    return GameResult(
        game="monogamy",
        trials=trials,
        successes=successes,
        seed=seed,
        params={"n": n, "comp": comp, "strategy": strat.name},
    )


@dataclass
class StrongMonogamyStrategy:
    """Like the pair game, but each party returns a single vector."""

    name: str
    split: Callable
    answer1: Callable  # (payload, a, n, rng) -> vector aimed at A + s
    answer2: Callable  # (payload, a, n, rng) -> vector aimed at A-perp + s'
    needs_secrets: bool = False


def _sm_measure_split(state, n, rng):
    rec = measure_all(state, rng)
    return rec.outcome, rec.post_state  # classical outcome left, residue right


def _sm_identity_answer(payload, a, n, rng):
    return payload


def _sm_hadamard_answer(payload, a, n, rng):
    rec = measure_all(hadamard_all(payload), rng)
    return rec.outcome


def _sm_mirror_split(state, n, rng):
    rec = measure_all(hadamard_all(state), rng)
    residue = hadamard_all(rec.post_state)
    return residue, rec.outcome  # residue left, dual-basis outcome right


def _sm_measure_answer(payload, a, n, rng):
    return measure_all(payload, rng).outcome


STRONG_MONOGAMY_STRATEGIES = {
    "measure-and-send": StrongMonogamyStrategy(
        "measure-and-send", _sm_measure_split, _sm_identity_answer, _sm_hadamard_answer
    ),
    "keep-state-at-first": StrongMonogamyStrategy(
        "keep-state-at-first", _sm_mirror_split, _sm_measure_answer, _sm_identity_answer
    ),
    "blind-guess": StrongMonogamyStrategy(
        "blind-guess",
        lambda state, n, rng: (None, None),
        lambda p, a, n, rng: BitVector.random(n, rng),
        lambda p, a, n, rng: BitVector.random(n, rng),
    ),
}


def run_strong_monogamy(
    n: int,
    strategy,
    trials: int = 1000,
    seed: int = 0,
    comp: bool = False,
    allow_secrets: bool = False,
    trial_offset: int = 0,
) -> GameResult:
    """One vector per party: s1 in A+s and s2 in A-perp+s'."""
    if isinstance(strategy, str):
        if strategy not in STRONG_MONOGAMY_STRATEGIES:
            raise UnknownStrategyError(
                f"unknown strategy {strategy!r}; registered: {sorted(STRONG_MONOGAMY_STRATEGIES)}"
            )
        strat = STRONG_MONOGAMY_STRATEGIES[strategy]
    else:
        strat = strategy
    if getattr(strat, "needs_secrets", False) and not allow_secrets:
        raise SecretAccessError(f"strategy {strat.name!r} reads challenger secrets")
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        a = sample_subspace(n, n // 2, rng)
        s = BitVector.random(n, rng)
        sp = BitVector.random(n, rng)
        perp = complement(a)
        state = prepare_coset_state(a, s, sp)
        if comp:
            _ = (
                io_stub(coset_membership_program(a, s), n * n),
                io_stub(coset_membership_program(perp, sp), n * n),
            )  # available to the splitter in comp mode; none of the built-ins use them
        pb, pc = strat.split(state, n, rng)
        s1 = strat.answer1(pb, a, n, rng)
        s2 = strat.answer2(pc, a, n, rng)
        successes += coset_contains(a, s, s1) and coset_contains(perp, sp, s2)
    return GameResult(
        game="strong-monogamy",
        trials=trials,
        successes=successes,
        seed=seed,
        params={"n": n, "comp": comp, "strategy": strat.name},
    )


# ---------------------------------------------------------------------------
# anti-piracy games
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SdeGameParams:
    n: int = 8
    kappa: int = 2
    m_len: int = 2


def _pair_guesser(m0, m1):
    """Best blind play in the chosen-pair game: coin-flip between the two."""

    def dec(ct, rng):
        return m1 if rng.integers(2) else m0

    return dec


def _uniform_guesser(m_len):
    def dec(ct, rng):
        return BitVector.random(m_len, rng)

    return dec


class _HonestOneSidePirate:
    name = "honest-to-one-side"

    def decryptors(self, sk, pk, m_len, rng, kind):
        qkey = sde.qkeygen(sk)
        m0 = BitVector.zero(m_len)
        m1 = BitVector(m_len, 1)

        def dec1(ct, rng):
            return sde.decrypt(qkey, ct, rng)

        dec2 = _pair_guesser(m0, m1) if kind == "cpa" else _uniform_guesser(m_len)
        return (m0, m1), dec1, dec2


class _GuessBothPirate:
    name = "guess-both"

    def decryptors(self, sk, pk, m_len, rng, kind):
        m0 = BitVector.zero(m_len)
        m1 = BitVector(m_len, 1)
        dec = _pair_guesser(m0, m1) if kind == "cpa" else _uniform_guesser(m_len)
        return (m0, m1), dec, dec


SDE_PIRATES = {p.name: p for p in (_HonestOneSidePirate(), _GuessBothPirate())}


def _run_sde_cpa(params: SdeGameParams, pirate, trials, seed, trial_offset=0) -> int:
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        sk, pk = sde.setup(params.n, params.kappa, rng)
        (m0, m1), dec1, dec2 = pirate.decryptors(sk, pk, params.m_len, rng, "cpa")
        b1, b2 = int(rng.integers(2)), int(rng.integers(2))
        ct1 = sde.encrypt(pk, m1 if b1 else m0, rng)
        ct2 = sde.encrypt(pk, m1 if b2 else m0, rng)
        got1 = dec1(ct1, rng)
        got2 = dec2(ct2, rng)
        successes += (got1 == (m1 if b1 else m0)) and (got2 == (m1 if b2 else m0))
    return successes


def _run_sde_random(params: SdeGameParams, pirate, trials, seed, trial_offset=0) -> int:
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        sk, pk = sde.setup(params.n, params.kappa, rng)
        _, dec1, dec2 = pirate.decryptors(sk, pk, params.m_len, rng, "random")
        ch1 = BitVector.random(params.m_len, rng)
        ch2 = BitVector.random(params.m_len, rng)
        ct1 = sde.encrypt(pk, ch1, rng)
        ct2 = sde.encrypt(pk, ch2, rng)
        successes += (dec1(ct1, rng) == ch1) and (dec2(ct2, rng) == ch2)
    return successes


def _run_sde_strong_ti(params: SdeGameParams, pirate_name, trials, seed, gamma=0.4, trial_offset=0) -> int:
    if params.kappa != 1:
        raise ValueError("the threshold-test game enumerates ciphertexts; use kappa=1")
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        sk, pk = sde.setup(params.n, params.kappa, rng)
        qkey = sde.qkeygen(sk)
        m0 = BitVector.zero(params.m_len)
        m1 = BitVector(params.m_len, 1)
        if pirate_name == "honest-to-one-side":
            d1 = meas.honest_sde_decryptor(qkey.states[0], params.n)
            d2 = meas.guessing_decryptor(params.n, m0)
        else:
            d1 = meas.guessing_decryptor(params.n, m0)
            d2 = meas.guessing_decryptor(params.n, m0)
        bit1, _ = meas.test_gamma_good(pk, d1, m0, m1, gamma, rng)
        bit2, _ = meas.test_gamma_good(pk, d2, m0, m1, gamma, rng)
        successes += bit1 and bit2
    return successes


class _CpHonestOneSide:
    name = "honest-to-one-side"

    def sides(self, key, view, rng):
        def side1(x, rng):
            return cprf.cp_eval(key, x, rng)

        def side2(x, rng):
            return BitVector.random(view.params.m_len, rng)

        return side1, side2


class _CpGuessBoth:
    name = "guess-both"

    def sides(self, key, view, rng):
        def side(x, rng):
            return BitVector.random(view.params.m_len, rng)

        return side, side


CP_PIRATES = {p.name: p for p in (_CpHonestOneSide(), _CpGuessBoth())}


def _run_copy_protection(params: cprf.CpParams, pirate, trials, seed, trial_offset=0) -> int:
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        k1 = cprf.setup_f1(params, rng)
        key, view = cprf.cp_qkeygen(k1, params, rng)
        side1, side2 = pirate.sides(key, view, rng)
        u = BitVector.random(params.n, rng)
        w = BitVector.random(params.n, rng)
        ok1 = side1(u, rng) == prf.extracting_prf_eval(k1, u)
        ok2 = side2(w, rng) == prf.extracting_prf_eval(k1, w)
        successes += ok1 and ok2
    return successes


class _CpIndHonestOneSide:
    name = "honest-to-one-side"

    def sides(self, key, view, rng):
        def side1(x, given, rng):
            return 0 if cprf.cp_eval(key, x, rng) == given else 1

        def side2(x, given, rng):
            return int(rng.integers(2))

        return side1, side2


class _CpIndGuessBoth:
    name = "guess-both"

    def sides(self, key, view, rng):
        def side(x, given, rng):
            return int(rng.integers(2))

        return side, side


CP_IND_PIRATES = {p.name: p for p in (_CpIndHonestOneSide(), _CpIndGuessBoth())}


def _run_ind_cprf(params: cprf.CpParams, pirate, trials, seed, trial_offset=0) -> int:
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        k1 = cprf.setup_f1(params, rng)
        key, view = cprf.cp_qkeygen(k1, params, rng)
        side1, side2 = pirate.sides(key, view, rng)
        u = BitVector.random(params.n, rng)
        w = BitVector.random(params.n, rng)
        y1 = BitVector.random(params.m_len, rng)
        y2 = BitVector.random(params.m_len, rng)
        b1, b2 = int(rng.integers(2)), int(rng.integers(2))
        given1 = y1 if b1 else prf.extracting_prf_eval(k1, u)
        given2 = y2 if b2 else prf.extracting_prf_eval(k1, w)
        successes += (side1(u, given1, rng) == b1) and (side2(w, given2, rng) == b2)
    return successes


ANTI_PIRACY_KINDS = ("cpa", "random", "strong-ti", "ind-cprf", "copy-protection")


def run_anti_piracy(
    kind: str,
    scheme_params,
    strategy: str,
    trials: int = 1000,
    seed: int = 0,
    gamma: float = 0.4,
    trial_offset: int = 0,
) -> GameResult:
    """Dispatch one of the pirate games at the given scheme parameters."""
    if kind not in ANTI_PIRACY_KINDS:
        raise ValueError(f"kind must be one of {ANTI_PIRACY_KINDS}, got {kind!r}")
    if kind in ("cpa", "random", "strong-ti"):
        params = scheme_params if isinstance(scheme_params, SdeGameParams) else SdeGameParams()
        if kind == "strong-ti":
            if strategy not in SDE_PIRATES:
                raise UnknownStrategyError(f"unknown pirate {strategy!r}")
            successes = _run_sde_strong_ti(params, strategy, trials, seed, gamma, trial_offset)
        else:
            if strategy not in SDE_PIRATES:
                raise UnknownStrategyError(f"unknown pirate {strategy!r}")
            pirate = SDE_PIRATES[strategy]
            runner = _run_sde_cpa if kind == "cpa" else _run_sde_random
            successes = runner(params, pirate, trials, seed, trial_offset)
        pdict = {"n": params.n, "kappa": params.kappa, "m_len": params.m_len}
    else:
        params = scheme_params if isinstance(scheme_params, cprf.CpParams) else cprf.TOY_PARAMS
        registry = CP_IND_PIRATES if kind == "ind-cprf" else CP_PIRATES
        if strategy not in registry:
            raise UnknownStrategyError(f"unknown pirate {strategy!r}")
        pirate = registry[strategy]
        runner = _run_ind_cprf if kind == "ind-cprf" else _run_copy_protection
        successes = runner(params, pirate, trials, seed, trial_offset)
        pdict = {
            "l0": params.l0,
            "l1": params.l1,
            "l2": params.l2,
            "lambda": params.lam,
            "m_len": params.m_len,
            "waived": params.waived,
        }
    pdict["strategy"] = strategy
    if kind == "strong-ti":
        pdict["gamma"] = gamma
    return GameResult(
        game=f"anti-piracy-{kind}",
        trials=trials,
        successes=successes,
        seed=seed,
        params=pdict,
    )


# ---------------------------------------------------------------------------
# hidden trigger distinguishing game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HiddenTriggerChallenge:
    key: cprf.CpKey
    inputs: tuple[BitVector, BitVector]
    secrets: tuple | None  # (k2, k3) under the sanity flag


def _ht_coin_flip(ch: HiddenTriggerChallenge, rng) -> int:
    return int(rng.integers(2))


def _ht_eval_compare(ch: HiddenTriggerChallenge, rng) -> int:
    """Evaluate the key's program on both inputs and compare the outputs.

    Triggers are planted with exactly the honest PRF values, so the
    statistic carries no signal; this strategy exists to exercise the
    evaluation path inside the game.
    """
    u, w = ch.inputs
    yu = cprf.cp_eval(ch.key, u, rng)
    yw = cprf.cp_eval(ch.key, w, rng)
    return 1 if yu == yw else int(rng.integers(2))


def _ht_cheat(ch: HiddenTriggerChallenge, rng) -> int:
    if ch.secrets is None:
        raise SecretAccessError("is-trigger-cheat needs the sanity channel")
    k2, k3 = ch.secrets
    return 1 if cprf.is_trigger(ch.inputs[0], k2, k3) else 0


HIDDEN_TRIGGER_STRATEGIES = {
    "coin-flip": _ht_coin_flip,
    "evaluate-and-compare": _ht_eval_compare,
    "is-trigger-cheat": _ht_cheat,
}


def run_hidden_trigger_game(
    params: cprf.CpParams,
    strategy,
    trials: int = 1000,
    seed: int = 0,
    allow_secrets: bool = False,
    trial_offset: int = 0,
) -> GameResult:
    """Guess whether the received pair is uniform or generated triggers."""
    fn, name = _resolve(HIDDEN_TRIGGER_STRATEGIES, strategy, allow_secrets)
    successes = 0
    for t in range(trial_offset, trial_offset + trials):
        rng = _trial_rng(seed, t)
        k1 = cprf.setup_f1(params, rng)
        key, view = cprf.cp_qkeygen(k1, params, rng)
        u = BitVector.random(params.n, rng)
        w = BitVector.random(params.n, rng)
        b = int(rng.integers(2))
        if b:
            yu = prf.extracting_prf_eval(k1, u)
            yw = prf.extracting_prf_eval(k1, w)
            u0 = u.split(params.l0, params.l1, params.l2)[0]
            w0 = w.split(params.l0, params.l1, params.l2)[0]
            pair = (
                cprf.gen_trigger(u0, yu, view.k2, view.k3, view.cosets, params).x,
                cprf.gen_trigger(w0, yw, view.k2, view.k3, view.cosets, params).x,
            )
        else:
            pair = (u, w)
        ch = HiddenTriggerChallenge(
            key=key,
            inputs=pair,
            secrets=(view.k2, view.k3) if allow_secrets else None,
        )
        successes += fn(ch, rng) == b
    return GameResult(
        game="hidden-trigger",
        trials=trials,
        successes=successes,
        seed=seed,
        params={
            "l0": params.l0,
            "l1": params.l1,
            "l2": params.l2,
            "lambda": params.lam,
            "m_len": params.m_len,
            "strategy": name,
        },
    )


# ---------------------------------------------------------------------------
# analytic bounds
# ---------------------------------------------------------------------------

def monogamy_bound(n: int) -> Fraction:
    """Exact value of the operator-norm bound for the pair monogamy game.

    (1 / C(n, n/2)) * sum_{t=0}^{n/2} C(n/2, t)^2 * 2^(-t), as an exact
    rational.
    """
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    half = n // 2
    total = sum(Fraction(math.comb(half, t) ** 2, 2**t) for t in range(half + 1))
    return total / math.comb(n, half)


def monogamy_bound_presimplified(n: int) -> Fraction:
    """The same sum in its pre-simplification form, sum C(n/2,t)^2 2^(t-n/2)."""
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    half = n // 2
    total = sum(Fraction(math.comb(half, t) ** 2 * 2**t, 2**half) for t in range(half + 1))
    return total / math.comb(n, half)


def overlap_check(n: int, mode: str = "exhaustive", max_pairs: int | None = None, seed: int = 0) -> dict:
    """Verify the coset-state overlap bound 2^(dim(A ∩ A') - n/2).

    Exhaustive mode enumerates every ordered pair of half-dimension
    subspaces with every canonical coset pair on both sides; it is
    affordable up to n = 4 instantly and n = 6 in minutes, and refuses
    larger n.  Sampled mode draws ``max_pairs`` random subspace pairs.
    """
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if mode == "exhaustive":
        if n > 6:
            raise ValueError("exhaustive overlap check supported for n <= 6 only")
        spaces = list(enumerate_subspaces(n, n // 2))
        pairs = [(i, j) for i in range(len(spaces)) for j in range(i, len(spaces))]
    elif mode == "sampled":
        if max_pairs is None:
            raise ValueError("sampled mode needs max_pairs")
        rng = np.random.default_rng(seed)
        spaces = [sample_subspace(n, n // 2, rng) for _ in range(2 * max_pairs)]
        pairs = [(2 * k, 2 * k + 1) for k in range(max_pairs)]
    else:
        raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")

    def state_matrix(a: Subspace) -> np.ndarray:
        perp = complement(a)
        rows = [
            prepare_coset_state(a, c, cp).amps
            for c in coset_reps(a)
            for cp in coset_reps(perp)
        ]
        return np.array(rows)

    mats = [state_matrix(a) for a in spaces]
    violations = 0
    equality_cases = 0
    max_ratio = 0.0
    checked = 0
    for i, j in pairs:
        bound = 2.0 ** (intersect_dim(spaces[i], spaces[j]) - n / 2)
        overlaps = np.abs(mats[i].conj() @ mats[j].T)
        checked += overlaps.size
        worst = float(overlaps.max())
        violations += int(np.any(overlaps > bound + 1e-9))
        equality_cases += int(np.sum(np.abs(overlaps - bound) < 1e-9))
        max_ratio = max(max_ratio, worst / bound)
    return {
        "n": n,
        "mode": mode,
        "subspaces": len(spaces),
        "pairs": len(pairs),
        "overlaps_checked": checked,
        "violations": violations,
        "equality_cases": equality_cases,
        "max_ratio": max_ratio,
    }


# ---------------------------------------------------------------------------
# parallel fan-out
# ---------------------------------------------------------------------------

GAME_RUNNERS = {
    "direct-product": run_direct_product,
    "monogamy": run_monogamy,
    "strong-monogamy": run_strong_monogamy,
    "anti-piracy": run_anti_piracy,
    "hidden-trigger": run_hidden_trigger_game,
}


def _run_chunk(game: str, kwargs: dict) -> tuple[int, float | None]:
    result = GAME_RUNNERS[game](**kwargs)
    return result.successes, result.queries


def run_parallel(game: str, jobs: int, trials: int, **kwargs) -> GameResult:
    """Fan trials out over a worker pool; identical results for any job count.

    Trial t always draws from a generator seeded by (seed, t), so chunking
    changes scheduling only, never the outcome.
    """
    if game not in GAME_RUNNERS:
        raise ValueError(f"unknown game {game!r}; known: {sorted(GAME_RUNNERS)}")
    if jobs <= 1:
        return GAME_RUNNERS[game](trials=trials, **kwargs)
    from concurrent.futures import ProcessPoolExecutor

    chunk = (trials + jobs - 1) // jobs
    offsets = [(start, min(chunk, trials - start)) for start in range(0, trials, chunk)]
    futures = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for start, count in offsets:
            job_kwargs = dict(kwargs, trials=count, trial_offset=start)
            futures.append((count, pool.submit(_run_chunk, game, job_kwargs)))
    successes = 0
    query_sum = 0.0
    have_queries = False
    for count, fut in futures:
        succ, queries = fut.result()
        successes += succ
        if queries is not None:
            have_queries = True
            query_sum += queries * count
    template = GAME_RUNNERS[game](trials=1, **dict(kwargs, trial_offset=0))
    return GameResult(
        game=template.game,
        trials=trials,
        successes=successes,
        seed=kwargs.get("seed", 0),
        params=template.params,
        queries=query_sum / trials if have_queries else None,
    )
