"""Inner-product extraction from a noisy quantum predictor.

A predictor is a unitary that, given a uniformly random query register r
and an auxiliary register, writes a guess of <x, r> into an output qubit.
The extractor runs it once coherently: phase-flip the output, undo the
predictor, Fourier-transform the query register, and measure; the planted
vector appears with probability at least four times the squared bias.

The built-in predictor family is classical-reversible (a per-r XOR into
the output qubit, with a chosen set of queries answered wrongly), so the
exact bias and the exact extraction probability are both computable in
closed form and can be checked against the circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gf2 import BitVector, _as_rng, parity
from .qsim import _wht


@dataclass
class Predictor:
    """Unitary acting on (query register, aux register, output qubit).

    ``apply(state, adjoint)`` transforms a dense joint statevector whose
    index layout is (r << (aux_qubits + 1)) | (aux << 1) | out.
    """

    n: int
    aux_qubits: int
    apply: Callable
    planted_x: BitVector | None = None
    bias: float | None = None  # exact E_r[|alpha|^2] - 1/2 when known

    @property
    def qubits(self) -> int:
        return self.n + self.aux_qubits + 1


@dataclass
class ExtractionResult:
    candidate: BitVector
    success: bool | None
    probability: float  # exact probability of this candidate under the circuit


def _xor_oracle_apply(answers: np.ndarray, aux_qubits: int):
    """U: out ^= answers[r]; block-diagonal over r, identity on aux."""

    def apply(state: np.ndarray, adjoint: bool = False) -> np.ndarray:
        # an XOR permutation is its own inverse
        view = state.reshape(len(answers), -1, 2)
        flipped = view[answers.astype(bool)]
        view[answers.astype(bool)] = flipped[:, :, ::-1]
        return state

    return apply


def build_ip_predictor(x: BitVector, noise, seed) -> Predictor:
    """Inner-product predictor with an exactly known bias.

    ``noise`` is a flip fraction in [0, 1] (that exact share of the query
    space, chosen by the seed, is answered wrongly), an explicit iterable
    of query values to flip, or the string "random" for an answer table
    drawn uniformly (uncorrelated with x, so the expected extraction
    probability degenerates to the uniform level 2^-n).  The recorded
    bias is exact for the sampled table: #correct / 2^n - 1/2.
    """
    n = x.n
    size = 1 << n
    rng = _as_rng(seed)
    answers = np.fromiter((parity(r & x.val) for r in range(size)), dtype=np.uint8, count=size)
    if isinstance(noise, str):
        if noise != "random":
            raise ValueError(f"unknown noise model {noise!r}")
        table = rng.integers(0, 2, size=size).astype(np.uint8)
        flips = np.nonzero(table != answers)[0]
    elif np.isscalar(noise):
        count = int(round(float(noise) * size))
        if not 0 <= count <= size:
            raise ValueError(f"flip fraction {noise} out of range")
        flips = rng.choice(size, size=count, replace=False) if count else np.array([], dtype=int)
    else:
        flips = np.array(sorted({int(v) for v in noise}), dtype=int)
        if flips.size and (flips[0] < 0 or flips[-1] >= size):
            raise ValueError("flip set outside the query domain")
    answers = answers.copy()
    answers[flips] ^= 1
    correct = size - flips.size
    bias = correct / size - 0.5
    return Predictor(
        n=n,
        aux_qubits=0,
        apply=_xor_oracle_apply(answers, 0),
        planted_x=x,
        bias=bias,
    )


def build_aux_reader_predictor(n: int) -> Predictor:
    """Predictor that computes <aux, r> from its quantum auxiliary register.

    With aux prepared in a basis state |x> this is a perfect predictor for
    x; with aux in superposition it exercises the quantum-auxiliary-input
    clause (extraction collapses aux and returns the matching x).
    """
    size = 1 << n
    flip_table = np.array(
        [[parity(r & a) for a in range(size)] for r in range(size)], dtype=bool
    )

    def apply(state: np.ndarray, adjoint: bool = False) -> np.ndarray:
        view = state.reshape(size, size, 2)
        swapped = view[flip_table]
        view[flip_table] = swapped[:, ::-1]
        return state

    return Predictor(n=n, aux_qubits=n, apply=apply, planted_x=None, bias=None)


def _final_distribution(pred: Predictor, aux: np.ndarray | None) -> np.ndarray:
    """Joint state after U, Z, U-dagger, and the query-register transform."""
    n = pred.n
    size = 1 << n
    aux_dim = 1 << pred.aux_qubits
    if aux is None:
        aux_vec = np.zeros(aux_dim, dtype=np.complex128)
        aux_vec[0] = 1.0
    else:
        aux_vec = np.asarray(aux, dtype=np.complex128)
        if aux_vec.shape != (aux_dim,):
            raise ValueError(f"aux register needs {aux_dim} amplitudes")
    block = np.kron(aux_vec, np.array([1.0, 0.0]))  # aux tensor |0> output
    state = np.kron(np.full(size, 1.0 / np.sqrt(size)), block)
    state = pred.apply(state, adjoint=False)
    state.reshape(-1, 2)[:, 1] *= -1.0  # Z on the output qubit
    state = pred.apply(state, adjoint=True)
    # Fourier transform on the query register only
    state = state.reshape(size, aux_dim * 2)
    transformed = np.empty_like(state)
    for j in range(aux_dim * 2):
        transformed[:, j] = _wht(state[:, j])
    return transformed.reshape(-1)


def extract(pred: Predictor, aux, seed) -> ExtractionResult:
    """One run of the extraction circuit; measures the query register."""
    rng = _as_rng(seed)
    aux_arr = aux.amps if hasattr(aux, "amps") else aux
    state = _final_distribution(pred, aux_arr)
    size = 1 << pred.n
    probs = np.abs(state.reshape(size, -1)) ** 2
    marginal = probs.sum(axis=1)
    marginal /= marginal.sum()
    outcome = int(rng.choice(size, p=marginal))
    candidate = BitVector(pred.n, outcome)
    success = None if pred.planted_x is None else candidate == pred.planted_x
    return ExtractionResult(
        candidate=candidate, success=success, probability=float(marginal[outcome])
    )


def exact_success(pred: Predictor, aux=None) -> float:
    """Exact probability that the circuit returns the planted vector."""
    if pred.planted_x is None:
        raise ValueError("predictor has no planted vector")
    aux_arr = aux.amps if hasattr(aux, "amps") else aux
    state = _final_distribution(pred, aux_arr)
    size = 1 << pred.n
    probs = np.abs(state.reshape(size, -1)) ** 2
    return float(probs.sum(axis=1)[pred.planted_x.val])


def success_estimate(pred: Predictor, aux, reps: int, seed) -> float:
    """Fraction of extraction runs that return the planted vector."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    rng = _as_rng(seed)
    hits = 0
    for _ in range(reps):
        res = extract(pred, aux, rng)
        hits += bool(res.success)
    return hits / reps
