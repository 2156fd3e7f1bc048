"""Exact statevector simulation of n-qubit registers for coset states.

States are dense arrays of 2^n complex amplitudes indexed by the packed
integer value of a BitVector (position 1 = most significant index bit).
Construction-chain states can differ from the direct amplitude formula by
a global phase, so states are compared through fidelity, never
amplitude-by-amplitude.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .gf2 import BitVector, Subspace, _as_rng, canonical_rep, complement, parity

MAX_QUBITS = 26
ATOL = 1e-9

Predicate = Union[np.ndarray, Callable[[BitVector], object]]


@dataclass
class StateVector:
    """2^n complex amplitudes with unit Euclidean norm (within 1e-9)."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n > MAX_QUBITS:
            raise ValueError(f"n={self.n} exceeds the {MAX_QUBITS}-qubit memory guard")
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got {self.amps.shape}")
        norm = np.linalg.norm(self.amps)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 by more than {ATOL}")

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass
class MeasurementRecord:
    """Outcome of a measurement, its post-state, and its Born probability."""

    outcome: BitVector | int
    post_state: StateVector
    probability: float


def basis_state(n: int, v: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[v] = 1.0
    return StateVector(n, amps)


def prepare_subspace_state(a: Subspace) -> StateVector:
    """Uniform superposition over all elements of the subspace."""
    amps = np.zeros(1 << a.n, dtype=np.complex128)
    coeff = 1.0 / np.sqrt(a.size)
    for e in a.elements():
        amps[e] = coeff
    return StateVector(a.n, amps)


def prepare_coset_state(
    a: Subspace, s: BitVector, sp: BitVector, via_chain: bool = False
) -> StateVector:
    """The coset state with support A+s and phases (-1)^<a, s'>.

    The default path fills amplitudes directly from the definition.  With
    ``via_chain=True`` the state is built by the add-s / H / add-s' / H
    sequence starting from the plain subspace state; the two agree up to a
    global phase of (-1)^<s, s'>.
    """
    if s.n != a.n or sp.n != a.n:
        raise ValueError("dimension mismatch between subspace and offsets")
    if via_chain:
        st = prepare_subspace_state(a)
        st = shift_state(st, s)
        st = hadamard_all(st)
        st = shift_state(st, sp)
        return hadamard_all(st)
    amps = np.zeros(1 << a.n, dtype=np.complex128)
    coeff = 1.0 / np.sqrt(a.size)
    spv = sp.val
    for e in a.elements():
        amps[e ^ s.val] = -coeff if parity(e & spv) else coeff
    return StateVector(a.n, amps)


def shift_state(state: StateVector, t: BitVector) -> StateVector:
    """Add the classical vector t to the register (the X^t permutation)."""
    if t.n != state.n:
        raise ValueError(f"dimension mismatch {t.n} != {state.n}")
    idx = np.arange(1 << state.n) ^ t.val
    return StateVector(state.n, state.amps[idx])


_PARITY16 = None


def _parity_table() -> np.ndarray:
    global _PARITY16
    if _PARITY16 is None:
        t = np.zeros(1 << 16, dtype=np.int8)
        for b in range(16):
            t ^= (np.arange(1 << 16) >> b).astype(np.int8) & 1
        _PARITY16 = t
    return _PARITY16


def hadamard_all(state: StateVector) -> StateVector:
    """Apply H on every qubit (the F_2^n Fourier transform)."""
    nz = np.flatnonzero(np.abs(state.amps) > 0.0)
    if nz.size == 1:
        # basis-state fast path: a pure phase table
        v = int(nz[0])
        size = 1 << state.n
        idx = np.arange(size)
        par = np.zeros(size, dtype=np.int8)
        table = _parity_table()
        for shift in range(0, state.n, 16):
            par ^= table[(idx >> shift) & 0xFFFF & (v >> shift)]
        amps = np.where(par, -1.0, 1.0).astype(np.complex128)
        amps *= state.amps[v] / np.sqrt(size)
        return StateVector(state.n, amps)
    return StateVector(state.n, _wht(state.amps))


def measure_all(state: StateVector, seed) -> MeasurementRecord:
    """Standard-basis measurement with Born probabilities."""
    rng = _as_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    outcome = int(rng.choice(probs.shape[0], p=probs))
    return MeasurementRecord(
        outcome=BitVector(state.n, outcome),
        post_state=basis_state(state.n, outcome),
        probability=float(probs[outcome]),
    )


def predicate_mask(n: int, pred: Predicate) -> np.ndarray:
    """Truth table of a predicate as a boolean array over all 2^n inputs.

    Accepts a precomputed boolean array, an object exposing ``mask(n)``
    (membership programs, counting oracles), or a plain callable on
    BitVectors.
    """
    if isinstance(pred, np.ndarray):
        if pred.shape != (1 << n,):
            raise ValueError(f"mask has shape {pred.shape}, expected ({1 << n},)")
        return pred.astype(bool)
    masker = getattr(pred, "mask", None)
    if masker is not None:
        return np.asarray(masker(n), dtype=bool)
    return np.fromiter(
        (bool(pred(BitVector(n, v))) for v in range(1 << n)), dtype=bool, count=1 << n
    )


def coset_mask(a: Subspace, s: BitVector) -> np.ndarray:
    """Boolean membership table of the coset A + s over all of F_2^n."""
    mask = np.zeros(1 << a.n, dtype=bool)
    sv = s.val
    for e in a.elements():
        mask[e ^ sv] = True
    return mask


def coherent_predicate(state: StateVector, pred: Predicate, seed) -> MeasurementRecord:
    """Compute a predicate into an ancilla, measure it, uncompute.

    The ancilla is virtual: the support is partitioned by predicate value
    and one branch is kept, which is exactly the semantics of computing
    the bit into a fresh qubit, measuring it, and uncomputing.  If the
    predicate is constant on the support the state is returned unchanged.
    """
    rng = _as_rng(seed)
    mask = predicate_mask(state.n, pred)
    probs = state.probabilities()
    p1 = float(probs[mask].sum())
    p1 = min(max(p1, 0.0), 1.0)
    bit = 1 if rng.random() < p1 else 0
    keep = mask if bit else ~mask
    post = np.where(keep, state.amps, 0.0)
    branch_mass = p1 if bit else 1.0 - p1
    post = post / np.sqrt(branch_mass)
    return MeasurementRecord(
        outcome=bit,
        post_state=StateVector(state.n, post),
        probability=branch_mass,
    )


def fidelity(s1: StateVector, s2: StateVector) -> float:
    """|<s1|s2>|^2."""
    if s1.n != s2.n:
        raise ValueError(f"dimension mismatch {s1.n} != {s2.n}")
    return float(abs(np.vdot(s1.amps, s2.amps)) ** 2)


def measure_coset_basis(
    state: StateVector, a: Subspace, seed
) -> tuple[BitVector, BitVector, StateVector, float]:
    """Measure in the orthonormal basis of coset states of a fixed subspace.

    For dim(A) = d the 2^n states indexed by canonical pairs (c, c') with
    c ranging over cosets of A and c' over cosets of A-perp form an
    orthonormal basis, so this is a complete projective measurement.
    Returns (c, c', post_state, probability).
    """
    n, d = a.n, a.dim
    rng = _as_rng(seed)
    perp = complement(a)
    elems = list(a.elements())

    # coefficient of |A_{c,c'}> is a d-dim Hadamard transform of the
    # amplitudes gathered along the coset c, read out at u(c') where
    # u_i = <row_i, c'>
    combo_index = np.zeros(len(elems), dtype=np.int64)
    acc = 0
    for t in range(1, len(elems)):
        acc ^= 1 << ((t & -t).bit_length() - 1)
        combo_index[t] = acc
    # map u in F_2^d  ->  canonical rep c' solving <row_i, c'> = u_i
    cprime_of_u = _phase_rep_table(a, perp)

    coeffs = {}
    total = []
    keys = []
    for c in _coset_rep_ints(a):
        gathered = np.empty(len(elems), dtype=np.complex128)
        for t, e in enumerate(elems):
            gathered[combo_index[t]] = state.amps[e ^ c]
        block = _wht(gathered) if d else gathered.copy()
        coeffs[c] = block
        for u in range(1 << d):
            keys.append((c, u))
            total.append(abs(block[u]) ** 2)
    probs = np.array(total)
    probs = probs / probs.sum()
    pick = int(rng.choice(len(keys), p=probs))
    c, u = keys[pick]
    cp = cprime_of_u[u]
    post = prepare_coset_state(a, BitVector(n, c), BitVector(n, cp))
    # restore the measured branch's phase
    phase = coeffs[c][u] / abs(coeffs[c][u])
    post = StateVector(n, post.amps * phase)
    return BitVector(n, c), BitVector(n, cp), post, float(probs[pick])


def _wht(v: np.ndarray) -> np.ndarray:
    a = v.copy()
    size = v.shape[0]
    step = 1
    while step < size:
        view = a.reshape(-1, 2, step)
        top = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] *= -1.0
        view[:, 1, :] += top
        step *= 2
    return a / np.sqrt(size)


def _coset_rep_ints(a: Subspace):
    from .gf2 import coset_reps

    return [r.val for r in coset_reps(a)]


def _phase_rep_table(a: Subspace, perp: Subspace) -> list[int]:
    """For each u in F_2^d, the canonical c' with <row_i, c'> = u_i for all i."""
    n, d = a.n, a.dim
    table = [0] * (1 << d)
    for cp in _coset_rep_ints(perp):
        u = 0
        for i, row in enumerate(a.rows):
            if parity(row & cp):
                u |= 1 << i  # bit i pairs with basis row i in the transform
        table[u] = canonical_rep(perp, BitVector(n, cp)).val
    return table


def dump_amplitudes(state: StateVector, fileobj) -> None:
    """Write (index, re, im) rows as CSV for debugging."""
    writer = csv.writer(fileobj)
    writer.writerow(["index", "re", "im"])
    for i, amp in enumerate(state.amps):
        writer.writerow([format(i, f"0{state.n}b"), repr(float(amp.real)), repr(float(amp.imag))])
