"""Exact projective and threshold implementations of binary POVM mixtures.

A mixture of binary projective measurements has the operator
P_D = sum_i p_i P_i; measuring in its eigenbasis returns the state's
success probability as an eigenvalue, and thresholding that eigenvalue
realizes the accept/reject test exactly.  Desk-scale Hilbert spaces make
the exact eigendecomposition affordable, which is why no approximate
variant exists here.

Decryptor circuits are restricted to descriptors of the form "apply a
ciphertext-selected unitary, measure all wires, post-process the outcome
classically", so each test projector is a concrete matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .gf2 import BitVector, _as_rng
from .qsim import StateVector

HERM_ATOL = 1e-8
CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class ProjectorOp:
    """A Hermitian idempotent matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"projector must be square, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=HERM_ATOL):
            raise ValueError("projector is not Hermitian")
        if not np.allclose(m @ m, m, atol=HERM_ATOL):
            raise ValueError("projector is not idempotent")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ProjImpMeasurement:
    """Clustered eigendecomposition of a mixture operator."""

    eigenvalues: tuple[float, ...]  # sorted ascending
    projectors: tuple[np.ndarray, ...]


@dataclass
class ProjectiveMixture:
    """Pairs (probability, projector) and their averaged operator."""

    items: list[tuple[float, ProjectorOp]]
    operator: np.ndarray = field(init=False)
    _decomposition: ProjImpMeasurement | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.items:
            raise ValueError("mixture needs at least one component")
        probs = np.array([p for p, _ in self.items])
        if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities must be nonnegative and sum to 1, got {probs}")
        dims = {proj.dim for _, proj in self.items}
        if len(dims) != 1:
            raise ValueError(f"mixed projector dimensions {dims}")
        self.operator = sum(p * proj.matrix for p, proj in self.items)

    @property
    def dim(self) -> int:
        return self.items[0][1].dim

    def decomposition(self) -> ProjImpMeasurement:
        """Eigendecomposition, cached; eigenvalues clustered at 1e-8."""
        if self._decomposition is None:
            vals, vecs = np.linalg.eigh(self.operator)
            clusters: list[list[int]] = [[0]]
            for i in range(1, len(vals)):
                if vals[i] - vals[clusters[-1][0]] <= CLUSTER_TOL:
                    clusters[-1].append(i)
                else:
                    clusters.append([i])
            eigenvalues = []
            projectors = []
            for idxs in clusters:
                lam = float(np.mean(vals[idxs]))
                # snap numerically split extremes onto the exact boundary
                if abs(lam) <= CLUSTER_TOL:
                    lam = 0.0
                elif abs(lam - 1.0) <= CLUSTER_TOL:
                    lam = 1.0
                block = vecs[:, idxs]
                eigenvalues.append(lam)
                projectors.append(block @ block.conj().T)
            self._decomposition = ProjImpMeasurement(tuple(eigenvalues), tuple(projectors))
        return self._decomposition


def build_mixture(items: Iterable[tuple[float, ProjectorOp | np.ndarray]]) -> ProjectiveMixture:
    normalized = [
        (float(p), proj if isinstance(proj, ProjectorOp) else ProjectorOp(proj))
        for p, proj in items
    ]
    return ProjectiveMixture(normalized)


def _state_array(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.amps
    return np.asarray(state, dtype=np.complex128)


def proj_imp_apply(mix: ProjectiveMixture, state, seed) -> tuple[float, np.ndarray]:
    """Measure the success probability of the state as an eigenvalue.

    Samples an eigenspace by the Born rule and returns (eigenvalue,
    collapsed state); repeating on the post-state reproduces the same
    eigenvalue with certainty.
    """
    rng = _as_rng(seed)
    psi = _state_array(state)
    dec = mix.decomposition()
    branches = [proj @ psi for proj in dec.projectors]
    weights = np.array([float(np.vdot(b, b).real) for b in branches])
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    k = int(rng.choice(len(weights), p=weights))
    post = branches[k] / np.linalg.norm(branches[k])
    return dec.eigenvalues[k], post


def threshold_imp_apply(mix: ProjectiveMixture, gamma: float, state, seed) -> tuple[int, np.ndarray]:
    """Accept iff the measured success-probability eigenvalue reaches gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    p, post = proj_imp_apply(mix, state, seed)
    return int(p >= gamma - 1e-12), post


def accept_probability(mix: ProjectiveMixture, gamma: float, state) -> float:
    """Exact spectral mass of the state on eigenvalues >= gamma."""
    psi = _state_array(state)
    dec = mix.decomposition()
    total = 0.0
    for lam, proj in zip(dec.eigenvalues, dec.projectors):
        if lam >= gamma - 1e-12:
            b = proj @ psi
            total += float(np.vdot(b, b).real)
    return total


def expected_value(mix: ProjectiveMixture, state) -> float:
    """<psi| P_D |psi>: the POVM success probability of the state."""
    psi = _state_array(state)
    return float(np.vdot(psi, mix.operator @ psi).real)


# -- decryptor testing ------------------------------------------------------------

@dataclass
class DecryptorCircuit:
    """A quantum decryptor: a state plus a ciphertext-indexed unitary.

    ``unitary_for(ct)`` returns the matrix applied to the state register
    for a given classical ciphertext; ``guess(ct, outcome)`` maps the
    measured wire pattern to a plaintext guess.  Both together make every
    test projector U^dag diag(...) U a constructible matrix.
    """

    state: np.ndarray
    unitary_for: Callable
    guess: Callable

    def projector_for(self, ct, target) -> ProjectorOp:
        u = np.asarray(self.unitary_for(ct), dtype=np.complex128)
        dim = u.shape[0]
        diag = np.array(
            [1.0 if self.guess(ct, outcome) == target else 0.0 for outcome in range(dim)]
        )
        return ProjectorOp(u.conj().T @ (diag[:, None] * u))


MAX_ENUM_DIM = 256


def decryptor_mixture(pk, decryptor: DecryptorCircuit, m0, m1, form: str = "io", sk=None) -> ProjectiveMixture:
    """The decryption-test POVM for a message pair, enumerated exactly.

    One projector per (challenge bit, encryption randomness r) pair: "run
    the decryptor on that ciphertext and compare the outcome with the
    encrypted message".  Requires a single-register scheme at enumerable
    size; the compute-and-compare form needs the secret key.
    """
    from . import sde

    if pk.kappa != 1:
        raise ValueError("decryptor test enumeration supports kappa=1 only")
    if (1 << pk.n) > MAX_ENUM_DIM:
        raise ValueError(f"register dimension 2^{pk.n} exceeds the enumeration guard")
    items = []
    weight = 1.0 / (2 * (1 << pk.kappa))
    for b, m in ((0, m0), (1, m1)):
        for rbits in range(1 << pk.kappa):
            r = BitVector(pk.kappa, rbits)
            if form == "cc":
                if sk is None:
                    raise ValueError("compute-and-compare form needs the secret key")
                ct = sde.encrypt_cc_with_r(sk, pk, m, r)
            else:
                ct = sde.encrypt_with_r(pk, m, r)
            items.append((weight, decryptor.projector_for(ct, m)))
    return build_mixture(items)


def test_gamma_good(
    pk, decryptor: DecryptorCircuit, m0, m1, gamma: float, seed, form: str = "io", sk=None
) -> tuple[int, np.ndarray]:
    """Threshold test at 1/2 + gamma for the decryption POVM."""
    mix = decryptor_mixture(pk, decryptor, m0, m1, form=form, sk=sk)
    return threshold_imp_apply(mix, 0.5 + gamma, decryptor.state, seed)


def honest_sde_decryptor(qkey_state: StateVector, n: int) -> DecryptorCircuit:
    """The honest single-register decryptor: rotate by r, measure, run the program."""
    dim = 1 << n
    hadamard = np.array([[1.0]])
    for _ in range(n):
        hadamard = np.kron(hadamard, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    identity = np.eye(dim)

    def unitary_for(ct):
        return hadamard if ct.r.bit(1) else identity

    def guess(ct, outcome):
        return ct.program((BitVector(n, outcome),))

    return DecryptorCircuit(state=qkey_state.amps.copy(), unitary_for=unitary_for, guess=guess)


def guessing_decryptor(n: int, fixed_guess) -> DecryptorCircuit:
    """Ignores the ciphertext and always answers the same message."""
    dim = 1 << n
    state = np.zeros(dim, dtype=np.complex128)
    state[0] = 1.0
    return DecryptorCircuit(
        state=state,
        unitary_for=lambda ct: np.eye(dim),
        guess=lambda ct, outcome: fixed_guess,
    )
