"""One-bit tokenized signatures over hidden coset states.

A token is a single coset state.  Signing bit 0 measures it in the
computational basis, signing bit 1 in the Hadamard basis; verification
runs the matching public membership program.  Tokens are single-owner:
cloning is not offered anywhere in the interface, and a consumed token
refuses to sign again (its post-measurement state stays accessible so
adversarial experiments can keep operating on the residue).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .gf2 import BitVector, Subspace, complement, rref, sample_subspace, _as_rng
from .obf import ObfProgram, coset_membership_program, io_stub, membership_size
from .qsim import (
    MAX_QUBITS,
    StateVector,
    coherent_predicate,
    hadamard_all,
    measure_all,
    prepare_coset_state,
)


class TokenConsumedError(RuntimeError):
    """Raised when a token that already signed is asked to sign again."""


@dataclass(frozen=True)
class TsSecretKey:
    space: Subspace  # dimension n/2
    s: BitVector
    sp: BitVector

    @property
    def n(self) -> int:
        return self.space.n


@dataclass(frozen=True)
class TsPublicKey:
    c0: ObfProgram  # accepts exactly A + s
    c1: ObfProgram  # accepts exactly A-perp + s'

    @property
    def n(self) -> int:
        return self.c0.meta["space"].n


@dataclass
class Token:
    state: StateVector
    consumed: bool = field(default=False)


def keygen(n: int, seed) -> tuple[TsSecretKey, TsPublicKey]:
    """Sample a uniform half-dimension subspace and two uniform offsets."""
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"n={n} exceeds the {MAX_QUBITS}-qubit memory guard")
    rng = _as_rng(seed)
    a = sample_subspace(n, n // 2, rng)
    s = BitVector.random(n, rng)
    sp = BitVector.random(n, rng)
    sk = TsSecretKey(a, s, sp)
    return sk, public_key(sk)


def public_key(sk: TsSecretKey) -> TsPublicKey:
    pad = membership_size(sk.n, sk.space.dim)
    c0 = io_stub(coset_membership_program(sk.space, sk.s), pad)
    c1 = io_stub(coset_membership_program(complement(sk.space), sk.sp), pad)
    return TsPublicKey(c0, c1)


def token_gen(sk: TsSecretKey) -> Token:
    return Token(state=prepare_coset_state(sk.space, sk.s, sk.sp))


def sign(m: int, token: Token, seed) -> tuple[int, BitVector]:
    """Measure the token in the basis selected by the message bit.

    The token is consumed; its collapsed state is retained on the token so
    that follow-up experiments (forging attempts, revocation of spent
    tokens) can keep working with the residue.  For m=1 the residue is
    rotated back by H so residues of both message bits are stored in the
    same frame as the original token; a later coherent check against the
    other coset then passes with probability exactly 2^(-n/2).
    """
    if m not in (0, 1):
        raise ValueError(f"message must be a bit, got {m!r}")
    if token.consumed:
        raise TokenConsumedError("token has already produced a signature")
    state = hadamard_all(token.state) if m else token.state
    rec = measure_all(state, seed)
    post = rec.post_state
    if m:
        post = hadamard_all(post)
    token.state = post
    token.consumed = True
    return m, rec.outcome


def verify(pk: TsPublicKey, m: int, sig: BitVector) -> bool:
    if m not in (0, 1):
        raise ValueError(f"message must be a bit, got {m!r}")
    prog = pk.c1 if m else pk.c0
    return bool(prog(sig))


def verify_l(pk: TsPublicKey, pairs) -> bool:
    """All messages pairwise distinct and every pair verifies."""
    messages = [m for m, _ in pairs]
    if len(set(messages)) != len(messages):
        return False
    return all(verify(pk, m, sig) for m, sig in pairs)


def revoke(pk: TsPublicKey, token: Token, seed) -> tuple[bool, Token]:
    """Check both membership programs coherently; accept iff both pass.

    The first check runs in the computational basis, the second after a
    full Hadamard.  The Hadamard is always undone afterwards, whether or
    not the second check passed, so the returned token is in the original
    frame; a fresh token is accepted with certainty and returned intact.
    """
    rng = _as_rng(seed)
    rec0 = coherent_predicate(token.state, pk.c0, rng)
    if rec0.outcome != 1:
        return False, Token(rec0.post_state, token.consumed)
    rotated = hadamard_all(rec0.post_state)
    rec1 = coherent_predicate(rotated, pk.c1, rng)
    post = hadamard_all(rec1.post_state)
    return rec1.outcome == 1, Token(post, token.consumed)


# -- serialization (hex-encoded vectors inside JSON) ---------------------------

def sk_to_json(sk: TsSecretKey) -> str:
    return json.dumps(
        {
            "n": sk.n,
            "basis": [format(r, f"0{sk.n}b") for r in sk.space.rows],
            "s": sk.s.hex,
            "sp": sk.sp.hex,
        },
        indent=2,
    )


def sk_from_json(text: str) -> TsSecretKey:
    data = json.loads(text)
    n = data["n"]
    space = rref([BitVector.from_string(r) for r in data["basis"]], n=n)
    return TsSecretKey(space, BitVector.from_hex(n, data["s"]), BitVector.from_hex(n, data["sp"]))


def pk_to_json(pk: TsPublicKey) -> str:
    def prog(p: ObfProgram) -> dict:
        sp = p.meta["space"]
        return {
            "basis": [format(r, f"0{sp.n}b") for r in sp.rows],
            "offset": p.meta["offset"].hex,
            "kind": p.kind,
        }

    return json.dumps({"n": pk.n, "c0": prog(pk.c0), "c1": prog(pk.c1)}, indent=2)


def pk_from_json(text: str) -> TsPublicKey:
    data = json.loads(text)
    n = data["n"]

    def prog(d: dict) -> ObfProgram:
        space = rref([BitVector.from_string(r) for r in d["basis"]], n=n)
        raw = coset_membership_program(space, BitVector.from_hex(n, d["offset"]))
        return io_stub(raw, raw.padded_size)

    return TsPublicKey(prog(data["c0"]), prog(data["c1"]))
