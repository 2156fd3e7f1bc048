"""Single-decryptor encryption over tuples of hidden coset states.

The quantum decryption key is a product of per-record coset states, and a
ciphertext carries a program releasing the message exactly on tuples that
pass one membership check per record (the basis choice per record is the
ciphertext's public r string).  Honest decryption evaluates the checks
coherently register by register, which is equivalent to a single coherent
program evaluation for product inputs and keeps memory at kappa * 2^n.

The ciphertext program forms:
  * ``io-stub``   -- the conjunction program, identity-wrapped,
  * ``cc``        -- the challenger-side compute-and-compare form whose lock
                     is the concatenated canonical coset representatives,
  * ``cc-sim``    -- the simulator's constant-failure program,
  * ``we``        -- a transparent witness-encryption form over tokenized
                     signature keys (the witness is one valid signature per
                     bit of r).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import toksig
from .gf2 import BitVector, Subspace, _as_rng, canonical_rep, complement, rref, sample_subspace
from .obf import (
    BOTTOM,
    CCProgram,
    ObfProgram,
    cc_program,
    cc_sim_stub,
    coset_membership_program,
    io_stub,
    membership_size,
)
from .qsim import MAX_QUBITS, StateVector, coherent_predicate, hadamard_all, prepare_coset_state


class UnfactorizableCiphertextError(ValueError):
    """The ciphertext program carries no per-register structure to evaluate."""


@dataclass(frozen=True)
class CosetRecord:
    space: Subspace
    s: BitVector
    sp: BitVector


@dataclass(frozen=True)
class SdeSecretKey:
    records: tuple[CosetRecord, ...]

    @property
    def kappa(self) -> int:
        return len(self.records)

    @property
    def n(self) -> int:
        return self.records[0].space.n


@dataclass(frozen=True)
class SdePublicKey:
    programs: tuple[tuple[ObfProgram, ObfProgram], ...]  # (R_i^0, R_i^1)

    @property
    def kappa(self) -> int:
        return len(self.programs)

    @property
    def n(self) -> int:
        return self.programs[0][0].meta["space"].n


@dataclass
class QuantumDecKey:
    states: list[StateVector]

    @property
    def kappa(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Ciphertext:
    r: BitVector  # kappa bits
    program: ObfProgram

    @property
    def kappa(self) -> int:
        return self.r.n


def setup(n: int, kappa: int, seed) -> tuple[SdeSecretKey, SdePublicKey]:
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"n={n} exceeds the {MAX_QUBITS}-qubit per-register guard")
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    rng = _as_rng(seed)
    records = []
    for _ in range(kappa):
        a = sample_subspace(n, n // 2, rng)
        records.append(CosetRecord(a, BitVector.random(n, rng), BitVector.random(n, rng)))
    sk = SdeSecretKey(tuple(records))
    return sk, public_key(sk)


def public_key(sk: SdeSecretKey) -> SdePublicKey:
    pad = membership_size(sk.n, sk.n // 2)  # all membership programs share one pad
    pairs = []
    for rec in sk.records:
        r0 = io_stub(coset_membership_program(rec.space, rec.s), pad)
        r1 = io_stub(coset_membership_program(complement(rec.space), rec.sp), pad)
        pairs.append((r0, r1))
    return SdePublicKey(tuple(pairs))


def qkeygen(sk: SdeSecretKey) -> QuantumDecKey:
    return QuantumDecKey([prepare_coset_state(r.space, r.s, r.sp) for r in sk.records])


def _conjunction_program(pk: SdePublicKey, m, r: BitVector) -> ObfProgram:
    """The program releasing m exactly when every selected check passes."""
    factors = tuple(pk.programs[i][r.bit(i + 1)] for i in range(pk.kappa))

    def run(us) -> object:
        if len(us) != len(factors):
            return BOTTOM
        return m if all(f(u) for f, u in zip(factors, us)) else BOTTOM

    pad = sum(f.padded_size for f in factors) + pk.n
    return io_stub(
        ObfProgram(run, pad, "raw", {"factors": factors, "payload": m, "r": r}), pad
    )


def encrypt(pk: SdePublicKey, m, seed) -> Ciphertext:
    """Sample r uniformly and wrap the conjunction program for (m, r)."""
    rng = _as_rng(seed)
    r = BitVector.random(pk.kappa, rng)
    return encrypt_with_r(pk, m, r)


def encrypt_with_r(pk: SdePublicKey, m, r: BitVector) -> Ciphertext:
    """Deterministic encryption with explicit randomness (challenger use)."""
    if r.n != pk.kappa:
        raise ValueError(f"r has {r.n} bits, expected {pk.kappa}")
    return Ciphertext(r=r, program=_conjunction_program(pk, m, r))


def decrypt(qkey: QuantumDecKey, ct: Ciphertext, seed) -> object:
    """Coherent register-by-register decryption; rewinds to preserve the key.

    Applies H on every register whose r bit is 1, measures each selected
    membership check into a virtual ancilla, releases the payload iff all
    checks pass, then undoes the Hadamards.  A fresh key succeeds with
    probability 1 and is preserved up to 1e-9 fidelity per register.
    """
    rng = _as_rng(seed)
    if ct.program.kind == "CC-sim":
        return BOTTOM  # constant program: nothing to measure, registers untouched
    factors = ct.program.meta.get("factors")
    if factors is None:
        raise UnfactorizableCiphertextError(
            f"ciphertext program of kind {ct.program.kind!r} has no per-register factors"
        )
    if len(factors) != qkey.kappa or ct.kappa != qkey.kappa:
        return BOTTOM
    rotated = [
        hadamard_all(st) if ct.r.bit(i + 1) else st for i, st in enumerate(qkey.states)
    ]
    all_pass = True
    post = []
    for i, st in enumerate(rotated):
        rec = coherent_predicate(st, factors[i], rng)
        all_pass &= rec.outcome == 1
        post.append(rec.post_state)
    qkey.states = [
        hadamard_all(st) if ct.r.bit(i + 1) else st for i, st in enumerate(post)
    ]
    return ct.program.meta["payload"] if all_pass else BOTTOM


def encrypt_cc(sk: SdeSecretKey, pk: SdePublicKey, m, seed) -> Ciphertext:
    """Challenger-side compute-and-compare form of the ciphertext.

    The compare function concatenates per-register canonical coset
    representatives and the lock value is that of the honest tuple; the
    program is extensionally equal to the conjunction form for the same
    (m, r).
    """
    rng = _as_rng(seed)
    r = BitVector.random(sk.kappa, rng)
    return encrypt_cc_with_r(sk, pk, m, r)


def encrypt_cc_with_r(sk: SdeSecretKey, pk: SdePublicKey, m, r: BitVector) -> Ciphertext:
    if r.n != sk.kappa:
        raise ValueError(f"r has {r.n} bits, expected {sk.kappa}")
    spaces, locks = [], []
    for i, rec in enumerate(sk.records):
        if r.bit(i + 1):
            space, offset = complement(rec.space), rec.sp
        else:
            space, offset = rec.space, rec.s
        spaces.append(space)
        locks.append(canonical_rep(space, offset))

    def f(us) -> tuple:
        return tuple(canonical_rep(spaces[i], u) for i, u in enumerate(us))

    cc = cc_program(f, tuple(locks), m)
    factors = tuple(
        io_stub(coset_membership_program(spaces[i], locks[i]), membership_size(sk.n, sk.n // 2))
        for i in range(sk.kappa)
    )
    pad = sum(p.padded_size for p in factors) + sk.n
    program = ObfProgram(
        evaluator=lambda us: _cc_run(cc, us),
        padded_size=pad,
        kind="CC",
        meta={"cc": cc, "factors": factors, "payload": m, "r": r,
              "spaces": tuple(spaces), "locks": tuple(locks)},
    )
    return Ciphertext(r=r, program=program)


def _cc_run(cc: CCProgram, us):
    return cc.z if cc.f(us) == cc.y else BOTTOM


def swap_for_sim(ct: Ciphertext) -> Ciphertext:
    """Replace the ciphertext program with the simulator's zero program."""
    return Ciphertext(r=ct.r, program=cc_sim_stub(ct.program.padded_size))


# -- witness-encryption construction over tokenized signatures -------------------

@dataclass(frozen=True)
class WeCiphertext:
    """Transparent witness-encryption stub: stores the instance and message.

    Functionality-only, like every stub here: decryption releases the
    message exactly when the witness satisfies the signature relation.
    """

    r: BitVector
    message: object
    ts_pks: tuple[toksig.TsPublicKey, ...]

    @property
    def kappa(self) -> int:
        return self.r.n


def we_setup(n: int, kappa: int, seed) -> tuple[list[toksig.TsSecretKey], list[toksig.TsPublicKey]]:
    rng = _as_rng(seed)
    sks, pks = [], []
    for _ in range(kappa):
        sk, pk = toksig.keygen(n, rng)
        sks.append(sk)
        pks.append(pk)
    return sks, pks


def we_qkeygen(ts_sks) -> list[toksig.Token]:
    return [toksig.token_gen(sk) for sk in ts_sks]


def we_encrypt(ts_pks, m, seed) -> WeCiphertext:
    rng = _as_rng(seed)
    r = BitVector.random(len(ts_pks), rng)
    return WeCiphertext(r=r, message=m, ts_pks=tuple(ts_pks))


def we_relation(ct: WeCiphertext, witness) -> bool:
    """One valid signature of each bit of r, concatenated."""
    if len(witness) != ct.kappa:
        return False
    return all(
        toksig.verify(ct.ts_pks[i], ct.r.bit(i + 1), w) for i, w in enumerate(witness)
    )


def we_decrypt_classical(ct: WeCiphertext, witness) -> object:
    return ct.message if we_relation(ct, witness) else BOTTOM


def we_decrypt(tokens, ct: WeCiphertext, seed) -> object:
    """Sign each bit of r coherently and release the message on success.

    Each token is checked against the verification program for its bit of
    r without a destructive measurement (Hadamard where the bit is 1, a
    coherent membership check, Hadamard back), so honest tokens survive
    and can decrypt again.
    """
    rng = _as_rng(seed)
    if len(tokens) != ct.kappa:
        return BOTTOM
    all_pass = True
    for i, tok in enumerate(tokens):
        bit = ct.r.bit(i + 1)
        prog = ct.ts_pks[i].c1 if bit else ct.ts_pks[i].c0
        state = hadamard_all(tok.state) if bit else tok.state
        rec = coherent_predicate(state, prog, rng)
        post = hadamard_all(rec.post_state) if bit else rec.post_state
        tok.state = post
        all_pass &= rec.outcome == 1
    return ct.message if all_pass else BOTTOM


# -- serialization -----------------------------------------------------------------

def sk_to_json(sk: SdeSecretKey) -> str:
    return json.dumps(
        {
            "n": sk.n,
            "kappa": sk.kappa,
            "records": [
                {
                    "basis": [format(r, f"0{sk.n}b") for r in rec.space.rows],
                    "s": rec.s.hex,
                    "sp": rec.sp.hex,
                }
                for rec in sk.records
            ],
        },
        indent=2,
    )


def sk_from_json(text: str) -> SdeSecretKey:
    d = json.loads(text)
    n = d["n"]
    records = tuple(
        CosetRecord(
            rref([BitVector.from_string(r) for r in rec["basis"]], n=n),
            BitVector.from_hex(n, rec["s"]),
            BitVector.from_hex(n, rec["sp"]),
        )
        for rec in d["records"]
    )
    return SdeSecretKey(records)


def ciphertext_to_json(ct: Ciphertext, reveal_payload: bool = False) -> str:
    """Serialize as (kind, r, parameters).

    The compute-and-compare form is fully serializable.  The identity-stub
    form is only serializable through its construction data (m, r), which
    is challenger-side information, so it requires ``reveal_payload``.
    """
    kind = ct.program.kind
    base = {"kind": kind, "r": str(ct.r), "kappa": ct.kappa}
    if kind == "CC":
        n = ct.program.meta["spaces"][0].n
        base["n"] = n
        base["registers"] = [
            {
                "basis": [format(row, f"0{n}b") for row in space.rows],
                "lock": lock.hex,
            }
            for space, lock in zip(ct.program.meta["spaces"], ct.program.meta["locks"])
        ]
        base["message"] = _message_to_json(ct.program.meta["payload"])
        return json.dumps(base, indent=2)
    if kind == "CC-sim":
        base["padded_size"] = ct.program.padded_size
        return json.dumps(base, indent=2)
    if not reveal_payload:
        raise ValueError(
            "identity-stub ciphertexts serialize via (m, r) only under the challenger flag"
        )
    base["message"] = _message_to_json(ct.program.meta["payload"])
    return json.dumps(base, indent=2)


def ciphertext_from_json(text: str, pk: SdePublicKey | None = None) -> Ciphertext:
    d = json.loads(text)
    r = BitVector.from_string(d["r"])
    if d["kind"] == "CC":
        n = d["n"]
        spaces, locks = [], []
        for reg in d["registers"]:
            spaces.append(rref([BitVector.from_string(row) for row in reg["basis"]], n=n))
            locks.append(BitVector.from_hex(n, reg["lock"]))
        m = _message_from_json(d["message"])
        return _rebuild_cc(tuple(spaces), tuple(locks), m, r, n)
    if d["kind"] == "CC-sim":
        return Ciphertext(r=r, program=cc_sim_stub(d["padded_size"]))
    if pk is None:
        raise ValueError("rebuilding an identity-stub ciphertext requires the public key")
    return encrypt_with_r(pk, _message_from_json(d["message"]), r)


def _rebuild_cc(spaces, locks, m, r, n) -> Ciphertext:
    def f(us):
        return tuple(canonical_rep(spaces[i], u) for i, u in enumerate(us))

    cc = cc_program(f, tuple(locks), m)
    factors = tuple(
        io_stub(coset_membership_program(spaces[i], locks[i]), membership_size(n, n // 2))
        for i in range(len(spaces))
    )
    pad = sum(p.padded_size for p in factors) + n
    program = ObfProgram(
        evaluator=lambda us: _cc_run(cc, us),
        padded_size=pad,
        kind="CC",
        meta={"cc": cc, "factors": factors, "payload": m, "r": r,
              "spaces": tuple(spaces), "locks": tuple(locks)},
    )
    return Ciphertext(r=r, program=program)


def _message_to_json(m) -> dict:
    if isinstance(m, BitVector):
        return {"type": "bits", "n": m.n, "hex": m.hex}
    return {"type": "raw", "value": m}


def _message_from_json(d: dict):
    if d["type"] == "bits":
        return BitVector.from_hex(d["n"], d["hex"])
    return d["value"]
