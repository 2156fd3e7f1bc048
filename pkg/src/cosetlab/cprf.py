"""Copy-protected PRF: quantum key generation, evaluation, and hidden triggers.

The quantum key is a tuple of small coset states plus a (transparently
wrapped) classical program with two modes.  On almost all inputs the
program checks one membership per register, selected by the first block
of the input, and releases the PRF value.  A sparse set of trigger inputs
instead decodes an embedded program from the input itself and runs it.

Trigger programs are serialized as (prefix, planted output) packed into
l2 - l0 bits and zero-padded; the coset descriptors they check against
are resolved through the key-generation view at run time, which the
transparent stub model already concedes.  A decode failure makes the
trigger mode output the failure symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gf2 import BitVector, _as_rng, sample_subspace, complement
from .obf import BOTTOM, ObfProgram, coset_membership_program, io_stub, membership_size
from .prf import (
    ExtractingPrfKey,
    GgmKey,
    InjectivePrfKey,
    ParamConstraintError,
    ParamsReport,
    extracting_prf_eval,
    extracting_prf_keygen,
    ggm_eval,
    ggm_keygen,
    injective_prf_eval,
    injective_prf_keygen,
    params_check,
)
from .qsim import MAX_QUBITS, StateVector, coherent_predicate, hadamard_all, prepare_coset_state
from .sde import CosetRecord


@dataclass(frozen=True)
class CpParams:
    """Input-split lengths and register width; toy mode must be explicit."""

    l0: int
    l1: int
    l2: int
    lam: int
    m_len: int
    toy: bool = False
    report: ParamsReport = field(init=False, compare=False)

    def __post_init__(self):
        report = params_check(self.l0, self.l1, self.l2, self.lam, self.m_len)
        object.__setattr__(self, "report", report)
        if self.lam % 2 or self.lam > MAX_QUBITS:
            raise ValueError(f"register width lambda={self.lam} must be even and <= {MAX_QUBITS}")
        if self.l2 - self.l0 < self.l0 + self.m_len:
            raise ValueError(
                f"trigger program needs l2 - l0 >= l0 + m_len ({self.l2 - self.l0} < {self.l0 + self.m_len})"
            )
        if not self.toy and not report.ok:
            raise ParamConstraintError(
                f"constraints violated: {report.violations}; pass toy=True to waive"
            )

    @property
    def n(self) -> int:
        return self.l0 + self.l1 + self.l2

    @property
    def waived(self) -> list[str]:
        return self.report.violations if self.toy else []


#: Desk-scale preset; waives exactly the injectivity constraint (l1 >= 2*l2 + lambda).
TOY_PARAMS = CpParams(l0=2, l1=16, l2=10, lam=4, m_len=2, toy=True)


@dataclass(frozen=True)
class ChallengerView:
    """Everything the key generator knew: cosets, all three PRF keys."""

    params: CpParams
    cosets: tuple[CosetRecord, ...]
    k1: ExtractingPrfKey
    k2: InjectivePrfKey
    k3: GgmKey
    pub: tuple[tuple[ObfProgram, ObfProgram], ...]  # (R_i^0, R_i^1)


@dataclass
class CpKey:
    states: list[StateVector]
    program: ObfProgram
    pub: tuple[tuple[ObfProgram, ObfProgram], ...]
    params: CpParams


@dataclass(frozen=True)
class TriggerInput:
    x0: BitVector
    x1: BitVector
    x2: BitVector
    planted_y: BitVector

    @property
    def x(self) -> BitVector:
        return self.x0.concat(self.x1).concat(self.x2)


def setup_f1(params: CpParams, seed) -> ExtractingPrfKey:
    """Key for the PRF being copy-protected (n bits to m_len bits)."""
    return extracting_prf_keygen(params.n, params.m_len, params.lam, seed, toy=params.toy)


def cp_qkeygen(k1: ExtractingPrfKey, params: CpParams, seed) -> tuple[CpKey, ChallengerView]:
    """Sample the hidden cosets and assemble the two-mode program."""
    if k1.in_len != params.n or k1.out_len != params.m_len:
        raise ValueError("PRF key shape disagrees with the parameter set")
    rng = _as_rng(seed)
    cosets = []
    pub = []
    pad = membership_size(params.lam, params.lam // 2)
    for _ in range(params.l0):
        a = sample_subspace(params.lam, params.lam // 2, rng)
        rec = CosetRecord(a, BitVector.random(params.lam, rng), BitVector.random(params.lam, rng))
        cosets.append(rec)
        r0 = io_stub(coset_membership_program(rec.space, rec.s), pad)
        r1 = io_stub(coset_membership_program(complement(rec.space), rec.sp), pad)
        pub.append((r0, r1))
    k2 = injective_prf_keygen(params.l2, params.l1, params.lam, rng, toy=params.toy)
    k3 = ggm_keygen(params.l1, params.l2, params.lam, rng)
    view = ChallengerView(
        params=params, cosets=tuple(cosets), k1=k1, k2=k2, k3=k3, pub=tuple(pub)
    )
    return key_from_view(view), view


# -- the trigger program's fixed serialization ----------------------------------

def pack_trigger_program(x0: BitVector, y: BitVector, params: CpParams) -> BitVector:
    """(x0, y) packed canonically, zero-padded to l2 - l0 bits."""
    qlen = params.l2 - params.l0
    body = x0.concat(y)
    if body.n > qlen:
        raise ValueError(f"serialized trigger program ({body.n} bits) exceeds {qlen} bits")
    return body.concat(BitVector.zero(qlen - body.n))


def decode_trigger_program(qbits: BitVector, params: CpParams):
    """Inverse of pack; returns (x0, y) or None when malformed."""
    body_len = params.l0 + params.m_len
    if qbits.n < body_len:
        return None
    x0, y, padding = qbits.split(params.l0, params.m_len, qbits.n - body_len)
    if padding.val != 0:
        return None
    return x0, y


# -- the two-mode classical program ----------------------------------------------

def _step1(x: BitVector, view: ChallengerView):
    """The trigger check; returns the decoded program bits or None."""
    p = view.params
    x0, x1, x2 = x.split(p.l0, p.l1, p.l2)
    d = ggm_eval(view.k3, x1) ^ x2
    x0p, qbits = d.split(p.l0, p.l2 - p.l0)
    if x0 != x0p:
        return None
    if x1 != injective_prf_eval(view.k2, x0p.concat(qbits)):
        return None
    return qbits


def is_trigger(x: BitVector, k2: InjectivePrfKey, k3: GgmKey) -> bool:
    """Evaluate the trigger-mode entry check on its own."""
    l1, l2 = k3.in_len, k3.out_len
    l0 = x.n - l1 - l2
    if l0 < 0:
        raise ValueError(f"input of {x.n} bits cannot split into ({l0}, {l1}, {l2})")
    x0, x1, x2 = x.split(l0, l1, l2)
    d = ggm_eval(k3, x1) ^ x2
    x0p = BitVector(l0, d.val >> (l2 - l0))
    if x0 != x0p:
        return False
    return x1 == injective_prf_eval(k2, d)


def classify(x: BitVector, view: ChallengerView):
    """Mode and payload of the program on input x.

    Returns ("normal", F1(K1, x), x0-selected checks) off the trigger set,
    ("trigger", planted y, decoded checks) on it, and ("trigger", BOTTOM,
    None) for a trigger whose embedded program fails to decode.
    """
    p = view.params
    qbits = _step1(x, view)
    x0 = x.split(p.l0, p.l1, p.l2)[0]
    if qbits is not None:
        decoded = decode_trigger_program(qbits, p)
        if decoded is None:
            return "trigger", BOTTOM, None
        qx0, y = decoded
        checks = tuple(view.pub[i][qx0.bit(i + 1)] for i in range(p.l0))
        return "trigger", y, checks
    checks = tuple(view.pub[i][x0.bit(i + 1)] for i in range(p.l0))
    return "normal", extracting_prf_eval(view.k1, x), checks


def program_p(x: BitVector, vs, view: ChallengerView):
    """The classical program on an input and one vector per register."""
    p = view.params
    if x.n != p.n:
        raise ValueError(f"input length {x.n} != {p.n}")
    if len(vs) != p.l0:
        raise ValueError(f"expected {p.l0} vectors, got {len(vs)}")
    mode, payload, checks = classify(x, view)
    if payload is BOTTOM:
        return BOTTOM
    if all(chk(v) for chk, v in zip(checks, vs)):
        return payload
    return BOTTOM


def gen_trigger(
    x0: BitVector,
    y: BitVector,
    k2: InjectivePrfKey,
    k3: GgmKey,
    cosets,
    params: CpParams,
) -> TriggerInput:
    """Produce a trigger input that starts with x0 and plants the output y.

    The embedded program releases y exactly when every register vector
    lies in the coset selected by x0 (primal for a 0 bit, dual for a 1);
    the coset descriptors are those of the given key generation.
    """
    if x0.n != params.l0 or y.n != params.m_len:
        raise ValueError("prefix or output length disagrees with the parameter set")
    if len(cosets) != params.l0:
        raise ValueError(f"expected {params.l0} coset records, got {len(cosets)}")
    qbits = pack_trigger_program(x0, y, params)
    x1 = injective_prf_eval(k2, x0.concat(qbits))
    x2 = ggm_eval(k3, x1) ^ x0.concat(qbits)
    return TriggerInput(x0=x0, x1=x1, x2=x2, planted_y=y)


def view_to_json(view: ChallengerView) -> str:
    """Serialize the full key-generation view (cosets and all PRF keys)."""
    import json

    from .prf import extracting_key_to_dict, injective_key_to_dict, _ggm_to_dict

    p = view.params
    return json.dumps(
        {
            "params": {"l0": p.l0, "l1": p.l1, "l2": p.l2, "lambda": p.lam,
                       "m_len": p.m_len, "toy": p.toy},
            "cosets": [
                {
                    "basis": [format(r, f"0{p.lam}b") for r in rec.space.rows],
                    "s": rec.s.hex,
                    "sp": rec.sp.hex,
                }
                for rec in view.cosets
            ],
            "k1": extracting_key_to_dict(view.k1),
            "k2": injective_key_to_dict(view.k2),
            "k3": _ggm_to_dict(view.k3),
        },
        indent=2,
    )


def view_from_json(text: str) -> ChallengerView:
    import json

    from .gf2 import rref
    from .prf import extracting_key_from_dict, injective_key_from_dict, _ggm_from_dict

    d = json.loads(text)
    pd = d["params"]
    params = CpParams(l0=pd["l0"], l1=pd["l1"], l2=pd["l2"], lam=pd["lambda"],
                      m_len=pd["m_len"], toy=pd["toy"])
    cosets = []
    pub = []
    pad = membership_size(params.lam, params.lam // 2)
    for rec in d["cosets"]:
        space = rref([BitVector.from_string(r) for r in rec["basis"]], n=params.lam)
        record = CosetRecord(
            space,
            BitVector.from_hex(params.lam, rec["s"]),
            BitVector.from_hex(params.lam, rec["sp"]),
        )
        cosets.append(record)
        r0 = io_stub(coset_membership_program(record.space, record.s), pad)
        r1 = io_stub(coset_membership_program(complement(record.space), record.sp), pad)
        pub.append((r0, r1))
    return ChallengerView(
        params=params,
        cosets=tuple(cosets),
        k1=extracting_key_from_dict(d["k1"]),
        k2=injective_key_from_dict(d["k2"]),
        k3=_ggm_from_dict(d["k3"]),
        pub=tuple(pub),
    )


def key_from_view(view: ChallengerView) -> CpKey:
    """Rebuild the quantum key (fresh coset states) from a stored view."""
    raw = ObfProgram(
        evaluator=lambda args: program_p(args[0], args[1], view),
        padded_size=view.params.n * view.params.l0,
        kind="raw",
        meta={"view": view},
    )
    states = [prepare_coset_state(rec.space, rec.s, rec.sp) for rec in view.cosets]
    return CpKey(
        states=states,
        program=io_stub(raw, raw.padded_size),
        pub=view.pub,
        params=view.params,
    )


def cp_eval(key: CpKey, x: BitVector, seed) -> object:
    """Evaluate the copy-protected PRF, preserving the key by rewinding.

    Registers whose x0 bit is 1 are rotated by H, each selected membership
    check is measured coherently, the program value is released iff all
    pass, and the rotations are undone.  Honest evaluation off the trigger
    set returns the PRF value with probability 1 and leaves every register
    at fidelity 1 with its original state.
    """
    p = key.params
    if x.n != p.n:
        raise ValueError(f"input length {x.n} != {p.n}")
    rng = _as_rng(seed)
    view = key.program.meta["view"]
    mode, payload, checks = classify(x, view)
    if payload is BOTTOM:
        return BOTTOM  # constant-failure branch: registers untouched
    x0 = x.split(p.l0, p.l1, p.l2)[0]
    rotated = [
        hadamard_all(st) if x0.bit(i + 1) else st for i, st in enumerate(key.states)
    ]
    all_pass = True
    post = []
    for chk, st in zip(checks, rotated):
        rec = coherent_predicate(st, chk, rng)
        all_pass &= rec.outcome == 1
        post.append(rec.post_state)
    key.states = [
        hadamard_all(st) if x0.bit(i + 1) else st for i, st in enumerate(post)
    ]
    return payload if all_pass else BOTTOM
