"""Puncturable PRF family: GGM tree, statistically injective and extracting
variants, and parameter-constraint validation.

The length-doubling PRG inside the GGM tree is SHA-256 in counter mode
(child seeds are sha256(seed || 0x00) and sha256(seed || 0x01), output
expansion uses sha256(seed || 'out' || counter)); this fixed choice is
recorded here for reproducibility.  The injective variant XORs a
pairwise-independent affine map into the tree output, and the extracting
variant first compresses its input through such a map; both compositions
are validated statistically by the test suite, not proved.

Honest parameter regimes are far beyond desk scale, so key generators
accept ``toy=True`` to waive the size constraints; the waiver is recorded
on the key and reported by ``params_check``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .gf2 import BitVector, _as_rng, parity


class PuncturedPointError(KeyError):
    """Evaluation was requested at a punctured input."""


class ParamConstraintError(ValueError):
    """A size constraint is violated and toy mode was not requested."""


def _prg_child(seed: bytes, bit: int) -> bytes:
    return hashlib.sha256(seed + bytes([bit])).digest()


def _expand_output(seed: bytes, out_len: int) -> int:
    blocks = b""
    counter = 0
    while len(blocks) * 8 < out_len:
        blocks += hashlib.sha256(seed + b"out" + counter.to_bytes(4, "big")).digest()
        counter += 1
    return int.from_bytes(blocks, "big") >> (len(blocks) * 8 - out_len)


@dataclass(frozen=True)
class GgmKey:
    root: bytes  # lambda-bit seed, packed into whole bytes
    in_len: int
    out_len: int
    lam: int

    def __post_init__(self):
        if self.out_len < 1:
            raise ValueError("out_len must be at least 1")


def ggm_keygen(in_len: int, out_len: int, lam: int, seed) -> GgmKey:
    rng = _as_rng(seed)
    nbytes = max(1, (lam + 7) // 8)
    root = bytes(int(b) for b in rng.integers(0, 256, size=nbytes))
    if lam % 8:
        root = bytes([root[0] & ((1 << (lam % 8)) - 1)]) + root[1:]
    return GgmKey(root=root, in_len=in_len, out_len=out_len, lam=lam)


def ggm_eval(key: GgmKey, x: BitVector) -> BitVector:
    """Walk the binary PRG tree along x and expand the leaf seed."""
    if x.n != key.in_len:
        raise ValueError(f"input length {x.n} != {key.in_len}")
    seed = key.root
    for i in range(1, key.in_len + 1):
        seed = _prg_child(seed, x.bit(i))
    return BitVector(key.out_len, _expand_output(seed, key.out_len))


@dataclass(frozen=True)
class PuncturedKey:
    """Frontier of sibling seeds covering exactly the complement of S."""

    punctured_set: frozenset[int]  # packed input values
    copath: tuple[tuple[int, int, bytes], ...]  # (depth, prefix, seed)
    in_len: int
    out_len: int


def puncture(key: GgmKey, points) -> PuncturedKey:
    """Restrict the key so it evaluates everywhere except the given inputs."""
    pts = frozenset(p.val if isinstance(p, BitVector) else int(p) for p in points)
    if not pts:
        raise ValueError("puncture set must be nonempty")
    for p in pts:
        if not 0 <= p < (1 << key.in_len):
            raise ValueError(f"point {p} out of the {key.in_len}-bit domain")
    copath: list[tuple[int, int, bytes]] = []

    def cover(depth: int, prefix: int, seed: bytes) -> None:
        shift = key.in_len - depth
        hit = any(p >> shift == prefix for p in pts)
        if not hit:
            copath.append((depth, prefix, seed))
            return
        if depth == key.in_len:
            return  # a punctured leaf: nothing survives here
        for bit in (0, 1):
            cover(depth + 1, (prefix << 1) | bit, _prg_child(seed, bit))

    cover(0, 0, key.root)
    return PuncturedKey(
        punctured_set=pts,
        copath=tuple(copath),
        in_len=key.in_len,
        out_len=key.out_len,
    )


def punctured_eval(pkey: PuncturedKey, x: BitVector) -> BitVector:
    if x.n != pkey.in_len:
        raise ValueError(f"input length {x.n} != {pkey.in_len}")
    if x.val in pkey.punctured_set:
        raise PuncturedPointError(f"input {x} is punctured")
    for depth, prefix, seed in pkey.copath:
        if x.val >> (pkey.in_len - depth) == prefix:
            for i in range(depth + 1, pkey.in_len + 1):
                seed = _prg_child(seed, x.bit(i))
            return BitVector(pkey.out_len, _expand_output(seed, pkey.out_len))
    raise PuncturedPointError(f"no copath entry covers {x}")  # pragma: no cover


# -- pairwise-independent affine maps ------------------------------------------

@dataclass(frozen=True)
class PairwiseHash:
    """h(x) = Mx + b over F_2: pairwise independent by construction."""

    in_len: int
    out_len: int
    rows: tuple[int, ...]  # one in_len-bit mask per output bit
    offset: int

    def __call__(self, x: BitVector) -> BitVector:
        if x.n != self.in_len:
            raise ValueError(f"input length {x.n} != {self.in_len}")
        v = 0
        for mask in self.rows:
            v = (v << 1) | parity(mask & x.val)
        return BitVector(self.out_len, v ^ self.offset)


def pairwise_hash(in_len: int, out_len: int, seed) -> PairwiseHash:
    rng = _as_rng(seed)
    rows = tuple(BitVector.random(in_len, rng).val for _ in range(out_len))
    offset = BitVector.random(out_len, rng).val
    return PairwiseHash(in_len=in_len, out_len=out_len, rows=rows, offset=offset)


# -- statistically injective variant (domain l2 -> range l1) -------------------

@dataclass(frozen=True)
class InjectivePrfKey:
    ggm: GgmKey
    hash: PairwiseHash
    toy: bool = False

    @property
    def in_len(self) -> int:
        return self.ggm.in_len

    @property
    def out_len(self) -> int:
        return self.ggm.out_len


def injective_prf_keygen(l2: int, l1: int, lam: int, seed, toy: bool = False) -> InjectivePrfKey:
    if l1 < 2 * l2 + lam and not toy:
        raise ParamConstraintError(
            f"injectivity needs l1 >= 2*l2 + lambda ({l1} < {2 * l2 + lam}); pass toy=True to waive"
        )
    rng = _as_rng(seed)
    return InjectivePrfKey(
        ggm=ggm_keygen(l2, l1, lam, rng),
        hash=pairwise_hash(l2, l1, rng),
        toy=toy,
    )


def injective_prf_eval(key: InjectivePrfKey, x: BitVector) -> BitVector:
    return ggm_eval(key.ggm, x) ^ key.hash(x)


def injective_prf_puncture(key: InjectivePrfKey, points) -> tuple[PuncturedKey, PairwiseHash]:
    """Puncturing restricts only the tree; the public hash part is unchanged."""
    return puncture(key.ggm, points), key.hash


def injective_punctured_eval(pkey: PuncturedKey, h: PairwiseHash, x: BitVector) -> BitVector:
    return punctured_eval(pkey, x) ^ h(x)


# -- extracting variant (domain n -> range m, entropy-condensing) ----------------

@dataclass(frozen=True)
class ExtractingPrfKey:
    hash: PairwiseHash  # compresses n bits to m + 2*(lambda+1) bits
    ggm: GgmKey
    toy: bool = False

    @property
    def in_len(self) -> int:
        return self.hash.in_len

    @property
    def out_len(self) -> int:
        return self.ggm.out_len


def extracting_prf_keygen(n: int, m: int, lam: int, seed, toy: bool = False) -> ExtractingPrfKey:
    if n < m + 2 * lam + 4 and not toy:
        raise ParamConstraintError(
            f"extraction needs n >= m + 2*lambda + 4 ({n} < {m + 2 * lam + 4}); pass toy=True to waive"
        )
    rng = _as_rng(seed)
    inner = m + 2 * (lam + 1)
    return ExtractingPrfKey(
        hash=pairwise_hash(n, inner, rng),
        ggm=ggm_keygen(inner, m, lam, rng),
        toy=toy,
    )


def extracting_prf_eval(key: ExtractingPrfKey, x: BitVector) -> BitVector:
    return ggm_eval(key.ggm, key.hash(x))


def extracting_prf_puncture(key: ExtractingPrfKey, points) -> tuple[PuncturedKey, PairwiseHash]:
    """Puncture the tree at the hashed images of the given inputs.

    The compressing hash is not injective, so puncturing at h(x) may also
    disable colliding inputs; evaluation at any other point is unchanged.
    """
    hashed = [key.hash(p if isinstance(p, BitVector) else BitVector(key.in_len, p)) for p in points]
    return puncture(key.ggm, hashed), key.hash


def extracting_punctured_eval(pkey: PuncturedKey, h: PairwiseHash, x: BitVector) -> BitVector:
    return punctured_eval(pkey, h(x))


# -- parameter constraint report -------------------------------------------------

@dataclass(frozen=True)
class ParamsReport:
    l0: int
    l1: int
    l2: int
    lam: int
    m_len: int
    constraints: tuple[dict, ...]

    @property
    def n(self) -> int:
        return self.l0 + self.l1 + self.l2

    @property
    def violations(self) -> list[str]:
        return [c["name"] for c in self.constraints if not c["satisfied"]]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "l0": self.l0,
            "l1": self.l1,
            "l2": self.l2,
            "lambda": self.lam,
            "m_len": self.m_len,
            "n": self.n,
            "constraints": list(self.constraints),
            "violations": self.violations,
        }


def params_check(l0: int, l1: int, l2: int, lam: int, m_len: int) -> ParamsReport:
    """Report each size constraint of the copy-protection parameter set."""
    n = l0 + l1 + l2
    constraints = (
        {
            "name": "extracting",
            "requirement": "n >= m_len + 2*lambda + 4",
            "lhs": n,
            "rhs": m_len + 2 * lam + 4,
            "satisfied": n >= m_len + 2 * lam + 4,
        },
        {
            "name": "injective",
            "requirement": "l1 >= 2*l2 + lambda",
            "lhs": l1,
            "rhs": 2 * l2 + lam,
            "satisfied": l1 >= 2 * l2 + lam,
        },
        {
            "name": "trigger-fit",
            "requirement": "l2 - l0 >= l0 + m_len (serialized trigger program fits)",
            "lhs": l2 - l0,
            "rhs": l0 + m_len,
            "satisfied": l2 - l0 >= l0 + m_len,
        },
        {
            "name": "register-width",
            "requirement": "lambda even and within the simulator qubit guard",
            "lhs": lam,
            "rhs": 26,
            "satisfied": lam % 2 == 0 and lam <= 26,
        },
    )
    return ParamsReport(l0=l0, l1=l1, l2=l2, lam=lam, m_len=m_len, constraints=constraints)


# -- serialization ---------------------------------------------------------------

def ggm_key_to_json(key: GgmKey) -> str:
    return json.dumps(
        {
            "root": key.root.hex(),
            "in_len": key.in_len,
            "out_len": key.out_len,
            "lambda": key.lam,
        },
        indent=2,
    )


def ggm_key_from_json(text: str) -> GgmKey:
    d = json.loads(text)
    return GgmKey(bytes.fromhex(d["root"]), d["in_len"], d["out_len"], d["lambda"])


def punctured_key_to_json(pkey: PuncturedKey) -> str:
    return json.dumps(
        {
            "punctured": sorted(pkey.punctured_set),
            "copath": [[d, p, s.hex()] for d, p, s in pkey.copath],
            "in_len": pkey.in_len,
            "out_len": pkey.out_len,
        },
        indent=2,
    )


def punctured_key_from_json(text: str) -> PuncturedKey:
    d = json.loads(text)
    return PuncturedKey(
        punctured_set=frozenset(d["punctured"]),
        copath=tuple((e[0], e[1], bytes.fromhex(e[2])) for e in d["copath"]),
        in_len=d["in_len"],
        out_len=d["out_len"],
    )


def _hash_to_dict(h: PairwiseHash) -> dict:
    width = (h.in_len + 3) // 4
    return {
        "in_len": h.in_len,
        "out_len": h.out_len,
        "rows": [format(r, f"0{max(width, 1)}x") for r in h.rows],
        "offset": format(h.offset, f"0{max((h.out_len + 3) // 4, 1)}x"),
    }


def _hash_from_dict(d: dict) -> PairwiseHash:
    return PairwiseHash(
        in_len=d["in_len"],
        out_len=d["out_len"],
        rows=tuple(int(r, 16) for r in d["rows"]),
        offset=int(d["offset"], 16),
    )


def _ggm_to_dict(key: GgmKey) -> dict:
    return {"root": key.root.hex(), "in_len": key.in_len, "out_len": key.out_len, "lambda": key.lam}


def _ggm_from_dict(d: dict) -> GgmKey:
    return GgmKey(bytes.fromhex(d["root"]), d["in_len"], d["out_len"], d["lambda"])


def injective_key_to_dict(key: InjectivePrfKey) -> dict:
    return {"ggm": _ggm_to_dict(key.ggm), "hash": _hash_to_dict(key.hash), "toy": key.toy}


def injective_key_from_dict(d: dict) -> InjectivePrfKey:
    return InjectivePrfKey(ggm=_ggm_from_dict(d["ggm"]), hash=_hash_from_dict(d["hash"]), toy=d["toy"])


def extracting_key_to_dict(key: ExtractingPrfKey) -> dict:
    return {"ggm": _ggm_to_dict(key.ggm), "hash": _hash_to_dict(key.hash), "toy": key.toy}


def extracting_key_from_dict(d: dict) -> ExtractingPrfKey:
    return ExtractingPrfKey(ggm=_ggm_from_dict(d["ggm"]), hash=_hash_from_dict(d["hash"]), toy=d["toy"])
