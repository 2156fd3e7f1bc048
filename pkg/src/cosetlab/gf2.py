"""Exact GF(2) linear algebra: packed bit vectors, RREF subspaces, cosets.

Vectors live in F_2^n and are packed into python ints.  Bit position 1 is
the leftmost (most significant) position, so the lexicographic order on
bit strings coincides with the numeric order on the packed ints.  All
values are immutable after construction and safe to share across workers;
every sampling function takes an explicit seed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np


def _as_rng(seed) -> np.random.Generator:
    """Accept an int seed, a seed sequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class BitVector:
    """A packed vector of n bits; position 1 is the leftmost bit."""

    n: int
    val: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"negative dimension {self.n}")
        if not 0 <= self.val < (1 << self.n):
            raise ValueError(f"value {self.val} out of range for n={self.n}")

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        s = s.strip()
        if s and set(s) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {s!r}")
        return cls(len(s), int(s, 2) if s else 0)

    @classmethod
    def from_hex(cls, n: int, h: str) -> "BitVector":
        return cls(n, int(h, 16))

    @classmethod
    def zero(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def random(cls, n: int, seed) -> "BitVector":
        rng = _as_rng(seed)
        val = 0
        for _ in range((n + 31) // 32):
            val = (val << 32) | int(rng.integers(0, 1 << 32))
        return cls(n, val & ((1 << n) - 1) if n else 0)

    def bit(self, i: int) -> int:
        """Bit at 1-based position i (position 1 = leftmost)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range 1..{self.n}")
        return (self.val >> (self.n - i)) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError(f"dimension mismatch {self.n} != {other.n}")
        return BitVector(self.n, self.val ^ other.val)

    def dot(self, other: "BitVector") -> int:
        """Inner product mod 2."""
        if self.n != other.n:
            raise ValueError(f"dimension mismatch {self.n} != {other.n}")
        return parity(self.val & other.val)

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector(self.n + other.n, (self.val << other.n) | other.val)

    def split(self, *lengths: int) -> tuple["BitVector", ...]:
        """Split into consecutive pieces of the given lengths (must sum to n)."""
        if sum(lengths) != self.n:
            raise ValueError(f"lengths {lengths} do not sum to {self.n}")
        out, shift = [], self.n
        for ln in lengths:
            shift -= ln
            out.append(BitVector(ln, (self.val >> shift) & ((1 << ln) - 1)))
        return tuple(out)

    def __str__(self) -> str:
        return format(self.val, f"0{self.n}b") if self.n else ""

    @property
    def hex(self) -> str:
        return format(self.val, f"0{(self.n + 3) // 4}x") if self.n else ""


def _pivot_col(row: int, n: int) -> int:
    """1-based column of the leading 1 of a nonzero row."""
    return n - row.bit_length() + 1


def _rref_ints(rows: Iterable[int], n: int) -> tuple[int, ...]:
    """Reduced row echelon form over GF(2); zero rows dropped."""
    work = [r for r in rows if r]
    out: list[int] = []
    for col in range(n - 1, -1, -1):  # msb-first
        mask = 1 << col
        pivot = next((r for r in work if r & mask), None)
        if pivot is None:
            continue
        work = [r ^ pivot if r & mask else r for r in work if r != pivot]
        out = [r ^ pivot if r & mask else r for r in out]
        work = [r for r in work if r]
        out.append(pivot)
    return tuple(out)


def rank_ints(rows: Sequence[int], n: int) -> int:
    return len(_rref_ints(rows, n))


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_2^n held as an RREF basis (normal form).

    Equal subspaces compare equal structurally; rows are ordered by pivot
    column, each pivot column is zero in every other row.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if _rref_ints(self.rows, self.n) != self.rows:
            raise ValueError("basis rows are not a valid RREF; use rref() to build")

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def size(self) -> int:
        return 1 << self.dim

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(_pivot_col(r, self.n) for r in self.rows)

    @property
    def basis(self) -> list[BitVector]:
        return [BitVector(self.n, r) for r in self.rows]

    def reduce(self, v: int) -> int:
        """Clear all pivot columns of v; the result is v's coset normal form."""
        for r in self.rows:
            if v & (1 << (r.bit_length() - 1)):
                v ^= r
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def elements(self) -> Iterator[int]:
        """All 2^dim elements (memory-light Gray-style enumeration)."""
        acc = 0
        yield 0
        for t in range(1, self.size):
            acc ^= self.rows[(t & -t).bit_length() - 1]
            yield acc

    def element_array(self) -> np.ndarray:
        """All elements as a uint64 array (requires n <= 63)."""
        out = np.fromiter(self.elements(), dtype=np.uint64, count=self.size)
        return out


def rref(rows: Sequence[BitVector], n: int | None = None) -> Subspace:
    """RREF basis of the span of the given rows; zero rows dropped.

    `n` is only needed when `rows` is empty.
    """
    if rows:
        dims = {r.n for r in rows}
        if len(dims) != 1:
            raise ValueError(f"mismatched row lengths: {sorted(dims)}")
        if n is not None and n not in dims:
            raise ValueError(f"explicit n={n} disagrees with rows of length {dims.pop()}")
        n = rows[0].n
    elif n is None:
        raise ValueError("empty row list needs an explicit ambient dimension n")
    return Subspace(n, _rref_ints([r.val for r in rows], n))


def sample_subspace(n: int, d: int, seed) -> Subspace:
    """Uniformly random d-dimensional subspace of F_2^n.

    Rejection-samples d independent uniform rows; every subspace has the
    same number of ordered bases, so the result is exactly uniform.
    """
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    rng = _as_rng(seed)
    while True:
        rows = [BitVector.random(n, rng).val for _ in range(d)]
        reduced = _rref_ints(rows, n)
        if len(reduced) == d:
            return Subspace(n, reduced)


def complement(a: Subspace) -> Subspace:
    """Orthogonal complement {b : <a,b> = 0 mod 2 for all a in A}."""
    piv = set(a.pivots)
    kernel = []
    for j in range(1, a.n + 1):
        if j in piv:
            continue
        v = 1 << (a.n - j)
        for r in a.rows:
            if (r >> (a.n - j)) & 1:
                v |= 1 << (a.n - _pivot_col(r, a.n))
        kernel.append(v)
    return Subspace(a.n, _rref_ints(kernel, a.n))


def coset_contains(a: Subspace, s: BitVector, v: BitVector) -> bool:
    """True iff v lies in the coset A + s."""
    if s.n != a.n or v.n != a.n:
        raise ValueError("dimension mismatch between subspace and vectors")
    return a.contains(v.val ^ s.val)


def canonical_rep(a: Subspace, s: BitVector) -> BitVector:
    """Lexicographically smallest vector of the coset A + s.

    Clearing every pivot column of s against the RREF basis realizes the
    entry-by-entry greedy choice: each basis row first touches its own
    pivot column, so the lex-minimal element carries 0 there.
    """
    if s.n != a.n:
        raise ValueError(f"dimension mismatch {s.n} != {a.n}")
    return BitVector(a.n, a.reduce(s.val))


def canonicalize_offset(a: Subspace, s: BitVector) -> BitVector:
    return canonical_rep(a, s)


@dataclass(frozen=True)
class Coset:
    """A coset A + s with the offset held in canonical (lex-min) form."""

    space: Subspace
    offset: BitVector = field()

    def __post_init__(self):
        object.__setattr__(self, "offset", canonical_rep(self.space, self.offset))

    def contains(self, v: BitVector) -> bool:
        return coset_contains(self.space, self.offset, v)

    def elements(self) -> Iterator[int]:
        off = self.offset.val
        return (e ^ off for e in self.space.elements())


def intersect_dim(a: Subspace, b: Subspace) -> int:
    """dim(A ∩ B), via dim A + dim B - dim(A + B)."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch {a.n} != {b.n}")
    joint = rank_ints(list(a.rows) + list(b.rows), a.n)
    return a.dim + b.dim - joint


def _quotient_lift(a: Subspace) -> tuple[list[int], list[int]]:
    """Non-pivot columns of A and the corresponding lift masks.

    The map v -> (bits of reduce(v) at non-pivot columns) is an isomorphism
    F_2^n / A -> F_2^{n-dim}; placing quotient bits back at the non-pivot
    columns is a linear section of it.
    """
    piv = set(a.pivots)
    cols = [j for j in range(1, a.n + 1) if j not in piv]
    masks = [1 << (a.n - j) for j in cols]
    return cols, masks


def sample_superspace(a: Subspace, d1: int, seed) -> Subspace:
    """Uniformly random superspace B ⊇ A with dim(B) = d1.

    Superspaces of A of dimension d1 biject with (d1-dim A)-dimensional
    subspaces of the quotient F_2^n/A, so sampling the quotient uniformly
    and lifting is exactly uniform.
    """
    if not a.dim <= d1 <= a.n:
        raise ValueError(f"need dim(A)={a.dim} <= d1 <= n={a.n}, got {d1}")
    rng = _as_rng(seed)
    q = sample_subspace(a.n - a.dim, d1 - a.dim, rng)
    _, masks = _quotient_lift(a)
    lifted = [_lift_row(r, masks, a.n - a.dim) for r in q.rows]
    return Subspace(a.n, _rref_ints(list(a.rows) + lifted, a.n))


def _lift_row(qrow: int, masks: list[int], qn: int) -> int:
    v = 0
    for j in range(qn):
        if (qrow >> (qn - 1 - j)) & 1:
            v |= masks[j]
    return v


def enumerate_subspaces(n: int, d: int) -> Iterator[Subspace]:
    """All d-dimensional subspaces of F_2^n, one RREF basis each."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if d == 0:
        yield Subspace(n, ())
        return
    for pivots in itertools.combinations(range(1, n + 1), d):
        pivset = set(pivots)
        free = [
            [j for j in range(p + 1, n + 1) if j not in pivset]
            for p in pivots
        ]
        nfree = sum(len(f) for f in free)
        for bits in range(1 << nfree):
            rows, k = [], 0
            for p, cols in zip(pivots, free):
                r = 1 << (n - p)
                for j in cols:
                    if (bits >> k) & 1:
                        r |= 1 << (n - j)
                    k += 1
                rows.append(r)
            yield Subspace(n, tuple(rows))


def enumerate_superspaces(a: Subspace, d1: int) -> Iterator[Subspace]:
    """All superspaces B ⊇ A with dim(B) = d1 (via the quotient bijection)."""
    if not a.dim <= d1 <= a.n:
        raise ValueError(f"need dim(A)={a.dim} <= d1 <= n={a.n}, got {d1}")
    _, masks = _quotient_lift(a)
    qn = a.n - a.dim
    for q in enumerate_subspaces(qn, d1 - a.dim):
        lifted = [_lift_row(r, masks, qn) for r in q.rows]
        yield Subspace(a.n, _rref_ints(list(a.rows) + lifted, a.n))


def coset_reps(a: Subspace) -> Iterator[BitVector]:
    """Canonical representatives of all cosets of A in F_2^n."""
    _, masks = _quotient_lift(a)
    qn = a.n - a.dim
    for q in range(1 << qn):
        yield BitVector(a.n, _lift_row(q, masks, qn))


# -- textual serialization (0/1 strings, position 1 first) --------------------

def vector_to_string(v: BitVector) -> str:
    return str(v)


def vector_from_string(s: str) -> BitVector:
    return BitVector.from_string(s)


def subspace_to_string(a: Subspace) -> str:
    return "\n".join(format(r, f"0{a.n}b") for r in a.rows)


def subspace_from_string(text: str, n: int | None = None) -> Subspace:
    rows = [BitVector.from_string(line) for line in text.splitlines() if line.strip()]
    return rref(rows, n=n)
