"""Transparent, functionality-preserving stand-ins for obfuscators.

None of these hide anything.  Each wrapper is extensionally identical to
the program it wraps and carries a ``kind`` tag so no caller can mistake
it for a secure obfuscation; the workbench verifies functionality and
game semantics only.  A program output of ``None`` plays the role of the
failure symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .gf2 import BitVector, Subspace, sample_superspace

BOTTOM = None  # the failure output of compute-and-compare style programs


@dataclass(frozen=True)
class ObfProgram:
    """An opaque evaluatable program with a declared padded size.

    ``meta`` holds the transparent construction data (coset descriptions,
    payloads); it exists because the stubs hide nothing and downstream
    code (coherent evaluation, serialization) reads it.
    """

    evaluator: Callable
    padded_size: int
    kind: str
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.evaluator(x)

    def mask(self, n: int) -> np.ndarray:
        """Boolean truth table over F_2^n for predicate programs."""
        space = self.meta.get("space")
        if space is not None and space.n == n:
            from .qsim import coset_mask

            return coset_mask(space, self.meta["offset"])
        return np.fromiter(
            (bool(self.evaluator(BitVector(n, v))) for v in range(1 << n)),
            dtype=bool,
            count=1 << n,
        )


@dataclass(frozen=True)
class CCProgram:
    """Compute-and-compare: outputs the payload exactly when f(x) = y."""

    f: Callable
    y: object
    z: object
    padded_size: int = 0


def membership_size(n: int, dim: int) -> int:
    """Description-size bookkeeping for a coset membership program."""
    return n * (dim + 1)


def coset_membership_program(
    space: Subspace, offset: BitVector, pad: int | None = None, kind: str = "raw"
) -> ObfProgram:
    """The program deciding membership in ``space + offset``."""
    red = space.reduce(offset.val)

    def run(v: BitVector) -> int:
        return 1 if space.reduce(v.val) == red else 0

    size = membership_size(space.n, space.dim)
    return ObfProgram(
        evaluator=run,
        padded_size=pad if pad is not None else size,
        kind=kind,
        meta={"space": space, "offset": offset},
    )


def io_stub(prog, pad: int) -> ObfProgram:
    """Functionality-only wrapper standing in for an indistinguishability
    obfuscator: behavior is unchanged, only the padded size is recorded."""
    if isinstance(prog, ObfProgram):
        if pad < prog.padded_size:
            raise ValueError(f"pad {pad} below program size {prog.padded_size}")
        return ObfProgram(prog.evaluator, pad, "iO-stub", dict(prog.meta))
    return ObfProgram(prog, pad, "iO-stub")


def sho_stub(a: Subspace, d1: int, seed) -> ObfProgram:
    """Subspace-hiding stand-in: membership in a random superspace of A."""
    b = sample_superspace(a, d1, seed)
    prog = coset_membership_program(b, BitVector.zero(a.n), kind="shO-stub")
    return prog


def cc_program(f: Callable, y, z, pad: int | None = None) -> CCProgram:
    return CCProgram(f=f, y=y, z=z, padded_size=pad if pad is not None else 0)


def cc_eval(cc: CCProgram, x):
    return cc.z if cc.f(x) == cc.y else BOTTOM


def cc_obf(cc: CCProgram, pad: int | None = None) -> ObfProgram:
    """Wrap a compute-and-compare program as an evaluatable ObfProgram."""
    return ObfProgram(
        evaluator=lambda x: cc_eval(cc, x),
        padded_size=pad if pad is not None else cc.padded_size,
        kind="CC",
        meta={"cc": cc},
    )


def cc_sim_stub(padded_size: int) -> ObfProgram:
    """The simulator's target: a constant-failure program of matching size."""
    return ObfProgram(evaluator=lambda x: BOTTOM, padded_size=padded_size, kind="CC-sim")


def equiv_on_domain(p1, p2, domain: Iterable) -> bool:
    """True iff the two programs agree on every element of the finite domain."""
    for x in domain:
        if p1(x) != p2(x):
            return False
    return True


def all_vectors(n: int) -> Iterable[BitVector]:
    return (BitVector(n, v) for v in range(1 << n))
