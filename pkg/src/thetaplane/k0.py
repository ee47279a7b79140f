"""K_0 classes of projectors over the deformed plane.

A class is stored as its integer rank; trivialization makes that a complete
invariant, so no representative pairs are kept.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DiagonalizationError, DomainError, NotAProjectorError
from .matrices import AlgMatrix, JetContext, is_projector
from .projectors import scalar_part, trivialize


@dataclass(frozen=True, order=True)
class K0Class:
    value: int

    def __add__(self, other: "K0Class") -> "K0Class":
        return K0Class(self.value + other.value)

    def __sub__(self, other: "K0Class") -> "K0Class":
        return K0Class(self.value - other.value)

    def __neg__(self) -> "K0Class":
        return K0Class(-self.value)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


def _scalar_trace(P: AlgMatrix) -> int:
    A = scalar_part(P)
    total = sum((A.entries[k][k] for k in range(A.N)), start=A._zero())
    if A.exact:
        v = total.constant_value()
        if v is None or v.im != 0 or v.re.denominator != 1:
            raise DomainError(f"scalar part has non-integral trace {total}")
        return int(v.re)
    return int(round(total.real))


def k0_class(P: AlgMatrix, ctx: JetContext) -> K0Class:
    """Rank of the trivialized form of ``P``.

    When an exact scalar part cannot be diagonalized inside Q(i), the rank is
    read off as the trace of the scalar part, which equals the rank of any
    projector.
    """
    try:
        return K0Class(trivialize(P, ctx).rank)
    except DiagonalizationError:
        if not is_projector(P, ctx):
            raise NotAProjectorError("k0_class needs a projector") from None
        return K0Class(_scalar_trace(P))


def equivalent(P: AlgMatrix, Q: AlgMatrix, ctx: JetContext) -> bool:
    """Stable unitary equivalence, decided by comparing classes."""
    return k0_class(P, ctx) == k0_class(Q, ctx)


def k0_arith(op: str, a: K0Class, b: K0Class) -> K0Class:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    raise DomainError(f"unknown K0 operation {op!r}")
