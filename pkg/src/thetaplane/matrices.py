"""Square matrices over the deformed algebra, optionally modulo a jet degree."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import (
    DEFAULT_TOL,
    NUMERIC,
    AlgebraSignature,
    Element,
    evaluate,
    max_abs_coeff,
    mul,
    star,
    truncate,
)
from .coefficients import ThetaMatrix
from .errors import DomainError, ParseError, SignatureMismatchError


@dataclass(frozen=True)
class JetContext:
    """Work modulo monomials of total degree > D.

    ``D=None`` means no truncation (plain polynomial arithmetic).  ``tol`` is
    only consulted for numeric-mode comparisons.
    """

    D: Optional[int] = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.D is not None and self.D < 0:
            raise DomainError("jet degree D must be nonnegative")
        if self.tol < 0:
            raise DomainError("tolerance must be nonnegative")


EXACT_CTX = JetContext()


class AlgMatrix:
    """An N x N matrix of :class:`Element` sharing one signature."""

    __slots__ = ("sig", "N", "entries")

    def __init__(self, sig: AlgebraSignature, entries: Sequence[Sequence[Element]]):
        rows = tuple(tuple(r) for r in entries)
        N = len(rows)
        if N < 1 or any(len(r) != N for r in rows):
            raise DomainError("matrix must be square and nonempty")
        for r in rows:
            for e in r:
                if e.sig != sig:
                    raise SignatureMismatchError("matrix entries must share the signature")
        self.sig = sig
        self.N = N
        self.entries = rows

    @classmethod
    def zeros(cls, sig: AlgebraSignature, N: int) -> "AlgMatrix":
        z = Element.zero(sig)
        return cls(sig, [[z] * N for _ in range(N)])

    @classmethod
    def identity(cls, sig: AlgebraSignature, N: int) -> "AlgMatrix":
        return cls.diag(sig, [1] * N)

    @classmethod
    def diag(cls, sig: AlgebraSignature, values: Sequence) -> "AlgMatrix":
        N = len(values)
        z = Element.zero(sig)
        rows = []
        for k in range(N):
            v = values[k]
            v = v if isinstance(v, Element) else Element.scalar(sig, v)
            rows.append([v if l == k else z for l in range(N)])
        return cls(sig, rows)

    @classmethod
    def standard_projector(cls, sig: AlgebraSignature, N: int, r: int) -> "AlgMatrix":
        """``diag(I_r, 0)``."""
        if not 0 <= r <= N:
            raise DomainError(f"rank {r} outside 0..{N}")
        return cls.diag(sig, [1] * r + [0] * (N - r))

    @classmethod
    def from_scalars(cls, sig: AlgebraSignature, rows: Sequence[Sequence]) -> "AlgMatrix":
        """Constant matrix from a nested list of scalars."""
        return cls(sig, [[Element.scalar(sig, v) for v in row] for row in rows])

    def __getitem__(self, kl) -> Element:
        k, l = kl
        return self.entries[k][l]

    def map(self, f) -> "AlgMatrix":
        return AlgMatrix(self.sig, [[f(e) for e in row] for row in self.entries])

    def _same(self, other: "AlgMatrix") -> None:
        if self.sig != other.sig:
            raise SignatureMismatchError(f"{self.sig} vs {other.sig}")
        if self.N != other.N:
            raise DomainError(f"shape mismatch: {self.N} vs {other.N}")

    def __add__(self, other: "AlgMatrix") -> "AlgMatrix":
        self._same(other)
        return AlgMatrix(
            self.sig,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def __sub__(self, other: "AlgMatrix") -> "AlgMatrix":
        self._same(other)
        return AlgMatrix(
            self.sig,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def __neg__(self) -> "AlgMatrix":
        return self.map(lambda e: -e)

    def __mul__(self, other) -> "AlgMatrix":
        if isinstance(other, AlgMatrix):
            return mat_mul(self, other)
        return self.map(lambda e: e * other)

    def __rmul__(self, other) -> "AlgMatrix":
        return self.map(lambda e: other * e)

    def __matmul__(self, other: "AlgMatrix") -> "AlgMatrix":
        return mat_mul(self, other)

    def adjoint(self) -> "AlgMatrix":
        return mat_adjoint(self)

    def truncate(self, D: Optional[int]) -> "AlgMatrix":
        if D is None:
            return self
        return self.map(lambda e: truncate(e, D))

    def degree_part(self, d: int) -> "AlgMatrix":
        return self.map(lambda e: e.degree_part(d))

    def degree(self) -> int:
        return max(e.degree() for row in self.entries for e in row)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def max_abs(self, theta: Optional[ThetaMatrix] = None) -> float:
        return max(max_abs_coeff(e, theta) for row in self.entries for e in row)

    def equals(self, other: "AlgMatrix", tol: float = DEFAULT_TOL) -> bool:
        self._same(other)
        return all(
            a.equals(b, tol) for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgMatrix):
            return NotImplemented
        if self.sig != other.sig or self.N != other.N:
            return False
        return self.equals(other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"AlgMatrix(N={self.N}, sig={self.sig.n},{self.sig.m},{self.sig.mode})"

    def __str__(self) -> str:
        return format_matrix(self)


def mat_mul(
    A: AlgMatrix, B: AlgMatrix, ctx: Optional[JetContext] = None, only_degree: Optional[int] = None
) -> AlgMatrix:
    """Matrix product; with a context the result is truncated to degree ctx.D.

    ``only_degree`` restricts the output to one homogeneous degree.
    """
    A._same(B)
    D = ctx.D if ctx is not None else None
    N = A.N
    sig = A.sig
    rows = []
    for k in range(N):
        row = []
        for l in range(N):
            acc = Element.zero(sig)
            for j in range(N):
                a, b = A.entries[k][j], B.entries[j][l]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + mul(a, b, max_degree=D, only_degree=only_degree)
            row.append(acc)
        rows.append(row)
    return AlgMatrix(sig, rows)


def mat_adjoint(A: AlgMatrix) -> AlgMatrix:
    """``(A^*)_{k,l} = star(A_{l,k})``."""
    N = A.N
    return AlgMatrix(A.sig, [[star(A.entries[l][k]) for l in range(N)] for k in range(N)])


def evaluate_matrix(A: AlgMatrix, theta: ThetaMatrix) -> AlgMatrix:
    """Entrywise :func:`evaluate`."""
    if theta.n != A.sig.n:
        raise SignatureMismatchError(f"matrix has n={A.sig.n}, theta has n={theta.n}")
    sig = AlgebraSignature(A.sig.n, A.sig.m, NUMERIC, theta)
    return AlgMatrix(sig, [[evaluate(e, theta) for e in row] for row in A.entries])


def direct_sum(P: AlgMatrix, Q: AlgMatrix) -> AlgMatrix:
    if P.sig != Q.sig:
        raise SignatureMismatchError("direct sum of matrices over different algebras")
    z = Element.zero(P.sig)
    rows = [list(r) + [z] * Q.N for r in P.entries]
    rows += [[z] * P.N + list(r) for r in Q.entries]
    return AlgMatrix(P.sig, rows)


def _close(A: AlgMatrix, B: AlgMatrix, ctx: JetContext) -> bool:
    return A.truncate(ctx.D).equals(B.truncate(ctx.D), ctx.tol)


def is_projector(P: AlgMatrix, ctx: JetContext = EXACT_CTX) -> bool:
    """``P^2 = P = P^*`` modulo degree > ctx.D."""
    return _close(mat_mul(P, P, ctx), P, ctx) and _close(mat_adjoint(P), P, ctx)


def is_unitary_mod(U: AlgMatrix, ctx: JetContext = EXACT_CTX) -> bool:
    I = AlgMatrix.identity(U.sig, U.N)
    Us = mat_adjoint(U)
    return _close(mat_mul(U, Us, ctx), I, ctx) and _close(mat_mul(Us, U, ctx), I, ctx)


def projector_violation(P: AlgMatrix, ctx: JetContext = EXACT_CTX):
    """First failing coefficient of ``P^2 - P`` or ``P^* - P`` (or None).

    Cells are scanned row-major and, within a cell, from the top-degree
    monomial down.  Returns ``(which, k, l, MultiIndex, coefficient)`` with a
    0-based cell.
    """
    checks = (("P^2-P", mat_mul(P, P, ctx) - P), ("P*-P", mat_adjoint(P) - P))
    for which, R in checks:
        R = R.truncate(ctx.D)
        for k in range(R.N):
            for l in range(R.N):
                e = R.entries[k][l]
                for idx in reversed(e.support()):
                    c = e.coefficient(idx)
                    mag = abs(c) if not P.sig.exact else None
                    if P.sig.exact or mag > ctx.tol:
                        return which, k, l, idx, c
    return None


# ---------------------------------------------------------------------------
# matrix files

_HEADER = re.compile(r"^matrix\s+N=(\d+)\s+m=(\d+)\s+mode=(exact|numeric)$")
_CELL = re.compile(r"^\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*(.*)$")


def parse_matrix(text: str, theta: Optional[ThetaMatrix] = None) -> AlgMatrix:
    """Read the line-based matrix format; absent cells are zero."""
    from .syntax import parse_element

    sig = None
    N = 0
    cells: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if sig is None:
            m = _HEADER.match(line)
            if not m:
                raise ParseError("expected header 'matrix N=<int> m=<int> mode=<exact|numeric>'", line=lineno)
            N, mdim, mode = int(m.group(1)), int(m.group(2)), m.group(3)
            if N < 1 or mdim < 2:
                raise ParseError("matrix header needs N >= 1 and m >= 2", line=lineno)
            if mode == "numeric" and theta is None:
                raise ParseError("numeric-mode matrix needs a theta config", line=lineno)
            try:
                sig = AlgebraSignature(mdim // 2, mdim, mode, theta if mode == "numeric" else None)
            except (DomainError, SignatureMismatchError) as exc:
                raise ParseError(str(exc), line=lineno) from None
            continue
        m = _CELL.match(line)
        if not m:
            raise ParseError(f"malformed cell line {line!r}", line=lineno)
        k, l = int(m.group(1)), int(m.group(2))
        if not (1 <= k <= N and 1 <= l <= N):
            raise ParseError(f"cell [{k},{l}] outside 1..{N}", line=lineno)
        if (k, l) in cells:
            raise ParseError(f"duplicate cell [{k},{l}]", line=lineno)
        try:
            cells[(k, l)] = parse_element(m.group(3), sig)
        except ParseError as exc:
            raise ParseError(exc.message, pos=exc.pos, line=lineno) from None
    if sig is None:
        raise ParseError("empty matrix file: missing header")
    z = Element.zero(sig)
    return AlgMatrix(sig, [[cells.get((k, l), z) for l in range(1, N + 1)] for k in range(1, N + 1)])


def format_matrix(A: AlgMatrix) -> str:
    from .syntax import format_element

    lines = [f"matrix N={A.N} m={A.sig.m} mode={A.sig.mode}"]
    for k, row in enumerate(A.entries, 1):
        for l, e in enumerate(row, 1):
            if not e.is_zero():
                lines.append(f"[{k},{l}] {format_element(e)}")
    return "\n".join(lines) + "\n"
