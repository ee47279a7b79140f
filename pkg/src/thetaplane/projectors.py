"""Projector analysis over the deformed plane.

* scalar parts and their unitary diagonalization,
* the Gram identity behind the rigidity of polynomial projectors,
* a symbolic coefficient-equation solver showing that polynomial projectors
  of small size and degree are constant,
* degree-by-degree construction of a unitary ``U`` with
  ``U P U^* = diag(I_r, 0)`` modulo a jet degree.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from sympy.solvers.diophantine.diophantine import sum_of_squares

from .algebra import (
    AlgebraSignature,
    Element,
    MultiIndex,
    mul,
    star,
    unit_index,
)
from .coefficients import ExactScalar, GaussianRational, ThetaMatrix, zero_word
from .errors import (
    DiagonalizationError,
    DomainError,
    IdentityFailure,
    NotAProjectorError,
    UnitarityCompletionError,
)
from .matrices import (
    AlgMatrix,
    JetContext,
    is_projector,
    mat_adjoint,
    mat_mul,
)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# scalar matrices


@dataclass(frozen=True)
class ScalarMatrix:
    """N x N matrix of plain scalars.

    Exact entries are :class:`ExactScalar`; numeric entries are ``complex``.
    """

    entries: tuple
    exact: bool = True
    n: int = 1

    @property
    def N(self) -> int:
        return len(self.entries)

    @classmethod
    def from_rows(cls, rows, n: int = 1, exact: bool = True) -> "ScalarMatrix":
        if exact:
            conv = lambda v: v if isinstance(v, ExactScalar) else ExactScalar.const(n, v)
        else:
            conv = complex
        return cls(tuple(tuple(conv(v) for v in row) for row in rows), exact, n)

    def __getitem__(self, kl):
        k, l = kl
        return self.entries[k][l]

    def _zero(self):
        return ExactScalar(self.n) if self.exact else 0j

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        N = self.N
        rows = []
        for k in range(N):
            row = []
            for l in range(N):
                acc = self._zero()
                for j in range(N):
                    acc = acc + self.entries[k][j] * other.entries[j][l]
                row.append(acc)
            rows.append(tuple(row))
        return ScalarMatrix(tuple(rows), self.exact, self.n)

    def adjoint(self) -> "ScalarMatrix":
        N = self.N
        return ScalarMatrix(
            tuple(tuple(self.entries[l][k].conjugate() for l in range(N)) for k in range(N)),
            self.exact,
            self.n,
        )

    def to_numpy(self, theta: Optional[ThetaMatrix] = None) -> np.ndarray:
        if not self.exact:
            return np.array(self.entries, dtype=complex)
        th = theta or ThetaMatrix.zero(self.n)
        return np.array([[e.eval(th) for e in row] for row in self.entries], dtype=complex)

    def is_standard_projector(self):
        """Return r if this is exactly ``diag(I_r, 0)``, else None."""
        N = self.N
        r = 0
        while r < N and self.entries[r][r] == 1:
            r += 1
        for k in range(N):
            for l in range(N):
                want = 1 if (k == l and k < r) else 0
                v = self.entries[k][l]
                if self.exact:
                    if v != want:
                        return None
                elif v != want:
                    return None
        return r

    def to_algmatrix(self, sig: AlgebraSignature) -> AlgMatrix:
        return AlgMatrix(sig, [[Element.scalar(sig, v) for v in row] for row in self.entries])

    def __str__(self) -> str:
        return "\n".join("  ".join(str(v) for v in row) for row in self.entries)


def scalar_part(P: AlgMatrix) -> ScalarMatrix:
    """Degree-0 coefficient of every entry."""
    one = unit_index(P.sig.n)
    rows = tuple(tuple(e.coefficient(one) for e in row) for row in P.entries)
    return ScalarMatrix(rows, P.sig.exact, P.sig.n)


def _gauss_with_norm(x: Fraction) -> Optional[GaussianRational]:
    """A Gaussian rational g with ``|g|^2 = x``, or None if none exists."""
    if x <= 0:
        return None
    a, b = x.numerator, x.denominator
    # x = a/b = (a b) / b^2
    for u, v in sum_of_squares(a * b, 2, zeros=True):
        return GaussianRational(Fraction(u, b), Fraction(v, b))
    return None


def _inner(u, v, n):
    acc = ExactScalar(n)
    for a, b in zip(u, v):
        acc = acc + a.conj() * b
    return acc


def _exact_orthonormal_basis(columns, n):
    """Exact Gram-Schmidt over Q(i)[lambda]; normalization must stay in Q(i)."""
    basis = []
    for col in columns:
        v = list(col)
        for u in basis:
            c = _inner(u, v, n)
            if c:
                v = [vi - ui * c for vi, ui in zip(v, u)]
        if all(vi.is_zero() for vi in v):
            continue
        norm2 = _inner(v, v, n).constant_value()
        if norm2 is None or norm2.im != 0:
            raise DiagonalizationError(
                "exact trivialization requires a pre-diagonalized scalar part "
                "(Gram-Schmidt norm depends on the phases)"
            )
        g = _gauss_with_norm(norm2.re)
        if g is None:
            raise DiagonalizationError(
                "exact trivialization requires a pre-diagonalized scalar part "
                f"(norm {norm2.re} is not a sum of two rational squares)"
            )
        ginv = g.inverse()
        basis.append([vi * ginv for vi in v])
    return basis


def check_scalar_projector(A: ScalarMatrix, tol: float = 1e-9) -> None:
    if A.exact:
        if (A @ A) != A or A.adjoint() != A:
            raise NotAProjectorError("scalar part is not an exact projector")
        return
    M = A.to_numpy()
    if np.abs(M @ M - M).max(initial=0) > tol or np.abs(M - M.conj().T).max(initial=0) > tol:
        raise NotAProjectorError("scalar part is not a projector within tolerance")


def diagonalize_scalar_projector(A: ScalarMatrix, tol: float = 1e-9):
    """Unitary ``Q`` and rank ``r`` with ``Q A Q^* = diag(I_r, 0)``.

    Numeric matrices use a hermitian eigendecomposition (eigenvalues > 1/2
    count toward the rank).  Exact matrices are handled by Gram-Schmidt on the
    columns of ``A`` and then of ``I - A``; this needs every norm to be a sum
    of two rational squares, otherwise :class:`DiagonalizationError` is raised.
    """
    check_scalar_projector(A, tol)
    N = A.N
    if not A.exact:
        w, vecs = np.linalg.eigh(A.to_numpy())
        order = np.argsort(-w, kind="stable")
        r = int(np.sum(w > 0.5))
        Q = vecs[:, order].conj().T
        return ScalarMatrix(tuple(tuple(complex(v) for v in row) for row in Q), False, A.n), r
    r = A.is_standard_projector()
    if r is not None:
        return ScalarMatrix.from_rows(np.eye(N, dtype=int).tolist(), A.n), r
    n = A.n
    one, zero = ExactScalar.const(n, 1), ExactScalar(n)
    cols = [[A.entries[k][l] for k in range(N)] for l in range(N)]
    comp = [[(one if k == l else zero) - A.entries[k][l] for k in range(N)] for l in range(N)]
    top = _exact_orthonormal_basis(cols, n)
    bottom = _exact_orthonormal_basis(comp, n)
    if len(top) + len(bottom) != N:
        raise DiagonalizationError("range and kernel bases do not span the space")
    Q = ScalarMatrix(tuple(tuple(x.conj() for x in u) for u in top + bottom), True, n)
    r = len(top)
    target = ScalarMatrix.from_rows(np.diag([1] * r + [0] * (N - r)).tolist(), n)
    if Q @ A @ Q.adjoint() != target:
        raise IdentityFailure("exact diagonalization did not produce diag(I_r, 0)")
    return Q, r


# ---------------------------------------------------------------------------
# Gram identity and polynomial rigidity


def _product_word(a: MultiIndex, b: MultiIndex) -> tuple:
    p, q, r, s = a.p, a.q, b.p, b.q
    n = len(p)
    return tuple(
        p[k] * r[l] + q[k] * s[l] + r[k] * q[l] - q[k] * r[l] for k in range(1, n) for l in range(k)
    )


def _adjoint_word(a: MultiIndex) -> tuple:
    p, q = a.p, a.q
    n = len(p)
    return tuple(p[k] * p[l] + q[k] * q[l] for k in range(1, n) for l in range(k))


def gram_decomposition(P: AlgMatrix, k: int, M: Sequence[int], t: int = 0):
    """Split the coefficient of ``z^M zb^M x^t`` in ``sum_l p_kl p_kl^*``.

    Returns ``(diagonal, cross)``: the phase-weighted sum of ``|a_{p,q}|^2``
    over splits ``p + q = M`` and the remaining cross terms.  Phases are
    computed from the closed formulas, independently of :func:`mul`.
    """
    sig = P.sig
    if not sig.exact:
        raise DomainError("the Gram identity is checked in exact mode")
    n = sig.n
    M = tuple(M)
    if len(M) != n:
        raise DomainError(f"M must have {n} components")
    pqm_word = tuple(M[r] * M[s] for r in range(1, n) for s in range(r))
    diagonal = ExactScalar(n)
    cross = ExactScalar(n)
    for l in range(P.N):
        coeffs = P.entries[k][l].coeffs
        for alpha, ca in coeffs.items():
            pb = tuple(m - x for m, x in zip(M, alpha.q))
            qb = tuple(m - x for m, x in zip(M, alpha.p))
            tb = t - alpha.t
            if min(pb + qb + (tb,)) < 0:
                continue
            beta = MultiIndex(pb, qb, tb)
            cb = coeffs.get(beta)
            if cb is None:
                continue
            # alpha * beta^* = ca conj(cb) adj(beta) * product_word(alpha, swap(beta))
            word = tuple(
                x + y for x, y in zip(_adjoint_word(beta), _product_word(alpha, beta.swapped()))
            )
            term = (ca * cb.conj()).times_phase(word)
            if beta == alpha:
                if word != pqm_word:
                    raise IdentityFailure(f"splitting phase for {alpha} differs from M_r M_s word")
                diagonal = diagonal + term
            else:
                cross = cross + term
    return diagonal, cross


def top_gram_check(P: AlgMatrix, k: int, M: Sequence[int], t: int = 0) -> ExactScalar:
    """Coefficient of ``z^M zb^M x^t`` in ``sum_l p_{k,l} p_{k,l}^*`` (row k, 0-based).

    Computed once by direct multiplication and once as the Gram sum of
    :func:`gram_decomposition`; a disagreement raises :class:`IdentityFailure`.
    """
    sig = P.sig
    if not sig.exact:
        raise DomainError("top_gram_check works in exact mode")
    if not 0 <= k < P.N:
        raise DomainError(f"row index {k} outside 0..{P.N - 1}")
    if t and not sig.odd:
        raise DomainError("x-exponent must be 0 when m is even")
    target = MultiIndex(tuple(M), tuple(M), t)
    direct = Element.zero(sig)
    for l in range(P.N):
        e = P.entries[k][l]
        direct = direct + mul(e, star(e), only_degree=target.degree)
    direct_value = direct.coefficient(target)
    diagonal, cross = gram_decomposition(P, k, M, t)
    if diagonal + cross != direct_value:
        raise IdentityFailure(
            f"Gram sum {diagonal + cross} != direct coefficient {direct_value} at row {k}, M={tuple(M)}"
        )
    return direct_value


def assert_scalar_projector_poly(P: AlgMatrix) -> list:
    """Positive-degree coefficients of an exact polynomial projector.

    The returned list is always empty for genuine input: polynomial
    projectors are constant.  A nonempty list means bad input or a bug.
    """
    if not P.sig.exact:
        raise DomainError("assert_scalar_projector_poly needs exact mode")
    if not is_projector(P, JetContext()):
        raise NotAProjectorError("P is not an exact projector (P^2 = P = P^* fails)")
    violations = []
    for k, row in enumerate(P.entries):
        for l, e in enumerate(row):
            for idx in e.support():
                if idx.degree > 0:
                    violations.append((k, l, idx, e.coefficient(idx)))
    return violations


def monomials_up_to(sig: AlgebraSignature, D: int) -> list:
    """All normally ordered monomials of total degree <= D (graded-lex)."""
    n = sig.n
    out = []
    tmax = D if sig.odd else 0
    for exps in itertools.product(range(D + 1), repeat=2 * n):
        if sum(exps) > D:
            continue
        for t in range(tmax + 1):
            if sum(exps) + t <= D:
                out.append(MultiIndex(exps[:n], exps[n:], t))
    return sorted(out, key=MultiIndex.sort_key)


def _z_degree(idx: MultiIndex) -> int:
    return sum(idx.p) + sum(idx.q)


@dataclass
class RigidityReport:
    """Outcome of :func:`solve_polynomial_projectors`.

    ``steps`` lists ``(mu, t, killed_monomials, phase)`` for every
    positive-definite Gram equation used; ``surviving`` is the set of
    monomials whose coefficients remain unconstrained by the cascade.
    """

    sig: AlgebraSignature
    N: int
    D: int
    steps: list = field(default_factory=list)
    surviving: list = field(default_factory=list)

    @property
    def only_scalar(self) -> bool:
        return self.surviving == [unit_index(self.sig.n)]


def solve_polynomial_projectors(sig: AlgebraSignature, N: int, D: int) -> RigidityReport:
    """Solve the coefficient equations of ``P^2 = P = P^*`` for generic P.

    Every entry of P is a general polynomial of degree <= D with unknown
    coefficients.  Using ``P^2 = P P^*``, the coefficient of
    ``z^mu zb^mu x^{2t}`` in a diagonal entry gives a hermitian form in the
    unknowns.  Levels (z-degree, x-degree) are processed from the top down and
    ``mu`` in decreasing lexicographic order; at each step the form restricted
    to the still-free unknowns is computed with the library product and must be
    ``phase * sum |a|^2`` while the linear part ``p_kk`` cannot reach the
    target monomial.  That forces the appearing unknowns to vanish in every
    cell.  The report lists what survives; for correct arithmetic that is just
    the constant term.
    """
    if not sig.exact:
        raise DomainError("the coefficient solver runs in exact mode")
    if N < 1 or D < 0:
        raise DomainError("need N >= 1 and D >= 0")
    report = RigidityReport(sig, N, D)
    alive = set(monomials_up_to(sig, D))
    basis = {idx: Element(sig, {idx: 1}) for idx in alive}
    adj = {idx: star(e) for idx, e in basis.items()}
    n = sig.n
    levels = sorted(
        {(_z_degree(i), i.t) for i in alive if i.degree > 0}, reverse=True
    )
    for zdeg, t in levels:
        mus = sorted(
            {tuple(x + y for x, y in zip(i.p, i.q)) for i in alive if _z_degree(i) == zdeg and i.t == t},
            reverse=True,
        )
        for mu in mus:
            target = MultiIndex(mu, mu, 2 * t)
            if target in alive:
                raise IdentityFailure(f"linear term reaches the Gram target {target}")
            live = sorted(alive, key=MultiIndex.sort_key)
            form = {}
            for a in live:
                for b in live:
                    if a.degree + b.degree != target.degree:
                        continue
                    c = mul(basis[a], adj[b], only_degree=target.degree).coefficient(target)
                    if c:
                        form[(a, b)] = c
            killed = sorted({a for a, b in form}, key=MultiIndex.sort_key)
            if not killed:
                continue
            phase = None
            for (a, b), c in form.items():
                if a != b:
                    raise IdentityFailure(f"cross term {a} x {b} survives at mu={mu}")
                if len(c.terms) != 1 or c.terms[0][0] != 1:
                    raise IdentityFailure(f"Gram coefficient {c} is not a unit phase")
                if phase is None:
                    phase = c
                elif c != phase:
                    raise IdentityFailure(f"Gram phases differ at mu={mu}")
            report.steps.append((mu, t, killed, phase))
            alive -= set(killed)
    report.surviving = sorted(alive, key=MultiIndex.sort_key)
    log.debug("rigidity solver n=%d m=%d N=%d D=%d: %d steps", n, sig.m, N, D, len(report.steps))
    return report


# ---------------------------------------------------------------------------
# trivialization


@dataclass
class TrivializationResult:
    U: AlgMatrix
    rank: int
    residual_P: object
    residual_U: object
    degree: int
    Q: Optional[ScalarMatrix] = None
    V: Optional[AlgMatrix] = None

    def report(self) -> str:
        return (
            f"rank={self.rank} degree={self.degree} "
            f"residual_P={_fmt_residual(self.residual_P)} residual_U={_fmt_residual(self.residual_U)}"
        )


def _fmt_residual(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def parse_report(line: str) -> dict:
    """Inverse of :meth:`TrivializationResult.report`."""
    out = {}
    for part in line.split():
        key, _, val = part.partition("=")
        if key in ("rank", "degree"):
            out[key] = int(val)
        elif key in ("residual_P", "residual_U"):
            out[key] = Fraction(val) if "." not in val and "e" not in val else float(val)
        else:
            raise DomainError(f"unknown report field {key!r}")
    return out


def _residual(R: AlgMatrix):
    """Exact zero as Fraction(0); otherwise an upper bound on coefficient size."""
    if R.sig.exact:
        if R.is_zero():
            return Fraction(0)
        worst = 0.0
        for row in R.entries:
            for e in row:
                for c in e.coeffs.values():
                    worst = max(worst, sum(abs(complex(g)) for g, _ in c.terms))
        return worst
    return R.max_abs()


def _block(k: int, l: int, r: int) -> str:
    top_k, top_l = k < r, l < r
    if top_k and not top_l:
        return "upper"
    if top_l and not top_k:
        return "lower"
    return "diagonal"


def _check_projector_recursion(P: AlgMatrix, d: int, r: int, tol: float) -> None:
    """Degree-d coefficient recursion of a projector with scalar part diag(I_r, 0).

    With ``C`` the degree-d part of ``P_+ P_+`` (``P_+`` = positive-degree part):
    top-left block ``P_d = -C``, bottom-right ``P_d = C``, off-diagonal ``C = 0``.
    """
    sig = P.sig
    pos = P.map(lambda e: Element._wrap(sig, {k: v for k, v in e.items() if 0 < k[0].degree < d}))
    C = mat_mul(pos, pos, only_degree=d)
    Pd = P.degree_part(d)
    for k in range(P.N):
        for l in range(P.N):
            blk = _block(k, l, r)
            if blk == "diagonal":
                want = -C.entries[k][l] if k < r else C.entries[k][l]
                got = Pd.entries[k][l]
            else:
                want, got = Element.zero(sig), C.entries[k][l]
            if not got.equals(want, tol):
                raise IdentityFailure(f"projector recursion fails at degree {d}, cell ({k},{l})")


def trivialize(P: AlgMatrix, ctx: JetContext) -> TrivializationResult:
    """Unitary ``U`` with ``U P U^* = diag(I_r, 0)`` modulo degree > ctx.D.

    1. Diagonalize the scalar part, ``P <- Q P Q^*``.
    2. Grow ``V = I + V_1 + ... + V_D`` one degree at a time.  With
       ``T = (V_{<d} P)_d``, off-diagonal blocks take ``V_d = T`` above the
       diagonal (row <= r < column) and ``V_d = -T`` below it.  Diagonal
       blocks take ``V_d = -S/2`` with ``S = (V_{<d} V_{<d}^*)_d``, which
       makes ``(V V^*)_d`` vanish there because ``S`` is self-adjoint.
    3. ``U = V Q``.  Residuals of ``U P U^* - diag(I_r,0)`` and ``U U^* - I``
       are reported; in exact mode they are identically zero.
    """
    sig = P.sig
    D = ctx.D if ctx.D is not None else max(P.degree(), 0)
    ctx = JetContext(D, ctx.tol)
    if not is_projector(P, ctx):
        raise NotAProjectorError("trivialize needs a projector modulo the jet degree")
    N = P.N
    A = scalar_part(P)
    Qs, r = diagonalize_scalar_projector(A, ctx.tol)
    Q = Qs.to_algmatrix(sig)
    P1 = mat_mul(mat_mul(Q, P, ctx), mat_adjoint(Q), ctx)
    tol = 0.0 if sig.exact else ctx.tol

    I = AlgMatrix.identity(sig, N)
    V = I
    for d in range(1, D + 1):
        _check_projector_recursion(P1, d, r, tol)
        T = mat_mul(V, P1, only_degree=d)
        S = mat_mul(V, mat_adjoint(V), only_degree=d)
        if not S.equals(mat_adjoint(S), tol):
            raise IdentityFailure(f"degree-{d} unitarity defect is not self-adjoint")
        rows = []
        for k in range(N):
            row = []
            for l in range(N):
                blk = _block(k, l, r)
                if blk == "upper":
                    row.append(T.entries[k][l])
                elif blk == "lower":
                    row.append(-T.entries[k][l])
                else:
                    row.append(S.entries[k][l] * Fraction(-1, 2))
            rows.append(row)
        V = V + AlgMatrix(sig, rows)
        defect = mat_mul(V, mat_adjoint(V), only_degree=d)
        if not defect.equals(AlgMatrix.zeros(sig, N), tol):
            raise UnitarityCompletionError(f"unitarity residual does not vanish at degree {d}")

    U = mat_mul(V, Q, ctx)
    E = AlgMatrix.standard_projector(sig, N, r)
    Us = mat_adjoint(U)
    RP = (mat_mul(mat_mul(U, P, ctx), Us, ctx) - E).truncate(D)
    RU = (mat_mul(U, Us, ctx) - I).truncate(D)
    return TrivializationResult(U, r, _residual(RP), _residual(RU), D, Qs, V)


def _random_gaussian(rng: random.Random) -> GaussianRational:
    while True:
        g = GaussianRational(
            Fraction(rng.randint(-2, 2), rng.choice((1, 2))),
            Fraction(rng.randint(-2, 2), rng.choice((1, 2))),
        )
        if g:
            return g


def make_test_projector(seed: int, n: int, N: int, r: int, D: int, m: Optional[int] = None, density: float = 0.5):
    """Seeded projector ``P = V diag(I_r, 0) V^*`` modulo degree > D.

    ``V`` is the degree-D Taylor polynomial of ``exp(A)`` for a random
    skew-adjoint ``A`` whose entries are homogeneous of degree 1; since
    ``A^j`` has degree >= j, ``V`` is unitary modulo degree > D.  Returns
    ``(P, V)``.
    """
    if not 0 <= r <= N:
        raise DomainError(f"rank {r} outside 0..{N}")
    if D < 1:
        raise DomainError("D must be at least 1")
    sig = AlgebraSignature(n, m if m is not None else 2 * n)
    rng = random.Random(seed)
    gens = [Element.z(sig, j) for j in range(1, n + 1)] + [Element.zb(sig, j) for j in range(1, n + 1)]
    if sig.odd:
        gens.append(Element.x(sig))
    rows = []
    for _ in range(N):
        row = []
        for _ in range(N):
            e = Element.zero(sig)
            for g in gens:
                if rng.random() < density:
                    e = e + g * _random_gaussian(rng)
            row.append(e)
        rows.append(row)
    B = AlgMatrix(sig, rows)
    A = B - mat_adjoint(B)
    ctx = JetContext(D)
    V = AlgMatrix.identity(sig, N)
    term = V
    for j in range(1, D + 1):
        term = mat_mul(term, A, ctx) * Fraction(1, j)
        V = V + term
    E = AlgMatrix.standard_projector(sig, N, r)
    P = mat_mul(mat_mul(V, E, ctx), mat_adjoint(V), ctx)
    return P, V
