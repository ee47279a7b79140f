"""Elements of the Theta-deformed m-plane in normal form.

Every element is stored as a finite sum of normally ordered monomials

    z_1^{p_1} ... z_n^{p_n} zb_1^{q_1} ... zb_n^{q_n} x^t

where ``x`` (the extra hermitian, central generator) exists only for odd
``m = 2n + 1``.  The generators obey

    z_p z_q = lambda_{p,q} z_q z_p,   zb_p zb_q = lambda_{p,q} zb_q zb_p,
    zb_p z_q = lambda_{q,p} z_q zb_p,  z_p^* = zb_p,

so moving monomials past each other only produces phase words.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, NamedTuple, Optional, Union

from .coefficients import (
    ExactScalar,
    GaussianRational,
    PhaseWord,
    ThetaMatrix,
    ZERO,
    _pair_slot,
    phase_pairs,
    zero_word,
)
from .errors import DomainError, SignatureMismatchError

#: Default coefficientwise absolute tolerance for numeric-mode comparisons.
DEFAULT_TOL = 1e-9

EXACT = "exact"
NUMERIC = "numeric"


@dataclass(frozen=True)
class AlgebraSignature:
    """Which algebra an element lives in.

    ``m`` is ``2n`` or ``2n + 1``; numeric mode additionally needs the angle
    matrix so that phases can be evaluated on the fly.
    """

    n: int
    m: Optional[int] = None
    mode: str = EXACT
    theta: Optional[ThetaMatrix] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be a positive integer")
        if self.m is None:
            object.__setattr__(self, "m", 2 * self.n)
        if self.m not in (2 * self.n, 2 * self.n + 1):
            raise DomainError(f"m must be {2 * self.n} or {2 * self.n + 1}, got {self.m}")
        if self.mode not in (EXACT, NUMERIC):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.mode == NUMERIC:
            if self.theta is None:
                object.__setattr__(self, "theta", ThetaMatrix.zero(self.n))
            if self.theta.n != self.n:
                raise SignatureMismatchError("theta matrix size does not match n")

    @property
    def odd(self) -> bool:
        return self.m == 2 * self.n + 1

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraSignature):
            return NotImplemented
        if (self.n, self.m, self.mode) != (other.n, other.m, other.mode):
            return False
        return self.mode == EXACT or self.theta is other.theta or self.theta == other.theta

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.mode))

    def numeric(self, theta: ThetaMatrix) -> "AlgebraSignature":
        return AlgebraSignature(self.n, self.m, NUMERIC, theta)


class MultiIndex(NamedTuple):
    """Exponents ``(p, q, t)`` of a normally ordered monomial."""

    p: tuple
    q: tuple
    t: int = 0

    @property
    def degree(self) -> int:
        return sum(self.p) + sum(self.q) + self.t

    def swapped(self) -> "MultiIndex":
        return MultiIndex(self.q, self.p, self.t)

    def sort_key(self) -> tuple:
        """Graded-lexicographic key: degree, then p, q, t."""
        return (self.degree, self.p, self.q, self.t)


def unit_index(n: int) -> MultiIndex:
    return MultiIndex((0,) * n, (0,) * n, 0)


@lru_cache(maxsize=1 << 18)
def _mono_mul(a: MultiIndex, b: MultiIndex):
    p, q, r, s = a.p, a.q, b.p, b.q
    n = len(p)
    word = []
    for k in range(1, n):
        pk, qk, rk = p[k], q[k], r[k]
        for l in range(k):
            # pair (k+1, l+1) in 1-based indexing
            word.append(pk * r[l] + qk * s[l] + rk * q[l] - qk * r[l])
    idx = MultiIndex(
        tuple(x + y for x, y in zip(p, r)),
        tuple(x + y for x, y in zip(q, s)),
        a.t + b.t,
    )
    return idx, tuple(word)


@lru_cache(maxsize=1 << 16)
def _star_word(a: MultiIndex) -> tuple:
    p, q = a.p, a.q
    n = len(p)
    return tuple(p[r] * p[s] + q[r] * q[s] for r in range(1, n) for s in range(r))


def star_phase(a: MultiIndex) -> PhaseWord:
    """Phase picked up by ``(z^p zb^q)^*`` when brought back to normal order."""
    return PhaseWord(len(a.p), _star_word(a))


def _check_index(sig: AlgebraSignature, a: MultiIndex) -> None:
    if len(a.p) != sig.n or len(a.q) != sig.n:
        raise SignatureMismatchError(f"multi-index {a} does not have length n={sig.n}")
    if a.t and not sig.odd:
        raise DomainError("x-exponent must be 0 when m is even")
    if min(a.p + a.q + (a.t,)) < 0:
        raise DomainError(f"negative exponent in {a}")


def monomial_mul(a: MultiIndex, b: MultiIndex):
    """Normal-order the product of two monomials.

    Returns ``(PhaseWord, MultiIndex)`` with the phase exponent at
    ``(k, l)``, ``l < k``, equal to ``p_k r_l + q_k s_l + r_k q_l - q_k r_l``.
    """
    if len(a.p) != len(b.p):
        raise SignatureMismatchError("multi-indices of different n")
    idx, word = _mono_mul(a, b)
    return PhaseWord(len(a.p), word), idx


Scalar = Union[int, Fraction, GaussianRational, ExactScalar, complex, float]


class Element:
    """A finite (or degree-truncated) sum of normally ordered monomials.

    Exact mode keys are ``(MultiIndex, phase word)`` with Gaussian-rational
    values; numeric mode keys are ``(MultiIndex, ())`` with complex values.
    """

    __slots__ = ("sig", "_terms")

    def __init__(self, sig: AlgebraSignature, coeffs: Optional[Mapping] = None):
        self.sig = sig
        terms: dict = {}
        for idx, c in (coeffs or {}).items():
            idx = MultiIndex(tuple(idx[0]), tuple(idx[1]), idx[2] if len(idx) > 2 else 0)
            _check_index(sig, idx)
            for key, v in _scalar_terms(sig, idx, c):
                s = terms.get(key)
                terms[key] = v if s is None else s + v
        self._terms = {k: v for k, v in terms.items() if v}
        if not sig.exact:
            _check_finite(self._terms)

    @classmethod
    def _wrap(cls, sig: AlgebraSignature, terms: dict) -> "Element":
        obj = cls.__new__(cls)
        obj.sig = sig
        obj._terms = terms
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, sig: AlgebraSignature) -> "Element":
        return cls._wrap(sig, {})

    @classmethod
    def scalar(cls, sig: AlgebraSignature, value: Scalar = 1) -> "Element":
        return cls(sig, {unit_index(sig.n): value})

    @classmethod
    def one(cls, sig: AlgebraSignature) -> "Element":
        return cls.scalar(sig, 1)

    @classmethod
    def monomial(cls, sig: AlgebraSignature, p, q=None, t: int = 0, coeff: Scalar = 1) -> "Element":
        q = q if q is not None else (0,) * sig.n
        return cls(sig, {MultiIndex(tuple(p), tuple(q), t): coeff})

    @classmethod
    def z(cls, sig: AlgebraSignature, j: int) -> "Element":
        return cls.monomial(sig, _unit_vec(sig.n, j))

    @classmethod
    def zb(cls, sig: AlgebraSignature, j: int) -> "Element":
        return cls.monomial(sig, (0,) * sig.n, _unit_vec(sig.n, j))

    @classmethod
    def x(cls, sig: AlgebraSignature) -> "Element":
        if not sig.odd:
            raise DomainError("the generator x exists only for odd m")
        return cls.monomial(sig, (0,) * sig.n, (0,) * sig.n, 1)

    @classmethod
    def phase(cls, sig: AlgebraSignature, exponents: Mapping[tuple, int], coeff: Scalar = 1) -> "Element":
        if not sig.exact:
            word = PhaseWord.from_map(sig.n, exponents).exps
            return cls.scalar(sig, complex(coeff) * sig.theta.phase_value(word))
        return cls.scalar(sig, ExactScalar.phase(sig.n, exponents, GaussianRational.coerce(coeff)))

    # -- views ------------------------------------------------------------
    @property
    def coeffs(self) -> dict:
        """``MultiIndex -> scalar`` map (ExactScalar or complex)."""
        if not self.sig.exact:
            return {idx: c for (idx, _), c in self._terms.items()}
        grouped: dict = {}
        for (idx, w), c in self._terms.items():
            grouped.setdefault(idx, {})[w] = c
        return {idx: ExactScalar._wrap(self.sig.n, ws) for idx, ws in grouped.items()}

    def coefficient(self, idx) -> Scalar:
        idx = MultiIndex(tuple(idx[0]), tuple(idx[1]), idx[2] if len(idx) > 2 else 0)
        if not self.sig.exact:
            return self._terms.get((idx, ()), 0j)
        return ExactScalar._wrap(
            self.sig.n, {w: c for (i, w), c in self._terms.items() if i == idx}
        )

    def support(self) -> list:
        """Monomials with a nonzero coefficient, graded-lexicographically."""
        return sorted({idx for idx, _ in self._terms}, key=MultiIndex.sort_key)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    # -- arithmetic -------------------------------------------------------
    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if self.sig != other.sig:
            raise SignatureMismatchError(f"{self.sig} vs {other.sig}")

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            self._same(other)
            return other
        return Element.scalar(self.sig, other)

    def __add__(self, other) -> "Element":
        other = self._coerce(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Element._wrap(self.sig, out)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element._wrap(self.sig, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "Element":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Element":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Element":
        if isinstance(other, Element):
            return mul(self, other)
        return scale(other, self)

    def __rmul__(self, other) -> "Element":
        if isinstance(other, Element):
            return mul(other, self)
        return scale(other, self)

    def __pow__(self, k: int) -> "Element":
        if k < 0:
            raise DomainError("negative powers of algebra elements are not defined")
        out = Element.one(self.sig)
        for _ in range(k):
            out = mul(out, self)
        return out

    def star(self) -> "Element":
        return star(self)

    def degree(self) -> int:
        return degree(self)

    def truncate(self, D: int) -> "Element":
        return truncate(self, D)

    def degree_part(self, d: int) -> "Element":
        return Element._wrap(self.sig, {k: v for k, v in self._terms.items() if k[0].degree == d})

    def equals(self, other: "Element", tol: float = DEFAULT_TOL) -> bool:
        self._same(other)
        if self.sig.exact:
            return self._terms == other._terms
        return max_abs_coeff(self - other) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            if isinstance(other, (int, Fraction, GaussianRational, ExactScalar, complex, float)):
                return self.equals(Element.scalar(self.sig, other))
            return NotImplemented
        if self.sig != other.sig:
            return False
        return self.equals(other)

    def __hash__(self) -> int:
        if not self.sig.exact:
            raise TypeError("numeric-mode elements are unhashable")
        return hash((self.sig, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        from .syntax import format_element

        return f"Element({format_element(self)!r})"

    def __str__(self) -> str:
        from .syntax import format_element

        return format_element(self)


def _unit_vec(n: int, j: int) -> tuple:
    if not 1 <= j <= n:
        raise DomainError(f"generator index {j} out of range 1..{n}")
    return tuple(1 if i == j - 1 else 0 for i in range(n))


def _scalar_terms(sig: AlgebraSignature, idx: MultiIndex, c) -> Iterator:
    """Split a user-supplied scalar into internal ``(key, value)`` pairs."""
    if sig.exact:
        if isinstance(c, ExactScalar):
            if c.n != sig.n:
                raise SignatureMismatchError("scalar belongs to another n")
            for w, g in c.items():
                yield (idx, w), g
        else:
            yield (idx, zero_word(sig.n)), GaussianRational.coerce(c)
    else:
        if isinstance(c, ExactScalar):
            c = c.eval(sig.theta)
        elif isinstance(c, GaussianRational):
            c = complex(c)
        yield (idx, ()), complex(c)


def _check_finite(terms: dict) -> None:
    for v in terms.values():
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise DomainError("numeric coefficient is not finite")


def max_abs_coeff(a: Element, theta: Optional[ThetaMatrix] = None) -> float:
    """Largest coefficient magnitude; exact mode evaluates phases at ``theta``."""
    if not a._terms:
        return 0.0
    if not a.sig.exact:
        return max(abs(v) for v in a._terms.values())
    th = theta or ThetaMatrix.zero(a.sig.n)
    return max(abs(c.eval(th)) for c in a.coeffs.values())


# ---------------------------------------------------------------------------
# multiplication


def mul(
    a: Element, b: Element, max_degree: Optional[int] = None, only_degree: Optional[int] = None
) -> Element:
    """Product in normal form.

    ``max_degree`` drops output terms of degree > max_degree; ``only_degree``
    keeps just the homogeneous part of that degree.
    """
    a._same(b)
    sig = a.sig
    out: dict = {}
    get = out.get
    bt = [(k[0], k[0].degree, k[1], v) for k, v in b._terms.items()]
    lo, hi = 0, max_degree if max_degree is not None else 1 << 62
    if only_degree is not None:
        lo, hi = only_degree, min(hi, only_degree)
    if sig.exact:
        for (i1, w1), c1 in a._terms.items():
            d1 = i1.degree
            for i2, d2, w2, c2 in bt:
                if not lo <= d1 + d2 <= hi:
                    continue
                idx, e = _mono_mul(i1, i2)
                key = (idx, tuple(x + y + z for x, y, z in zip(w1, w2, e)))
                s = get(key)
                out[key] = c1 * c2 if s is None else s + c1 * c2
    else:
        phase = sig.theta.phase_value
        for (i1, _), c1 in a._terms.items():
            d1 = i1.degree
            for i2, d2, _, c2 in bt:
                if not lo <= d1 + d2 <= hi:
                    continue
                idx, e = _mono_mul(i1, i2)
                key = (idx, ())
                v = c1 * c2 * phase(e)
                s = get(key)
                out[key] = v if s is None else s + v
        _check_finite(out)
    return Element._wrap(sig, {k: v for k, v in out.items() if v})


# generator letters for the rewriting oracle: (family, index); family 0 = z,
# 1 = zb, 2 = x.  Normal order is lexicographic on these pairs.


def _word_of(idx: MultiIndex) -> list:
    n = len(idx.p)
    word = []
    for j in range(n):
        word += [(0, j + 1)] * idx.p[j]
    for j in range(n):
        word += [(1, j + 1)] * idx.q[j]
    word += [(2, 0)] * idx.t
    return word


def _swap_phase(left, right) -> Optional[tuple]:
    """Relation used to rewrite ``left*right`` as ``phase * right*left``.

    Returns ``(k, l, e)`` meaning a factor ``lambda_{k,l}^e`` with ``k > l``,
    or None when no phase arises.
    """
    fa, a = left
    fb, b = right
    if fa == 2 or fb == 2 or a == b:
        return None
    if fa == fb:
        # z_a z_b = lambda_{a,b} z_b z_a, same for zb
        return (a, b, 1) if a > b else (b, a, -1)
    if fa == 1 and fb == 0:
        # zb_a z_b = lambda_{b,a} z_b zb_a
        return (b, a, 1) if b > a else (a, b, -1)
    # z_a zb_b is never out of order
    raise AssertionError("z before zb needs no swap")


def _normal_order(word: list, n: int, strategy) -> tuple:
    word = list(word)
    slots = _pair_slot(n)
    phase = [0] * len(slots)
    rng = random.Random(strategy) if isinstance(strategy, int) and not isinstance(strategy, bool) else None
    while True:
        descents = [i for i in range(len(word) - 1) if word[i] > word[i + 1]]
        if not descents:
            break
        if rng is not None:
            i = rng.choice(descents)
        elif strategy == "rightmost":
            i = descents[-1]
        else:
            i = descents[0]
        rel = _swap_phase(word[i], word[i + 1])
        if rel is not None:
            k, l, e = rel
            phase[slots[(k, l)]] += e
        word[i], word[i + 1] = word[i + 1], word[i]
    p = [0] * n
    q = [0] * n
    t = 0
    for fam, j in word:
        if fam == 0:
            p[j - 1] += 1
        elif fam == 1:
            q[j - 1] += 1
        else:
            t += 1
    return MultiIndex(tuple(p), tuple(q), t), tuple(phase)


def mul_rewrite(a: Element, b: Element, strategy="leftmost") -> Element:
    """Reference product by adjacent-transposition rewriting.

    Each monomial pair is concatenated as a word in the generators and sorted
    into normal order one swap at a time, multiplying in the relation phase of
    every swap.  ``strategy`` picks which out-of-order pair is swapped next:
    ``"leftmost"``, ``"rightmost"`` or an integer seed for random choice.
    """
    a._same(b)
    sig = a.sig
    n = sig.n
    out: dict = {}
    for (i1, w1), c1 in a._terms.items():
        for (i2, w2), c2 in b._terms.items():
            idx, ph = _normal_order(_word_of(i1) + _word_of(i2), n, strategy)
            if sig.exact:
                key = (idx, tuple(x + y + z for x, y, z in zip(w1, w2, ph)))
                v = c1 * c2
            else:
                key = (idx, ())
                v = c1 * c2 * sig.theta.phase_value(ph)
            s = out.get(key)
            out[key] = v if s is None else s + v
    return Element._wrap(sig, {k: v for k, v in out.items() if v})


# ---------------------------------------------------------------------------
# linear structure, star, degree


def scale(c: Scalar, a: Element) -> Element:
    sig = a.sig
    if sig.exact:
        if isinstance(c, ExactScalar):
            return mul(Element.scalar(sig, c), a)
        g = GaussianRational.coerce(c)
        if not g:
            return Element.zero(sig)
        return Element._wrap(sig, {k: g * v for k, v in a._terms.items()})
    if isinstance(c, ExactScalar):
        c = c.eval(sig.theta)
    c = complex(c)
    return Element._wrap(sig, {k: c * v for k, v in a._terms.items() if c * v})


def linear(op: str, a: Element, b) -> Element:
    """``add``/``sub`` two elements or ``scale`` element ``a`` by scalar ``b``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "scale":
        return scale(b, a)
    raise ValueError(f"unknown linear operation {op!r}")


def star(a: Element) -> Element:
    sig = a.sig
    out: dict = {}
    for (idx, w), c in a._terms.items():
        sw = _star_word(idx)
        new = idx.swapped()
        if sig.exact:
            key = (new, tuple(s - e for s, e in zip(sw, w)))
            v = c.conjugate()
        else:
            key = (new, ())
            v = c.conjugate() * sig.theta.phase_value(sw)
        s = out.get(key)
        out[key] = v if s is None else s + v
    return Element._wrap(sig, {k: v for k, v in out.items() if v})


def degree(a: Element) -> int:
    """Maximal total degree over the support, -1 for the zero element."""
    return max((idx.degree for idx, _ in a._terms), default=-1)


def truncate(a: Element, D: int) -> Element:
    if D < 0:
        raise DomainError("truncation degree must be nonnegative")
    return Element._wrap(a.sig, {k: v for k, v in a._terms.items() if k[0].degree <= D})


def evaluate(a: Element, theta: ThetaMatrix) -> Element:
    """Numeric copy of an exact element with every phase evaluated at ``theta``."""
    if not a.sig.exact:
        raise DomainError("element is already numeric")
    return Element(AlgebraSignature(a.sig.n, a.sig.m, NUMERIC, theta), a.coeffs)


def hermitian_test(a: Element, tol: float = DEFAULT_TOL) -> bool:
    return star(a).equals(a, tol)


def decay_check(a: Element, r: int, C, theta: Optional[ThetaMatrix] = None) -> bool:
    """Finite-support stand-in for the Schwartz decay bound.

    True iff every coefficient satisfies ``(1 + sum(p_j^2 + q_j^2))^r |a| < C``
    (``t^2`` is added to the weight for odd m).  Phase-free exact
    coefficients are compared exactly.
    """
    if r < 1:
        raise DomainError("decay order r must be a positive integer")
    C = Fraction(C) if not isinstance(C, float) else C
    if C <= 0:
        raise DomainError("decay bound C must be positive")
    th = theta or a.sig.theta or ThetaMatrix.zero(a.sig.n)
    for idx, c in a.coeffs.items():
        weight = (1 + sum(v * v for v in idx.p + idx.q) + idx.t * idx.t) ** r
        const = c.constant_value() if isinstance(c, ExactScalar) else None
        if const is not None and isinstance(C, Fraction):
            if weight * weight * const.abs2() >= C * C:
                return False
        else:
            mag = abs(c.eval(th)) if isinstance(c, ExactScalar) else abs(c)
            if weight * mag >= float(C):
                return False
    return True
