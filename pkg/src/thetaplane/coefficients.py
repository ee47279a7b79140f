"""Coefficient arithmetic: Gaussian rationals times Laurent words in the phases.

The phases ``lambda_{k,l} = exp(i theta_{k,l})`` for ``1 <= l < k <= n`` are
kept symbolic.  A coefficient of the algebra is a finite sum

    sum_j  g_j * prod_{l<k} lambda_{k,l}^{e_j(k,l)}

with ``g_j`` Gaussian rationals, i.e. an element of Q(i)[lambda^{+-1}].
Because every phase has unit modulus, complex conjugation sends
``lambda^e`` to ``lambda^{-e}``.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .errors import DomainError, ParseError, SignatureMismatchError

Rational = Union[int, Fraction]


@lru_cache(maxsize=None)
def phase_pairs(n: int) -> tuple:
    """Ordered pairs ``(k, l)`` with ``1 <= l < k <= n`` in canonical order."""
    return tuple((k, l) for k in range(2, n + 1) for l in range(1, k))


@lru_cache(maxsize=None)
def _pair_slot(n: int) -> dict:
    return {pair: i for i, pair in enumerate(phase_pairs(n))}


def zero_word(n: int) -> tuple:
    return (0,) * (n * (n - 1) // 2)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class GaussianRational:
    """Exact ``re + i*im`` with rational parts.

    Stored over a common denominator, ``(a + b i) / d`` with ``d > 0`` and
    ``gcd(a, b, d) = 1``; ``re`` and ``im`` come back in lowest terms.
    """

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        fr, fi = _to_fraction(re), _to_fraction(im)
        d = fr.denominator * fi.denominator // math.gcd(fr.denominator, fi.denominator)
        self._set(fr.numerator * (d // fr.denominator), fi.numerator * (d // fi.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        g = math.gcd(math.gcd(a, b), d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        obj = cls.__new__(cls)
        obj._set(a, b, d)
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact; use numeric mode")
        return cls(x)

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __add__(self, other) -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        d1, d2 = self._d, other._d
        if d1 == d2:
            return GaussianRational._raw(self._a + other._a, self._b + other._b, d1)
        return GaussianRational._raw(
            self._a * d2 + other._a * d1, self._b * d2 + other._b * d1, d1 * d2
        )

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __sub__(self, other) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) + (-self)

    def __mul__(self, other) -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, e = self._a, self._b, other._a, other._b
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * other._d)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def abs2(self) -> Fraction:
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def inverse(self) -> "GaussianRational":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n2 = self._a * self._a + self._b * self._b
        # 1/((a+bi)/d) = d(a-bi)/(a^2+b^2)
        return GaussianRational._raw(self._d * self._a, -self._d * self._b, n2)

    def __truediv__(self, other) -> "GaussianRational":
        return self * GaussianRational.coerce(other).inverse()

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        re_, im_ = self.re, self.im
        if not im_:
            return str(re_)
        if not re_:
            return f"{im_}*i"
        sign = "-" if im_ < 0 else "+"
        return f"({re_} {sign} {abs(im_)}*i)"


ONE = GaussianRational(1)
ZERO = GaussianRational(0)


@dataclass(frozen=True)
class PhaseWord:
    """Integer-exponent word ``prod lambda_{k,l}^{e}`` over pairs ``l < k``.

    ``exps`` is dense in :func:`phase_pairs` order; the sparse view
    :attr:`exponents` never contains zero exponents.
    """

    n: int
    exps: tuple

    def __post_init__(self):
        if len(self.exps) != self.n * (self.n - 1) // 2:
            raise DomainError(f"phase word of wrong length for n={self.n}")

    @classmethod
    def identity(cls, n: int) -> "PhaseWord":
        return cls(n, zero_word(n))

    @classmethod
    def from_map(cls, n: int, exponents: Mapping[tuple, int]) -> "PhaseWord":
        slots = _pair_slot(n)
        dense = [0] * len(slots)
        for (k, l), e in exponents.items():
            if k == l:
                continue
            if k < l:
                k, l, e = l, k, -e
            if (k, l) not in slots:
                raise DomainError(f"phase index ({k},{l}) out of range for n={n}")
            dense[slots[(k, l)]] += e
        return cls(n, tuple(dense))

    @property
    def exponents(self) -> dict:
        return {pair: e for pair, e in zip(phase_pairs(self.n), self.exps) if e}

    def is_identity(self) -> bool:
        return not any(self.exps)

    def __mul__(self, other: "PhaseWord") -> "PhaseWord":
        return phase_mul(self, other)

    def inverse(self) -> "PhaseWord":
        return PhaseWord(self.n, tuple(-e for e in self.exps))

    def __str__(self) -> str:
        return format_phase(self.n, self.exps) or "1"


def phase_mul(a: PhaseWord, b: PhaseWord) -> PhaseWord:
    if a.n != b.n:
        raise SignatureMismatchError(f"phase words for n={a.n} and n={b.n}")
    return PhaseWord(a.n, tuple(x + y for x, y in zip(a.exps, b.exps)))


def format_phase(n: int, exps: tuple) -> str:
    parts = []
    for (k, l), e in zip(phase_pairs(n), exps):
        if e == 1:
            parts.append(f"L[{k},{l}]")
        elif e:
            parts.append(f"L[{k},{l}]^{e}")
    return " * ".join(parts)


def add_words(u: tuple, v: tuple) -> tuple:
    return tuple(x + y for x, y in zip(u, v))


class ExactScalar:
    """Element of Q(i)[lambda_{k,l}^{+-1}] for a fixed ``n``.

    Internally a dict from dense exponent tuples to nonzero
    :class:`GaussianRational` values.  Instances are treated as immutable.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Optional[Mapping] = None):
        self.n = n
        clean = {}
        if terms:
            for w, c in terms.items():
                if isinstance(w, PhaseWord):
                    if w.n != n:
                        raise SignatureMismatchError("phase word belongs to another n")
                    w = w.exps
                c = GaussianRational.coerce(c)
                if c:
                    clean[tuple(w)] = clean.get(tuple(w), ZERO) + c
            clean = {w: c for w, c in clean.items() if c}
        self._terms = clean

    @classmethod
    def _wrap(cls, n: int, terms: dict) -> "ExactScalar":
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        return obj

    @classmethod
    def const(cls, n: int, value=1) -> "ExactScalar":
        return cls(n, {zero_word(n): value})

    @classmethod
    def phase(cls, n: int, exponents: Mapping[tuple, int], coeff=1) -> "ExactScalar":
        return cls(n, {PhaseWord.from_map(n, exponents): coeff})

    @property
    def terms(self) -> list:
        """``(GaussianRational, PhaseWord)`` pairs in canonical order."""
        return [(self._terms[w], PhaseWord(self.n, w)) for w in sorted(self._terms)]

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    __bool__ = lambda self: bool(self._terms)

    def constant_value(self) -> Optional[GaussianRational]:
        """The Gaussian rational if this scalar carries no phase, else None."""
        if not self._terms:
            return ZERO
        if len(self._terms) == 1:
            w, c = next(iter(self._terms.items()))
            if not any(w):
                return c
        return None

    def _check(self, other: "ExactScalar") -> None:
        if self.n != other.n:
            raise SignatureMismatchError(f"scalars for n={self.n} and n={other.n}")

    def _lift(self, other) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            self._check(other)
            return other
        return ExactScalar.const(self.n, GaussianRational.coerce(other))

    def __add__(self, other) -> "ExactScalar":
        other = self._lift(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return ExactScalar._wrap(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar._wrap(self.n, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "ExactScalar":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "ExactScalar":
        return self._lift(other) + (-self)

    def __mul__(self, other) -> "ExactScalar":
        other = self._lift(other)
        out: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = tuple(x + y for x, y in zip(w1, w2))
                s = out.get(w)
                out[w] = c1 * c2 if s is None else s + c1 * c2
        return ExactScalar._wrap(self.n, {w: c for w, c in out.items() if c})

    __rmul__ = __mul__

    def times_phase(self, word: tuple) -> "ExactScalar":
        return ExactScalar._wrap(
            self.n, {tuple(x + y for x, y in zip(w, word)): c for w, c in self._terms.items()}
        )

    def conj(self) -> "ExactScalar":
        return ExactScalar._wrap(
            self.n, {tuple(-e for e in w): c.conjugate() for w, c in self._terms.items()}
        )

    conjugate = conj

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactScalar):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self._terms == ExactScalar.const(self.n, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def eval(self, theta: "ThetaMatrix") -> complex:
        return eval_scalar(self, theta)

    def __repr__(self) -> str:
        return f"ExactScalar(n={self.n}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for c, w in self.terms:
            ph = format_phase(self.n, w.exps)
            parts.append(f"{c} * {ph}" if ph else str(c))
        return " + ".join(parts)


def scalar_arith(op: str, a: ExactScalar, b: Optional[ExactScalar] = None) -> ExactScalar:
    """Dispatch ``add``, ``mul``, ``conj`` or ``negate`` on exact scalars."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "conj":
        return a.conj()
    if op == "negate":
        return -a
    raise ValueError(f"unknown scalar operation {op!r}")


# ---------------------------------------------------------------------------
# Theta parameters


@dataclass(frozen=True)
class Angle:
    """A real angle, exact as ``pi_multiple * pi`` when that is known."""

    pi_multiple: Optional[Fraction] = None
    decimal: Optional[float] = None

    @property
    def radians(self) -> float:
        if self.pi_multiple is not None:
            return float(self.pi_multiple) * math.pi
        return float(self.decimal or 0.0)

    def __neg__(self) -> "Angle":
        return Angle(
            None if self.pi_multiple is None else -self.pi_multiple,
            None if self.decimal is None else -self.decimal,
        )

    def __str__(self) -> str:
        if self.pi_multiple is not None:
            return f"{self.pi_multiple}pi"
        return repr(float(self.decimal))


class ThetaMatrix:
    """Skew-symmetric angle matrix; only entries with ``k > l`` are stored."""

    def __init__(self, n: int, angles: Optional[Mapping[tuple, object]] = None):
        if n < 1:
            raise DomainError("n must be positive")
        self.n = n
        self._angles: dict = {}
        for (k, l), a in (angles or {}).items():
            if not (1 <= l < k <= n):
                raise DomainError(f"theta entry ({k},{l}) must satisfy 1 <= l < k <= {n}")
            if not isinstance(a, Angle):
                a = Angle(pi_multiple=a) if isinstance(a, (int, Fraction)) else Angle(decimal=float(a))
            self._angles[(k, l)] = a
        self._lam_cache: dict = {}

    @classmethod
    def zero(cls, n: int) -> "ThetaMatrix":
        return cls(n)

    def angle(self, k: int, l: int) -> Angle:
        if k == l:
            return Angle(Fraction(0))
        if k < l:
            return -self.angle(l, k)
        return self._angles.get((k, l), Angle(Fraction(0)))

    def theta(self, k: int, l: int) -> float:
        return self.angle(k, l).radians

    def lam(self, k: int, l: int) -> complex:
        return cmath.exp(1j * self.theta(k, l))

    def phase_value(self, word: tuple) -> complex:
        """Numeric value of a dense phase word."""
        v = self._lam_cache.get(word)
        if v is None:
            # exact pi-multiples are reduced mod 2 before exponentiating
            exact = Fraction(0)
            approx = 0.0
            for (k, l), e in zip(phase_pairs(self.n), word):
                if e:
                    a = self.angle(k, l)
                    if a.pi_multiple is not None:
                        exact += e * a.pi_multiple
                    else:
                        approx += e * a.decimal
            exact = exact % 2
            v = _exp_i_pi(exact) * cmath.exp(1j * approx)
            self._lam_cache[word] = v
        return v

    def items(self):
        return sorted(self._angles.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThetaMatrix):
            return NotImplemented
        nz = lambda t: {k: a for k, a in t._angles.items() if a.radians != 0.0 or a.pi_multiple}
        return self.n == other.n and nz(self) == nz(other)

    def __repr__(self) -> str:
        return f"ThetaMatrix(n={self.n}, {dict((k, str(a)) for k, a in self.items())})"


def _exp_i_pi(x: Fraction) -> complex:
    """``exp(i pi x)`` with exact values at multiples of 1/2."""
    table = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j, Fraction(3, 2): -1j}
    if x in table:
        return table[x]
    return cmath.exp(1j * math.pi * float(x))


def eval_scalar(s: ExactScalar, theta: ThetaMatrix) -> complex:
    if s.n != theta.n:
        raise SignatureMismatchError(f"scalar has n={s.n}, theta has n={theta.n}")
    total = 0j
    for w, c in s.items():
        total += complex(c) * theta.phase_value(w)
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise DomainError("evaluation produced a non-finite value")
    return total


# ---------------------------------------------------------------------------
# Theta config files

_THETA_LINE = re.compile(r"^theta\s+(\d+)\s+(\d+)\s+(\S+)$")
_PI_VALUE = re.compile(r"^([+-]?\d+(?:/\d+)?)\*?pi$")


def parse_theta(text: str) -> ThetaMatrix:
    """Read the line-based theta format (``n <int>`` then ``theta k l value``)."""
    n = None
    angles: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError("expected header 'n <positive int>'", line=lineno)
            n = int(parts[1])
            continue
        m = _THETA_LINE.match(line)
        if not m:
            raise ParseError(f"malformed theta line {line!r}", line=lineno)
        k, l, val = int(m.group(1)), int(m.group(2)), m.group(3)
        if not (1 <= l < k <= n):
            raise ParseError(f"theta indices must satisfy 1 <= l < k <= {n}", line=lineno)
        if (k, l) in angles:
            raise ParseError(f"duplicate theta entry ({k},{l})", line=lineno)
        pm = _PI_VALUE.match(val)
        if pm:
            angles[(k, l)] = Angle(pi_multiple=Fraction(pm.group(1)))
        else:
            try:
                angles[(k, l)] = Angle(decimal=float(val))
            except ValueError:
                raise ParseError(f"bad angle {val!r}", line=lineno) from None
            if not math.isfinite(angles[(k, l)].decimal):
                raise ParseError(f"non-finite angle {val!r}", line=lineno)
    if n is None:
        raise ParseError("empty theta config: missing 'n <int>' header")
    return ThetaMatrix(n, angles)


def format_theta(theta: ThetaMatrix) -> str:
    lines = [f"n {theta.n}"]
    for (k, l), a in theta.items():
        lines.append(f"theta {k} {l} {a}")
    return "\n".join(lines) + "\n"

