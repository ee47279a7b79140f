"""Text form of algebra elements: a small recursive-descent parser and the
canonical printer.

Grammar (whitespace insignificant, no implicit multiplication)::

    expr := sum
    sum  := ["-"] prod (("+" | "-") prod)*
    prod := pow ("*" pow)*
    pow  := atom ("^" ["-"] uint)?
    atom := "z" uint | "zb" uint | "x" | "i" | number
          | "L[" uint "," uint "]" | "(" expr ")" | "star(" expr ")"
    number := uint ("/" uint)? | decimal

A leading minus, decimals and negative exponents (on ``L[k,l]`` only) are
accepted so that every printed element parses back.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from .algebra import AlgebraSignature, Element, MultiIndex, star
from .coefficients import GaussianRational, format_phase
from .errors import DomainError, ParseError

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\.\d+(?:[eE][+-]?\d+)?|\d+)
  | (?P<zb>zb)
  | (?P<z>z)
  | (?P<star>star)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*^/()\[\],])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos=pos)
        kind = m.lastgroup
        val = m.group()
        if kind == "name":
            # identifiers like "z12" or "zb3" are split into letter + index
            sub = re.fullmatch(r"(zb|z)(\d+)", val)
            if sub:
                tokens.append((sub.group(1), sub.group(1), pos))
                tokens.append(("num", sub.group(2), pos + len(sub.group(1))))
            elif val in ("x", "i", "L"):
                tokens.append((val, val, pos))
            else:
                raise ParseError(f"unknown identifier {val!r}", pos=pos)
        elif kind != "ws":
            tokens.append((kind if kind != "op" else val, val, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: AlgebraSignature):
        self.text = text
        self.sig = sig
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def kind(self) -> str:
        return self.toks[self.i][0]

    @property
    def pos(self) -> int:
        return self.toks[self.i][2]

    def take(self, kind: str):
        if self.kind != kind:
            got = self.toks[self.i][1] or "end of input"
            raise ParseError(f"expected {kind!r}, got {got!r}", pos=self.pos)
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def uint(self) -> int:
        _, val, pos = self.take("num")
        if not val.isdigit():
            raise ParseError(f"expected an integer, got {val!r}", pos=pos)
        return int(val)

    def parse(self) -> Element:
        out = self.sum()
        if self.kind != "eof":
            raise ParseError(f"unexpected {self.toks[self.i][1]!r}", pos=self.pos)
        return out

    def sum(self) -> Element:
        neg = False
        if self.kind == "-":
            self.i += 1
            neg = True
        out = self.prod()
        if neg:
            out = -out
        while self.kind in ("+", "-"):
            op = self.take(self.kind)[0]
            rhs = self.prod()
            out = out + rhs if op == "+" else out - rhs
        return out

    def prod(self) -> Element:
        out = self.power()
        while self.kind == "*":
            self.i += 1
            out = out * self.power()
        return out

    def power(self) -> Element:
        start = self.pos
        base, phase = self.atom()
        if self.kind != "^":
            return base
        self.i += 1
        negative = False
        if self.kind == "-":
            self.i += 1
            negative = True
        e = self.uint()
        if negative:
            if phase is None:
                raise ParseError("negative exponents are only allowed on L[k,l]", pos=start)
            k, l = phase
            return Element.phase(self.sig, {(k, l): -e})
        if phase is not None:
            return Element.phase(self.sig, {phase: e})
        return base ** e

    def atom(self):
        kind, val, pos = self.toks[self.i]
        sig = self.sig
        if kind in ("z", "zb"):
            self.i += 1
            j = self.uint()
            if not 1 <= j <= sig.n:
                raise ParseError(f"generator index {j} out of range 1..{sig.n}", pos=pos)
            return (Element.z(sig, j) if kind == "z" else Element.zb(sig, j)), None
        if kind == "x":
            self.i += 1
            if not sig.odd:
                raise ParseError("generator x is only available for odd m", pos=pos)
            return Element.x(sig), None
        if kind == "i":
            self.i += 1
            one_i = GaussianRational(0, 1) if sig.exact else 1j
            return Element.scalar(sig, one_i), None
        if kind == "num":
            self.i += 1
            value = val
            if self.kind == "/":
                if not val.isdigit():
                    raise ParseError("only integer fractions are allowed", pos=pos)
                self.i += 1
                den = self.uint()
                if den == 0:
                    raise ParseError("division by zero", pos=pos)
                value = f"{val}/{den}"
            if sig.exact:
                return Element.scalar(sig, Fraction(value)), None
            return Element.scalar(sig, float(Fraction(value)) if "/" in value else float(value)), None
        if kind == "L":
            self.i += 1
            if not sig.exact:
                raise ParseError("L[k,l] phases are only available in exact mode", pos=pos)
            self.take("[")
            k = self.uint()
            self.take(",")
            l = self.uint()
            self.take("]")
            if not (1 <= k <= sig.n and 1 <= l <= sig.n):
                raise ParseError(f"phase index ({k},{l}) out of range 1..{sig.n}", pos=pos)
            return Element.phase(sig, {(k, l): 1}), (k, l)
        if kind == "(":
            self.i += 1
            inner = self.sum()
            self.take(")")
            return inner, None
        if kind == "star":
            self.i += 1
            self.take("(")
            inner = self.sum()
            self.take(")")
            return star(inner), None
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos=pos)


def parse_element(text: str, sig: AlgebraSignature) -> Element:
    """Parse an expression into its canonical normal form."""
    try:
        return _Parser(text, sig).parse()
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# printing


def format_monomial(idx: MultiIndex) -> str:
    parts = []
    for name, exps in (("z", idx.p), ("zb", idx.q)):
        for j, e in enumerate(exps, 1):
            if e:
                parts.append(f"{name}{j}" if e == 1 else f"{name}{j}^{e}")
    if idx.t:
        parts.append("x" if idx.t == 1 else f"x^{idx.t}")
    return "*".join(parts)


def format_index(idx: MultiIndex) -> str:
    """Compact ``(p1,..,pn;q1,..,qn[;t])`` label used in reports."""
    s = ",".join(map(str, idx.p)) + ";" + ",".join(map(str, idx.q))
    return f"({s};{idx.t})" if idx.t else f"({s})"


def _exact_coeff(g: GaussianRational):
    """Return ``(negative, text)`` for a Gaussian rational coefficient."""
    re_, im_ = g.re, g.im
    if not im_:
        return re_ < 0, str(abs(re_))
    if not re_:
        mag = abs(im_)
        return im_ < 0, "i" if mag == 1 else f"{mag}*i"
    sign = "-" if im_ < 0 else "+"
    mag = abs(im_)
    return False, f"({re_} {sign} {'i' if mag == 1 else f'{mag}*i'})"


def _float(v: float) -> str:
    return repr(float(v))


def _numeric_coeff(c: complex):
    re_, im_ = c.real, c.imag
    if im_ == 0:
        return re_ < 0, _float(abs(re_))
    if re_ == 0:
        return im_ < 0, f"{_float(abs(im_))}*i"
    sign = "-" if im_ < 0 else "+"
    return False, f"({_float(re_)} {sign} {_float(abs(im_))}*i)"


def format_element(a: Element) -> str:
    """Canonical text: graded-lex monomial order, phases as ``L[k,l]^e``."""
    if a.is_zero():
        return "0"
    n = a.sig.n
    rows = sorted(a.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1]))
    out = []
    for (idx, w), c in rows:
        if a.sig.exact:
            negative, coeff = _exact_coeff(c)
            ph = format_phase(n, w)
            unit = coeff == "1"
        else:
            negative, coeff = _numeric_coeff(c)
            ph = ""
            unit = False
        mono = format_monomial(idx)
        factors = [f for f in (ph, mono) if f]
        if not unit or not factors:
            factors.insert(0, coeff)
        body = " * ".join(factors)
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# element files: UTF-8 lines ``name = expr``


def parse_definitions(text: str, sig: AlgebraSignature) -> dict:
    defs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, eq, expr = line.partition("=")
        name = name.strip()
        if not eq or not re.fullmatch(r"[A-Za-z_]\w*", name):
            raise ParseError("expected 'name = expr'", line=lineno)
        if name in defs:
            raise ParseError(f"duplicate definition of {name!r}", line=lineno)
        try:
            defs[name] = parse_element(expr, sig)
        except ParseError as exc:
            raise ParseError(exc.message, pos=exc.pos, line=lineno) from None
    return defs


def format_definitions(defs: dict) -> str:
    return "".join(f"{name} = {format_element(el)}\n" for name, el in defs.items())


def element_from(text: Optional[str], sig: AlgebraSignature) -> Element:
    return Element.zero(sig) if text is None else parse_element(text, sig)
