"""Bracketed polynomials: finitely supported rational combinations of words."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping

from .terms import ONE, STAR, Word, fill, show


def _canonical_key(w: Word):
    from .order import DEFAULT_ORDER

    return DEFAULT_ORDER.key(w)


class LinComb:
    """An immutable linear combination of words with nonzero ``Fraction``
    coefficients.  Iteration yields ``(word, coeff)`` pairs in descending
    dT order."""

    __slots__ = ("_terms", "_hash", "_items")

    def __init__(self, terms: Mapping[Word, object] | Iterable[tuple[Word, object]] | None = None):
        acc: dict[Word, Fraction] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for w, c in items:
                c = Fraction(c)
                if c:
                    acc[w] = acc.get(w, 0) + c
        self._terms = {w: c for w, c in acc.items() if c}
        self._hash = None
        self._items = None

    @classmethod
    def _raw(cls, terms: dict) -> "LinComb":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        obj._items = None
        return obj

    # -- container protocol
    def __getitem__(self, w: Word) -> Fraction:
        return self._terms.get(w, Fraction(0))

    def __contains__(self, w: Word) -> bool:
        return w in self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def items(self) -> tuple:
        if self._items is None:
            self._items = tuple(sorted(self._terms.items(), key=lambda t: _canonical_key(t[0]), reverse=True))
        return self._items

    def __iter__(self) -> Iterator[tuple[Word, Fraction]]:
        return iter(self.items())

    def support(self) -> list[Word]:
        return [w for w, _ in self.items()]

    def __eq__(self, other) -> bool:
        if isinstance(other, LinComb):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"LinComb({show_poly(self)!r})"

    # -- module structure
    def __add__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        acc = dict(self._terms)
        for w, c in other._terms.items():
            v = acc.get(w, 0) + c
            if v:
                acc[w] = v
            else:
                acc.pop(w, None)
        return LinComb._raw(acc)

    def __neg__(self) -> "LinComb":
        return LinComb._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "LinComb":
        c = Fraction(c)
        if not c:
            return ZERO
        return LinComb._raw({w: c * v for w, v in self._terms.items()})

    def __rmul__(self, c) -> "LinComb":
        if isinstance(c, (Rational, int)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other) -> "LinComb":
        if isinstance(other, (Rational, int)):
            return self.scale(other)
        if not isinstance(other, LinComb):
            return NotImplemented
        return mul(self, other)

    def bracket(self) -> "LinComb":
        return bracket(self)


ZERO = LinComb()


def monomial(w: Word, c=1) -> LinComb:
    return LinComb({w: c})


def as_lincomb(f) -> LinComb:
    return f if isinstance(f, LinComb) else monomial(f)


def add(f: LinComb, g: LinComb) -> LinComb:
    return f + g


def scale(c, f: LinComb) -> LinComb:
    return f.scale(c)


def mul(f: LinComb, g: LinComb) -> LinComb:
    """Concatenation extended bilinearly."""
    acc: dict[Word, Fraction] = {}
    for u, a in f._terms.items():
        for v, b in g._terms.items():
            w = u + v
            acc[w] = acc.get(w, 0) + a * b
    return LinComb(acc)


def bracket(f: LinComb) -> LinComb:
    return LinComb._raw({(w,): c for w, c in f._terms.items()})


def is_direct_sum(f: LinComb, g: LinComb) -> bool:
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    return not any(w in big for w in small._terms)


def r_w(f: LinComb, w: Word) -> LinComb:
    """``c_w w - f``; then ``f = c_w w (+) (-r_w(f, w))`` is a direct sum."""
    if w not in f:
        raise KeyError(f"{show(w)} is not in the support")
    return monomial(w, f[w]) - f


def leading(f: LinComb, order=None) -> tuple[Word, Fraction]:
    """Order-maximal support word and its coefficient; ``(1, c)`` for scalars."""
    if order is None:
        from .order import DEFAULT_ORDER as order
    if not f:
        return ONE, Fraction(0)
    w = max(f._terms, key=order.key)
    return w, f[w]


def substitute_context(q: Word, s: LinComb, hole: str = STAR) -> LinComb:
    """``q|_s``: fill the hole of ``q`` with each support word, linearly."""
    return LinComb._raw({fill(q, w, hole): c for w, c in s._terms.items()})


# ---------------------------------------------------------------- text syntax

_PTOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([\[\]+\-*/−]))")


class PolySyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _PTOKEN.match(text, pos)
        if m is None:
            raise PolySyntaxError(f"unexpected character {text[pos]!r} at position {pos}")
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("ident", m.group(2), m.start(2)))
        else:
            sym = "-" if m.group(3) == "−" else m.group(3)
            out.append((sym, sym, m.start(3)))
        pos = m.end()
    return out


def parse_poly(text: str, alphabet: Iterable[str] | None = None) -> LinComb:
    """Parse ``2*[x] y - 1/3 [[x] y] + 1``-style polynomial text."""
    allowed = None if alphabet is None else set(alphabet)
    toks = _tokenize(text)
    i = 0

    def peek(k=0):
        return toks[i + k][0] if i + k < len(toks) else None

    def expect(kind):
        nonlocal i
        if peek() != kind:
            where = toks[i][2] if i < len(toks) else len(text)
            raise PolySyntaxError(f"expected {kind!r} at position {where}")
        i += 1
        return toks[i - 1]

    def word() -> Word:
        nonlocal i
        if peek() == "int":
            tok = toks[i]
            if tok[1] != "1":
                raise PolySyntaxError(f"unexpected number at position {tok[2]}")
            i += 1
            if peek() in ("ident", "["):
                raise PolySyntaxError(f"'1' used inside a nonempty sequence at position {tok[2]}")
            return ONE
        letters = []
        while peek() in ("ident", "["):
            if peek() == "ident":
                name = toks[i][1]
                if allowed is not None and name not in allowed:
                    raise PolySyntaxError(f"unknown generator {name!r} at position {toks[i][2]}")
                letters.append(name)
                i += 1
            else:
                i += 1
                inner = word()
                expect("]")
                letters.append(inner)
            if peek() == "int":
                raise PolySyntaxError(f"'1' used inside a nonempty sequence at position {toks[i][2]}")
        if not letters:
            where = toks[i][2] if i < len(toks) else len(text)
            raise PolySyntaxError(f"expected a word at position {where}")
        return tuple(letters)

    def term() -> tuple[Fraction, Word]:
        nonlocal i
        coeff = Fraction(1)
        if peek() == "int":
            is_word_one = toks[i][1] == "1" and peek(1) not in ("/", "*", "ident", "[", "int")
            if not is_word_one:
                coeff = Fraction(int(toks[i][1]))
                i += 1
                if peek() == "/":
                    i += 1
                    den = int(expect("int")[1])
                    if den == 0:
                        raise PolySyntaxError("zero denominator")
                    coeff /= den
                if peek() == "*":
                    i += 1
                    return coeff, word()
                if peek() in (None, "+", "-"):
                    return coeff, ONE
        return coeff, word()

    if not toks:
        raise PolySyntaxError("empty polynomial")
    acc: dict[Word, Fraction] = {}
    sign = 1
    if peek() in ("+", "-"):
        sign = -1 if peek() == "-" else 1
        i += 1
    while True:
        c, w = term()
        acc[w] = acc.get(w, 0) + sign * c
        if peek() is None:
            break
        if peek() not in ("+", "-"):
            raise PolySyntaxError(f"expected '+' or '-' at position {toks[i][2]}")
        sign = -1 if peek() == "-" else 1
        i += 1
    return LinComb(acc)


def _show_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def show_poly(f: LinComb) -> str:
    """Canonical polynomial text, terms in descending dT order; ``0`` if zero."""
    if not f:
        return "0"
    parts = []
    for k, (w, c) in enumerate(f):
        neg = c < 0
        a = -c if neg else c
        body = show(w) if a == 1 else f"{_show_coeff(a)}*{show(w)}"
        if k == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)
