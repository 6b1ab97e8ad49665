"""Bracketed words: the free operated monoid over a finite alphabet.

A word is a plain tuple of letters.  A letter is either a generator name
(``str``) or a bracketed word (a nested ``tuple``).  The empty tuple is the
identity ``1``; ``((),)`` is the one-letter word ``[1]``.

    >>> w = parse("[[x1] x2]")
    >>> w
    ((('x1',), 'x2'),)
    >>> show(w)
    '[[x1] x2]'
"""

from __future__ import annotations

import enum
import re
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

Letter = Union[str, tuple]
Word = tuple

ONE: Word = ()

# Hole markers used by contexts; never valid generator names.
STAR = "*"
STAR1 = "*1"
STAR2 = "*2"


class Variant(enum.Enum):
    UNITARY = "unitary"
    NONUNITARY = "nonunitary"


class Relation(enum.Enum):
    SEPARATED = "separated"
    NESTED = "nested"
    INTERSECTING = "intersecting"


class Placement(NamedTuple):
    """One occurrence of a factor: ``length`` letters from ``start`` in the
    letter sequence reached by descending through the bracket indices in
    ``path``."""

    path: tuple
    start: int
    length: int

    def to_json(self) -> dict:
        return {"path": list(self.path), "start": self.start, "len": self.length}

    @classmethod
    def from_json(cls, data: dict) -> "Placement":
        return cls(tuple(data["path"]), int(data["start"]), int(data["len"]))

    def sort_key(self):
        return (self.path, self.start, self.length)


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class PlacementError(ValueError):
    pass


def br(*letters: Letter) -> Word:
    """The one-letter word ``[letters]``."""
    return (tuple(letters),)


def bracket_power(w: Word, k: int) -> Word:
    """``[w]^(k)``: ``w`` wrapped in ``k`` nested brackets (as a one-letter word)."""
    if k < 1:
        raise ValueError("bracket power needs k >= 1")
    for _ in range(k):
        w = (w,)
    return w


# ---------------------------------------------------------------- text syntax

_TOKEN = re.compile(r"\s*(?:(\[)|(\])|([A-Za-z_][A-Za-z0-9_]*)|(1)(?![0-9]))")


def parse(text: str, alphabet: Iterable[str] | None = None) -> Word:
    """Parse the canonical word syntax (``1``, identifiers, ``[...]``)."""
    allowed = None if alphabet is None else set(alphabet)
    pos = 0
    stack: list[list] = [[]]
    # per open bracket: was a standalone `1` seen at this level
    one_seen = [False]

    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            if one_seen[-1]:
                raise WordSyntaxError("'1' used inside a nonempty sequence", start)
            stack.append([])
            one_seen.append(False)
        elif m.group(2):
            if len(stack) == 1:
                raise WordSyntaxError("unbalanced ']'", start)
            content = stack.pop()
            had_one = one_seen.pop()
            if not content and not had_one:
                raise WordSyntaxError("empty brackets; write [1]", start)
            if one_seen[-1]:
                raise WordSyntaxError("'1' used inside a nonempty sequence", start)
            stack[-1].append(tuple(content))
        elif m.group(3):
            name = m.group(3)
            if one_seen[-1]:
                raise WordSyntaxError("'1' used inside a nonempty sequence", start)
            if allowed is not None and name not in allowed:
                raise WordSyntaxError(f"unknown generator {name!r}", start)
            stack[-1].append(name)
        else:
            if stack[-1] or one_seen[-1]:
                raise WordSyntaxError("'1' used inside a nonempty sequence", start)
            one_seen[-1] = True
        pos = m.end()
    if len(stack) != 1:
        raise WordSyntaxError("unclosed '['", n)
    if not stack[0] and not one_seen[0]:
        raise WordSyntaxError("empty input; write 1 for the empty word", n)
    return tuple(stack[0])


def show(w: Word) -> str:
    """Canonical text of a word; ``parse(show(w)) == w``."""
    if not w:
        return "1"
    return " ".join(l if isinstance(l, str) else f"[{show(l)}]" for l in w)


# ----------------------------------------------------------------- statistics


@lru_cache(maxsize=None)
def degree(w: Word) -> int:
    """Generator occurrences plus bracket occurrences."""
    return sum(1 if isinstance(l, str) else 1 + degree(l) for l in w)


def breadth(w: Word) -> int:
    return len(w)


def depth(w: Word) -> int:
    """Maximal bracket nesting."""
    return max((1 + depth(l) for l in w if not isinstance(l, str)), default=0)


def generators(w: Word) -> list[str]:
    """Generator occurrences, left to right."""
    out: list[str] = []
    for l in w:
        if isinstance(l, str):
            out.append(l)
        else:
            out.extend(generators(l))
    return out


def has_empty_bracket(w: Word) -> bool:
    return any(not isinstance(l, str) and (not l or has_empty_bracket(l)) for l in w)


def in_variant(w: Word, variant: Variant) -> bool:
    if variant is Variant.UNITARY:
        return True
    return bool(w) and not has_empty_bracket(w)


# ------------------------------------------------------------------ placements


def _sequence_at(host: Word, path: Sequence[int]) -> Word:
    seq = host
    for i in path:
        if not (0 <= i < len(seq)) or isinstance(seq[i], str):
            raise PlacementError(f"path {tuple(path)} does not descend into a bracket")
        seq = seq[i]
    return seq


def factor(host: Word, p: Placement) -> Word:
    seq = _sequence_at(host, p.path)
    if p.length < 0 or p.start < 0 or p.start + p.length > len(seq):
        raise PlacementError(f"placement {p} out of range")
    return seq[p.start : p.start + p.length]


def substitute(host: Word, p: Placement, replacement: Word) -> Word:
    """Replace the factor at ``p`` by ``replacement`` (``q|_replacement``)."""
    factor(host, p)

    def rebuild(seq: Word, depth_: int) -> Word:
        if depth_ == len(p.path):
            return seq[: p.start] + tuple(replacement) + seq[p.start + p.length :]
        i = p.path[depth_]
        return seq[:i] + (rebuild(seq[i], depth_ + 1),) + seq[i + 1 :]

    return rebuild(host, 0)


def context(host: Word, p: Placement) -> Word:
    """The one-hole word ``q`` with ``q|_factor = host``; the hole is ``STAR``."""
    return substitute(host, p, (STAR,))


def fill(q: Word, u: Word, hole: str = STAR) -> Word:
    """Replace the hole letter ``hole`` in ``q`` by the word ``u``."""
    out: list = []
    for l in q:
        if l == hole:
            out.extend(u)
        elif isinstance(l, str):
            out.append(l)
        else:
            out.append(fill(l, u, hole))
    return tuple(out)


def hole_placement(q: Word, hole: str = STAR) -> Placement:
    """Placement of the (unique) hole letter of ``q``."""
    def walk(seq: Word, path: tuple):
        for i, l in enumerate(seq):
            if l == hole:
                return Placement(path, i, 1)
            if not isinstance(l, str):
                found = walk(l, path + (i,))
                if found is not None:
                    return found
        return None

    found = walk(q, ())
    if found is None:
        raise ValueError(f"no hole {hole!r} in context")
    return found


def compose_placement(q: Word, inner: Placement, hole: str = STAR) -> Placement:
    """Placement in ``fill(q, u)`` of the factor sitting at ``inner`` in ``u``."""
    h = hole_placement(q, hole)
    if inner.path:
        return Placement(h.path + (h.start + inner.path[0],) + inner.path[1:], inner.start, inner.length)
    return Placement(h.path, h.start + inner.start, inner.length)


def iter_sequences(host: Word, path: tuple = ()) -> Iterator[tuple[tuple, Word]]:
    """Every letter sequence of ``host`` (the top one and each bracket's
    content) with its path, in canonical preorder."""
    yield path, host
    for i, l in enumerate(host):
        if not isinstance(l, str):
            yield from iter_sequences(l, path + (i,))


def all_placements(host: Word) -> list[Placement]:
    """All nonempty factor occurrences, in canonical order."""
    out = []
    for path, seq in iter_sequences(host):
        n = len(seq)
        for s in range(n):
            for ln in range(1, n - s + 1):
                out.append(Placement(path, s, ln))
    out.sort(key=Placement.sort_key)
    return out


def subword_placements(host: Word, u: Word) -> list[Placement]:
    if not u:
        raise ValueError("empty factors are not searched for")
    k = len(u)
    out = []
    for path, seq in iter_sequences(host):
        for s in range(len(seq) - k + 1):
            if seq[s : s + k] == u:
                out.append(Placement(path, s, k))
    out.sort(key=Placement.sort_key)
    return out


def is_subword(u: Word, host: Word) -> bool:
    return bool(subword_placements(host, u))


def _covers(outer: Placement, inner: Placement) -> bool:
    """Does ``inner`` lie within the letters spanned by ``outer``?"""
    d = len(outer.path)
    if inner.path[:d] != outer.path:
        return False
    if len(inner.path) == d:
        return outer.start <= inner.start and inner.start + inner.length <= outer.start + outer.length
    return outer.start <= inner.path[d] < outer.start + outer.length


def classify(host: Word, p1: Placement, p2: Placement) -> Relation:
    """Relation between two distinct nonempty placements in ``host``."""
    factor(host, p1)
    factor(host, p2)
    if p1 == p2:
        raise PlacementError("identical placements")
    if p1.length == 0 or p2.length == 0:
        raise PlacementError("empty placements cannot be classified")
    if _covers(p1, p2) or _covers(p2, p1):
        return Relation.NESTED
    if p1.path == p2.path:
        a1, b1 = p1.start, p1.start + p1.length
        a2, b2 = p2.start, p2.start + p2.length
        if b1 <= a2 or b2 <= a1:
            return Relation.SEPARATED
        return Relation.INTERSECTING
    return Relation.SEPARATED


def separated_witness(host: Word, p1: Placement, p2: Placement) -> Word:
    """The two-hole word ``p`` with ``host = p|_{factor(p1), factor(p2)}``
    (holes ``STAR1``, ``STAR2``)."""
    if classify(host, p1, p2) is not Relation.SEPARATED:
        raise PlacementError("placements are not separated")
    # Replace the later/deeper one first so the other placement stays valid.
    first, second = sorted([(p1, STAR1), (p2, STAR2)], key=lambda t: t[0].sort_key())
    w = substitute(host, second[0], (second[1],))
    return substitute(w, first[0], (first[1],))


def two_hole_fill(p: Word, a: Word, b: Word) -> Word:
    return fill(fill(p, a, STAR1), b, STAR2)


# ---------------------------------------------------------------- enumeration


def _letters_of_degree(j: int, alphabet: tuple, unitary: bool) -> list:
    if j == 1:
        gens = list(alphabet)
        return gens + ([()] if unitary else [])
    return [w for w in _words_of_degree(j - 1, alphabet, unitary) if w or unitary]


@lru_cache(maxsize=None)
def _words_of_degree(d: int, alphabet: tuple, unitary: bool) -> tuple:
    """All words of exact degree ``d`` (empty word included at d=0), unsorted."""
    if d == 0:
        return ((),)
    out = []
    for j in range(1, d + 1):
        for letter in _letters_of_degree(j, alphabet, unitary):
            for rest in _words_of_degree(d - j, alphabet, unitary):
                out.append((letter,) + rest)
    return tuple(out)


def words_of_degree(d: int, alphabet: Sequence[str], variant: Variant = Variant.UNITARY) -> list[Word]:
    """Words of exact degree ``d``, sorted by the dT order."""
    from .order import OrderHandle

    alphabet = tuple(alphabet)
    unitary = variant is Variant.UNITARY
    if d == 0 and not unitary:
        return []
    ws = list(_words_of_degree(d, alphabet, unitary))
    ws.sort(key=OrderHandle(alphabet).key)
    return ws


def enumerate_words(degree_bound: int, alphabet: Sequence[str], variant: Variant = Variant.UNITARY) -> Iterator[Word]:
    """Every word of degree <= bound exactly once, in (degree, dT) order."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    for d in range(degree_bound + 1):
        yield from words_of_degree(d, alphabet, variant)


def count_words(degree_: int, alphabet_size: int, variant: Variant = Variant.UNITARY) -> int:
    """Number of words of exact degree, by the letter/word convolution."""
    if degree_ < 0:
        raise ValueError("degree must be nonnegative")
    unitary = variant is Variant.UNITARY
    w = [1]
    for d in range(1, degree_ + 1):
        total = 0
        for j in range(1, d + 1):
            letters = alphabet_size + (1 if unitary else 0) if j == 1 else w[j - 1]
            total += letters * w[d - j]
        w.append(total)
    if degree_ == 0 and not unitary:
        return 0
    return w[degree_]
