"""The dT monomial order on bracketed words.

``u < v`` iff ``degree(u) < degree(v)``, or the degrees agree and the letter
sequences compare lexicographically, where

* a generator beats a bracket,
* generators compare by their position in the alphabet,
* two brackets compare their contents lexicographically by the same letter
  rule (degree is not consulted again), a proper prefix being smaller.

The whole comparison is a tuple comparison on :meth:`OrderHandle.key`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Sequence

from .terms import Word, degree, show


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _natural(name: str):
    return tuple(int(t) if t.isdigit() else t for t in re.findall(r"\d+|\D+", name))


@dataclass(frozen=True)
class OrderHandle:
    """A dT order.  ``alphabet`` lists generators smallest first; names not in
    it (or every name, when it is ``None``) compare after the listed ones, in
    natural order (``x2 < x10``)."""

    alphabet: tuple | None = None
    kind: str = "dT"
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.alphabet is not None:
            object.__setattr__(self, "alphabet", tuple(self.alphabet))
            if len(set(self.alphabet)) != len(self.alphabet):
                raise ValueError("alphabet has repeated symbols")
        if self.kind != "dT":
            raise ValueError(f"unknown order kind {self.kind!r}")

    def __getstate__(self):
        return {"alphabet": self.alphabet, "kind": self.kind}

    def __setstate__(self, state):
        object.__setattr__(self, "alphabet", state["alphabet"])
        object.__setattr__(self, "kind", state["kind"])
        object.__setattr__(self, "_cache", {})

    def _gen_rank(self, name: str):
        if self.alphabet is not None and name in self.alphabet:
            return (0, self.alphabet.index(name))
        return (1, _natural(name))

    def _seq_key(self, w: Word) -> tuple:
        return tuple((1, self._gen_rank(l)) if isinstance(l, str) else (0, self._seq_key(l)) for l in w)

    def key(self, w: Word) -> tuple:
        k = self._cache.get(w)
        if k is None:
            k = (degree(w), self._seq_key(w))
            if len(self._cache) < 2_000_000:
                self._cache[w] = k
        return k

    def compare(self, u: Word, v: Word) -> Ordering:
        if u == v:
            return Ordering.EQUAL
        return Ordering.LESS if self.key(u) < self.key(v) else Ordering.GREATER

    def max(self, words):
        return max(words, key=self.key)

    def sorted(self, words, reverse: bool = False) -> list:
        return sorted(words, key=self.key, reverse=reverse)

    def describe(self) -> str:
        return "dT" if self.alphabet is None else "dT(" + " < ".join(self.alphabet) + ")"


DEFAULT_ORDER = OrderHandle()


def dt_order(alphabet: Sequence[str] | None = None) -> OrderHandle:
    return OrderHandle(None if alphabet is None else tuple(alphabet))


def compare(u: Word, v: Word, order: OrderHandle = DEFAULT_ORDER) -> Ordering:
    return order.compare(u, v)


@dataclass(frozen=True)
class OrientationAudit:
    family: str
    u1: Word
    u2: Word
    pattern_lhs: Word
    order_lhs: Word
    agrees: bool

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "u1": show(self.u1),
            "u2": show(self.u2),
            "pattern_lhs": show(self.pattern_lhs),
            "order_lhs": show(self.order_lhs),
            "agrees": self.agrees,
        }


def audit_orientation(family, u1: Word, u2: Word, order: OrderHandle = DEFAULT_ORDER) -> OrientationAudit:
    """Compare the pattern side of an averaging instance with the side the
    order picks.  ``family`` is a family object or one of ``"phi"``,
    ``"psi"``, ``"varphi"``."""
    from .averaging import family_by_name

    fam = family_by_name(family) if isinstance(family, str) else family
    pattern_side, other = fam.monomials((u1, u2))
    if pattern_side == other:
        raise ValueError(f"{fam.name}({show(u1)}, {show(u2)}) is the zero polynomial")
    order_lhs = order.max([pattern_side, other])
    return OrientationAudit(fam.name, u1, u2, pattern_side, order_lhs, order_lhs == pattern_side)


def leftmost_spine_has_generator(w: Word) -> bool:
    """Follow first letters down through brackets; True iff the chain ends at
    a generator rather than at the empty word."""
    while w:
        first = w[0]
        if isinstance(first, str):
            return True
        w = first
    return False
