"""Operated polynomial identities and the rewriting systems they generate.

An OPI body is a bracketed polynomial whose generators ``x1 .. xk`` are
metavariables.  Instantiation replaces each ``xi`` by a word; rule families
match each body monomial structurally against a host word, a metavariable
matching any factor (any nonempty factor in the nonunitary variant).
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from .engine import Mode, RewriteSystem
from .linear import LinComb, parse_poly
from .order import DEFAULT_ORDER, OrderHandle
from .terms import Placement, Variant, Word, iter_sequences

_META = re.compile(r"x([1-9][0-9]*)$")


class OPIError(ValueError):
    pass


def _meta_index(name: str) -> int | None:
    m = _META.match(name)
    return int(m.group(1)) if m else None


def _metavars(w: Word) -> Counter:
    c: Counter = Counter()
    for l in w:
        if isinstance(l, str):
            c[l] += 1
        else:
            c.update(_metavars(l))
    return c


def _brackets(w: Word) -> int:
    return sum(0 if isinstance(l, str) else 1 + _brackets(l) for l in w)


@dataclass(frozen=True)
class OPI:
    name: str
    arity: int
    body: LinComb

    def __post_init__(self):
        if self.arity < 1:
            raise OPIError("an OPI needs arity >= 1")
        for w in self.body.support():
            for v in _metavars(w):
                k = _meta_index(v)
                if k is None or k > self.arity:
                    raise OPIError(f"{self.name}: {v!r} is not one of x1..x{self.arity}")

    @property
    def metavariables(self) -> tuple:
        return tuple(f"x{i}" for i in range(1, self.arity + 1))

    def to_json(self) -> dict:
        from .linear import show_poly

        return {"name": self.name, "arity": self.arity, "body": show_poly(self.body)}


def _subst(w: Word, env: dict) -> Word:
    out: list = []
    for l in w:
        if isinstance(l, str):
            if l in env:
                out.extend(env[l])
            else:
                out.append(l)
        else:
            out.append(_subst(l, env))
    return tuple(out)


def instantiate(p: OPI, args: Sequence[Word]) -> LinComb:
    """Image of the body under ``xi -> args[i-1]``."""
    if len(args) != p.arity:
        raise OPIError(f"{p.name} takes {p.arity} arguments, got {len(args)}")
    env = dict(zip(p.metavariables, args))
    return LinComb([(_subst(w, env), c) for w, c in p.body])


def make_opi(name: str, body: str, arity: int | None = None) -> OPI:
    f = parse_poly(body)
    if arity is None:
        idx = [_meta_index(v) for w in f.support() for v in _metavars(w)]
        if any(i is None for i in idx):
            raise OPIError(f"{name}: body uses non-metavariable generators")
        arity = max(idx, default=1)
    return OPI(name, arity, f)


_BUILTIN_BODIES = {
    "differential": "[x1 x2] - [x1] x2 - x1 [x2]",
    "reynolds": "[[x1] [x2]] + [x1] [x2] - [x1 [x2]] - [[x1] x2]",
    "averaging_phi": "[x1] [x2] - [[x1] x2]",
    "averaging_psi": "[x1 [x2]] - [[x1] x2]",
    "averaging_varphi": "[[[x1] x2]] - [[[x1]] x2]",
}


def builtin(name: str, lam=None):
    """One of the example OPIs; ``"averaging"`` gives the list [phi, psi, varphi]."""
    if name == "averaging":
        return [builtin("averaging_phi"), builtin("averaging_psi"), builtin("averaging_varphi")]
    if name == "rota_baxter":
        if lam is None:
            raise OPIError("rota_baxter needs a weight")
        lam = Fraction(lam)
        body = parse_poly("[x1] [x2] - [x1 [x2]] - [[x1] x2]") - parse_poly("[x1 x2]").scale(lam)
        return OPI("rota_baxter", 2, body)
    try:
        return make_opi(name, _BUILTIN_BODIES[name], 2)
    except KeyError:
        raise OPIError(f"unknown OPI {name!r}") from None


def load_opis(path: str | Path) -> list[OPI]:
    """OPIs from JSON: one ``{"name", "arity", "body"}`` object or a list."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    return [make_opi(d["name"], d["body"], d.get("arity")) for d in data]


# ------------------------------------------------------------------ matching


def _match_seq(pat: Word, tgt: Word, env: dict, unitary: bool) -> Iterator[dict]:
    """All extensions of ``env`` making ``pat`` equal to the whole of ``tgt``."""

    def go(pi: int, ti: int, env: dict):
        if pi == len(pat):
            if ti == len(tgt):
                yield env
            return
        letter = pat[pi]
        if isinstance(letter, str):
            if letter in env:
                u = env[letter]
                if tgt[ti : ti + len(u)] == u:
                    yield from go(pi + 1, ti + len(u), env)
                return
            if _meta_index(letter) is None:
                if ti < len(tgt) and tgt[ti] == letter:
                    yield from go(pi + 1, ti + 1, env)
                return
            for end in range(ti if unitary else ti + 1, len(tgt) + 1):
                yield from go(pi + 1, end, {**env, letter: tgt[ti:end]})
        else:
            if ti < len(tgt) and not isinstance(tgt[ti], str):
                for e in _match_seq(letter, tgt[ti], env, unitary):
                    yield from go(pi + 1, ti + 1, e)

    yield from go(0, 0, env)


@dataclass
class OpiFamily:
    """A rule family derived from an OPI; sides are the body monomials in
    descending dT order."""

    opi: OPI
    scheme_side: int = 0
    patterns: tuple = field(init=False)
    homogeneous: bool = field(init=False)

    def __post_init__(self):
        self.patterns = tuple(DEFAULT_ORDER.sorted(self.opi.body.support(), reverse=True))
        if not self.patterns:
            raise OPIError(f"{self.opi.name}: zero OPI gives no rules")
        if not 0 <= self.scheme_side < len(self.patterns):
            raise OPIError(f"{self.opi.name}: pattern side {self.scheme_side} out of range")
        shapes = {(_brackets(m), tuple(sorted(_metavars(m).items()))) for m in self.patterns}
        self.homogeneous = len(shapes) == 1

    @property
    def name(self) -> str:
        return self.opi.name

    @property
    def arity(self) -> int:
        return self.opi.arity

    def _complete(self, side: int) -> bool:
        return set(_metavars(self.patterns[side])) == set(self.opi.metavariables)

    def monomials(self, args: tuple) -> tuple:
        env = dict(zip(self.opi.metavariables, args))
        return tuple(_subst(m, env) for m in self.patterns)

    def polynomial(self, args: tuple) -> LinComb:
        return instantiate(self.opi, args)

    def matches(self, host: Word, variant: Variant, sides: Sequence[int] | None = None):
        unitary = variant is Variant.UNITARY
        sides = range(len(self.patterns)) if sides is None else sides
        names = self.opi.metavariables
        for side in sides:
            pat = self.patterns[side]
            if not pat or not self._complete(side):
                continue
            for path, seq in iter_sequences(host):
                n = len(seq)
                for s in range(n):
                    for e in range(s + 1, n + 1):
                        seen = set()
                        for env in _match_seq(pat, seq[s:e], {}, unitary):
                            args = tuple(env[v] for v in names)
                            if args not in seen:
                                seen.add(args)
                                yield side, args, Placement(path, s, e - s)


@dataclass(frozen=True)
class PatternSide:
    """Scheme orientation: the designated monomial, given either as an index
    into the body monomials sorted in descending dT order or as the monomial
    itself."""

    index: int = 0
    monomial: Word | None = None

    def resolve(self, p: OPI) -> int:
        support = DEFAULT_ORDER.sorted(p.body.support(), reverse=True)
        if self.monomial is None:
            return self.index
        if self.monomial not in support:
            raise OPIError(f"{p.name}: designated monomial is not in the body")
        return support.index(self.monomial)


ORDER = "order"


def to_system(
    opis: Sequence[OPI],
    orientation: PatternSide | Sequence[PatternSide] | OrderHandle | str = PatternSide(0),
    variant: Variant = Variant.UNITARY,
    order: OrderHandle | None = None,
    name: str = "",
) -> RewriteSystem:
    """Rewriting system of a set of OPIs.  ``orientation`` is a
    :class:`PatternSide` (or one per OPI) for scheme mode, or ``"order"`` /
    an :class:`OrderHandle` for order mode."""
    by_order = isinstance(orientation, OrderHandle) or orientation == ORDER
    if isinstance(orientation, OrderHandle):
        order = orientation
    families = []
    for k, p in enumerate(opis):
        if by_order:
            fam = OpiFamily(p, 0)
            for side in range(len(fam.patterns)):
                if not fam._complete(side):
                    raise OPIError(f"{p.name}: monomial {side} misses a metavariable; cannot orient by order")
        else:
            ps = orientation if isinstance(orientation, PatternSide) else orientation[k]
            idx = ps.resolve(p)
            fam = OpiFamily(p, idx)
            if not fam.patterns[idx] or not fam._complete(idx):
                raise OPIError(f"{p.name}: designated monomial must contain every metavariable")
        families.append(fam)
    kwargs = {} if order is None else {"order": order}
    mode = Mode.ORDER if by_order else Mode.SCHEME
    return RewriteSystem(tuple(families), mode, variant, name=name or "+".join(p.name for p in opis), **kwargs)
