"""Averaging operators: the rewriting systems built from

    phi(u1, u2)    = [u1][u2]        - [[u1] u2]
    psi(u1, u2)    = [u1 [u2]]       - [[u1] u2]
    varphi(u1, u2) = [[[u1] u2]]     - [[[u1]] u2]

together with the pattern description of the irreducible words, a basis
audit, quotient arithmetic, and an evaluation oracle in a concrete averaging
algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .engine import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    Mode,
    NonTermination,
    RewriteSystem,
    local_confluence_report,
    normalize,
)
from .linear import LinComb, as_lincomb, bracket, monomial, mul, show_poly
from .order import OrderHandle
from .terms import Placement, Variant, Word, degree, enumerate_words, generators, iter_sequences, show


def _ok(u: Word, variant: Variant) -> bool:
    return variant is Variant.UNITARY or bool(u)


class _Averaging:
    arity = 2
    scheme_side = 0
    homogeneous = True
    name = ""

    def monomials(self, args: tuple) -> tuple:
        raise NotImplementedError

    def polynomial(self, args: tuple) -> LinComb:
        a, b = self.monomials(args)
        return LinComb({a: 1}) - LinComb({b: 1})

    def matches(self, host: Word, variant: Variant) -> Iterator[tuple[int, tuple, Placement]]:
        for path, seq in iter_sequences(host):
            yield from self._matches_in(path, seq, variant)

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (family_by_name, (self.name,))


def _b_shape(path, i, letter, variant):
    # [[u1] u2]
    if letter and not isinstance(letter[0], str):
        u1, u2 = letter[0], letter[1:]
        if _ok(u1, variant) and _ok(u2, variant):
            return (u1, u2), Placement(path, i, 1)
    return None


class _Phi(_Averaging):
    name = "phi"

    def monomials(self, args):
        u1, u2 = args
        return (u1, u2), ((u1,) + u2,)

    def _matches_in(self, path, seq, variant):
        for i, letter in enumerate(seq):
            if isinstance(letter, str):
                continue
            if i + 1 < len(seq) and not isinstance(seq[i + 1], str):
                u1, u2 = letter, seq[i + 1]
                if _ok(u1, variant) and _ok(u2, variant):
                    yield 0, (u1, u2), Placement(path, i, 2)
            hit = _b_shape(path, i, letter, variant)
            if hit:
                yield 1, hit[0], hit[1]


class _Psi(_Averaging):
    name = "psi"

    def monomials(self, args):
        u1, u2 = args
        return (u1 + (u2,),), ((u1,) + u2,)

    def _matches_in(self, path, seq, variant):
        for i, letter in enumerate(seq):
            if isinstance(letter, str):
                continue
            if letter and not isinstance(letter[-1], str):
                u1, u2 = letter[:-1], letter[-1]
                if _ok(u1, variant) and _ok(u2, variant):
                    yield 0, (u1, u2), Placement(path, i, 1)
            hit = _b_shape(path, i, letter, variant)
            if hit:
                yield 1, hit[0], hit[1]


class _Varphi(_Averaging):
    name = "varphi"

    def monomials(self, args):
        u1, u2 = args
        return (((u1,) + u2,),), (((u1,),) + u2,)

    def _matches_in(self, path, seq, variant):
        for i, letter in enumerate(seq):
            if isinstance(letter, str) or not letter:
                continue
            inner = letter[0]
            if isinstance(inner, str):
                continue
            # [[[u1] u2]]
            if len(letter) == 1 and inner and not isinstance(inner[0], str):
                u1, u2 = inner[0], inner[1:]
                if _ok(u1, variant) and _ok(u2, variant):
                    yield 0, (u1, u2), Placement(path, i, 1)
            # [[[u1]] u2]
            if len(inner) == 1 and not isinstance(inner[0], str):
                u1, u2 = inner[0], letter[1:]
                if _ok(u1, variant) and _ok(u2, variant):
                    yield 1, (u1, u2), Placement(path, i, 1)


PHI = _Phi()
PSI = _Psi()
VARPHI = _Varphi()
FAMILIES = {"phi": PHI, "psi": PSI, "varphi": VARPHI}


def family_by_name(name: str):
    try:
        return FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown averaging family {name!r}") from None


def build_system(
    families: Iterable[str] = ("phi", "psi", "varphi"),
    mode: Mode = Mode.SCHEME,
    variant: Variant = Variant.UNITARY,
    order: OrderHandle | None = None,
) -> RewriteSystem:
    fams = tuple(family_by_name(f) if isinstance(f, str) else f for f in families)
    if mode is Mode.ORDER and order is None:
        raise ValueError("order mode needs an OrderHandle")
    kwargs = {} if order is None else {"order": order}
    names = [f.name for f in fams]
    name = "averaging" if names == ["phi", "psi", "varphi"] else "averaging[" + ",".join(names) + "]"
    return RewriteSystem(fams, mode, variant, name=name, **kwargs)


# ------------------------------------------------------------ pattern basis


def irr_pattern(w: Word, variant: Variant = Variant.UNITARY) -> bool:
    """True iff ``w`` has no subword ``[u1][u2]``, ``[u1 [u2]]`` or
    ``[[u1] u2]^(2)`` with ``u1, u2`` drawn from the variant's words.

    The zero instance ``psi(1, 1)`` is not a leading term, so ``[[1]]`` by
    itself does not disqualify a word."""
    for _, seq in iter_sequences(w):
        for i, letter in enumerate(seq):
            if isinstance(letter, str):
                continue
            if i + 1 < len(seq) and not isinstance(seq[i + 1], str):
                if _ok(letter, variant) and _ok(seq[i + 1], variant):
                    return False
            if letter and not isinstance(letter[-1], str):
                u1, u2 = letter[:-1], letter[-1]
                if _ok(u1, variant) and _ok(u2, variant) and (u1 or u2):
                    return False
            if len(letter) == 1 and letter[0] and not isinstance(letter[0], str) and not isinstance(letter[0][0], str):
                u1, u2 = letter[0][0], letter[0][1:]
                if _ok(u1, variant) and _ok(u2, variant):
                    # [[[u1]]] (u2 = 1) is the psi(1, [u1]) shape and returned above
                    assert u2, "varphi(u1, 1) shape not subsumed by psi"
                    return False
    return True


def irr_enumerate(degree_bound: int, alphabet: Sequence[str], variant: Variant = Variant.UNITARY) -> Iterator[Word]:
    return (w for w in enumerate_words(degree_bound, alphabet, variant) if irr_pattern(w, variant))


def irr_count(degree_: int, alphabet_size: int, variant: Variant = Variant.UNITARY) -> int:
    from .terms import words_of_degree

    alphabet = [f"x{i}" for i in range(1, alphabet_size + 1)]
    return sum(1 for w in words_of_degree(degree_, alphabet, variant) if irr_pattern(w, variant))


# ------------------------------------------------------- evaluation oracle


@dataclass
class EvalAlgebra:
    """``Q^n`` with pointwise product and ``A(v) = v[0] * (1, ..., 1)``."""

    dimension: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        rng = random.Random(self.seed)
        for _ in range(20):
            u = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(self.dimension))
            v = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(self.dimension))
            left = self.product(self.average(u), self.average(v))
            assert left == self.average(self.product(self.average(u), v))
            assert left == self.average(self.product(u, self.average(v)))

    @property
    def one(self) -> tuple:
        return (1,) * self.dimension

    def average(self, v: tuple) -> tuple:
        return (v[0],) * self.dimension

    @staticmethod
    def product(u: tuple, v: tuple) -> tuple:
        return tuple(a * b for a, b in zip(u, v))

    def zero(self) -> tuple:
        return (0,) * self.dimension


def eval_word(w: Word, assignment: Mapping[str, tuple], alg: EvalAlgebra) -> tuple:
    out = alg.one
    for letter in w:
        if isinstance(letter, str):
            try:
                v = assignment[letter]
            except KeyError:
                raise KeyError(f"no value assigned to {letter!r}") from None
            if len(v) != alg.dimension:
                raise ValueError(f"value of {letter!r} has dimension {len(v)}, expected {alg.dimension}")
        else:
            v = alg.average(eval_word(letter, assignment, alg))
        out = tuple(a * b for a, b in zip(out, v))
    return out


def evaluate(f, assignment: Mapping[str, tuple], alg: EvalAlgebra) -> tuple:
    """Image of a bracketed polynomial under the operated morphism fixed by
    ``assignment``."""
    acc = [0] * alg.dimension
    for w, c in as_lincomb(f):
        v = eval_word(w, assignment, alg)
        for k in range(alg.dimension):
            acc[k] += c * v[k]
    return tuple(acc)


def random_assignment(names: Iterable[str], alg: EvalAlgebra, rng: random.Random) -> dict:
    return {x: tuple(rng.randint(-50, 50) for _ in range(alg.dimension)) for x in names}


def eval_equal(f, g, alg: EvalAlgebra, rng: random.Random, trials: int = 20) -> bool:
    """``f`` and ``g`` agree under ``trials`` random assignments."""
    f, g = as_lincomb(f), as_lincomb(g)
    names = sorted({x for h in (f, g) for w in h.support() for x in generators(w)})
    diff = f - g
    for _ in range(trials):
        a = random_assignment(names, alg, rng)
        if any(evaluate(diff, a, alg)):
            return False
    return True


# ---------------------------------------------------------------- auditing


@dataclass
class AuditRecord:
    degree: int
    word: Word
    pattern_irr: bool
    engine_irr: bool
    nf: LinComb | str
    nf_irreducible: bool
    coset_ok: bool

    @property
    def mismatch(self) -> bool:
        return self.pattern_irr != self.engine_irr

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "word": show(self.word),
            "pattern_irr": self.pattern_irr,
            "engine_irr": self.engine_irr,
            "nf": self.nf if isinstance(self.nf, str) else show_poly(self.nf),
        }


@dataclass
class BasisAudit:
    system: dict
    degree_bound: int
    alphabet: tuple
    records: list = field(default_factory=list)

    @property
    def mismatches(self) -> list[AuditRecord]:
        return [r for r in self.records if r.mismatch]

    @property
    def failures(self) -> list[AuditRecord]:
        """Words whose normal form is missing, reducible, or in the wrong coset."""
        return [r for r in self.records if isinstance(r.nf, str) or not r.nf_irreducible or not r.coset_ok]

    def to_json(self) -> dict:
        return {
            **self.system,
            "degree_bound": self.degree_bound,
            "alphabet": list(self.alphabet),
            "words": len(self.records),
            "mismatches": [r.to_json() for r in self.mismatches],
            "failures": [r.to_json() for r in self.failures],
        }


def basis_audit(
    degree_bound: int,
    alphabet: Sequence[str],
    system: RewriteSystem,
    budget: int = DEFAULT_BUDGET,
    alg: EvalAlgebra | None = None,
    seed: int = 0,
    trials: int = 5,
) -> BasisAudit:
    """Compare pattern irreducibility against engine irreducibility for every
    word up to the bound, and check each normal form."""
    alg = alg or EvalAlgebra(3, seed)
    rng = random.Random(seed)
    audit = BasisAudit(system.describe(), degree_bound, tuple(alphabet))
    for w in enumerate_words(degree_bound, alphabet, system.variant):
        engine_irr = not system.redexes(w)
        try:
            nf = normalize(w, system, budget)
        except NonTermination:
            nf = "cycle"
        except BudgetExceeded:
            nf = "budget"
        if isinstance(nf, str):
            nf_irr, coset = False, False
        else:
            nf_irr = all(not system.redexes(t) for t in nf.support())
            coset = eval_equal(monomial(w), nf, alg, rng, trials)
        audit.records.append(AuditRecord(degree(w), w, irr_pattern(w, system.variant), engine_irr, nf, nf_irr, coset))
    return audit


# ------------------------------------------------------- quotient arithmetic


def nf_product(f, g, system: RewriteSystem, budget: int = DEFAULT_BUDGET) -> LinComb:
    return normalize(mul(as_lincomb(f), as_lincomb(g)), system, budget)


def nf_bracket(f, system: RewriteSystem, budget: int = DEFAULT_BUDGET) -> LinComb:
    return normalize(bracket(as_lincomb(f)), system, budget)


_confluence_cache: dict = {}


def _confluent_upto(system: RewriteSystem, bound: int, alphabet: tuple, budget: int) -> bool | None:
    key = (repr(system.describe()), bound, alphabet)
    if key not in _confluence_cache:
        rep = local_confluence_report(bound, alphabet, system, budget)
        lc, term = rep.locally_confluent, rep.terminating
        _confluence_cache[key] = None if lc is None or term is None else (lc and term)
    return _confluence_cache[key]


def member(f, system: RewriteSystem, budget: int = DEFAULT_BUDGET, confluent: bool | None = None) -> bool | None:
    """Ideal membership by rewriting to zero.

    ``True`` is always sound.  A nonzero normal form proves non-membership
    only for a confluent system; ``confluent`` may be supplied, otherwise it
    is established by a sweep over the degrees and generators of ``f``
    (homogeneous systems only).  Returns ``None`` when it cannot be."""
    f = as_lincomb(f)
    if not normalize(f, system, budget):
        return True
    if confluent is None and system.homogeneous:
        bound = max(degree(w) for w in f.support())
        alphabet = tuple(sorted({x for w in f.support() for x in generators(w)}))
        confluent = _confluent_upto(system, bound, alphabet, budget)
    return False if confluent else None
