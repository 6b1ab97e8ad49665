"""Linear term rewriting on bracketed polynomials.

A :class:`RewriteSystem` is a list of rule families.  A family knows how to
spot occurrences of each of its monomial shapes inside a word and how to
instantiate its polynomial; the system decides which side of an instance is
the left-hand side (the family's designated side in scheme mode, the
order-maximal monomial in order mode).

Every decision procedure here is exhaustive: closures are computed in full
up to a vertex budget, and a search that hits the budget reports an unknown
verdict instead of guessing.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Protocol, Sequence

from .linear import LinComb, ZERO, as_lincomb, monomial, show_poly, substitute_context
from .order import DEFAULT_ORDER, OrderHandle
from .terms import Placement, Variant, Word, context, enumerate_words, factor, show

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**6


class Mode(enum.Enum):
    SCHEME = "scheme"
    ORDER = "order"


class RewriteError(RuntimeError):
    pass


class BudgetExceeded(RewriteError):
    pass


class NonTermination(RewriteError):
    """The cycle guard saw a state twice."""

    def __init__(self, message: str, cycle: list | None = None):
        super().__init__(message)
        self.cycle = cycle or []


class StaleChoice(ValueError):
    pass


class Family(Protocol):
    name: str
    arity: int
    scheme_side: int
    homogeneous: bool

    def monomials(self, args: tuple) -> tuple: ...

    def polynomial(self, args: tuple) -> LinComb: ...

    def matches(self, host: Word, variant: Variant) -> Iterable[tuple[int, tuple, Placement]]: ...


@dataclass(frozen=True)
class RuleInstance:
    family: str
    args: tuple
    lhs: Word
    rhs: LinComb
    source: Mode

    @property
    def u1(self) -> Word:
        return self.args[0]

    @property
    def u2(self) -> Word:
        return self.args[1]

    def to_json(self) -> dict:
        out = {"family": self.family}
        for k, a in enumerate(self.args, 1):
            out[f"u{k}"] = show(a)
        out["lhs"] = show(self.lhs)
        out["rhs"] = show_poly(self.rhs)
        return out


class Redex(NamedTuple):
    rule: RuleInstance
    placement: Placement


class Step(NamedTuple):
    source: LinComb
    monomial: Word
    rule: RuleInstance
    placement: Placement
    target: LinComb

    def to_json(self) -> dict:
        rule = {"family": self.rule.family}
        for k, a in enumerate(self.rule.args, 1):
            rule[f"u{k}"] = show(a)
        return {
            "from": show_poly(self.source),
            "monomial": show(self.monomial),
            "rule": rule,
            "placement": self.placement.to_json(),
            "to": show_poly(self.target),
        }


@dataclass
class RewriteSystem:
    families: tuple
    mode: Mode = Mode.SCHEME
    variant: Variant = Variant.UNITARY
    order: OrderHandle = DEFAULT_ORDER
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.families = tuple(self.families)

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_cache"] = {}
        return state

    @property
    def homogeneous(self) -> bool:
        """True when every rule preserves degree and generator multiset, so
        reachable sets from a monomial are finite."""
        return all(getattr(f, "homogeneous", False) for f in self.families)

    def describe(self) -> dict:
        return {
            "system": self.name or "+".join(f.name for f in self.families),
            "families": [f.name for f in self.families],
            "mode": self.mode.value,
            "variant": self.variant.value,
            "order": self.order.describe(),
        }

    def orient(self, family, side: int, args: tuple) -> RuleInstance | None:
        """The rule instance whose lhs is the ``side`` monomial of
        ``family(args)``, or None when that monomial is not the lhs."""
        poly = family.polynomial(args)
        if not poly:
            return None
        matched = family.monomials(args)[side]
        if self.mode is Mode.SCHEME:
            if side != family.scheme_side:
                return None
            lhs = matched
        else:
            lhs = self.order.max(poly.support())
            if lhs != matched:
                return None
        c = poly[lhs]
        if not c:
            return None
        rhs = monomial(lhs) - poly.scale(1 / c)
        return RuleInstance(family.name, tuple(args), lhs, rhs, self.mode)

    def redexes(self, w: Word) -> list[Redex]:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        found = {}
        for fi, fam in enumerate(self.families):
            for side, args, p in fam.matches(w, self.variant):
                rule = self.orient(fam, side, args)
                if rule is None:
                    continue
                k = (p, rule.lhs, rule.rhs)
                if k not in found:
                    found[k] = (p.sort_key(), fi, tuple(self.order.key(a) for a in args), show_poly(rule.rhs), Redex(rule, p))
        out = [t[-1] for t in sorted(found.values(), key=lambda t: t[:-1])]
        if len(self._cache) < 500_000:
            self._cache[w] = out
        return out


def find_redexes(w: Word, system: RewriteSystem) -> list[Redex]:
    return system.redexes(w)


def is_irreducible(w: Word, system: RewriteSystem) -> bool:
    return not system.redexes(w)


def _apply(f: LinComb, t: Word, rule: RuleInstance, p: Placement) -> LinComb:
    c = f[t]
    replaced = substitute_context(context(t, p), rule.rhs)
    return f - monomial(t, c) + replaced.scale(c)


def one_step(f, system: RewriteSystem) -> list[Step]:
    """All one-step rewrites of ``f``: every support monomial at every redex."""
    f = as_lincomb(f)
    out = []
    for t, _ in sorted(f, key=lambda tc: system.order.key(tc[0]), reverse=True):
        for rule, p in system.redexes(t):
            out.append(Step(f, t, rule, p, _apply(f, t, rule, p)))
    return out


def reducts(f, system: RewriteSystem) -> list[LinComb]:
    """Distinct one-step reducts, in first-seen order."""
    seen = {}
    for s in one_step(f, system):
        seen.setdefault(s.target, None)
    return list(seen)


def rewrite_once(f, system: RewriteSystem, choice: tuple) -> LinComb:
    """Rewrite the support monomial ``t`` at the chosen redex."""
    f = as_lincomb(f)
    t, rule, p = choice
    if t not in f:
        raise StaleChoice(f"{show(t)} is not in the support")
    try:
        here = factor(t, p)
    except ValueError as exc:
        raise StaleChoice(str(exc)) from exc
    if here != rule.lhs or Redex(rule, p) not in system.redexes(t):
        raise StaleChoice(f"no such redex at {p} in {show(t)}")
    return _apply(f, t, rule, p)


# ------------------------------------------------------------------- closures


@dataclass
class ClosureReport:
    root: LinComb
    vertices: list
    edges: list
    normal_forms: list
    has_cycle: bool
    truncated: bool
    budget_used: int
    cycle: list = field(default_factory=list)

    def adjacency(self) -> dict:
        adj: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.source].append(e.target)
        return adj

    def to_json(self, with_edges: bool = False) -> dict:
        out = {
            "root": show_poly(self.root),
            "vertices": [show_poly(v) for v in self.vertices],
            "normal_forms": [show_poly(v) for v in self.normal_forms],
            "has_cycle": self.has_cycle,
            "cycle": [show_poly(v) for v in self.cycle],
            "truncated": self.truncated,
            "budget_used": self.budget_used,
            "edge_count": len(self.edges),
        }
        if with_edges:
            out["edges"] = [e.to_json() for e in self.edges]
        return out


def _find_cycle(vertices: list, adj: dict) -> list:
    """A cycle in the graph (as a vertex list), or [] if it is acyclic."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {v: WHITE for v in vertices}
    for s in vertices:
        if colour[s] != WHITE:
            continue
        stack = [(s, iter(adj.get(s, ())))]
        colour[s] = GREY
        path = [s]
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[v] = BLACK
                stack.pop()
                path.pop()
                continue
            c = colour.get(nxt, BLACK)
            if c == GREY:
                return path[path.index(nxt):]
            if c == WHITE:
                colour[nxt] = GREY
                stack.append((nxt, iter(adj.get(nxt, ()))))
                path.append(nxt)
    return []


def closure(root, system: RewriteSystem, budget: int = DEFAULT_BUDGET) -> ClosureReport:
    """Breadth-first reachable rewrite graph from ``root``, at most ``budget``
    vertices."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    root = as_lincomb(root)
    seen = {root: None}
    order = [root]
    queue = deque([root])
    edges = []
    normal = []
    truncated = False
    while queue:
        v = queue.popleft()
        steps = one_step(v, system)
        if not steps:
            normal.append(v)
        for s in steps:
            if s.target not in seen:
                if len(seen) >= budget:
                    truncated = True
                    continue
                seen[s.target] = None
                order.append(s.target)
                queue.append(s.target)
            edges.append(s)
    adj: dict = {v: [] for v in order}
    for e in edges:
        adj[e.source].append(e.target)
    cyc = _find_cycle(order, adj)
    return ClosureReport(root, order, edges, normal, bool(cyc), truncated, len(order), cyc)


# --------------------------------------------------------------- normal forms


def _normalize_steps(f, system: RewriteSystem, budget: int) -> Iterator[Step]:
    f = as_lincomb(f)
    seen = {f}
    steps = 0
    while True:
        choice = None
        for t in sorted(f.support(), key=system.order.key, reverse=True):
            rx = system.redexes(t)
            if rx:
                choice = (t, rx[0])
                break
        if choice is None:
            return
        if steps >= budget:
            raise BudgetExceeded(f"normalization exceeded {budget} steps")
        t, (rule, p) = choice
        g = _apply(f, t, rule, p)
        yield Step(f, t, rule, p, g)
        steps += 1
        if g in seen:
            raise NonTermination(f"rewriting revisits {show_poly(g)}", [g])
        seen.add(g)
        f = g


def normalize_trace(f, system: RewriteSystem, budget: int = DEFAULT_BUDGET) -> tuple[LinComb, list[Step]]:
    """Normal form by the fixed strategy (dT-greatest reducible monomial,
    first redex) together with the steps taken."""
    trace = list(_normalize_steps(f, system, budget))
    return (trace[-1].target if trace else as_lincomb(f)), trace


def normalize(f, system: RewriteSystem, budget: int = DEFAULT_BUDGET) -> LinComb:
    return normalize_trace(f, system, budget)[0]


# ---------------------------------------------------------------- joinability


@dataclass(frozen=True)
class JoinResult:
    joinable: bool | None
    witness: LinComb | None = None

    def to_json(self) -> dict:
        return {
            "joinable": "unknown" if self.joinable is None else self.joinable,
            "witness": None if self.witness is None else show_poly(self.witness),
        }


def _reach(start, adj: dict) -> dict:
    seen = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj.get(v, ()):
            if w not in seen:
                seen[w] = None
                queue.append(w)
    return seen


def _meet(a, b, adj: dict):
    """First vertex reachable from ``b`` that is also reachable from ``a``."""
    ra = _reach(a, adj)
    if b in ra:
        return b
    seen = {b}
    queue = deque([b])
    while queue:
        v = queue.popleft()
        for w in adj.get(v, ()):
            if w in ra:
                return w
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return None


def joinable(f, g, system: RewriteSystem, budget: int = DEFAULT_BUDGET) -> JoinResult:
    f, g = as_lincomb(f), as_lincomb(g)
    if f == g:
        return JoinResult(True, f)
    cf = closure(f, system, budget)
    cg = closure(g, system, budget)
    in_f = set(cf.vertices)
    for v in cg.vertices:
        if v in in_f:
            return JoinResult(True, v)
    if cf.truncated or cg.truncated:
        return JoinResult(None)
    return JoinResult(False)


# ------------------------------------------------------------ bounded sweeps


class Fork(NamedTuple):
    word: Word
    left: LinComb
    right: LinComb

    def to_json(self) -> dict:
        return {"word": show(self.word), "left": show_poly(self.left), "right": show_poly(self.right)}


@dataclass
class ConfluenceReport:
    system: dict
    degree_bound: int
    alphabet: tuple
    words_checked: int = 0
    forks_checked: int = 0
    offenders: list = field(default_factory=list)
    unknowns: list = field(default_factory=list)
    cycles: list = field(default_factory=list)
    truncated_roots: list = field(default_factory=list)

    @property
    def locally_confluent(self) -> bool | None:
        if self.offenders:
            return False
        if self.unknowns:
            return None
        return True

    @property
    def terminating(self) -> bool | None:
        if self.cycles:
            return False
        if self.truncated_roots:
            return None
        return True

    def offender_words(self) -> list[Word]:
        return list(dict.fromkeys(f.word for f in self.offenders))

    def to_json(self) -> dict:
        lc = self.locally_confluent
        term = self.terminating
        return {
            **self.system,
            "degree_bound": self.degree_bound,
            "alphabet": list(self.alphabet),
            "words_checked": self.words_checked,
            "forks_checked": self.forks_checked,
            "locally_confluent": "unknown" if lc is None else lc,
            "terminating": "unknown" if term is None else term,
            "offenders": [f.to_json() for f in self.offenders],
            "unknowns": [f.to_json() for f in self.unknowns],
            "cycles": [show(w) for w in self.cycles],
            "truncated_roots": [show(w) for w in self.truncated_roots],
        }


def _check_roots(system: RewriteSystem, roots: Sequence[Word], budget: int) -> tuple:
    offenders, unknowns, cycles, truncated = [], [], [], []
    forks = 0
    for w in roots:
        cl = closure(w, system, budget)
        if cl.has_cycle:
            cycles.append(w)
        if cl.truncated:
            truncated.append(w)
        adj = cl.adjacency()
        root = cl.root
        rs = list(dict.fromkeys(adj[root]))
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                forks += 1
                meet = _meet(rs[i], rs[j], adj)
                if meet is not None:
                    continue
                fork = Fork(w, rs[i], rs[j])
                (unknowns if cl.truncated else offenders).append(fork)
    return len(roots), forks, offenders, unknowns, cycles, truncated


def _chunks(seq: list, n: int) -> list[list]:
    return [seq[i::n] for i in range(n)]


def _run_roots(system: RewriteSystem, roots: list, budget: int, workers: int) -> list[tuple]:
    if workers <= 1 or len(roots) < 2:
        return [_check_roots(system, roots, budget)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(_check_roots, system, chunk, budget) for chunk in _chunks(roots, workers)]
        return [f.result() for f in futs]


def local_confluence_report(
    degree_bound: int,
    alphabet: Sequence[str],
    system: RewriteSystem,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> ConfluenceReport:
    """Check every one-step fork of every word up to ``degree_bound``."""
    roots = list(enumerate_words(degree_bound, alphabet, system.variant))
    rank = {w: i for i, w in enumerate(roots)}
    report = ConfluenceReport(system.describe(), degree_bound, tuple(alphabet))
    for n, forks, off, unk, cyc, trunc in _run_roots(system, roots, budget, workers):
        report.words_checked += n
        report.forks_checked += forks
        report.offenders += off
        report.unknowns += unk
        report.cycles += cyc
        report.truncated_roots += trunc

    def fork_key(f: Fork):
        return (rank[f.word], show_poly(f.left), show_poly(f.right))

    report.offenders.sort(key=fork_key)
    report.unknowns.sort(key=fork_key)
    report.cycles.sort(key=rank.__getitem__)
    report.truncated_roots.sort(key=rank.__getitem__)
    log.debug("confluence sweep: %d words, %d forks", report.words_checked, report.forks_checked)
    return report


@dataclass
class GSReport:
    confluence: ConfluenceReport
    zero_failures: list
    irreducible_count: int

    @property
    def verdict(self) -> bool | None:
        if self.zero_failures or self.confluence.locally_confluent is False:
            return False
        if self.confluence.terminating is False:
            return False
        if self.confluence.locally_confluent is None or self.confluence.terminating is None:
            return None
        return True

    @property
    def label(self) -> str:
        return f"GS basis up to degree {self.confluence.degree_bound}"

    def to_json(self) -> dict:
        v = self.verdict
        return {
            "label": self.label,
            "gs_basis": "unknown" if v is None else v,
            "irreducible_count": self.irreducible_count,
            "zero_failures": [show(w) for w in self.zero_failures],
            "confluence": self.confluence.to_json(),
        }


def gs_verdict(
    degree_bound: int,
    alphabet: Sequence[str],
    system: RewriteSystem,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> GSReport:
    """Bounded Groebner-Shirshov check: local confluence of every word up to
    the bound, plus ``w - nf(w) ->* 0`` for each such word."""
    if system.mode is not Mode.ORDER:
        raise ValueError("a Groebner-Shirshov verdict needs a monomial order (order mode)")
    conf = local_confluence_report(degree_bound, alphabet, system, budget, workers)
    failures = []
    irreducible = 0
    for w in enumerate_words(degree_bound, alphabet, system.variant):
        if not system.redexes(w):
            irreducible += 1
        try:
            nf = normalize(w, system, budget)
            if normalize(monomial(w) - nf, system, budget):
                failures.append(w)
        except RewriteError:
            failures.append(w)
    return GSReport(conf, failures, irreducible)
