"""Command-line workbench.

    opalg normalize --system averaging --mode order "[x1] [x2]"
    opalg closure --system averaging --mode scheme "[[[1]]]" --json
    opalg confluence --system averaging --variant nonunitary --max-degree 6 --generators 2

Exit status: 0 success, 1 usage or parse error, 2 budget exceeded or unknown
verdict, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import averaging, engine, opi
from .engine import DEFAULT_BUDGET, BudgetExceeded, Mode, NonTermination
from .linear import LinComb, PolySyntaxError, monomial, parse_poly, show_poly
from .order import audit_orientation, dt_order
from .terms import (
    Placement,
    PlacementError,
    Variant,
    WordSyntaxError,
    classify,
    count_words,
    enumerate_words,
    parse,
    separated_witness,
    show,
    subword_placements,
)

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--system", default="averaging",
                   help="averaging | averaging-novarphi | differential | rb:<weight> | reynolds | <file.json>")
    p.add_argument("--mode", choices=["scheme", "order"], default="scheme")
    p.add_argument("--variant", choices=["unitary", "nonunitary"], default="unitary")
    p.add_argument("--max-degree", type=int, default=4, metavar="N")
    p.add_argument("--generators", type=int, default=2, metavar="K", help="alphabet x1..xK")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, metavar="N",
                   help="vertex/step budget (default: %(default)s)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--trace", action="store_true", help="include rewrite traces")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="opalg", description="Linear rewriting on bracketed words.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    add("normalize", "normal form by the fixed strategy").add_argument("poly")
    add("reducts", "one-step reducts").add_argument("poly")
    add("closure", "reachable rewrite graph").add_argument("poly")
    p = add("joinable", "decide joinability of two polynomials")
    p.add_argument("left")
    p.add_argument("right")
    add("confluence", "bounded local-confluence sweep")
    add("gs", "bounded Groebner-Shirshov verdict (order mode)")
    p = add("basis", "pattern basis of the free averaging algebra")
    p.add_argument("action", nargs="?", choices=["list", "count", "audit"], default="list")
    p.add_argument("--audit", action="store_true", help="same as the audit action")
    add("member", "ideal membership by rewriting to 0").add_argument("poly")
    p = add("orient", "audit the orientation of one averaging instance")
    p.add_argument("family", choices=["phi", "psi", "varphi"])
    p.add_argument("u1")
    p.add_argument("u2")
    p = add("placements", "occurrences of a subword")
    p.add_argument("host")
    p.add_argument("factor")
    p = add("relation", "classify two placements")
    p.add_argument("host")
    p.add_argument("p1", help='placement JSON, e.g. {"path":[],"start":0,"len":1}')
    p.add_argument("p2")
    add("eval-check", "rewrite invariance under the averaging evaluation oracle")
    return parser


def alphabet_of(args) -> list[str]:
    return [f"x{i}" for i in range(1, args.generators + 1)]


def resolve_system(args) -> engine.RewriteSystem:
    mode = Mode(args.mode)
    variant = Variant(args.variant)
    order = dt_order(alphabet_of(args))
    name = args.system
    if name == "averaging":
        return averaging.build_system(("phi", "psi", "varphi"), mode, variant, order)
    if name == "averaging-novarphi":
        return averaging.build_system(("phi", "psi"), mode, variant, order)
    if name in ("differential", "reynolds"):
        opis = [opi.builtin(name)]
    elif name.startswith("rb:"):
        try:
            opis = [opi.builtin("rota_baxter", name[3:])]
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad Rota-Baxter weight in {name!r}") from exc
    elif name.endswith(".json"):
        try:
            opis = opi.load_opis(name)
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load OPI file {name!r}: {exc}") from exc
    else:
        raise UsageError(f"unknown system {name!r}")
    orientation = order if mode is Mode.ORDER else opi.PatternSide(0)
    return opi.to_system(opis, orientation, variant, order, name=name)


def _poly(text: str) -> LinComb:
    return parse_poly(text)


def _verdict(v) -> str:
    return "unknown" if v is None else str(v).lower()


# ------------------------------------------------------------------ commands


def cmd_normalize(args, system):
    nf, trace = engine.normalize_trace(_poly(args.poly), system, args.budget)
    out = {**system.describe(), "input": args.poly, "normal_form": show_poly(nf), "steps": len(trace)}
    if args.trace:
        out["trace"] = [s.to_json() for s in trace]
    return out, show_poly(nf), EXIT_OK


def cmd_reducts(args, system):
    steps = engine.one_step(_poly(args.poly), system)
    out = {**system.describe(), "input": args.poly, "steps": [s.to_json() for s in steps]}
    text = "\n".join(f"{s.rule.family}@{json.dumps(s.placement.to_json())}: {show_poly(s.target)}" for s in steps)
    return out, text, EXIT_OK


def cmd_closure(args, system):
    rep = engine.closure(_poly(args.poly), system, args.budget)
    out = {**system.describe(), **rep.to_json(with_edges=args.trace)}
    text = (f"vertices: {len(rep.vertices)}\nnormal forms: {', '.join(show_poly(v) for v in rep.normal_forms) or '-'}\n"
            f"has cycle: {_verdict(rep.has_cycle)}\ntruncated: {_verdict(rep.truncated)}")
    return out, text, EXIT_UNKNOWN if rep.truncated else EXIT_OK


def cmd_joinable(args, system):
    res = engine.joinable(_poly(args.left), _poly(args.right), system, args.budget)
    out = {**system.describe(), "left": args.left, "right": args.right, **res.to_json()}
    text = f"joinable: {_verdict(res.joinable)}" + (f" (at {show_poly(res.witness)})" if res.witness is not None else "")
    return out, text, EXIT_UNKNOWN if res.joinable is None else EXIT_OK


def cmd_confluence(args, system):
    rep = engine.local_confluence_report(args.max_degree, alphabet_of(args), system, args.budget, args.workers)
    lines = [f"locally confluent: {_verdict(rep.locally_confluent)}",
             f"terminating: {_verdict(rep.terminating)}",
             f"words: {rep.words_checked}, forks: {rep.forks_checked}"]
    lines += [f"offender: {show(f.word)} -> {show_poly(f.left)} | {show_poly(f.right)}" for f in rep.offenders]
    lines += [f"cycle through: {show(w)}" for w in rep.cycles]
    unknown = rep.locally_confluent is None or rep.terminating is None
    return rep.to_json(), "\n".join(lines), EXIT_UNKNOWN if unknown else EXIT_OK


def cmd_gs(args, system):
    if system.mode is not Mode.ORDER:
        raise UsageError("gs needs --mode order")
    rep = engine.gs_verdict(args.max_degree, alphabet_of(args), system, args.budget, args.workers)
    text = f"{rep.label}: {_verdict(rep.verdict)}"
    return rep.to_json(), text, EXIT_UNKNOWN if rep.verdict is None else EXIT_OK


def cmd_basis(args, system):
    variant = Variant(args.variant)
    alphabet = alphabet_of(args)
    action = "audit" if args.audit else args.action
    if action == "list":
        words = [show(w) for w in averaging.irr_enumerate(args.max_degree, alphabet, variant)]
        return {"variant": variant.value, "alphabet": alphabet, "words": words}, "\n".join(words), EXIT_OK
    if action == "count":
        rows = [{"degree": d, "words": count_words(d, len(alphabet), variant),
                 "irreducible": averaging.irr_count(d, len(alphabet), variant)} for d in range(args.max_degree + 1)]
        text = "\n".join(f"{r['degree']}\t{r['words']}\t{r['irreducible']}" for r in rows)
        return {"variant": variant.value, "alphabet": alphabet, "counts": rows}, text, EXIT_OK
    audit = averaging.basis_audit(args.max_degree, alphabet, system, args.budget, seed=args.seed)
    records = [r.to_json() for r in audit.records]
    bad_coset = [r for r in audit.records if not isinstance(r.nf, str) and not r.coset_ok]
    if bad_coset:
        raise InvariantViolation(f"normal form leaves the coset for {show(bad_coset[0].word)}")
    out = {**audit.to_json(), "records": records}
    text = "\n".join(f"{r['word']}\tpattern={_verdict(r['pattern_irr'])}\tengine={_verdict(r['engine_irr'])}\tnf={r['nf']}"
                     for r in records if r["pattern_irr"] != r["engine_irr"]) or "no mismatches"
    return out, text, EXIT_OK


def cmd_member(args, system):
    res = averaging.member(_poly(args.poly), system, args.budget)
    out = {**system.describe(), "input": args.poly, "member": "unknown" if res is None else res}
    return out, f"member: {_verdict(res)}", EXIT_UNKNOWN if res is None else EXIT_OK


def cmd_orient(args, system):
    rec = audit_orientation(args.family, parse(args.u1), parse(args.u2), system.order)
    d = rec.to_json()
    return d, f"pattern lhs {d['pattern_lhs']}, order lhs {d['order_lhs']}, agrees: {_verdict(rec.agrees)}", EXIT_OK


def cmd_placements(args, system):
    host, u = parse(args.host), parse(args.factor)
    ps = subword_placements(host, u)
    return ({"host": args.host, "factor": args.factor, "placements": [p.to_json() for p in ps]},
            "\n".join(json.dumps(p.to_json()) for p in ps), EXIT_OK)


def cmd_relation(args, system):
    host = parse(args.host)
    try:
        p1 = Placement.from_json(json.loads(args.p1))
        p2 = Placement.from_json(json.loads(args.p2))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad placement JSON: {exc}") from exc
    rel = classify(host, p1, p2)
    out = {"host": args.host, "relation": rel.value}
    if rel.value == "separated":
        out["witness"] = show(separated_witness(host, p1, p2))
    return out, rel.value, EXIT_OK


def cmd_eval_check(args, system):
    alg = averaging.EvalAlgebra(3, args.seed)
    rng = random.Random(args.seed)
    edges = bad = 0
    first_bad = None
    for w in enumerate_words(args.max_degree, alphabet_of(args), system.variant):
        for s in engine.one_step(monomial(w), system):
            edges += 1
            if not averaging.eval_equal(s.source, s.target, alg, rng, 20):
                bad += 1
                first_bad = first_bad or s
    out = {**system.describe(), "edges": edges, "violations": bad,
           "first_violation": None if first_bad is None else first_bad.to_json()}
    if bad and system.name.startswith("averaging"):
        raise InvariantViolation(f"{bad} rewrite edges change the evaluation")
    return out, f"edges: {edges}, violations: {bad}", EXIT_OK


COMMANDS = {
    "normalize": cmd_normalize,
    "reducts": cmd_reducts,
    "closure": cmd_closure,
    "joinable": cmd_joinable,
    "confluence": cmd_confluence,
    "gs": cmd_gs,
    "basis": cmd_basis,
    "member": cmd_member,
    "orient": cmd_orient,
    "placements": cmd_placements,
    "relation": cmd_relation,
    "eval-check": cmd_eval_check,
}


def _emit(args, payload, text):
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    elif text:
        sys.stdout.write(text + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    def fail(code, kind, message):
        if args.json:
            _emit(args, {"error": {"type": kind, "message": message}}, "")
        else:
            sys.stderr.write(f"opalg: {kind}: {message}\n")
        return code

    try:
        system = resolve_system(args)
        payload, text, code = COMMANDS[args.command](args, system)
    except (UsageError, WordSyntaxError, PolySyntaxError, PlacementError, opi.OPIError) as exc:
        return fail(EXIT_USAGE, type(exc).__name__, str(exc))
    except (BudgetExceeded, NonTermination) as exc:
        return fail(EXIT_UNKNOWN, type(exc).__name__, str(exc))
    except (InvariantViolation, AssertionError) as exc:
        return fail(EXIT_INVARIANT, type(exc).__name__, str(exc))
    except ValueError as exc:
        return fail(EXIT_USAGE, type(exc).__name__, str(exc))
    _emit(args, payload, text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
