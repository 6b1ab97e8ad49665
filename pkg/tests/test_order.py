from __future__ import annotations

import itertools
import pickle

import pytest

from opalg.order import (
    DEFAULT_ORDER,
    OrderHandle,
    Ordering,
    audit_orientation,
    compare,
    dt_order,
    leftmost_spine_has_generator,
)
from opalg.terms import ONE, STAR, Variant, degree, fill, parse, words_of_degree

import samplers
from oracles import contexts

X = ("x",)
X12 = ("x1", "x2")
LESS, EQUAL, GREATER = Ordering.LESS, Ordering.EQUAL, Ordering.GREATER


@pytest.mark.parametrize(
    "u, v",
    [
        ("[[x1] x2]", "[x1] [x2]"),
        ("[[x1] x2]", "[x1 [x2]]"),
        ("[[[x1]] x2]", "[[[x1] x2]]"),
        ("[1] [x]", "[[1] x]"),
        ("x", "[1] [1]"),
        ("x1", "x2"),
        ("[1] x", "x [1]"),
    ],
)
def test_compare_examples(u, v):
    o = dt_order(X12)
    a, b = parse(u), parse(v)
    assert compare(a, b, o) is LESS
    assert compare(b, a, o) is GREATER
    assert compare(a, a, o) is EQUAL


def test_alphabet_order_and_natural_fallback():
    assert compare(parse("y"), parse("x"), dt_order(["y", "x"])) is LESS
    assert compare(parse("x2"), parse("x10"), DEFAULT_ORDER) is LESS
    # listed names come before unlisted ones
    assert compare(parse("z"), parse("a"), dt_order(["z"])) is LESS


def test_handle_validation_and_description():
    with pytest.raises(ValueError):
        OrderHandle(("x", "x"))
    with pytest.raises(ValueError):
        OrderHandle(kind="lex")
    assert dt_order(X12).describe() == "dT(x1 < x2)"
    assert DEFAULT_ORDER.describe() == "dT"


def test_handle_pickles_and_hashes():
    o = dt_order(X12)
    o.key(parse("[x1]"))
    o2 = pickle.loads(pickle.dumps(o))
    assert o2 == o and hash(o2) == hash(o)
    assert o2.key(parse("[x1]")) == o.key(parse("[x1]"))


def test_max_and_sorted():
    o = dt_order(X12)
    ws = [parse(t) for t in ["[x1] [x2]", "[[x1] x2]", "x1"]]
    assert o.max(ws) == parse("[x1] [x2]")
    assert o.sorted(ws) == [parse("x1"), parse("[[x1] x2]"), parse("[x1] [x2]")]


# ------------------------------------------------------------- axioms


def test_totality_and_antisymmetry_pairwise_degree_5():
    o = dt_order(X)
    ws = samplers.pool(5, X)
    for u, v in itertools.product(ws, repeat=2):
        c = compare(u, v, o)
        assert (c is EQUAL) == (u == v)
        assert compare(v, u, o) == -c
        if degree(u) < degree(v):
            assert c is LESS


def test_keys_injective_two_generators_degree_6():
    o = dt_order(X12)
    ws = samplers.pool(6, X12)
    assert len({o.key(w) for w in ws}) == len(ws)


@pytest.mark.parametrize("alphabet, bound", [(X, 6), (X12, 5)])
def test_degree_classes_sort_strictly(alphabet, bound):
    o = dt_order(alphabet)
    for d in range(bound + 1):
        cls = words_of_degree(d, alphabet, Variant.UNITARY)
        keys = [o.key(w) for w in cls]
        assert all(a < b for a, b in zip(keys, keys[1:]))


def test_monomial_axiom_pairwise_one_generator():
    # every u < v of degree <= 4 under every context of degree <= 3
    o = dt_order(X)
    ws = samplers.pool(4, X)
    for q in contexts(3, X):
        filled = {w: o.key(fill(q, w)) for w in ws}
        for u, v in itertools.combinations(ws, 2):
            if compare(u, v, o) is LESS:
                assert filled[u] < filled[v]
            else:
                assert filled[v] < filled[u]


def test_monomial_axiom_two_generators():
    # pairwise compatibility follows from monotonicity along the sorted chain
    o = dt_order(X12)
    ws = o.sorted(samplers.pool(4, X12))
    for q in contexts(3, X12):
        keys = [o.key(fill(q, w)) for w in ws]
        assert all(a < b for a, b in zip(keys, keys[1:])), q


# --------------------------------------------------------------- audits


def test_audit_examples():
    o = dt_order(X12)
    a = audit_orientation("phi", parse("x1"), parse("x2"), o)
    assert a.agrees
    a = audit_orientation("psi", ONE, parse("x"), o)
    assert a.pattern_lhs == a.order_lhs == parse("[[x]]")
    assert a.agrees
    a = audit_orientation("phi", ONE, ONE, o)
    assert a.pattern_lhs == parse("[1] [1]")
    assert a.order_lhs == parse("[[1]]")
    assert not a.agrees
    assert a.to_json() == {
        "family": "phi", "u1": "1", "u2": "1", "pattern_lhs": "[1] [1]", "order_lhs": "[[1]]", "agrees": False,
    }


@pytest.mark.parametrize("family, u1, u2", [("psi", "1", "1"), ("varphi", "x", "1"), ("varphi", "1", "1")])
def test_audit_rejects_zero_instances(family, u1, u2):
    with pytest.raises(ValueError):
        audit_orientation(family, parse(u1), parse(u2))


def test_audit_agrees_on_generator_spines():
    o = dt_order(X12)
    ws = samplers.pool(3, X12)
    checked = 0
    for u1, u2 in itertools.product(ws, repeat=2):
        if leftmost_spine_has_generator(u1):
            for fam in ("phi", "psi"):
                assert audit_orientation(fam, u1, u2, o).agrees, (fam, u1, u2)
                checked += 1
        if u2:
            assert audit_orientation("varphi", u1, u2, o).agrees, (u1, u2)
            checked += 1
    assert checked > 10_000


def test_spine_disagreements_exist():
    o = dt_order(X12)
    flipped = [u2 for u2 in samplers.pool(3, X12) if not audit_orientation("phi", ONE, u2, o).agrees]
    assert parse("x1") in flipped


def test_leftmost_spine():
    assert leftmost_spine_has_generator(parse("[[x] y]"))
    assert not leftmost_spine_has_generator(parse("[[1] x]"))
    assert not leftmost_spine_has_generator(ONE)


def test_no_monomial_order_realizes_both_degenerate_patterns():
    # phi(1,1) pattern-side [1][1] > [[1]]; bracketing both sides must keep
    # the direction, but psi(1,[1]) wants [[[1]]] > [[1][1]].
    from opalg.averaging import PHI, PSI

    big, small = PHI.monomials((ONE, ONE))
    assert (big, small) == (parse("[1] [1]"), parse("[[1]]"))
    lifted_big, lifted_small = fill(((STAR,),), big), fill(((STAR,),), small)
    psi_big, psi_small = PSI.monomials((ONE, parse("[1]")))
    assert (psi_big, psi_small) == (lifted_small, lifted_big)
