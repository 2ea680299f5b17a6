import random

import pytest
from hypothesis import given, settings, strategies as st

from mucalc import parse
from mucalc.closure import closure, closure_by_rules, in_context, standard_context
from mucalc.formula import (
    AddressError, Substitution, alpha_key, at, free_occurrences, free_vars,
    make_well_named, occurrences,
)
from mucalc.fragments import (
    OccurrenceClass, build_graph, classify_all, has_bad_occurrence, in_C, in_C0,
    is_almost_good,
)
from mucalc.random_gen import random_formula

P = parse
NB, BX, VB = OccurrenceClass.NOT_BAD, OccurrenceClass.BOXED, OccurrenceClass.VERY_BAD
EXAMPLE = "(mu z1. y0 /\\ (nu z0. z0 /\\ [a] z1)) \\/ (<a> y0 /\\ y1)"


def keys(fs):
    return {alpha_key(g) for g in fs}


class TestStandardContext:
    def test_single_binder(self):
        f = P("mu z. x \\/ <a> z")
        occ = (0,)
        assert at(f, occ) == P("x \\/ <a> z")
        ctx = standard_context(f, occ)
        assert ctx == (Substitution.of(("z", f)),)

    def test_root_is_empty(self):
        assert standard_context(P("mu z. <a> z"), ()) == ()

    def test_nested(self):
        f = P("mu z1. nu z2. z2 /\\ z1")
        ctx = standard_context(f, (0, 0))
        assert [tuple(s) for s in ctx] == [("z2",), ("z1",)]
        assert ctx[0]["z2"] == P("nu z2. z2 /\\ z1")
        assert ctx[1]["z1"] == f

    def test_in_context_is_closed(self):
        f = P("mu z. x \\/ <a> nu w. w /\\ z")
        for occ, _ in occurrences(f):
            g = in_context(f, occ)
            assert free_vars(g) <= {"x"}


class TestClosure:
    def test_example(self):
        f = P("mu z. x \\/ <a> z")
        expected = [f, P("x \\/ <a> (mu z. x \\/ <a> z)"), P("x"), P("<a> mu z. x \\/ <a> z")]
        assert set(closure(f)) == keys(expected)

    def test_trivial(self):
        assert set(closure(P("x"))) == keys([P("x")])
        assert set(closure(P("<a> x /\\ y"))) == keys([P("<a> x /\\ y"), P("<a> x"), P("x"), P("y")])

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**9))
    def test_context_and_rule_closures_agree(self, seed):
        f = make_well_named(random_formula(random.Random(seed), 6, actions=("a", "b")))
        assert set(closure(f)) == set(closure_by_rules(f))


class TestGraph:
    def test_shapes(self):
        G = build_graph(P("mu z. <a> z"))
        assert len(G.nodes) == 3 and len(G.back_edges) == 1
        G = build_graph(P("x"))
        assert len(G.nodes) == 1 and not G.tree_edges and not G.back_edges
        assert len(build_graph(P(EXAMPLE)).back_edges) == 2


class TestClassify:
    def test_worked_example(self):
        rows = classify_all(P(EXAMPLE))
        by = {(o, x): c for o, x, c in rows}
        ys = sorted(o for o, x, _ in rows if x == "y0")
        assert by[(ys[0], "y0")] is VB
        assert by[(ys[1], "y0")] is NB
        assert [c for o, x, c in rows if x == "y1"] == [NB]

    def test_z1_boxed_in_its_scope(self):
        inner = at(P(EXAMPLE), (0, 0, 1))
        assert [c for *_, c in classify_all(inner, {"z1"})] == [BX]

    def test_bound_occurrence_rejected(self):
        from mucalc.fragments import classify_occurrence
        f = P(EXAMPLE)
        occ = next(o for o, g in occurrences(f) if g == P("z1"))
        with pytest.raises(AddressError):
            classify_occurrence(build_graph(f), occ, "z1")

    def test_examples(self):
        assert [c for *_, c in classify_all(P("mu z. x \\/ [a] z"))] == [VB]
        assert [c for *_, c in classify_all(P("[a] x"))] == [BX]
        assert [c for *_, c in classify_all(P("<a> x"))] == [NB]

    def test_restricted_vars(self):
        rows = classify_all(P("x /\\ [a] y"), {"y"})
        assert [(x, c) for _, x, c in rows] == [("y", BX)]


class TestFragments:
    @pytest.mark.parametrize("s,c,c0", [
        ("mu z. x \\/ <a> z", True, True),
        ("mu z. x \\/ [a] z", False, False),
        ("nu z. x /\\ <a> z", True, False),
        ("<a> x /\\ y", True, True),
        ("[a] y /\\ nu z. [a] z", True, True),
        ("[a] x", False, False),
        ("~x", False, False),
    ])
    def test_membership(self, s, c, c0):
        assert in_C(P(s), {"x"}) is c
        assert in_C0(P(s), {"x"}) is c0

    def test_c0_included_in_c(self):
        rng = random.Random(3)
        for _ in range(300):
            f = random_formula(rng, 6, props=("x", "y"), negatable=("y",))
            if in_C0(f, {"x"}):
                assert in_C(f, {"x"})

    def test_almost_good(self):
        assert is_almost_good(P("[a] x"), {"x"})
        assert not is_almost_good(P("mu z. x \\/ [a] z"), {"x"})

    def test_bound_X_rejected(self):
        with pytest.raises(ValueError):
            in_C(P("mu x. <a> x"), {"x"})

    def test_grammar_agrees_with_graph(self):
        rng = random.Random(11)
        for _ in range(500):
            f = random_formula(rng, 7, actions=("a", "b"), props=("x", "y", "w"), negatable=("w",))
            assert in_C(f, {"x", "y"}) == (not has_bad_occurrence(f, {"x", "y"}))


def test_free_occurrences_addresses():
    f = P("x /\\ mu x. <a> x")
    assert free_occurrences(f, "x") == [(0,)]
