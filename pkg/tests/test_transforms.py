import random

import pytest

from mucalc import parse
from mucalc.formula import FormulaError, Var, alpha_equal, apply_subst, free_vars
from mucalc.fragments import in_C, is_almost_good
from mucalc.kripke import evaluate, random_model
from mucalc.random_gen import random_formula
from mucalc.transforms import (
    boxing, continuity_normal_form, flatten, lift, lift_with_name, master_box,
    referee_scheme, submodel_scheme, sum_formula, thomason_scheme,
    thomason_translate, totalize, translate,
)
from conftest import equivalent_on_small_models


def P(s):
    return parse(s, reserved=True)


class TestLift:
    def test_examples(self):
        assert lift(P("[a] x"), "x") == P("[a] x#b")
        assert lift(P("mu z. x \\/ [a] z"), "x") == P("mu z. x \\/ [a] z")
        assert lift(P("x /\\ [a] (x \\/ y)"), "x") == P("x /\\ [a] (x#b \\/ y)")

    def test_round_trip(self):
        rng = random.Random(5)
        for _ in range(200):
            f = random_formula(rng, 6, props=("x", "y"), negatable=("y",))
            g, bar = lift_with_name(f, "x")
            assert apply_subst(g, {bar: Var("x")}) == f

    def test_bar_name_avoids_clash(self):
        g, bar = lift_with_name(P("[a] x /\\ x#b"), "x")
        assert bar != "x#b"


class TestFlatten:
    def test_examples(self):
        assert flatten(P("[a] x"), "x") == P("[a] false")
        assert flatten(P("<a> x"), "x") == P("<a> x")
        assert flatten(P("mu z. x \\/ [a] z"), "x") == P("mu z. x \\/ [a] z")


class TestBoxing:
    def test_golden(self):
        got = boxing(P("x \\/ mu z. x \\/ z \\/ [a] (x /\\ z)"), {"x"})
        want = P("x \\/ mu z. x \\/ z \\/ [a] (x /\\ mu z#b. mu z. x \\/ z \\/ [a] (x /\\ z#b))")
        assert alpha_equal(got, want)

    def test_base_case(self):
        assert boxing(P("<a> x"), {"x"}) == P("<a> x")

    def test_recursive_case(self):
        got = boxing(P("mu z. x \\/ [a] z"), {"x"})
        assert alpha_equal(got, P("mu z. x \\/ [a] (mu z#b. mu z. x \\/ [a] z#b)"))
        assert is_almost_good(got, {"x"})

    def test_random_outputs_almost_good_and_equivalent(self):
        rng = random.Random(8)
        for _ in range(60):
            f = random_formula(rng, 5, props=("x", "y"), negatable=("y",))
            g = boxing(f, {"x"})
            assert is_almost_good(g, {"x"})
            assert equivalent_on_small_models(f, g, max_states=2, props=("x", "y"))


class TestNormalForm:
    def test_examples(self):
        assert continuity_normal_form(P("<a> x"), "x") == P("<a> x")
        assert continuity_normal_form(P("[a] x"), "x") == P("[a] false")
        got = continuity_normal_form(P("mu z. x \\/ [a] z"), "x")
        assert alpha_equal(got, P("mu z. x \\/ [a] (mu z#b. mu z. false \\/ [a] z#b)"))

    def test_lands_in_C(self):
        rng = random.Random(9)
        for _ in range(300):
            f = random_formula(rng, 6, actions=("a", "b"), props=("x", "y"), negatable=("y",))
            assert in_C(continuity_normal_form(f, "x"), {"x"})

    def test_entails_original(self):
        rng = random.Random(10)
        for _ in range(40):
            f = random_formula(rng, 5, props=("x", "y"), negatable=("y",))
            g = continuity_normal_form(f, "x")
            M = random_model(rng, 4, ("a",), ("x", "y"))
            assert evaluate(M, g) <= evaluate(M, f)

    def test_requires_positive(self):
        with pytest.raises(FormulaError):
            continuity_normal_form(P("~x"), "x")


class TestSchemes:
    def test_displayed_schemes(self):
        assert submodel_scheme(["a"])["a"] == P("p /\\ <a> (p /\\ q)")
        assert thomason_scheme()["v"] == P("p /\\ <a> (~p /\\ <a> (~p /\\ <a> (p /\\ q)))")
        assert referee_scheme()["h"] == P("p /\\ <a> (p /\\ q)")

    def test_translate_clauses(self):
        S = thomason_scheme()
        assert translate(P("true"), S) == P("p")
        assert translate(P("false"), S) == P("false")
        assert translate(P("y"), S) == P("p /\\ y")
        assert translate(P("<h> y"), S) == P("p /\\ <a> (p /\\ (p /\\ y))")
        assert translate(P("[h] y"), S) == P("p /\\ (~p \\/ [a] (~p \\/ p /\\ y))")

    def test_translate_errors(self):
        with pytest.raises(FormulaError):
            translate(P("p /\\ <h> y"), thomason_scheme())
        with pytest.raises(FormulaError):
            translate(P("<c> y"), thomason_scheme())

    def test_thomason_translate(self):
        assert thomason_translate(P("true")) == P("<a> [a] false")
        assert thomason_translate(P("y")) == P("<a> [a] false /\\ y")


class TestConstructions:
    def test_master_box(self):
        assert alpha_equal(master_box(P("p")), P("nu z. p /\\ [a] z"))

    def test_master_box_means_reachability(self):
        rng = random.Random(12)
        for _ in range(50):
            M = random_model(rng, rng.randint(1, 5), ("a",), ("p",))
            got = evaluate(M, master_box(P("p")))
            P_ = M.valuation.get("p", frozenset())
            for s in M.states:
                seen, todo = {s}, [s]
                while todo:
                    for t in M.successors(todo.pop(), "a"):
                        if t not in seen:
                            seen.add(t)
                            todo.append(t)
                assert (s in got) == (seen <= P_)

    def test_master_box_top_total(self):
        M = random_model(random.Random(1), 4, ("a",), ())
        assert evaluate(M, master_box(P("true"))) == frozenset(M.states)

    def test_sum_shapes(self):
        sf = sum_formula(P("<a> x"), P("<a> x"))
        assert str(sf.Psi).count("[a] z") == 1
        want_psi = P("~p /\\ <a> x \\/ (p /\\ <a> (p /\\ x)) /\\ [a] (p \\/ x)")
        assert equivalent_on_small_models(sf.psi, want_psi)
        chi0 = sum_formula(P("q \\/ <a> x"), P("<a> x")).chi0
        assert alpha_equal(chi0, P("p \\/ [a] ~p /\\ mu z. q \\/ <a> z"))

    def test_totalize(self):
        t = totalize(P("<a> x"), "x")
        assert alpha_equal(t, P("(nu x. [a] x) \\/ <a> (x /\\ mu x. <a> x)"))
        assert free_vars(t) == {"x"}
        assert totalize(P("<a> x"), "x", variant="implication") == t
