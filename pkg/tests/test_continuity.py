import pytest

from mucalc import parse
from mucalc.continuity import (
    BudgetError, SearchBudget, VerdictKind, check_continuity, enumerate_models,
    find_distinguishing_model, random_model_stream,
)
from mucalc.formula import FormulaError
from mucalc.kripke import dump_model, eval_at
from mucalc.transforms import continuity_normal_form

P = parse


def test_enumeration_counts():
    assert len(list(enumerate_models(["a"], ["p"], 1))) == 4
    assert len(list(enumerate_models(["a"], [], 1))) == 2


def test_stream_deterministic():
    a = [dump_model(M) for M in random_model_stream(["a"], ["p"], 4, 20, seed=3)]
    b = [dump_model(M) for M in random_model_stream(["a"], ["p"], 4, 20, seed=3)]
    assert a == b


class TestFalsifier:
    def test_identical(self):
        r = find_distinguishing_model(P("<a> x"), P("<a> x"))
        assert r.witness is None and r.complete and r.exhaustive_bound == 3

    def test_box(self):
        M, s = find_distinguishing_model(P("[a] x"), P("[a] false")).witness
        assert len(M) <= 2
        assert eval_at(M, s, P("[a] x")) and not eval_at(M, s, P("[a] false"))

    def test_mu_box(self):
        f = P("mu z. x \\/ [a] z")
        M, s = find_distinguishing_model(f, continuity_normal_form(f, "x")).witness
        assert len(M) <= 2
        assert eval_at(M, s, f) and not eval_at(M, s, continuity_normal_form(f, "x"))

    def test_budget_limits(self):
        with pytest.raises(BudgetError):
            find_distinguishing_model(P("<a> x /\\ <b> y /\\ <c> w"), P("true"), SearchBudget(max_actions=2))
        with pytest.raises(BudgetError):
            SearchBudget(max_states=0)


class TestVerdicts:
    def test_grammar_shortcuts(self):
        assert check_continuity(P("<a> x"), "x").kind is VerdictKind.IN_C0
        assert check_continuity(P("nu z. x /\\ <a> z"), "x").kind is VerdictKind.IN_C1

    def test_not_continuous(self):
        v = check_continuity(P("[a] x"), "x")
        assert v.kind is VerdictKind.NOT_CONTINUOUS and v.exit_code == 1
        assert len(v.model) <= 2
        d = v.to_dict()
        assert d["normal_form"] == "[a] false" and "states:" in d["witness_model"]

    def test_equivalent_outside_grammar(self):
        # x is boxed, yet [a] false already forces [a] x
        f = P("[a] x /\\ [a] false")
        v = check_continuity(f, "x")
        assert v.kind is VerdictKind.EQUIVALENT_UP_TO_BOUND and v.exit_code == 0
        assert v.bound == 3

    def test_exhausted(self):
        f = P("[a] x /\\ [a] false")
        v = check_continuity(f, "x", SearchBudget(max_states=6, samples=0))
        assert v.kind is VerdictKind.EXHAUSTED and v.exit_code == 2
        assert v.bound < 6

    def test_negative_rejected(self):
        with pytest.raises(FormulaError):
            check_continuity(P("~x"), "x")
