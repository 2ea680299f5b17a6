import pytest

from mucalc import parse, to_text
from mucalc.formula import (
    BOT, TOP, And, Box, Dia, Mu, NegVar, Or, Substitution, Var,
    alpha_equal, apply_subst, bound_vars, compose_subst, dualize, free_vars,
    is_positive_in, is_well_named, make_well_named,
)
from mucalc.syntax import ParseError, PositivityViolation


def P(s):
    return parse(s)


class TestParse:
    def test_basic(self):
        assert P("mu z. x \\/ <a> z") == Mu("z", Or(Var("x"), Dia("a", Var("z"))))

    def test_binder_scope_extends_right(self):
        f = P("mu x. p /\\ q")
        assert isinstance(f, Mu) and isinstance(f.body, And)

    def test_positivity(self):
        with pytest.raises(PositivityViolation):
            P("mu z. ~z")

    def test_negation_macro_dualises(self):
        assert P("~(p /\\ <a> q)") == Or(NegVar("p"), Box("a", NegVar("q")))

    def test_precedence(self):
        assert P("p \\/ q /\\ r") == Or(Var("p"), And(Var("q"), Var("r")))

    @pytest.mark.parametrize("bad", ["", "x \\/", "mu . x", "<a x", "(x", "x y"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            P(bad)

    def test_reserved_names_need_flag(self):
        with pytest.raises(ParseError):
            P("x#b")
        assert parse("x#b", reserved=True) == Var("x#b")


class TestPrint:
    def test_examples(self):
        assert to_text(Mu("z", Or(Var("x"), Dia("a", Var("z"))))) == "mu z. x \\/ <a> z"
        assert to_text(TOP) == "true"
        assert to_text(Box("a", BOT)) == "[a] false"

    @pytest.mark.parametrize("s", [
        "mu z. x \\/ <a> z",
        "(mu z. <a> z) /\\ p",
        "nu z. x /\\ [b] (z \\/ ~y)",
        "(p \\/ q) /\\ r",
        "<a> (mu z. z) \\/ [a] nu w. w",
    ])
    def test_round_trip(self, s):
        f = P(s)
        assert P(to_text(f)) == f


class TestSubstitution:
    def test_simple(self):
        assert apply_subst(P("x \\/ y"), {"x": Var("y")}) == P("y \\/ y")

    def test_capture_avoided(self):
        g = apply_subst(P("mu z. x \\/ <a> z"), {"x": Var("z")})
        assert isinstance(g, Mu) and g.var != "z"
        assert alpha_equal(g, Mu("z1", Or(Var("z"), Dia("a", Var("z1")))))
        assert free_vars(g) == {"z"}

    def test_identity(self):
        f = P("mu z. x \\/ <a> z")
        assert apply_subst(f, {}) == f

    def test_negated_variable_gets_dual(self):
        assert apply_subst(NegVar("x"), {"x": P("p /\\ <a> q")}) == P("~p \\/ [a] ~q")

    def test_simultaneous(self):
        assert apply_subst(P("x /\\ y"), {"x": Var("y"), "y": Var("x")}) == P("y /\\ x")

    def test_compose(self):
        s = compose_subst({"x": P("<a> q")}, {"q": BOT})
        assert s == Substitution.of(("x", P("<a> false")))
        sigma = Substitution.of(("x", Var("y")))
        assert compose_subst(sigma, {}) == sigma
        assert compose_subst({}, sigma) == Substitution.of()

    def test_compose_agrees_with_sequential_application(self):
        # holds when every free variable of f is in the domain of s1
        f = P("x /\\ <a> (x \\/ y)")
        s1, s2 = {"x": P("<a> q"), "y": Var("q")}, {"q": P("[a] r")}
        assert apply_subst(f, compose_subst(s1, s2)) == apply_subst(apply_subst(f, s1), s2)


class TestWellNamed:
    def test_forced_renaming(self):
        g = make_well_named(P("(mu z. <a> z) /\\ (mu z. [a] z)"))
        assert is_well_named(g)
        assert alpha_equal(g, P("(mu z. <a> z) /\\ (mu z. [a] z)"))
        assert g.left.var != g.right.var

    def test_free_bound_clash(self):
        g = make_well_named(P("z /\\ mu z. <a> z"))
        assert g.left == Var("z") and g.right.var != "z"

    def test_unchanged(self):
        f = P("mu z. x \\/ <a> nu w. w /\\ z")
        assert make_well_named(f) == f


class TestDualize:
    def test_de_morgan(self):
        assert dualize(P("p /\\ <a> (p /\\ q)")) == P("~p \\/ [a] (~p \\/ ~q)")

    def test_fixpoint(self):
        assert dualize(P("mu z. x \\/ <a> z")) == P("nu z. ~x /\\ [a] z")

    def test_involution(self):
        f = P("nu w. mu z. (x /\\ <a> z) \\/ [b] (w /\\ ~y)")
        assert dualize(dualize(f)) == f


class TestVariables:
    def test_sets(self):
        assert free_vars(P("mu z. x \\/ <a> z")) == {"x"}
        assert bound_vars(P("mu z. nu w. z /\\ w")) == {"z", "w"}

    def test_positivity(self):
        f = P("~y \\/ x")
        assert is_positive_in(f, "x")
        assert not is_positive_in(f, "y")
