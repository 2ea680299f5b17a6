import random

import numpy as np
import pytest

from mucalc import parse
from mucalc.batch import (
    ModelBatch, all_codes, all_models_batch, decode_model, encode_model,
)
from mucalc.formula import Mu, bound_vars, make_well_named
from mucalc.kripke import (
    EvaluationError, ModelError, approximants, bisimilar, bisimilar_naive,
    chain_model, closure_ordinal_on, disjoint_union, dump_model, eval_at,
    evaluate, induced_submodel, is_acceptable, load_model, make_model,
    ordinal_chain_model, random_model, sum_witness_model, thomason_model,
    variant,
)
from mucalc.ordinals import OMEGA, OMEGA1, ONE, ord_normalize, ord_text, parse_ordinal
from mucalc.random_gen import random_formula
from mucalc.transforms import sum_formula, totalize

P = parse


def loop():
    return make_model(["s"], {"a": [("s", "s")]}, {"x": []})


class TestEval:
    def test_vacuous_box(self):
        M = make_model(["s"], {"a": []})
        assert evaluate(M, P("[a] false")) == {"s"}

    def test_reachability(self):
        M = make_model(["s0", "s1", "s2"], {"a": [("s0", "s1"), ("s1", "s2")]}, {"x": ["s2"]})
        assert evaluate(M, P("mu z. x \\/ <a> z")) == {"s0", "s1", "s2"}

    def test_loop_fixpoints(self):
        assert evaluate(loop(), P("nu z. <a> z")) == {"s"}
        assert evaluate(loop(), P("mu z. <a> z")) == set()

    def test_env_and_errors(self):
        M = loop()
        assert evaluate(M, P("<a> y"), {"y": ["s"]}) == {"s"}
        with pytest.raises(EvaluationError):
            evaluate(M, P("y"))
        with pytest.raises(EvaluationError):
            evaluate(M, P("<b> x"))

    def test_non_monotone_body_reported(self):
        from mucalc.formula import NegVar
        M = make_model(["s"], {"a": []})
        with pytest.raises(EvaluationError):
            evaluate(M, Mu("z", NegVar("z")))
        with pytest.raises(EvaluationError):
            ModelBatch.from_models([M]).eval(Mu("z", NegVar("z")))

    def test_model_validation(self):
        with pytest.raises(ModelError):
            make_model(["s"], {"a": [("s", "t")]})
        with pytest.raises(ModelError):
            make_model(["s", "s"])


class TestApproximants:
    def test_chain_trace(self):
        tr = approximants(chain_model(3), P("p \\/ <a> x"), "x")
        assert tr.sets == (set(), {"s2"}, {"s1", "s2"}, {"s0", "s1", "s2"}, {"s0", "s1", "s2"})
        assert tr.closure_ordinal == 3
        assert closure_ordinal_on(chain_model(3), P("p \\/ <a> x"), "x") == 3

    def test_small_traces(self):
        tr = approximants(chain_model(3), P("<a> x"), "x")
        assert list(tr.sets) == [set(), set()] and tr.closure_ordinal == 0
        tr = approximants(chain_model(3), P("true"), "x")
        full = {"s0", "s1", "s2"}
        assert list(tr.sets) == [set(), full, full]

    def test_fixpoint_matches_mu(self):
        rng = random.Random(4)
        for _ in range(100):
            f = random_formula(rng, 5, props=("x", "y"), negatable=("y",))
            M = random_model(rng, rng.randint(1, 5), ("a",), ("y",))
            if "x" in bound_vars(f):
                continue
            assert approximants(M, f, "x").fixpoint == evaluate(M, Mu("x", f))

    def test_ordinal_chain(self):
        phi = P("(nu z. <v> x /\\ <h> z) \\/ [v] false")
        for n in range(1, 6):
            M = ordinal_chain_model(n)
            tr = approximants(M, phi, "x")
            for k in range(n + 1):
                assert tr.sets[k] == {str(i) for i in range(k)}
            assert tr.closure_ordinal == n


class TestBisimulation:
    def test_examples(self):
        M = loop()
        assert bisimilar(M, "s", M, "s")
        two = make_model(["u", "w"], {"a": [("u", "w"), ("w", "u")]}, {"x": []})
        assert bisimilar(M, "s", two, "u")
        diff = make_model(["s"], {"a": [("s", "s")]}, {"x": ["s"]})
        assert not bisimilar(M, "s", diff, "s")
        assert bisimilar(M, "s", diff, "s", props=())

    def test_matches_naive(self):
        rng = random.Random(6)
        for _ in range(60):
            M1 = random_model(rng, rng.randint(1, 4), ("a", "b"), ("p",))
            M2 = random_model(rng, rng.randint(1, 4), ("a", "b"), ("p",))
            for s in M1.states:
                for t in M2.states:
                    assert bisimilar(M1, s, M2, t) == bisimilar_naive(M1, s, M2, t)


class TestConstructions:
    def test_submodel(self):
        M = chain_model(3)
        assert induced_submodel(M, M.states) == M
        assert len(induced_submodel(M, [])) == 0
        sub = induced_submodel(M, ["s0", "s2"])
        assert not sub.successors("s0", "a") and not sub.successors("s2", "a")

    def test_union_and_variant(self):
        M1, M2 = chain_model(2), chain_model(3)
        assert len(disjoint_union(M1, M2)) == 5
        V = variant(M2, "x", ["s1"])
        assert evaluate(V, P("x")) == {"s1"}
        assert V.valuation["p"] == M2.valuation["p"] and V.relations == M2.relations

    def test_thomason_model(self):
        M0 = make_model(["s", "t"], {"h": [("s", "t")], "v": [("t", "s")]}, {"y": ["t"]})
        M, emb = thomason_model(M0)
        assert len(M) == 2 * len(M0) + 1
        for s in M0.states:
            assert f"{s}.v" in M.successors(f"{s}.h", "a")
            assert f"{s}.h" in M.successors(f"{s}.v", "a")
        pit = evaluate(M, P("<a> [a] false"))
        assert set(emb.values()) <= pit
        assert not any(f"{s}.v" in pit for s in M0.states)

    def test_sum_witness(self):
        Ma, Mb = chain_model(2, "q"), chain_model(3, "q")
        M = sum_witness_model(Ma, Mb, "p")
        assert len(M.valuation["p"]) == len(Mb)
        left = [s for s in M.states if s not in M.valuation["p"]]
        for s in M.valuation["p"]:
            assert set(left) <= M.successors(s, "a")
        phi = totalize(P("q \\/ <a> x"), "x")
        sf = sum_formula(phi, phi)
        assert is_acceptable(M, sf.chi)
        assert closure_ordinal_on(M, sf.Psi, "x") == 5

    def test_acceptable(self):
        M = chain_model(3)
        assert is_acceptable(M, P("true"))
        assert not is_acceptable(variant(M, "q", []), P("q"))


class TestModelFormat:
    def test_round_trip(self):
        rng = random.Random(2)
        for _ in range(30):
            M = random_model(rng, rng.randint(1, 5), ("a", "b"), ("p", "q"))
            assert load_model(dump_model(M)) == M

    def test_comments_and_errors(self):
        M = load_model("# demo\nstates: s t\nrel a: s->t  # edge\nval p: t\n")
        assert M.successors("s", "a") == {"t"}
        with pytest.raises(ModelError):
            load_model("rel a: s->t\n")


class TestBatch:
    def test_counts(self):
        assert len(all_codes(1, ["a"], ["p"])) == 4
        assert len(all_codes(1, ["a"], [])) == 2

    def test_encode_decode(self):
        rng = random.Random(0)
        for _ in range(30):
            n = rng.randint(1, 4)
            M = random_model(rng, n, ("a", "b"), ("p",))
            M = make_model([f"s{i}" for i in range(n)],
                           {a: [(f"s{M.states.index(s)}", f"s{M.states.index(t)}") for s, t in r]
                            for a, r in M.relations.items()},
                           {p: [f"s{M.states.index(s)}" for s in v] for p, v in M.valuation.items()})
            assert decode_model(encode_model(M, ("a", "b"), ("p",)), n, ("a", "b"), ("p",)) == M

    def test_matches_single_evaluator(self):
        rng = random.Random(1)
        B = all_models_batch(2, ["a"], ["x", "y"])
        sample = rng.sample(range(len(B.codes)), 40)
        for _ in range(40):
            f = make_well_named(random_formula(rng, 5))
            got = B.eval(f)
            for k in sample[:10]:
                M = B.model(k)
                assert M.unmask(int(got[k])) == evaluate(M, f)

    def test_iso_pruning_preserves_truths(self):
        f = P("mu z. x \\/ <a> z")
        full = ModelBatch.from_codes(3, ["a"], ["x"], all_codes(3, ["a"], ["x"]))
        pruned = ModelBatch.from_codes(3, ["a"], ["x"], all_codes(3, ["a"], ["x"], True))
        assert len(pruned.codes) < len(full.codes)
        counts = lambda B: sorted(set(bin(int(v)).count("1") for v in B.eval(f)))
        assert counts(full) == counts(pruned)
        assert np.all(np.isin(pruned.codes, full.codes))


class TestOrdinals:
    def test_examples(self):
        assert ord_normalize(ONE + OMEGA) == OMEGA
        assert ord_text(OMEGA + ONE) == "ω+1"
        assert ord_normalize(ONE + ONE + OMEGA1) == OMEGA1
        assert parse_ordinal("1+w") == OMEGA

    def test_order(self):
        assert ONE < OMEGA < OMEGA + ONE < OMEGA1
        assert (OMEGA + ONE).is_countable and not OMEGA1.is_countable


def test_eval_at():
    assert eval_at(chain_model(2), "s0", P("<a> p"))
