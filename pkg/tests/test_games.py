import random

from hypothesis import given, settings, strategies as st

from mucalc import parse
from mucalc.formula import make_well_named
from mucalc.games import (
    ADAM, EVA, ParityGame, build_game, dump_game, game_denotation, load_game,
    model_check_via_game, rank_function, solve, verify_strategy,
)
from mucalc.kripke import evaluate, make_model, random_model
from mucalc.random_gen import random_formula

P = parse


def loop():
    return make_model(["s"], {"a": [("s", "s")]})


class TestSmallGames:
    def test_nu_loop(self):
        f = P("nu z. <a> z")
        G = build_game(loop(), f)
        # closure has two members, so the arena has two positions
        assert len(G) == 2
        assert solve(G).region(EVA) == frozenset(range(len(G)))

    def test_mu_loop(self):
        G = build_game(loop(), P("mu z. <a> z"))
        assert solve(G).region(ADAM) == frozenset(range(len(G)))

    def test_terminal(self):
        M = loop()
        assert model_check_via_game(M, "s", P("true"))
        assert not model_check_via_game(M, "s", P("false"))

    def test_stuck_eva_loses(self):
        G = ParityGame([EVA], [0], [[]], [("s", "x")])
        assert solve(G).winner == [ADAM]

    def test_even_self_loop(self):
        G = ParityGame([ADAM], [0], [[0]])
        assert solve(G).winner == [EVA]


class TestRanks:
    def test_single_mu_odd(self):
        assert rank_function(P("mu z. <a> z"))["z"] % 2 == 1

    def test_alternation(self):
        r = rank_function(P("nu z. mu w. <a> w \\/ [a] z"))
        assert r["z"] % 2 == 0 and r["w"] % 2 == 1 and r["z"] >= r["w"]

    def test_literals_rank_zero(self):
        G = build_game(loop(), P("nu z. <a> z /\\ true"))
        for v, (s, g) in enumerate(G.labels):
            if g == P("true"):
                assert G.priority[v] == 0


class TestAgreement:
    def test_random(self):
        rng = random.Random(21)
        for _ in range(200):
            f = make_well_named(random_formula(rng, 6, actions=("a", "b")))
            M = random_model(rng, rng.randint(1, 5), ("a", "b"), ("x", "y"))
            assert game_denotation(M, f) == evaluate(M, f)

    def test_strategies_verify(self):
        rng = random.Random(22)
        for _ in range(60):
            f = make_well_named(random_formula(rng, 5))
            M = random_model(rng, rng.randint(1, 4), ("a",), ("x", "y"))
            G = build_game(M, f)
            sol = solve(G)
            assert verify_strategy(G, sol, EVA) and verify_strategy(G, sol, ADAM)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_dual_game_swaps_winners(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 8)
        G = ParityGame([rng.randint(0, 1) for _ in range(n)], [rng.randint(0, 4) for _ in range(n)],
                       [rng.sample(range(n), rng.randint(0, min(2, n))) for _ in range(n)])
        w = solve(G).winner
        assert solve(G.dual()).winner == [1 - x for x in w]


def test_dump_round_trip():
    G = build_game(loop(), P("nu z. <a> z /\\ mu w. [a] w"))
    H = load_game(dump_game(G))
    assert (H.owner, H.priority, [list(s) for s in H.succ]) == (G.owner, G.priority, [list(s) for s in G.succ])
    assert solve(H).winner == solve(G).winner
