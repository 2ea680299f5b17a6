"""Seeded random formulas and models for property tests and the falsifier."""
from __future__ import annotations

import random

from .formula import BOT, TOP, And, Box, Dia, Formula, Mu, NegVar, Nu, Or, Var
from .kripke import KripkeModel, random_model

BINDER_NAMES = ("z", "w", "u", "t")


def random_formula(
    rng: random.Random,
    max_depth: int,
    actions=("a",),
    props=("x", "y"),
    negatable=None,
    binders=BINDER_NAMES,
    leaf_bias: float = 0.2,
    fixpoint_bias: float = 0.25,
) -> Formula:
    """Random NNF formula of depth at most ``max_depth``.

    ``negatable`` lists the props allowed under negation (all by default).
    Binder names are drawn from ``binders`` and may shadow each other; bound
    variables only occur positively, so every output is well formed.
    """
    props = tuple(props)
    negatable = props if negatable is None else tuple(negatable)
    actions = tuple(actions)

    def leaf(scope):
        opts = [Var(p) for p in props] + [NegVar(p) for p in negatable if p not in scope]
        opts += [Var(z) for z in sorted(scope)] * 2
        opts += [TOP, BOT]
        return rng.choice(opts)

    def go(d, scope):
        if d <= 1 or rng.random() < leaf_bias:
            return leaf(scope)
        r = rng.random()
        if r < fixpoint_bias and binders:
            z = rng.choice(binders)
            Q = Mu if rng.random() < 0.5 else Nu
            return Q(z, go(d - 1, scope | {z}))
        k = rng.randrange(4)
        if k == 0:
            return And(go(d - 1, scope), go(d - 1, scope))
        if k == 1:
            return Or(go(d - 1, scope), go(d - 1, scope))
        a = rng.choice(actions)
        if k == 2:
            return Dia(a, go(d - 1, scope))
        return Box(a, go(d - 1, scope))

    return go(max_depth, frozenset())


def random_models(rng: random.Random, count: int, max_states: int, actions=("a",), props=("x", "y")):
    for _ in range(count):
        n = rng.randint(1, max_states)
        yield random_model(rng, n, actions, props)


def random_subset(rng: random.Random, M: KripkeModel, p: float = 0.5) -> frozenset:
    return frozenset(s for s in M.states if rng.random() < p)


__all__ = ["BINDER_NAMES", "random_formula", "random_models", "random_subset"]
