"""Model-checking parity games and a recursive Zielonka solver.

Conventions: player 0 is Eva, player 1 is Adam.  Infinite plays are won
by Eva iff the largest priority seen infinitely often is even; a player
who cannot move loses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .closure import closure_by_rules, unfold_step
from .formula import (
    And, Box, Dia, Formula, FormulaError, Mu, NegVar, Nu, Or, Var, _Bot, _Top,
    is_well_named, make_well_named,
)
from .kripke import EvaluationError, KripkeModel

EVA, ADAM = 0, 1
PLAYER_NAMES = ("eva", "adam")


@dataclass
class ParityGame:
    """Finite arena.  ``succ[v]`` lists successor indices; dead ends lose for their owner."""

    owner: list
    priority: list
    succ: list
    labels: list = field(default_factory=list)

    def __len__(self):
        return len(self.owner)

    def index_of(self, label) -> int:
        if not hasattr(self, "_index"):
            self._index = {l: i for i, l in enumerate(self.labels)}
        return self._index[label]

    def dual(self) -> ParityGame:
        """Swap the players and shift priorities by one."""
        return ParityGame([1 - o for o in self.owner], [p + 1 for p in self.priority],
                          [list(s) for s in self.succ], list(self.labels))


# --------------------------------------------------------------------------
# rank function

def rank_function(f: Formula) -> dict:
    """Priority of each binder variable of the well-named ``f``.

    Binders are ranked innermost first; each gets the least number of its
    parity (odd for mu, even for nu) not below the ranks of the binders
    nested inside it.
    """
    if not is_well_named(f):
        raise FormulaError("rank functions are defined for well-named formulas")
    ranks: dict = {}

    def go(g) -> int:
        # returns the largest rank of a binder inside g (or -1)
        top = -1
        for c in g.children():
            top = max(top, go(c))
        if isinstance(g, (Mu, Nu)):
            want = 1 if isinstance(g, Mu) else 0
            r = max(top, 0)
            if r % 2 != want:
                r += 1
            ranks[g.var] = r
            return r
        return top

    go(f)
    return ranks


def formula_rank(g: Formula, ranks: dict) -> int:
    """Rank of a closure member: its binder's rank, 0 for everything else."""
    if isinstance(g, (Mu, Nu)):
        return ranks[g.var]
    return 0


# --------------------------------------------------------------------------
# arena

def build_game(M: KripkeModel, f: Formula, env=None) -> ParityGame:
    """Arena on ``states x CL(f)`` with labels ``(state, formula)``."""
    if not is_well_named(f):
        raise FormulaError("build_game needs a well-named formula")
    env = dict(env or {})
    ranks = rank_function(f)
    cl = list(closure_by_rules(f, key=lambda g: g).values())
    for g in cl:
        match g:
            case Var(n) | NegVar(n):
                if n not in env and n not in M.valuation:
                    raise EvaluationError(f"variable {n!r} has no value in the model")
            case Dia(a, _) | Box(a, _):
                if a not in M.relations:
                    raise EvaluationError(f"action {a!r} is not declared in the model")
    labels = [(s, g) for g in cl for s in M.states]
    index = {l: i for i, l in enumerate(labels)}
    owner, prio, succ = [], [], []

    def holds(n, s):
        S = env[n] if n in env else M.valuation[n]
        return s in S

    for s, g in labels:
        moves: list = []
        match g:
            case Var(n):
                who = ADAM if holds(n, s) else EVA
            case NegVar(n):
                who = EVA if holds(n, s) else ADAM
            case _Top():
                who = ADAM
            case _Bot():
                who = EVA
            case Or():
                who = EVA
                moves = [index[(s, h)] for h in unfold_step(g)]
            case And():
                who = ADAM
                moves = [index[(s, h)] for h in unfold_step(g)]
            case Dia(a, b):
                who = EVA
                moves = [index[(t, b)] for t in _succ(M, s, a)]
            case Box(a, b):
                who = ADAM
                moves = [index[(t, b)] for t in _succ(M, s, a)]
            case Mu() | Nu():
                who = EVA if isinstance(g, Mu) else ADAM
                moves = [index[(s, unfold_step(g)[0])]]
            case _:
                raise TypeError(g)
        owner.append(who)
        prio.append(formula_rank(g, ranks))
        succ.append(sorted(set(moves)))
    G = ParityGame(owner, prio, succ, labels)
    G._index = index
    return G


def _succ(M, s, a):
    idx = M.index
    row = M.succ_masks[a][idx[s]]
    return [t for i, t in enumerate(M.states) if row >> i & 1]


# --------------------------------------------------------------------------
# solving

@dataclass
class Solution:
    winner: list          # per position: EVA or ADAM
    strategy: dict        # position -> chosen successor, for the winner's own positions

    def region(self, player) -> frozenset:
        return frozenset(v for v, w in enumerate(self.winner) if w == player)


def _totalise(G: ParityGame):
    """Add two sinks so that every position has a move."""
    n = len(G)
    eva_sink, adam_sink = n, n + 1
    owner = list(G.owner) + [EVA, EVA]
    prio = list(G.priority) + [0, 1]
    succ = [list(s) for s in G.succ] + [[eva_sink], [adam_sink]]
    for v in range(n):
        if not succ[v]:
            succ[v] = [adam_sink if owner[v] == EVA else eva_sink]
    return owner, prio, succ


def _preds(succ):
    pred = [[] for _ in succ]
    for v, ws in enumerate(succ):
        for w in ws:
            pred[w].append(v)
    return pred


def _attractor(V: set, target: set, player: int, owner, succ, pred, strat: dict) -> set:
    """Positions in ``V`` from which ``player`` forces a visit to ``target``."""
    attr = set(target)
    count = {v: sum(1 for w in succ[v] if w in V) for v in V}
    todo = list(target)
    while todo:
        w = todo.pop()
        for v in pred[w]:
            if v not in V or v in attr:
                continue
            if owner[v] == player:
                attr.add(v)
                strat[v] = w
                todo.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    todo.append(v)
    return attr


def _zielonka(V: set, owner, prio, succ, pred):
    """Returns winning regions ``(W0, W1)`` and a strategy map for both players."""
    if not V:
        return set(), set(), {}
    d = max(prio[v] for v in V)
    i = d % 2
    U = {v for v in V if prio[v] == d}
    strat: dict = {}
    A = _attractor(V, U, i, owner, succ, pred, strat)
    W = [None, None]
    W[0], W[1], sub = _zielonka(V - A, owner, prio, succ, pred)
    if not W[1 - i]:
        out = {v: w for v, w in sub.items() if owner[v] == i}
        out.update({v: w for v, w in strat.items() if owner[v] == i})
        for v in U:
            if owner[v] == i and v not in out:
                out[v] = next(w for w in succ[v] if w in V)
        res = [None, None]
        res[i], res[1 - i] = set(V), set()
        return res[0], res[1], out
    strat_b: dict = {}
    Bset = _attractor(V, W[1 - i], 1 - i, owner, succ, pred, strat_b)
    W2 = [None, None]
    W2[0], W2[1], sub2 = _zielonka(V - Bset, owner, prio, succ, pred)
    out = dict(sub2)
    for v in Bset:
        if owner[v] != 1 - i:
            continue
        out[v] = sub[v] if v in W[1 - i] else strat_b[v]
    res = [None, None]
    res[i] = W2[i]
    res[1 - i] = W2[1 - i] | Bset
    return res[0], res[1], out


def solve(G: ParityGame) -> Solution:
    owner, prio, succ = _totalise(G)
    pred = _preds(succ)
    W0, W1, strat = _zielonka(set(range(len(owner))), owner, prio, succ, pred)
    n = len(G)
    winner = [EVA if v in W0 else ADAM for v in range(n)]
    strategy = {v: w for v, w in strat.items() if v < n and w < n and owner[v] == winner[v]}
    return Solution(winner, strategy)


def verify_strategy(G: ParityGame, sol: Solution, player: int) -> bool:
    """Independent check that ``player`` wins its claimed region with its strategy.

    The region must be closed under the strategy and under all opponent
    moves, stuck positions inside it must belong to the opponent, and
    every cycle of the restricted graph must have a winning top priority.
    """
    W = sol.region(player)
    edges = {}
    for v in W:
        if G.owner[v] == player:
            if not G.succ[v]:
                return False
            w = sol.strategy.get(v)
            if w is None or w not in G.succ[v] or w not in W:
                return False
            edges[v] = [w]
        else:
            if any(w not in W for w in G.succ[v]):
                return False
            edges[v] = list(G.succ[v])
    bad_parity = 1 - player
    for d in sorted({G.priority[v] for v in W if G.priority[v] % 2 == bad_parity}):
        sub = {v for v in W if G.priority[v] <= d}
        for c in _sccs(sub, edges):
            if any(G.priority[v] == d for v in c) and _is_cyclic(c, edges):
                return False
    return True


def _sccs(nodes: set, edges: dict):
    """Tarjan's algorithm, iterative."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([w for w in edges.get(root, ()) if w in nodes]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            nxt = next(it, None)
            if nxt is not None:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on.add(nxt)
                    work.append((nxt, iter([w for w in edges.get(nxt, ()) if w in nodes])))
                elif nxt in on:
                    low[v] = min(low[v], index[nxt])
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def _is_cyclic(comp: set, edges: dict) -> bool:
    if len(comp) > 1:
        return True
    (v,) = comp
    return v in edges.get(v, ())


# --------------------------------------------------------------------------
# model checking

def game_denotation(M: KripkeModel, f: Formula, env=None) -> frozenset:
    """States ``s`` such that Eva wins ``(s, f)``."""
    g = f if is_well_named(f) else make_well_named(f)
    G = build_game(M, g, env)
    sol = solve(G)
    return frozenset(s for s in M.states if sol.winner[G.index_of((s, g))] == EVA)


def model_check_via_game(M: KripkeModel, s, f: Formula, env=None) -> bool:
    g = f if is_well_named(f) else make_well_named(f)
    G = build_game(M, g, env)
    return solve(G).winner[G.index_of((s, g))] == EVA


# --------------------------------------------------------------------------
# text dump

def dump_game(G: ParityGame) -> str:
    """One line per position: ``id owner priority state | formula``, then ``id -> ids``."""
    from .syntax import to_text

    lines = [f"positions: {len(G)}"]
    for v, (s, g) in enumerate(G.labels):
        lines.append(f"{v} {PLAYER_NAMES[G.owner[v]]} {G.priority[v]} {s} | {to_text(g)}")
    for v, ws in enumerate(G.succ):
        lines.append(f"{v} -> " + " ".join(map(str, ws)))
    return "\n".join(lines) + "\n"


def load_game(text: str) -> ParityGame:
    from .syntax import parse

    lines = [l for l in text.splitlines() if l.strip()]
    n = int(lines[0].split(":", 1)[1])
    owner, prio, labels, succ = [], [], [], [[] for _ in range(n)]
    for l in lines[1:n + 1]:
        head, _, ftext = l.partition(" | ")
        _, who, p, s = head.split(" ", 3)
        owner.append(PLAYER_NAMES.index(who))
        prio.append(int(p))
        labels.append((s, parse(ftext, reserved=True)))
    for l in lines[n + 1:]:
        v, _, rest = l.partition(" -> ")
        succ[int(v)] = [int(w) for w in rest.split()]
    return ParityGame(owner, prio, succ, labels)


__all__ = [
    "ADAM", "EVA", "ParityGame", "Solution", "build_game", "dump_game",
    "formula_rank", "game_denotation", "load_game", "model_check_via_game",
    "rank_function", "solve", "verify_strategy",
]
