"""Finite Kripke models, denotational evaluation, approximants and bisimulation.

State sets are handled internally as int bitmasks over the model's state
order; the public functions return frozensets of state ids.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .formula import (
    And, Box, Dia, Formula, FormulaError, Mu, NegVar, Nu, Or, Var, _Bot, _Top,
    PositivityViolation, actions as formula_actions, free_vars,
    is_positive_in,
)


class ModelError(ValueError):
    pass


class EvaluationError(FormulaError):
    pass


_ID = re.compile(r"[A-Za-z0-9_.@']+$")


@dataclass(frozen=True, eq=False)
class KripkeModel:
    states: tuple
    relations: Mapping  # action -> frozenset of (s, t)
    valuation: Mapping  # prop -> frozenset of states

    def __post_init__(self):
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise ModelError("duplicate state ids")
        known = set(states)
        rel = {}
        for a, pairs in dict(self.relations).items():
            pairs = frozenset((s, t) for s, t in pairs)
            for s, t in pairs:
                if s not in known or t not in known:
                    raise ModelError(f"edge {s}->{t} of {a!r} uses an undeclared state")
            rel[a] = pairs
        val = {}
        for p, S in dict(self.valuation).items():
            S = frozenset(S)
            if not S <= known:
                raise ModelError(f"valuation of {p!r} uses undeclared states {sorted(S - known)}")
            val[p] = S
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "valuation", val)

    # -- basic views -------------------------------------------------------

    @property
    def actions(self) -> frozenset:
        return frozenset(self.relations)

    @property
    def props(self) -> frozenset:
        return frozenset(self.valuation)

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (set(self.states) == set(other.states)
                and self.relations == other.relations
                and self.valuation == other.valuation)

    __hash__ = None

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def full_mask(self) -> int:
        return (1 << len(self.states)) - 1

    def mask(self, S: Iterable) -> int:
        m = 0
        idx = self.index
        for s in S:
            if s not in idx:
                raise ModelError(f"unknown state {s!r}")
            m |= 1 << idx[s]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(s for i, s in enumerate(self.states) if m >> i & 1)

    @cached_property
    def succ_masks(self) -> dict:
        """action -> list of successor bitmasks, one per state."""
        out = {}
        idx = self.index
        for a, pairs in self.relations.items():
            row = [0] * len(self.states)
            for s, t in pairs:
                row[idx[s]] |= 1 << idx[t]
            out[a] = row
        return out

    @cached_property
    def val_masks(self) -> dict:
        return {p: self.mask(S) for p, S in self.valuation.items()}

    def successors(self, s, a=None) -> frozenset:
        acts = [a] if a is not None else sorted(self.relations)
        return frozenset(t for b in acts for (u, t) in self.relations.get(b, ()) if u == s)

    def dia_mask(self, a, m: int) -> int:
        out = 0
        for i, row in enumerate(self.succ_masks[a]):
            if row & m:
                out |= 1 << i
        return out

    def box_mask(self, a, m: int) -> int:
        out = 0
        for i, row in enumerate(self.succ_masks[a]):
            if not row & ~m:
                out |= 1 << i
        return out

    def with_signature(self, acts=(), props=()) -> KripkeModel:
        """Same model with extra actions/props declared (empty)."""
        rel = dict(self.relations)
        for a in acts:
            rel.setdefault(a, frozenset())
        val = dict(self.valuation)
        for p in props:
            val.setdefault(p, frozenset())
        return KripkeModel(self.states, rel, val)

    def __repr__(self):
        return f"KripkeModel({len(self.states)} states, actions={sorted(self.actions)}, props={sorted(self.props)})"

    def __str__(self):
        return dump_model(self)


def make_model(states, relations=None, valuation=None) -> KripkeModel:
    return KripkeModel(tuple(states), relations or {}, valuation or {})


# --------------------------------------------------------------------------
# evaluation

def eval_mask(M: KripkeModel, f: Formula, env: Mapping[str, int] | None = None) -> int:
    """Denotation of ``f`` as a bitmask; ``env`` overrides the valuation."""
    env = dict(env or {})
    full = M.full_mask
    vals = M.val_masks
    succ = M.succ_masks

    def lookup(n):
        if n in env:
            return env[n]
        if n in vals:
            return vals[n]
        raise EvaluationError(f"variable {n!r} has no value in the model")

    def rows(a):
        if a not in succ:
            raise EvaluationError(f"action {a!r} is not declared in the model")
        return succ[a]

    def iterate(z, b, env, cur):
        # a monotone body stabilises within |S|+1 rounds
        for _ in range(len(M.states) + 2):
            nxt = go(b, {**env, z: cur})
            if nxt == cur:
                return cur
            cur = nxt
        raise EvaluationError(f"iteration for {z!r} does not stabilise; is it used negatively?")

    def go(g, env):
        match g:
            case Var(n):
                return env[n] if n in env else lookup(n)
            case NegVar(n):
                return full & ~(env[n] if n in env else lookup(n))
            case _Top():
                return full
            case _Bot():
                return 0
            case And(l, r):
                return go(l, env) & go(r, env)
            case Or(l, r):
                return go(l, env) | go(r, env)
            case Dia(a, b):
                m = go(b, env)
                out = 0
                for i, row in enumerate(rows(a)):
                    if row & m:
                        out |= 1 << i
                return out
            case Box(a, b):
                m = go(b, env)
                out = 0
                for i, row in enumerate(rows(a)):
                    if not row & ~m:
                        out |= 1 << i
                return out
            case Mu(z, b):
                return iterate(z, b, env, 0)
            case Nu(z, b):
                return iterate(z, b, env, full)
        raise TypeError(g)

    return go(f, env)


def evaluate(M: KripkeModel, f: Formula, env: Mapping[str, Iterable] | None = None) -> frozenset:
    """Set of states satisfying ``f``."""
    menv = {k: M.mask(v) for k, v in (env or {}).items()}
    return M.unmask(eval_mask(M, f, menv))


def eval_at(M: KripkeModel, s, f: Formula, env=None) -> bool:
    return s in evaluate(M, f, env)


def check_signature(M: KripkeModel, f: Formula, bound=()) -> None:
    missing_v = free_vars(f) - M.props - set(bound)
    if missing_v:
        raise EvaluationError(f"variables {sorted(missing_v)} have no value in the model")
    missing_a = formula_actions(f) - M.actions
    if missing_a:
        raise EvaluationError(f"actions {sorted(missing_a)} are not declared in the model")


# --------------------------------------------------------------------------
# approximants

@dataclass(frozen=True)
class IterationTrace:
    """``S0 = {} <= S1 <= ... <= Sk = Sk+1``."""

    sets: tuple

    @property
    def closure_ordinal(self) -> int:
        return len(self.sets) - 2

    @property
    def fixpoint(self) -> frozenset:
        return self.sets[-1]

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, k):
        return self.sets[k]


def approximant_masks(M: KripkeModel, f: Formula, x: str, env=None, limit=None) -> list[int]:
    """Iterates of ``f`` in ``x`` from the empty set until two agree."""
    if not is_positive_in(f, x):
        raise PositivityViolation(f"{x!r} occurs negatively")
    env = dict(env or {})
    cur = 0
    out = [0]
    limit = len(M.states) + 1 if limit is None else limit
    for _ in range(limit + 1):
        nxt = eval_mask(M, f, {**env, x: cur})
        out.append(nxt)
        if nxt == cur:
            return out
        cur = nxt
    raise EvaluationError("approximants did not stabilise; is the formula monotone?")


def approximants(M: KripkeModel, f: Formula, x: str, env=None) -> IterationTrace:
    menv = {k: M.mask(v) for k, v in (env or {}).items()}
    return IterationTrace(tuple(M.unmask(m) for m in approximant_masks(M, f, x, menv)))


def closure_ordinal_on(M: KripkeModel, f: Formula, x: str, env=None) -> int:
    return approximants(M, f, x, env).closure_ordinal


def approximant(M: KripkeModel, f: Formula, x: str, k: int, env=None) -> frozenset:
    """The ``k``-th iterate (constant once stable)."""
    tr = approximants(M, f, x, env)
    return tr.sets[min(k, len(tr.sets) - 1)]


# --------------------------------------------------------------------------
# bisimulation

def bisimulation_partition(M: KripkeModel, props=None, acts=None) -> dict:
    """Coarsest (props, acts)-bisimulation on ``M`` as a map state -> block id."""
    props = sorted(M.props if props is None else props)
    acts = sorted(M.actions if acts is None else acts)
    val = {p: M.valuation.get(p, frozenset()) for p in props}
    succ = {a: {s: [] for s in M.states} for a in acts}
    for a in acts:
        for s, t in M.relations.get(a, ()):
            succ[a][s].append(t)
    block = {s: tuple(s in val[p] for p in props) for s in M.states}
    block = _renumber(block)
    while True:
        sig = {
            s: (block[s],) + tuple(frozenset(block[t] for t in succ[a][s]) for a in acts)
            for s in M.states
        }
        new = _renumber(sig)
        if len(set(new.values())) == len(set(block.values())):
            return new
        block = new


def _renumber(d: dict) -> dict:
    ids = {}
    out = {}
    for s, k in d.items():
        out[s] = ids.setdefault(k, len(ids))
    return out


def bisimilar(M1: KripkeModel, s1, M2: KripkeModel, s2, props=None, acts=None) -> bool:
    """Whether some (props, acts)-bisimulation relates ``s1`` and ``s2``.

    Props default to those declared in either model, actions likewise;
    a prop missing from one model counts as false there.
    """
    props = (M1.props | M2.props) if props is None else frozenset(props)
    acts = (M1.actions | M2.actions) if acts is None else frozenset(acts)
    U = disjoint_union(M1, M2)
    part = bisimulation_partition(U, props, acts)
    return part[_tag(0, s1)] == part[_tag(1, s2)]


def bisimilar_pairs(M1: KripkeModel, M2: KripkeModel, props=None, acts=None) -> list:
    props = (M1.props | M2.props) if props is None else frozenset(props)
    acts = (M1.actions | M2.actions) if acts is None else frozenset(acts)
    part = bisimulation_partition(disjoint_union(M1, M2), props, acts)
    return [(s, t) for s in M1.states for t in M2.states if part[_tag(0, s)] == part[_tag(1, t)]]


def bisimilar_naive(M1, s1, M2, s2, props=None, acts=None) -> bool:
    """Greatest-fixpoint over state pairs; quadratic, used as a test oracle."""
    props = (M1.props | M2.props) if props is None else frozenset(props)
    acts = (M1.actions | M2.actions) if acts is None else frozenset(acts)

    def v(M, s):
        return frozenset(p for p in props if s in M.valuation.get(p, ()))

    R = {(s, t) for s in M1.states for t in M2.states if v(M1, s) == v(M2, t)}
    changed = True
    while changed:
        changed = False
        for s, t in list(R):
            ok = True
            for a in acts:
                ss, ts = M1.successors(s, a), M2.successors(t, a)
                if any(not any((u, w) in R for w in ts) for u in ss) or \
                        any(not any((u, w) in R for u in ss) for w in ts):
                    ok = False
                    break
            if not ok:
                R.discard((s, t))
                changed = True
    return (s1, s2) in R


# --------------------------------------------------------------------------
# constructions

def induced_submodel(M: KripkeModel, S) -> KripkeModel:
    S = frozenset(S)
    if not S <= set(M.states):
        raise ModelError(f"not a subset of the states: {sorted(S - set(M.states))}")
    states = tuple(s for s in M.states if s in S)
    rel = {a: frozenset((s, t) for s, t in pairs if s in S and t in S)
           for a, pairs in M.relations.items()}
    val = {p: V & S for p, V in M.valuation.items()}
    return KripkeModel(states, rel, val)


def is_closed(M: KripkeModel, S) -> bool:
    """No transition leaves ``S``."""
    S = frozenset(S)
    return all(t in S for pairs in M.relations.values() for s, t in pairs if s in S)


def _tag(side: int, s) -> str:
    return f"{'lr'[side]}.{s}"


def disjoint_union(M1: KripkeModel, M2: KripkeModel) -> KripkeModel:
    """States are tagged ``l.s`` and ``r.s``."""
    states = tuple(_tag(0, s) for s in M1.states) + tuple(_tag(1, s) for s in M2.states)
    rel = {}
    for a in M1.actions | M2.actions:
        rel[a] = frozenset((_tag(0, s), _tag(0, t)) for s, t in M1.relations.get(a, ())) | \
            frozenset((_tag(1, s), _tag(1, t)) for s, t in M2.relations.get(a, ()))
    val = {}
    for p in M1.props | M2.props:
        val[p] = frozenset(_tag(0, s) for s in M1.valuation.get(p, ())) | \
            frozenset(_tag(1, s) for s in M2.valuation.get(p, ()))
    return KripkeModel(states, rel, val)


def variant(M: KripkeModel, x: str, S) -> KripkeModel:
    S = frozenset(S)
    if not S <= set(M.states):
        raise ModelError("variant set is not a subset of the states")
    val = dict(M.valuation)
    val[x] = S
    return KripkeModel(M.states, M.relations, val)


def thomason_model(M: KripkeModel, target: str = "a", pit: str = "p0"):
    """Monomodal simulation of an ``{h, v}`` model.

    Returns the model and the embedding ``s -> s.h``.
    """
    extra = M.actions - {"h", "v"}
    if extra:
        raise ModelError(f"expected actions h and v only, found {sorted(extra)}")
    H = {s: f"{s}.h" for s in M.states}
    V = {s: f"{s}.v" for s in M.states}
    states = tuple(H[s] for s in M.states) + tuple(V[s] for s in M.states) + (pit,)
    edges = set()
    for s, t in M.relations.get("h", ()):
        edges.add((H[s], H[t]))
    for s, t in M.relations.get("v", ()):
        edges.add((V[s], V[t]))
    for s in M.states:
        edges.add((V[s], H[s]))
        edges.add((H[s], V[s]))
        edges.add((H[s], pit))
    val = {p: frozenset(H[s] for s in S) | frozenset(V[s] for s in S)
           for p, S in M.valuation.items()}
    return KripkeModel(states, {target: frozenset(edges)}, val), dict(H)


def sum_witness_model(Ma: KripkeModel, Mb: KripkeModel, p: str = "p") -> KripkeModel:
    """Ma and Mb side by side, every Mb state pointing at every Ma state, ``p`` true on Mb."""
    if p in Ma.props or p in Mb.props:
        raise ModelError(f"{p!r} is already valued")
    acts = Ma.actions | Mb.actions
    if len(acts) > 1:
        raise ModelError("sum witness models are monomodal")
    a = next(iter(acts), "a")
    U = disjoint_union(Ma, Mb)
    A = [_tag(0, s) for s in Ma.states]
    B = [_tag(1, s) for s in Mb.states]
    rel = dict(U.relations)
    rel[a] = rel.get(a, frozenset()) | frozenset((s, t) for s in B for t in A)
    val = dict(U.valuation)
    val[p] = frozenset(B)
    return KripkeModel(U.states, rel, val)


def ordinal_chain_model(n: int, x: str = "x") -> KripkeModel:
    """States 0..n-1, an h-loop everywhere, v-edges k+1 -> k."""
    if n < 1:
        raise ModelError("n must be at least 1")
    states = tuple(str(k) for k in range(n))
    h = frozenset((s, s) for s in states)
    v = frozenset((str(k + 1), str(k)) for k in range(n - 1))
    return KripkeModel(states, {"h": h, "v": v}, {x: frozenset()})


def chain_model(n: int, p: str = "p", action: str = "a") -> KripkeModel:
    """``s0 -> s1 -> ... -> s{n-1}`` with ``p`` true at the last state."""
    if n < 1:
        raise ModelError("n must be at least 1")
    states = tuple(f"s{k}" for k in range(n))
    rel = frozenset((states[k], states[k + 1]) for k in range(n - 1))
    return KripkeModel(states, {action: rel}, {p: frozenset((states[-1],))})


def is_acceptable(M: KripkeModel, chi: Formula) -> bool:
    from .transforms import master_box
    return eval_mask(M, master_box(chi, M.actions or ("a",))) == M.full_mask


def random_model(rng: random.Random, n: int, acts=("a",), props=("p",), density=None) -> KripkeModel:
    """Erdos-Renyi style model; ``density`` defaults to a random value per model."""
    states = tuple(f"s{k}" for k in range(n))
    d = rng.random() if density is None else density
    rel = {a: frozenset((s, t) for s in states for t in states if rng.random() < d) for a in acts}
    val = {p: frozenset(s for s in states if rng.random() < 0.5) for p in props}
    return KripkeModel(states, rel, val)


# --------------------------------------------------------------------------
# text format

def dump_model(M: KripkeModel) -> str:
    lines = ["states: " + " ".join(M.states)]
    for a in sorted(M.relations):
        idx = M.index
        pairs = sorted(M.relations[a], key=lambda e: (idx[e[0]], idx[e[1]]))
        lines.append(f"rel {a}: " + ", ".join(f"{s}->{t}" for s, t in pairs))
    for p in sorted(M.valuation):
        lines.append(f"val {p}: " + " ".join(s for s in M.states if s in M.valuation[p]))
    return "\n".join(lines) + "\n"


def load_model(text: str) -> KripkeModel:
    states = None
    rel: dict = {}
    val: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ModelError(f"line {lineno}: expected 'keyword: ...'")
        head = head.split()
        body = body.strip()
        if head == ["states"]:
            states = body.split()
            for s in states:
                if not _ID.match(s):
                    raise ModelError(f"line {lineno}: bad state id {s!r}")
        elif len(head) == 2 and head[0] == "rel":
            pairs = rel.setdefault(head[1], set())
            for item in filter(None, (i.strip() for i in body.split(","))):
                s, arrow, t = item.partition("->")
                if not arrow or not s.strip() or not t.strip():
                    raise ModelError(f"line {lineno}: bad edge {item!r}")
                pairs.add((s.strip(), t.strip()))
        elif len(head) == 2 and head[0] == "val":
            val.setdefault(head[1], set()).update(body.replace(",", " ").split())
        else:
            raise ModelError(f"line {lineno}: unknown keyword {' '.join(head)!r}")
    if states is None:
        raise ModelError("missing 'states:' line")
    return KripkeModel(tuple(states), rel, val)


__all__ = [
    "EvaluationError", "IterationTrace", "KripkeModel", "ModelError",
    "approximant", "approximant_masks", "approximants", "bisimilar",
    "bisimilar_naive", "bisimilar_pairs", "bisimulation_partition",
    "chain_model", "check_signature", "closure_ordinal_on", "disjoint_union",
    "dump_model", "eval_at", "eval_mask", "evaluate", "induced_submodel",
    "is_acceptable", "is_closed", "load_model", "make_model",
    "ordinal_chain_model", "random_model", "sum_witness_model",
    "thomason_model", "variant",
]
