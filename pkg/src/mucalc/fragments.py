"""Formula digraph, bad/boxed occurrence classification, and the fragments C(X), C0(X)."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .formula import (
    AddressError, Box, Dia, Formula, FormulaError, Mu, NegVar, Nu, Var,
    _Bot, _Top, And, Or, at, bound_vars, free_occurrences, free_vars,
)


class OccurrenceClass(enum.Enum):
    NOT_BAD = "not-bad"
    BOXED = "boxed"
    VERY_BAD = "very-bad"

    @property
    def is_bad(self) -> bool:
        return self is not OccurrenceClass.NOT_BAD

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FormulaGraph:
    """Syntax tree of a formula plus back edges from bound occurrences to binders.

    Nodes are occurrence addresses; ``labels`` maps each to its subformula.
    """

    formula: Formula
    labels: dict
    tree_edges: tuple
    back_edges: tuple

    @property
    def root(self):
        return ()

    @property
    def nodes(self):
        return tuple(self.labels)

    def successors(self, node):
        return self._succ.get(node, ())

    def __post_init__(self):
        succ = {}
        for a, b in self.tree_edges + self.back_edges:
            succ.setdefault(a, []).append(b)
        object.__setattr__(self, "_succ", {k: tuple(v) for k, v in succ.items()})

    def is_box(self, node) -> bool:
        return isinstance(self.labels[node], Box)

    def bad_nodes(self) -> frozenset:
        """Nodes reachable from the root along a path that visits some box."""
        start = (self.root, self.is_box(self.root))
        seen = {start}
        todo = deque([start])
        while todo:
            node, boxed = todo.popleft()
            for nxt in self.successors(node):
                st = (nxt, boxed or self.is_box(nxt))
                if st not in seen:
                    seen.add(st)
                    todo.append(st)
        return frozenset(n for n, b in seen if b)

    def simple_path(self, node):
        """The unique simple path from the root: the chain of tree ancestors."""
        return [node[:k] for k in range(len(node) + 1)]


def build_graph(f: Formula) -> FormulaGraph:
    labels = {}
    tree = []
    back = []

    def walk(g, addr, env):
        labels[addr] = g
        match g:
            case Var(n) | NegVar(n):
                if n in env:
                    back.append((addr, env[n]))
            case Mu(z, b) | Nu(z, b):
                tree.append((addr, addr + (0,)))
                walk(b, addr + (0,), {**env, z: addr})
            case _:
                for i, c in enumerate(g.children()):
                    tree.append((addr, addr + (i,)))
                    walk(c, addr + (i,), env)

    walk(f, (), {})
    return FormulaGraph(f, labels, tuple(tree), tuple(back))


def _check_free_occurrence(G: FormulaGraph, occ, x):
    g = at(G.formula, occ)
    if not isinstance(g, (Var, NegVar)) or g.name != x:
        raise AddressError(f"{occ!r} does not address an occurrence of {x!r}")
    if occ not in free_occurrences(G.formula, x):
        raise AddressError(f"{occ!r} is a bound occurrence of {x!r}")


def classify_occurrence(G: FormulaGraph, occ, x: str, *, _bad=None) -> OccurrenceClass:
    _check_free_occurrence(G, occ, x)
    bad = G.bad_nodes() if _bad is None else _bad
    if occ not in bad:
        return OccurrenceClass.NOT_BAD
    if any(G.is_box(n) for n in G.simple_path(occ)):
        return OccurrenceClass.BOXED
    return OccurrenceClass.VERY_BAD


def classify_all(f: Formula, X=None) -> list:
    """``(address, variable, class)`` for each free occurrence of a variable in ``X``.

    ``X`` defaults to all free variables.  Sorted by address.
    """
    G = build_graph(f)
    bad = G.bad_nodes()
    names = sorted(free_vars(f) if X is None else X)
    out = []
    for x in names:
        for occ in free_occurrences(f, x):
            out.append((occ, x, classify_occurrence(G, occ, x, _bad=bad)))
    out.sort(key=lambda t: t[0])
    return out


def _check_X(f: Formula, X) -> frozenset:
    X = frozenset([X] if isinstance(X, str) else X)
    clash = X & bound_vars(f)
    if clash:
        raise FormulaError(f"variables {sorted(clash)} are bound in the formula")
    return X


def has_bad_occurrence(f: Formula, X) -> bool:
    X = _check_X(f, X)
    return any(c.is_bad for _, _, c in classify_all(f, X))


def is_almost_good(f: Formula, X) -> bool:
    X = _check_X(f, X)
    return not any(c is OccurrenceClass.VERY_BAD for _, _, c in classify_all(f, X))


def in_C(f: Formula, X) -> bool:
    """Membership in the grammar C(X): boxes only over X-free formulas."""
    return _in_fragment(f, _check_X(f, X), allow_nu=True)


def in_C0(f: Formula, X) -> bool:
    """Membership in C0(X): C(X) without the greatest fixpoint production."""
    return _in_fragment(f, _check_X(f, X), allow_nu=False)


def _in_fragment(f, X, allow_nu):
    if not (free_vars(f) & X):
        return True
    match f:
        case Var():
            return True
        case NegVar():
            return False
        case And(l, r) | Or(l, r):
            return _in_fragment(l, X, allow_nu) and _in_fragment(r, X, allow_nu)
        case Dia(_, b):
            return _in_fragment(b, X, allow_nu)
        case Box():
            return False
        case Mu(z, b):
            return _in_fragment(b, X | {z}, allow_nu)
        case Nu(z, b):
            return allow_nu and _in_fragment(b, X | {z}, allow_nu)
        case _Top() | _Bot():
            return True
    raise TypeError(f)


__all__ = [
    "FormulaGraph", "OccurrenceClass", "build_graph", "classify_all",
    "classify_occurrence", "has_bad_occurrence", "in_C", "in_C0",
    "is_almost_good",
]
