"""Formula AST for the propositional modal mu-calculus.

Formulas are in negation normal form by construction: negation only
appears on propositional variables (``NegVar``).  All nodes are frozen
dataclasses, so formulas are hashable and can be shared freely.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple[Formula, ...]:
        return ()

    def __str__(self) -> str:
        from .syntax import to_text

        return to_text(self)


@dataclass(frozen=True, eq=True)
class Var(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class NegVar(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class _Top(Formula):
    pass


@dataclass(frozen=True, eq=True)
class _Bot(Formula):
    pass


TOP = _Top()
BOT = _Bot()


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Dia(Formula):
    action: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True)
class Box(Formula):
    action: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True)
class Mu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True)
class Nu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


Binder = (Mu, Nu)
Binary = (And, Or)
Modal = (Dia, Box)

OccAddress = tuple  # sequence of child indices from the root


class FormulaError(ValueError):
    pass


class PositivityViolation(FormulaError):
    pass


class AddressError(FormulaError):
    pass


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction; ``TOP`` for no arguments."""
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def rebuild(f: Formula, kids: Iterable[Formula]) -> Formula:
    """Same connective as ``f`` over new children."""
    kids = tuple(kids)
    match f:
        case And():
            return And(*kids)
        case Or():
            return Or(*kids)
        case Dia(a, _):
            return Dia(a, kids[0])
        case Box(a, _):
            return Box(a, kids[0])
        case Mu(z, _):
            return Mu(z, kids[0])
        case Nu(z, _):
            return Nu(z, kids[0])
    return f


def binder_of(f: Formula):
    return Mu if isinstance(f, Mu) else Nu


# --------------------------------------------------------------------------
# binding structure

def free_vars(f: Formula) -> frozenset[str]:
    match f:
        case Var(n) | NegVar(n):
            return frozenset((n,))
        case Mu(z, b) | Nu(z, b):
            return free_vars(b) - {z}
        case _:
            out: frozenset[str] = frozenset()
            for c in f.children():
                out |= free_vars(c)
            return out


def bound_vars(f: Formula) -> frozenset[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Binder):
            out.add(g.var)
    return frozenset(out)


def all_vars(f: Formula) -> frozenset[str]:
    """Every variable name occurring anywhere, free, bound or binding."""
    out = set()
    for g in subformulas(f):
        match g:
            case Var(n) | NegVar(n) | Mu(n, _) | Nu(n, _):
                out.add(n)
    return frozenset(out)


def actions(f: Formula) -> frozenset[str]:
    return frozenset(g.action for g in subformulas(f) if isinstance(g, Modal))


def is_positive_in(f: Formula, x: str) -> bool:
    """No free occurrence of ``x`` under negation."""
    match f:
        case NegVar(n):
            return n != x
        case Mu(z, b) | Nu(z, b):
            return z == x or is_positive_in(b, x)
        case _:
            return all(is_positive_in(c, x) for c in f.children())


def check_positive_binders(f: Formula) -> None:
    """Raise ``PositivityViolation`` if some binder variable occurs negated."""
    for g in subformulas(f):
        if isinstance(g, Binder) and not is_positive_in(g.body, g.var):
            raise PositivityViolation(
                f"bound variable {g.var!r} occurs under negation")


# --------------------------------------------------------------------------
# traversal

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal of all subformula occurrences."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def sub(f: Formula) -> frozenset[Formula]:
    """``Sub(f)``: the set of subformulas (not occurrences)."""
    return frozenset(subformulas(f))


def occurrences(f: Formula, prefix: OccAddress = ()) -> Iterator[tuple[OccAddress, Formula]]:
    yield prefix, f
    for i, c in enumerate(f.children()):
        yield from occurrences(c, prefix + (i,))


def at(f: Formula, occ: OccAddress) -> Formula:
    g = f
    for i in occ:
        kids = g.children()
        if not isinstance(i, int) or not 0 <= i < len(kids):
            raise AddressError(f"bad address {occ!r}")
        g = kids[i]
    return g


def ancestors(f: Formula, occ: OccAddress) -> list[tuple[OccAddress, Formula]]:
    """Proper ancestors of ``occ``, root first."""
    at(f, occ)
    out = []
    g = f
    for k, i in enumerate(occ):
        out.append((occ[:k], g))
        g = g.children()[i]
    return out


def free_occurrences(f: Formula, x: str) -> list[OccAddress]:
    """Addresses of the free occurrences of ``x`` (positive or negated)."""
    out = []

    def walk(g, addr, bound):
        match g:
            case Var(n) | NegVar(n):
                if n == x and not bound:
                    out.append(addr)
            case Mu(z, b) | Nu(z, b):
                walk(b, addr + (0,), bound or z == x)
            case _:
                for i, c in enumerate(g.children()):
                    walk(c, addr + (i,), bound)

    walk(f, (), False)
    return out


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def depth(f: Formula) -> int:
    kids = f.children()
    return 1 + max((depth(c) for c in kids), default=0)


# --------------------------------------------------------------------------
# names

def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """``base`` followed by the smallest numeric suffix not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = base
    for k in itertools.count(1):
        cand = f"{stem}{k}"
        if cand not in avoid:
            return cand
    raise AssertionError  # pragma: no cover


BAR = "#b"


def bar_name(x: str, avoid: Iterable[str]) -> str:
    """Reserved boxed copy of ``x``: ``x#b``, then ``x#b2``, ``x#b3``..."""
    avoid = set(avoid)
    cand = x + BAR
    k = 1
    while cand in avoid:
        k += 1
        cand = f"{x}{BAR}{k}"
    return cand


# --------------------------------------------------------------------------
# substitution

@dataclass(frozen=True)
class Substitution(Mapping):
    """Finite map from variable names to formulas, applied simultaneously."""

    pairs: tuple[tuple[str, Formula], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.pairs]
        if len(set(names)) != len(names):
            raise FormulaError(f"duplicate names in substitution: {names}")

    @classmethod
    def of(cls, *pairs, **kw) -> Substitution:
        items = list(pairs) + list(kw.items())
        return cls(tuple((n, _coerce(v)) for n, v in items))

    def __getitem__(self, k):
        for n, v in self.pairs:
            if n == k:
                return v
        raise KeyError(k)

    def __iter__(self):
        return (n for n, _ in self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __str__(self):
        from .syntax import to_text

        body = ", ".join(f"{to_text(v)}/{n}" for n, v in self.pairs)
        return f"[{body}]"

    def compose(self, other: Substitution) -> Substitution:
        return compose_subst(self, other)


def _coerce(v):
    if isinstance(v, str):
        return Var(v)
    return v


def apply_subst(f: Formula, sigma: Mapping[str, Formula]) -> Formula:
    """Simultaneous capture-avoiding substitution of free occurrences.

    A bound variable is renamed only if keeping it would capture a free
    variable of an inserted formula.  A negated occurrence ``~y`` is
    replaced by the dual of ``sigma[y]``.
    """
    sigma = {n: _coerce(v) for n, v in dict(sigma).items()}
    if not sigma:
        return f
    return _subst(f, sigma)


def _subst(f: Formula, m: dict) -> Formula:
    match f:
        case Var(n):
            return m.get(n, f)
        case NegVar(n):
            return dualize(m[n]) if n in m else f
        case _Top() | _Bot():
            return f
        case Mu(z, b) | Nu(z, b):
            fv = free_vars(b)
            inner = {k: v for k, v in m.items() if k != z and k in fv}
            if not inner:
                return f
            inserted = set()
            for v in inner.values():
                inserted |= free_vars(v)
            if z in inserted:
                avoid = inserted | all_vars(b) | set(inner)
                z2 = fresh_name(z, avoid)
                inner[z] = Var(z2)
                return type(f)(z2, _subst(b, inner))
            return type(f)(z, _subst(b, inner))
        case _:
            return rebuild(f, (_subst(c, m) for c in f.children()))


def compose_subst(s1: Mapping[str, Formula], s2: Mapping[str, Formula]) -> Substitution:
    """``s1 . s2``: each right-hand side of ``s1`` with ``s2`` applied.

    The domain is that of ``s1``; bindings of ``s2`` outside it are dropped.
    """
    s2 = dict(s2)
    return Substitution(tuple((n, apply_subst(_coerce(v), s2)) for n, v in dict(s1).items()))


def apply_chain(f: Formula, chain: Iterable[Mapping[str, Formula]]) -> Formula:
    """Apply a composite ``s1 . s2 . ... . sn`` left to right."""
    for s in chain:
        f = apply_subst(f, s)
    return f


# --------------------------------------------------------------------------
# renaming and canonical forms

def make_well_named(f: Formula) -> Formula:
    """Alpha-variant where every bound variable has a single binder and
    no bound variable is also free.  Deterministic: binders are visited
    in pre-order, and a clashing name gets the smallest free numeric suffix.
    """
    used = set(all_vars(f))
    taken = set(free_vars(f))

    def walk(g, env):
        match g:
            case Var(n):
                return Var(env.get(n, n))
            case NegVar(n):
                return NegVar(env.get(n, n))
            case Mu(z, b) | Nu(z, b):
                if z in taken:
                    z2 = fresh_name(z, used | taken)
                else:
                    z2 = z
                taken.add(z2)
                used.add(z2)
                return type(g)(z2, walk(b, {**env, z: z2}))
            case _:
                return rebuild(g, (walk(c, env) for c in g.children()))

    return walk(f, {})


def is_well_named(f: Formula) -> bool:
    binders = [g.var for g in subformulas(f) if isinstance(g, Binder)]
    if len(set(binders)) != len(binders):
        return False
    return not (set(binders) & free_vars(f))


def alpha_key(f: Formula):
    """Hashable key identifying ``f`` up to renaming of bound variables.

    Bound occurrences are replaced by the nesting level of their binder.
    """

    def walk(g, env, level):
        match g:
            case Var(n):
                return ("v", env[n]) if n in env else ("V", n)
            case NegVar(n):
                return ("n", env[n]) if n in env else ("N", n)
            case _Top():
                return ("T",)
            case _Bot():
                return ("F",)
            case Mu(z, b):
                return ("mu", walk(b, {**env, z: level}, level + 1))
            case Nu(z, b):
                return ("nu", walk(b, {**env, z: level}, level + 1))
            case Dia(a, b):
                return ("dia", a, walk(b, env, level))
            case Box(a, b):
                return ("box", a, walk(b, env, level))
            case And(l, r):
                return ("and", walk(l, env, level), walk(r, env, level))
            case Or(l, r):
                return ("or", walk(l, env, level), walk(r, env, level))
        raise TypeError(g)

    return walk(f, {}, 0)


def alpha_equal(f: Formula, g: Formula) -> bool:
    return alpha_key(f) == alpha_key(g)


# --------------------------------------------------------------------------
# duality

def dualize(f: Formula, bound: frozenset[str] = frozenset()) -> Formula:
    """NNF formula equivalent to the negation of ``f``.

    Free variables flip polarity; variables bound inside ``f`` stay positive.
    """
    match f:
        case Var(n):
            return f if n in bound else NegVar(n)
        case NegVar(n):
            return Var(n)
        case _Top():
            return BOT
        case _Bot():
            return TOP
        case And(l, r):
            return Or(dualize(l, bound), dualize(r, bound))
        case Or(l, r):
            return And(dualize(l, bound), dualize(r, bound))
        case Dia(a, b):
            return Box(a, dualize(b, bound))
        case Box(a, b):
            return Dia(a, dualize(b, bound))
        case Mu(z, b):
            return Nu(z, dualize(b, bound | {z}))
        case Nu(z, b):
            return Mu(z, dualize(b, bound | {z}))
    raise TypeError(f)


def flip_literal(f: Formula, x: str) -> Formula:
    """Swap ``x`` and ``~x`` on free occurrences of ``x``."""
    match f:
        case Var(n):
            return NegVar(n) if n == x else f
        case NegVar(n):
            return Var(n) if n == x else f
        case Mu(z, b) | Nu(z, b):
            return f if z == x else type(f)(z, flip_literal(b, x))
        case _:
            return rebuild(f, (flip_literal(c, x) for c in f.children()))
