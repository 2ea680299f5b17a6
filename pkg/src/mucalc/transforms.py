"""Formula-to-formula constructions.

Lift/flatten/boxing give the continuity normal form; ``translate`` is the
generic translation along a family of two-variable formulas; the rest
build the closure-ordinal witnesses (master modality, ordinal sum,
total least fixpoint).
"""
from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    BOT, And, Box, Dia, Formula, FormulaError, Mu, NegVar, Nu,
    Or, Var, _Bot, _Top, actions, all_vars, apply_subst, bar_name, bound_vars,
    conj, dualize, flip_literal, free_vars, fresh_name, is_positive_in,
    make_well_named,
)
from .fragments import is_almost_good

DEFAULT_ACTION = "a"


def _require_unbound(f: Formula, names) -> None:
    clash = set(names) & bound_vars(f)
    if clash:
        raise FormulaError(f"variables {sorted(clash)} must not be bound in the formula")


# --------------------------------------------------------------------------
# lift, flatten

def lift_with_name(f: Formula, x: str, bar: str | None = None) -> tuple[Formula, str]:
    """Rename every boxed free occurrence of ``x`` to a fresh ``bar`` variable."""
    _require_unbound(f, [x])
    if bar is None:
        bar = bar_name(x, all_vars(f))

    def go(g):
        match g:
            case Var() | NegVar() | _Top() | _Bot():
                return g
            case And(l, r):
                return And(go(l), go(r))
            case Or(l, r):
                return Or(go(l), go(r))
            case Dia(a, b):
                return Dia(a, go(b))
            case Box(a, b):
                return Box(a, apply_subst(b, {x: Var(bar)}))
            case Mu(z, b):
                return Mu(z, go(b))
            case Nu(z, b):
                return Nu(z, go(b))
        raise TypeError(g)

    return go(f), bar


def lift(f: Formula, x: str) -> Formula:
    return lift_with_name(f, x)[0]


def flatten(f: Formula, x: str) -> Formula:
    """Lift, then replace the boxed copy of ``x`` by false."""
    g, bar = lift_with_name(f, x)
    return apply_subst(g, {bar: BOT})


# --------------------------------------------------------------------------
# boxing

def boxing(f: Formula, X) -> Formula:
    """Equivalent formula in which no occurrence of a variable in ``X`` is very-bad."""
    X = frozenset([X] if isinstance(X, str) else X)
    _require_unbound(f, X)
    return _boxing(make_well_named(f), X)


def _boxing(f: Formula, X: frozenset) -> Formula:
    if is_almost_good(f, X):
        return f
    match f:
        case Dia(a, b):
            return Dia(a, _boxing(b, X))
        case And(l, r):
            return And(_boxing(l, X), _boxing(r, X))
        case Or(l, r):
            return Or(_boxing(l, X), _boxing(r, X))
        case Mu(z, b) | Nu(z, b):
            Q = type(f)
            inner = _boxing(b, X | {z})
            psi2, zbar = lift_with_name(inner, z, bar_name(z, all_vars(inner) | X))
            psi0 = Q(z, psi2)
            psi1 = Q(zbar, psi0)
            return apply_subst(psi0, {zbar: psi1})
    # literals and boxes are always almost-good
    raise AssertionError(f"unexpected very-bad occurrence in {f}")


def continuity_normal_form(f: Formula, x: str) -> Formula:
    """Flattening of the (well-named) boxing of ``f``; lands in C(x)."""
    if not is_positive_in(f, x):
        raise FormulaError(f"{x!r} must occur only positively")
    return flatten(make_well_named(boxing(f, {x})), x)


cnf = continuity_normal_form


# --------------------------------------------------------------------------
# translations

@dataclass(frozen=True)
class TranslationScheme:
    """Per-action formulas over ``p`` and ``q`` describing a sub-structure's modalities."""

    formulas: tuple  # ((action, formula), ...)
    p: str = "p"
    q: str = "q"

    def __post_init__(self):
        for b, g in self.formulas:
            extra = free_vars(g) - {self.p, self.q}
            if extra:
                raise FormulaError(f"scheme formula for {b!r} has extra free variables {sorted(extra)}")
            # p may occur negated (the two-step schemes test for it), q may not
            if not is_positive_in(g, self.q):
                raise FormulaError(f"scheme formula for {b!r} must be positive in {self.q!r}")

    @classmethod
    def of(cls, mapping: dict, p="p", q="q"):
        return cls(tuple(sorted(mapping.items())), p, q)

    def __getitem__(self, b):
        for k, g in self.formulas:
            if k == b:
                return g
        raise KeyError(b)

    @property
    def domain(self):
        return frozenset(k for k, _ in self.formulas)


def submodel_scheme(acts=(DEFAULT_ACTION,), p="p", q="q") -> TranslationScheme:
    P, Q = Var(p), Var(q)
    return TranslationScheme.of({a: And(P, Dia(a, And(P, Q))) for a in acts}, p, q)


def referee_scheme(p="p", q="q", target=DEFAULT_ACTION) -> TranslationScheme:
    P, Q = Var(p), Var(q)
    a = target
    return TranslationScheme.of({
        "h": And(P, Dia(a, And(P, Q))),
        "v": And(P, Dia(a, And(NegVar(p), Dia(a, And(P, Q))))),
    }, p, q)


def thomason_scheme(p="p", q="q", target=DEFAULT_ACTION) -> TranslationScheme:
    P, Q = Var(p), Var(q)
    a = target
    return TranslationScheme.of({
        "h": And(P, Dia(a, And(P, Q))),
        "v": And(P, Dia(a, And(NegVar(p), Dia(a, And(NegVar(p), Dia(a, And(P, Q))))))),
    }, p, q)


def op_formula(g: Formula, q: str) -> Formula:
    """A formula behaving as the negation of ``g[~q/q]``."""
    return flip_literal(dualize(g), q)


def translate(f: Formula, scheme: TranslationScheme) -> Formula:
    p = scheme.p
    if p in all_vars(f):
        raise FormulaError(f"the designated variable {p!r} occurs in the formula")
    unknown = actions(f) - scheme.domain
    if unknown:
        raise FormulaError(f"actions {sorted(unknown)} are not covered by the scheme")
    P = Var(p)
    ops = {b: op_formula(g, scheme.q) for b, g in scheme.formulas}

    def tr(g):
        match g:
            case Var() | NegVar():
                return And(P, g)
            case _Top():
                return P
            case _Bot():
                return BOT
            case And(l, r):
                return And(tr(l), tr(r))
            case Or(l, r):
                return Or(tr(l), tr(r))
            case Dia(b, body):
                return apply_subst(scheme[b], {scheme.q: tr(body)})
            case Box(b, body):
                return And(P, apply_subst(ops[b], {scheme.q: tr(body)}))
            case Mu(z, body):
                return Mu(z, tr(body))
            case Nu(z, body):
                return Nu(z, tr(body))
        raise TypeError(g)

    return tr(f)


PIT_FORMULA = Dia(DEFAULT_ACTION, Box(DEFAULT_ACTION, BOT))


def thomason_translate(f: Formula, p: str = "p") -> Formula:
    """Monomodal formula simulating the bimodal ``f``; ``p`` is replaced by the pit test."""
    if p in all_vars(f):
        p = fresh_name(p, all_vars(f) | {"q"})
    g = translate(f, thomason_scheme(p=p))
    return apply_subst(g, {p: PIT_FORMULA})


# --------------------------------------------------------------------------
# closure-ordinal constructions

def master_box(chi: Formula, acts=(DEFAULT_ACTION,), z: str | None = None) -> Formula:
    """``nu z. (chi /\\ [a] z /\\ ...)``: chi holds at every reachable state."""
    if z is None:
        z = fresh_name("z", all_vars(chi))
    elif z in all_vars(chi):
        raise FormulaError(f"{z!r} is not fresh")
    boxes = [Box(a, Var(z)) for a in sorted(acts)]
    return Nu(z, conj(chi, *boxes))


def _instantiate(f: Formula, x: str, z: str) -> Formula:
    return apply_subst(f, {x: Var(z)})


@dataclass(frozen=True)
class SumFormulas:
    chi: Formula
    psi: Formula
    Psi: Formula
    chi0: Formula
    chi1: Formula

    def __iter__(self):
        return iter((self.chi, self.psi, self.Psi))


def sum_formula(phi0: Formula, phi1: Formula, x: str = "x", p: str = "p") -> SumFormulas:
    """Formulas whose closure ordinal is the sum of those of ``phi0`` and ``phi1``."""
    used = all_vars(phi0) | all_vars(phi1)
    if p in used:
        raise FormulaError(f"{p!r} occurs in the summands")
    acts = actions(phi0) | actions(phi1)
    if len(acts) > 1:
        raise FormulaError("the summands must be monomodal")
    a = next(iter(acts), DEFAULT_ACTION)
    P, nP = Var(p), NegVar(p)
    q = fresh_name("q", used | {p})
    scheme = submodel_scheme((a,), p=p, q=q)
    z = fresh_name("z", used | {p, q, x})

    chi0 = Or(P, And(Box(a, nP), Mu(z, _instantiate(phi0, x, z))))
    chi1 = Or(nP, Mu(z, translate(_instantiate(phi1, x, z), scheme)))
    chi = And(chi0, chi1)
    psi = Or(And(nP, phi0), And(translate(phi1, scheme), Box(a, Or(P, Var(x)))))
    Psi = And(master_box(chi, (a,)), psi)
    return SumFormulas(chi, psi, Psi, chi0, chi1)


def totalize(psi: Formula, x: str, variant: str = "disjunctive") -> Formula:
    """Formula with the same closure ordinal as ``psi`` whose least fixpoint is total.

    ``variant="implication"`` builds the same formula from the implication
    form; in negation normal form the two coincide.
    """
    if not is_positive_in(psi, x):
        raise FormulaError(f"{x!r} must occur only positively")
    lfp = Mu(x, psi)
    shifted = apply_subst(psi, {x: And(Var(x), lfp)})
    if variant == "disjunctive":
        return Or(dualize(lfp), shifted)
    if variant == "implication":
        return implies(lfp, shifted)
    raise ValueError(f"unknown variant {variant!r}")


def implies(a: Formula, b: Formula) -> Formula:
    return Or(dualize(a), b)


__all__ = [
    "PIT_FORMULA", "SumFormulas", "TranslationScheme", "boxing", "cnf",
    "continuity_normal_form", "flatten", "implies", "lift", "lift_with_name",
    "master_box", "op_formula", "referee_scheme", "submodel_scheme",
    "sum_formula", "thomason_scheme", "thomason_translate", "totalize",
    "translate",
]
