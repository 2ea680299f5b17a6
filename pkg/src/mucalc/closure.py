"""Standard contexts and the Fischer-Ladner style closure ``CL``."""
from __future__ import annotations

from .formula import (
    And, AddressError, Binder, Box, Dia, Formula, FormulaError, Or,
    Substitution, alpha_key, ancestors, apply_chain, apply_subst, at,
    free_vars, is_well_named, occurrences,
)


def standard_context(f: Formula, occ) -> tuple[Substitution, ...]:
    """Composite substitution reinstalling the binders around ``occ``.

    Returned as the chain ``[Qn.zn/zn], ..., [Q1.z1/z1]`` to be applied
    left to right, innermost binder first.  A binder is included when its
    variable is free in the subformula, or free in the body of a binder
    already included (otherwise the unfolded formula would not be closed).
    """
    if not is_well_named(f):
        raise FormulaError("standard contexts are defined for well-named formulas")
    target = at(f, occ)
    binders = [g for _, g in ancestors(f, occ) if isinstance(g, Binder)]
    needed = set(free_vars(target))
    chain = []
    # innermost first; an outer binder is needed if an inner one mentions it
    for g in reversed(binders):
        if g.var in needed:
            chain.append(Substitution(((g.var, g),)))
            needed |= free_vars(g)
    return tuple(chain)


def in_context(f: Formula, occ) -> Formula:
    """``psi . sigma^f_psi`` for the subformula at ``occ``."""
    return apply_chain(at(f, occ), standard_context(f, occ))


def closure(f: Formula) -> dict:
    """``CL(f)`` via standard contexts, keyed by alpha-equivalence class."""
    if not is_well_named(f):
        raise FormulaError("CL is defined for well-named formulas")
    out = {}
    for occ, _ in occurrences(f):
        g = in_context(f, occ)
        out.setdefault(alpha_key(g), g)
    return out


def closure_by_rules(f: Formula, key=alpha_key) -> dict:
    """Least set containing ``f`` and closed under decomposition and unfolding.

    ``key`` decides when two members are the same; the game arena uses
    plain syntactic identity.
    """
    out = {key(f): f}
    todo = [f]
    while todo:
        g = todo.pop()
        for h in unfold_step(g):
            k = key(h)
            if k not in out:
                out[k] = h
                todo.append(h)
    return out


def unfold_step(g: Formula) -> tuple[Formula, ...]:
    """Immediate closure successors of ``g``."""
    if isinstance(g, (And, Or)):
        return (g.left, g.right)
    if isinstance(g, (Dia, Box)):
        return (g.body,)
    if isinstance(g, Binder):
        return (unfold(g),)
    return ()


def unfold(g: Formula) -> Formula:
    """``psi[Q z.psi / z]`` for ``g = Q z.psi``."""
    return apply_subst(g.body, {g.var: g})


def closure_set(f: Formula) -> list[Formula]:
    return list(closure(f).values())


__all__ = [
    "AddressError", "closure", "closure_by_rules", "closure_set",
    "in_context", "standard_context", "unfold", "unfold_step",
]
