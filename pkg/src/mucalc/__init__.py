"""Modal mu-calculus toolkit: continuity fragments, normal forms, Kripke
semantics, parity games and closure-ordinal constructions."""

from .formula import (
    BOT, TOP, And, Box, Dia, Formula, Mu, NegVar, Nu, Or, Substitution, Var,
    alpha_equal, apply_subst, compose_subst, dualize, free_vars, bound_vars,
    is_positive_in, make_well_named,
)
from .syntax import parse, to_text

__version__ = "0.1.0"

__all__ = [
    "BOT", "TOP", "And", "Box", "Dia", "Formula", "Mu", "NegVar", "Nu", "Or",
    "Substitution", "Var", "alpha_equal", "apply_subst", "compose_subst",
    "dualize", "free_vars", "bound_vars", "is_positive_in", "make_well_named",
    "parse", "to_text",
]
