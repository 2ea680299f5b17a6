"""Symbolic ordinals built from 0, 1, omega, omega_1 and ``+``.

Every such sum has the normal form ``omega_1*a + omega*b + n``.  Adding
omega swallows a finite tail; adding omega_1 swallows every countable tail.
"""
from __future__ import annotations

from dataclasses import dataclass


class OrdinalExpr:
    def __add__(self, other):
        return Sum(self, as_ordinal(other))

    def __radd__(self, other):
        return Sum(as_ordinal(other), self)

    def normal_form(self) -> tuple[int, int, int]:
        """Coefficients ``(a, b, n)`` of ``omega_1*a + omega*b + n``."""
        raise NotImplementedError

    def __eq__(self, other):
        if not isinstance(other, (OrdinalExpr, int)):
            return NotImplemented
        return self.normal_form() == as_ordinal(other).normal_form()

    def __hash__(self):
        return hash(self.normal_form())

    def __lt__(self, other):
        return self.normal_form() < as_ordinal(other).normal_form()

    def __le__(self, other):
        return self.normal_form() <= as_ordinal(other).normal_form()

    @property
    def is_finite(self) -> bool:
        a, b, _ = self.normal_form()
        return a == 0 and b == 0

    @property
    def is_countable(self) -> bool:
        return self.normal_form()[0] == 0


@dataclass(frozen=True, eq=False)
class Const(OrdinalExpr):
    name: str  # "0", "1", "w", "w1"

    def normal_form(self):
        return {"0": (0, 0, 0), "1": (0, 0, 1), "w": (0, 1, 0), "w1": (1, 0, 0)}[self.name]

    def __str__(self):
        return {"0": "0", "1": "1", "w": "ω", "w1": "ω₁"}[self.name]


@dataclass(frozen=True, eq=False)
class Sum(OrdinalExpr):
    left: OrdinalExpr
    right: OrdinalExpr

    def normal_form(self):
        return _add(self.left.normal_form(), self.right.normal_form())

    def __str__(self):
        return f"({self.left}+{self.right})"


ZERO = Const("0")
ONE = Const("1")
OMEGA = Const("w")
OMEGA1 = Const("w1")


def _add(x, y):
    a1, b1, n1 = x
    a2, b2, n2 = y
    if a2:
        return (a1 + a2, b2, n2)
    if b2:
        return (a1, b1 + b2, n2)
    return (a1, b1, n1 + n2)


def as_ordinal(v) -> OrdinalExpr:
    if isinstance(v, OrdinalExpr):
        return v
    if isinstance(v, int) and v >= 0:
        return from_normal_form(0, 0, v)
    raise TypeError(f"not an ordinal: {v!r}")


def from_normal_form(a: int, b: int, n: int) -> OrdinalExpr:
    parts = [OMEGA1] * a + [OMEGA] * b + [ONE] * n
    if not parts:
        return ZERO
    out = parts[0]
    for p in parts[1:]:
        out = Sum(out, p)
    return out


def ord_normalize(e: OrdinalExpr) -> OrdinalExpr:
    """Canonical left-nested sum of the normal form."""
    return from_normal_form(*e.normal_form())


def ord_text(e: OrdinalExpr) -> str:
    a, b, n = e.normal_form()
    parts = []
    for coef, sym in ((a, "ω₁"), (b, "ω")):
        if coef == 1:
            parts.append(sym)
        elif coef:
            parts.append(f"{sym}·{coef}")
    if n or not parts:
        parts.append(str(n))
    return "+".join(parts)


def parse_ordinal(text: str) -> OrdinalExpr:
    """Parse sums such as ``1+w`` or ``w1 + 3`` (``ω``/``ω₁`` also accepted)."""
    out = ZERO
    for tok in text.replace("ω₁", "w1").replace("ω", "w").split("+"):
        tok = tok.strip()
        if tok in ("w", "w1"):
            out = out + Const(tok)
        elif tok.isdigit():
            out = out + as_ordinal(int(tok))
        else:
            raise ValueError(f"bad ordinal term {tok!r}")
    return out


__all__ = [
    "Const", "OMEGA", "OMEGA1", "ONE", "OrdinalExpr", "Sum", "ZERO",
    "as_ordinal", "from_normal_form", "ord_normalize", "ord_text",
    "parse_ordinal",
]
