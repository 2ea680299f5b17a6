"""Concrete syntax.

Grammar (loosest to tightest binding)::

    formula := ("mu" | "nu") IDENT "." formula | disj
    disj    := conj ("\\/" conj)*
    conj    := unary ("/\\" unary)*
    unary   := "~" unary | "<" IDENT? ">" unary | "[" IDENT? "]" unary
             | ("mu" | "nu") IDENT "." formula
             | "true" | "false" | IDENT | "(" formula ")"

A fixpoint body extends as far to the right as possible.  ``<>`` and
``[]`` abbreviate the default action ``a``.  ``~`` on anything but a
variable is expanded with :func:`dualize`; the parser records that it did so.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .formula import (
    BOT, TOP, And, Box, Dia, Formula, FormulaError, Mu, NegVar, Nu, Or, Var,
    _Bot, _Top, check_positive_binders, dualize, is_positive_in,
)
from . import formula as _formula

DEFAULT_ACTION = "a"
KEYWORDS = {"mu", "nu", "true", "false"}

_IDENT = r"[A-Za-z][A-Za-z0-9_]*"
_RESERVED_IDENT = r"[A-Za-z][A-Za-z0-9_#]*"


class ParseError(FormulaError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class PositivityViolation(ParseError, _formula.PositivityViolation):
    pass


def _token_re(ident: str) -> re.Pattern:
    return re.compile(
        r"\s*(?:(?P<op>/\\|\\/|~|<|>|\[|\]|\(|\)|\.)|(?P<id>" + ident + r")|(?P<bad>\S))")


_TOKENS = _token_re(_IDENT)
_RESERVED_TOKENS = _token_re(_RESERVED_IDENT)


def _tokenize(text: str, reserved: bool):
    pat = _RESERVED_TOKENS if reserved else _TOKENS
    out = []
    pos = 0
    while True:
        m = pat.match(text, pos)
        if m is None:
            break
        if m.group("bad") is not None:
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        kind = "op" if m.group("op") is not None else "id"
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError("unexpected input", pos)
    out.append(("eof", "", len(text)))
    return out


@dataclass
class Parser:
    text: str
    reserved: bool = False
    negation_macros: int = 0
    _toks: list = field(default_factory=list)
    _i: int = 0

    def parse(self) -> Formula:
        self._toks = _tokenize(self.text, self.reserved)
        self._i = 0
        f = self._formula()
        kind, val, pos = self._peek()
        if kind != "eof":
            raise ParseError(f"unexpected {val!r}", pos)
        return f

    def _peek(self):
        return self._toks[self._i]

    def _next(self):
        t = self._toks[self._i]
        self._i += 1
        return t

    def _expect(self, val):
        kind, v, pos = self._next()
        if v != val or kind != "op":
            raise ParseError(f"expected {val!r}, found {v or 'end of input'!r}", pos)

    def _formula(self):
        kind, val, _ = self._peek()
        if kind == "id" and val in ("mu", "nu"):
            return self._binder()
        return self._disj()

    def _disj(self):
        f = self._conj()
        while self._peek()[1] == "\\/" and self._peek()[0] == "op":
            self._next()
            f = Or(f, self._conj())
        return f

    def _conj(self):
        f = self._unary()
        while self._peek()[1] == "/\\" and self._peek()[0] == "op":
            self._next()
            f = And(f, self._unary())
        return f

    def _binder(self):
        _, q, _ = self._next()
        kind, z, pos = self._next()
        if kind != "id" or z in KEYWORDS:
            raise ParseError("expected a variable after fixpoint operator", pos)
        self._expect(".")
        body = self._formula()
        if not is_positive_in(body, z):
            raise PositivityViolation(f"{z!r} occurs under negation in its {q} body", pos)
        return (Mu if q == "mu" else Nu)(z, body)

    def _modal(self, close, ctor):
        kind, val, pos = self._peek()
        if kind == "op" and val == close:
            self._next()
            return ctor(DEFAULT_ACTION, self._unary())
        if kind != "id" or val in KEYWORDS:
            raise ParseError("expected an action name", pos)
        self._next()
        self._expect(close)
        return ctor(val, self._unary())

    def _unary(self):
        kind, val, pos = self._peek()
        if kind == "op":
            if val == "~":
                self._next()
                inner = self._unary()
                if isinstance(inner, Var):
                    return NegVar(inner.name)
                self.negation_macros += 1
                return dualize(inner)
            if val == "<":
                self._next()
                return self._modal(">", Dia)
            if val == "[":
                self._next()
                return self._modal("]", Box)
            if val == "(":
                self._next()
                f = self._formula()
                self._expect(")")
                return f
            raise ParseError(f"unexpected {val!r}", pos)
        if kind == "id":
            if val in ("mu", "nu"):
                return self._binder()
            self._next()
            if val == "true":
                return TOP
            if val == "false":
                return BOT
            return Var(val)
        raise ParseError("unexpected end of input", pos)


def parse(text: str, *, reserved: bool = False) -> Formula:
    """Parse ``text``; ``reserved=True`` also accepts generated ``#b`` names."""
    f = Parser(text, reserved=reserved).parse()
    check_positive_binders(f)
    return f


# --------------------------------------------------------------------------
# printing

_PREC = {Or: 1, And: 2}


def to_text(f: Formula) -> str:
    """Render ``f`` with the fewest parentheses that reparse to ``f``."""
    return _show(f, 0, True)


def _show(f: Formula, ctx: int, tail: bool) -> str:
    # ctx: binding strength demanded by the context (0 top, 1 or, 2 and, 3 unary)
    # tail: nothing follows this text inside the enclosing group
    match f:
        case Var(n):
            return n
        case NegVar(n):
            return "~" + n
        case _Top():
            return "true"
        case _Bot():
            return "false"
        case Dia(a, b):
            return f"<{a}> " + _show(b, 3, tail)
        case Box(a, b):
            return f"[{a}] " + _show(b, 3, tail)
        case Mu(z, b) | Nu(z, b):
            q = "mu" if isinstance(f, Mu) else "nu"
            text = f"{q} {z}. " + _show(b, 0, True)
            return text if tail else f"({text})"
        case And(l, r) | Or(l, r):
            p = _PREC[type(f)]
            op = " /\\ " if isinstance(f, And) else " \\/ "
            inner_tail = tail or p < ctx
            left = _show(l, p, False)
            right = _show(r, p + 1, inner_tail)
            text = left + op + right
            return f"({text})" if p < ctx else text
    raise TypeError(f)
