"""Expression text parser.

Grammar (whitespace insensitive):

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' exponent)?
    base     := integer | jet | funcall | ident | '(' expr ')' | '-' factor
    jet      := ident '[' ident (',' ident)* ']'
    funcall  := ident '\\''* '(' expr ')'
    exponent := ['-'] integer | ident | '(' expr ')'   -- integer-linear form

Unary minus binds looser than '^', so -u^2 is -(u^2).  Identifiers are bound
against a signature: coordinates, fields, parameters, constants and function
symbols; anything else is an error.  Parenthesized exponents must normalize
to integer-linear forms in exponent-role constants.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import ExprSyntaxError, UnknownIdentifierError
from .expr import Coordinate, Expr, MultiIndex, Raw, normalize
from .jets import SystemSignature

_OPS = set("+-*/^()[],'")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: SystemSignature):
        self.text = text
        self.sig = sig
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, at = self.peek()
        if kind != "op" or val != value:
            raise ExprSyntaxError(f"expected {value!r}, found {val or kind!r}", at)
        self.advance()

    def at_op(self, *values: str) -> Optional[str]:
        kind, val, _ = self.peek()
        if kind == "op" and val in values:
            return val
        return None

    # -- grammar -----------------------------------------------------------
    def parse(self) -> Raw:
        raw = self.expr()
        kind, val, at = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"trailing input {val!r}", at)
        return raw

    def expr(self) -> Raw:
        node = self.term()
        while True:
            op = self.at_op("+", "-")
            if op is None:
                return node
            self.advance()
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)

    def term(self) -> Raw:
        node = self.factor()
        while True:
            op = self.at_op("*", "/")
            if op is None:
                return node
            self.advance()
            rhs = self.factor()
            node = ("mul" if op == "*" else "div", node, rhs)

    def factor(self) -> Raw:
        node = self.base()
        if self.at_op("^"):
            self.advance()
            return ("pow", node, self.exponent())
        return node

    def exponent(self):
        if self.at_op("-"):
            self.advance()
            kind, val, at = self.peek()
            if kind != "int":
                raise ExprSyntaxError("expected integer exponent", at)
            self.advance()
            return self._chain_exponent(-int(val))
        kind, val, at = self.peek()
        if kind == "int":
            self.advance()
            return self._chain_exponent(int(val))
        if kind == "ident":
            self.advance()
            return ("const", val)
        if self.at_op("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExprSyntaxError("expected integer or parenthesized exponent", at)

    def _chain_exponent(self, value: int):
        # '^' is right-associative; chained integer exponents fold numerically
        if self.at_op("^"):
            self.advance()
            nxt = self.exponent()
            if not isinstance(nxt, int):
                kind, val, at = self.peek()
                raise ExprSyntaxError("chained exponent must be an integer", at)
            return value ** nxt
        return value

    def base(self) -> Raw:
        kind, val, at = self.peek()
        if kind == "int":
            self.advance()
            return ("num", Fraction(int(val)))
        if kind == "op" and val == "-":
            self.advance()
            return ("neg", self.factor())
        if kind == "op" and val == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "ident":
            self.advance()
            return self.ident_tail(val, at)
        raise ExprSyntaxError(f"unexpected token {val or kind!r}", at)

    def ident_tail(self, name: str, at: int) -> Raw:
        sig = self.sig
        if self.at_op("["):
            self.advance()
            dirs = [self.ident_token()]
            while self.at_op(","):
                self.advance()
                dirs.append(self.ident_token())
            self.expect("]")
            if name not in sig.fields and name not in sig.parameters:
                raise UnknownIdentifierError(f"{name!r} is not a field")
            if name in sig.parameters and name not in sig.fields:
                raise UnknownIdentifierError(
                    f"parameter {name!r} has no derivatives before promotion")
            for d in dirs:
                if d not in sig.independents:
                    raise UnknownIdentifierError(f"{d!r} is not a coordinate")
            return ("atom", sig.jet(name, MultiIndex.of(*dirs)))
        primes = 0
        while self.at_op("'"):
            self.advance()
            primes += 1
        if self.at_op("(") and (primes or name in sig.functions):
            if name not in sig.functions:
                raise UnknownIdentifierError(f"{name!r} is not a function symbol")
            self.advance()
            inner = self.expr()
            self.expect(")")
            return ("func", name, primes, inner)
        if primes:
            raise ExprSyntaxError("prime requires a function application", at)
        if name in sig.independents:
            return ("atom", Coordinate(name))
        if name in sig.fields or name in sig.parameters:
            return ("atom", sig.jet(name))
        if any(c.name == name for c in sig.constants):
            return ("const", name)
        raise UnknownIdentifierError(f"unknown identifier {name!r}")

    def ident_token(self) -> str:
        kind, val, at = self.peek()
        if kind != "ident":
            raise ExprSyntaxError("expected identifier", at)
        self.advance()
        return val


def parse_expression(text: str, sig: SystemSignature) -> Expr:
    """Parse and normalize expression text against a signature."""
    raw = _Parser(text, sig).parse()
    return normalize(raw, sig.roles())
