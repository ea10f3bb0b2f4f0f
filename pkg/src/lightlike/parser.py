"""Infix expression parser and minimal-parenthesis printer.

Grammar (usual precedence, ``^`` right-associative and binding tighter than
unary minus)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | '+' unary | power
    power := atom ('^' unary)?
    atom  := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'
"""
from __future__ import annotations

import re

from .expr import CONSTANTS, FUNCTIONS, BinOp, Call, Const, Expr, Neg, Num, Pow, Var, free_vars


class ParseError(ValueError):
    """Malformed input; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1, source="<string>"):
        self.msg = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text):
    pos, out = 0, []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                out.append(("end", None, len(text)))
                return out
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", column=bad + 1)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text, variables):
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = set(variables)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None, cls=ParseError):
        tok = tok or self.peek()
        raise cls(msg, column=tok[2] + 1)

    def expect(self, op):
        t = self.peek()
        if t[0] == "op" and t[1] == op:
            return self.take()
        what = "end of input" if t[0] == "end" else repr(t[1])
        self.fail(f"expected {op!r} but found {what}")

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            self.fail(f"unexpected {t[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()
            e = BinOp(op[1], e, self.term(), pos=op[2])
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()
            e = BinOp(op[1], e, self.unary(), pos=op[2])
        return e

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Neg(self.unary(), pos=t[2])
        if t[0] == "op" and t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            start = self.peek()
            ex = self.unary()
            if free_vars(ex):
                self.fail("exponent must be a constant expression", start)
            return Pow(base, ex, pos=t[2])
        return base

    def atom(self):
        t = self.take()
        kind, text, pos = t
        if kind == "num":
            return Num(float(text), pos=pos)
        if kind == "name":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if text not in FUNCTIONS:
                    self.fail(f"unknown function {text!r}", t, UnknownIdentifierError)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != 1:
                    self.fail(f"{text}() takes 1 argument, got {len(args)}", t, ArityError)
                return Call(text, args[0], pos=pos)
            if text in CONSTANTS:
                return Const(text, pos=pos)
            if text in self.variables:
                return Var(text, pos=pos)
            if text in FUNCTIONS:
                self.fail(f"function {text!r} needs an argument list", t)
            self.fail(f"unknown identifier {text!r}", t, UnknownIdentifierError)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            self.fail("unexpected end of input", t)
        self.fail(f"unexpected {text!r}", t)


def parse_expr(text: str, variables=("u", "v", "t"), column_offset=0, line=1, source="<string>") -> Expr:
    """Parse ``text``; error columns are shifted by ``column_offset``."""
    try:
        return _Parser(text, variables).parse()
    except ParseError as exc:
        raise type(exc)(exc.msg, line, exc.column + column_offset, source) from None


# -- printing --------------------------------------------------------------------
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG, _POW, _ATOM = 3, 4, 5


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG
    if isinstance(e, Pow):
        return _POW
    if isinstance(e, Num) and e.value < 0:
        return _NEG
    return _ATOM


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def to_text(e: Expr) -> str:
    """Print with the fewest parentheses that parse back to the same tree."""
    if isinstance(e, Num):
        s = format_number(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _prec(e.arg) < _NEG)
    if isinstance(e, Pow):
        return _wrap(e.base, _prec(e.base) <= _POW) + "^" + _wrap(e.exponent, _prec(e.exponent) < _NEG)
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = _wrap(e.left, _prec(e.left) < p)
        right = _wrap(e.right, _prec(e.right) <= p)
        sp = " " if p == 1 else ""
        return f"{left}{sp}{e.op}{sp}{right}"
    raise TypeError(f"cannot print {e!r}")


def _wrap(e, paren):
    s = to_text(e)
    return f"({s})" if paren else s
