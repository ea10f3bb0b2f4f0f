"""Expression trees over the variables u, v, t.

Trees are immutable and compare structurally. They evaluate into floats, numpy
arrays, or jets (the environment decides), and differentiate symbolically.
Evaluation and differentiation memoise on node identity so that shared
subtrees (common after differentiation) are visited once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jets import DIV_TOL, JetDomainError, _Jet

FUNCTIONS = ("sqrt", "sin", "cos", "exp")
CONSTANTS = {"pi": math.pi}


class EvaluationError(ArithmeticError):
    """Domain error while evaluating an expression (carries the offending node)."""

    def __init__(self, message, node=None, point=None):
        self.node = node
        self.point = point
        where = ""
        if node is not None and node.pos >= 0:
            where = f" (at column {node.pos + 1} of the source)"
        at = ""
        if point:
            at = " at " + ", ".join(f"{k}={_short(v)}" for k, v in sorted(point.items()))
        super().__init__(f"{message}{where}{at}")


def _short(v):
    if isinstance(v, _Jet):
        v = v.value
    v = np.asarray(v)
    return f"{float(v):.6g}" if v.ndim == 0 else f"<array {v.shape}>"


class Expr:
    """Base node. Supports +, -, *, /, ** for building trees from Python."""

    __slots__ = ()

    def __add__(self, o):
        return add(self, wrap(o))

    def __radd__(self, o):
        return add(wrap(o), self)

    def __sub__(self, o):
        return sub(self, wrap(o))

    def __rsub__(self, o):
        return sub(wrap(o), self)

    def __mul__(self, o):
        return mul(self, wrap(o))

    def __rmul__(self, o):
        return mul(wrap(o), self)

    def __truediv__(self, o):
        return div(self, wrap(o))

    def __rtruediv__(self, o):
        return div(wrap(o), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        return power(self, wrap(p))


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    name: str
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Expr
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr
    pos: int = field(default=-1, compare=False, repr=False)


ZERO = Num(0.0)
ONE = Num(1.0)
PI = Const("pi")
U, V, T = Var("u"), Var("v"), Var("t")


# -- builders with light constant folding -----------------------------------
def wrap(x) -> Expr:
    if isinstance(x, Expr):
        return x
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite constant")
    return Num(x) if x >= 0 else Neg(Num(-x))


def _num(e):
    """Numeric value of a literal (possibly negated) or None."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Neg) and isinstance(e.arg, Num):
        return -e.arg.value
    return None


def add(a, b):
    x, y = _num(a), _num(b)
    if x == 0.0:
        return b
    if y == 0.0:
        return a
    if x is not None and y is not None:
        return wrap(x + y)
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a, b):
    x, y = _num(a), _num(b)
    if y == 0.0:
        return a
    if x == 0.0:
        return neg(b)
    if x is not None and y is not None:
        return wrap(x - y)
    if isinstance(b, Neg):
        return BinOp("+", a, b.arg)
    return BinOp("-", a, b)


def neg(a):
    x = _num(a)
    if x is not None:
        return wrap(-x)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a, b):
    x, y = _num(a), _num(b)
    if x == 0.0 or y == 0.0:
        return ZERO
    if x == 1.0:
        return b
    if y == 1.0:
        return a
    if x == -1.0:
        return neg(b)
    if y == -1.0:
        return neg(a)
    if x is not None and y is not None:
        return wrap(x * y)
    if isinstance(a, Neg) and isinstance(b, Neg):
        return BinOp("*", a.arg, b.arg)
    if isinstance(a, Neg):
        return Neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return Neg(mul(a, b.arg))
    return BinOp("*", a, b)


def div(a, b):
    x, y = _num(a), _num(b)
    if y == 1.0:
        return a
    if x == 0.0 and y != 0.0:
        return ZERO
    if x is not None and y not in (None, 0.0):
        return wrap(x / y)
    if isinstance(a, Neg):
        return neg(div(a.arg, b))
    if isinstance(b, Neg):
        return neg(div(a, b.arg))
    return BinOp("/", a, b)


def power(a, p):
    y = _num(p)
    if y == 1.0:
        return a
    if y == 0.0:
        return ONE
    return Pow(a, p)


def call(name, a):
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    return Call(name, a)


def sqrt(a):
    return call("sqrt", wrap(a))


def sin(a):
    return call("sin", wrap(a))


def cos(a):
    return call("cos", wrap(a))


def exp(a):
    return call("exp", wrap(a))


# -- queries -----------------------------------------------------------------
def free_vars(e: Expr) -> set:
    seen, out, stack = set(), set(), [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if isinstance(n, Var):
            out.add(n.name)
        stack.extend(_children(n))
    return out


def _children(n):
    if isinstance(n, (Neg, Call)):
        return (n.arg,)
    if isinstance(n, BinOp):
        return (n.left, n.right)
    if isinstance(n, Pow):
        return (n.base, n.exponent)
    return ()


def node_count(e: Expr) -> int:
    """Number of distinct nodes in the DAG."""
    seen, stack = set(), [e]
    while stack:
        n = stack.pop()
        if id(n) not in seen:
            seen.add(id(n))
            stack.extend(_children(n))
    return len(seen)


# -- symbolic differentiation -------------------------------------------------
def diff(e: Expr, var: str, memo=None) -> Expr:
    if memo is None:
        memo = {}
    key = id(e)
    if key in memo:
        return memo[key][1]
    d = _diff(e, var, memo)
    memo[key] = (e, d)  # keep e alive so its id stays unique
    return d


def _diff(e, var, memo):
    if isinstance(e, (Num, Const)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return neg(diff(e.arg, var, memo))
    if isinstance(e, BinOp):
        da, db = diff(e.left, var, memo), diff(e.right, var, memo)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.right), mul(e.left, db))
        if e.op == "/":
            return sub(div(da, e.right), div(mul(e.left, db), power(e.right, Num(2.0))))
    if isinstance(e, Pow):
        if var in free_vars(e.exponent):
            raise ValueError("exponents must be constant")
        db = diff(e.base, var, memo)
        k = _num(e.exponent)
        newexp = wrap(k - 1.0) if k is not None else sub(e.exponent, ONE)
        return mul(mul(e.exponent, power(e.base, newexp)), db)
    if isinstance(e, Call):
        da = diff(e.arg, var, memo)
        if _num(da) == 0.0:
            return ZERO
        if e.func == "sqrt":
            return div(da, mul(Num(2.0), e))
        if e.func == "sin":
            return mul(Call("cos", e.arg), da)
        if e.func == "cos":
            return neg(mul(Call("sin", e.arg), da))
        if e.func == "exp":
            return mul(e, da)
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def vdiff(es, var, memo=None):
    memo = {} if memo is None else memo
    return tuple(diff(e, var, memo) for e in es)


def dot_expr(a, b):
    """Minkowski product of two expression triples."""
    return sub(add(mul(a[1], b[1]), mul(a[2], b[2])), mul(a[0], b[0]))


def cross_expr(a, b):
    """Lorentz cross product of two expression triples."""
    return (
        neg(sub(mul(a[1], b[2]), mul(a[2], b[1]))),
        neg(sub(mul(a[0], b[2]), mul(a[2], b[0]))),
        sub(mul(a[0], b[1]), mul(a[1], b[0])),
    )


# -- evaluation -----------------------------------------------------------------
def _is_jet(x):
    return isinstance(x, _Jet)


def _check_div(b, node, env):
    val = b.value if _is_jet(b) else b
    if np.any(np.abs(val) < DIV_TOL):
        raise EvaluationError("division by zero", node, env)


def _apply(name, x, node, env):
    if _is_jet(x):
        try:
            return getattr(x, name)()
        except JetDomainError as exc:
            raise EvaluationError(str(exc), node, env) from None
    if name == "sqrt":
        if np.any(np.asarray(x) < 0):
            raise EvaluationError("sqrt of a negative value", node, env)
        return np.sqrt(x)
    return getattr(np, name)(x)


def _pow(b, p, node, env):
    if _is_jet(b):
        try:
            return b**p
        except JetDomainError as exc:
            raise EvaluationError(str(exc), node, env) from None
    b = np.asarray(b, dtype=float) if not isinstance(b, float) else b
    if float(p).is_integer():
        if p < 0 and np.any(np.abs(b) < DIV_TOL):
            raise EvaluationError("division by zero in negative power", node, env)
        return b ** int(p) if p >= 0 else 1.0 / b ** int(-p)
    if np.any(np.asarray(b) < 0):
        raise EvaluationError(f"non-integer power {p} of a negative value", node, env)
    return b**p


def evaluate(e: Expr, env: dict, cache=None):
    """Evaluate ``e`` with variables bound in ``env``.

    Values may be floats, numpy arrays or jets; mixing jets with plain numbers
    is fine. ``cache`` may be shared across several calls with the same env.
    """
    if cache is None:
        cache = {}
    key = id(e)
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    r = _eval(e, env, cache)
    cache[key] = (e, r)
    return r


def _eval(e, env, cache):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {e.name!r}", e) from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, env, cache)
    if isinstance(e, BinOp):
        a = evaluate(e.left, env, cache)
        b = evaluate(e.right, env, cache)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            _check_div(b, e, env)
            return a / b
    if isinstance(e, Pow):
        p = evaluate(e.exponent, {}, {})
        if _is_jet(p) or np.ndim(p) != 0:
            raise EvaluationError("exponent must be a constant", e, env)
        return _pow(evaluate(e.base, env, cache), float(p), e, env)
    if isinstance(e, Call):
        return _apply(e.func, evaluate(e.arg, env, cache), e, env)
    raise TypeError(f"unknown node {e!r}")


def evaluate_many(es, env, cache=None):
    cache = {} if cache is None else cache
    return [evaluate(e, env, cache) for e in es]


def constant_value(e: Expr) -> float:
    if free_vars(e):
        raise ValueError("expression is not constant")
    return float(evaluate(e, {}))
